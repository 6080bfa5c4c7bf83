use std::fmt;

use super::ast::{Cond, FromItem, FromSource, SelectBlock, SelectItem, SetOp, SqlExpr, SqlQuery};
use super::parser::is_reserved;
use crate::data::SqlValue;
use crate::sqlalg::{AggFn, Quantifier};

struct Ident<'a>(&'a str);

impl fmt::Display for Ident<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.0;
        let plain = s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            && !is_reserved(s);
        if plain {
            f.write_str(s)
        } else {
            write!(f, "\"{}\"", s.replace('"', "\"\""))
        }
    }
}

fn list<T>(f: &mut fmt::Formatter<'_>, xs: &[T], w: impl Fn(&mut fmt::Formatter<'_>, &T) -> fmt::Result) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        w(f, x)?;
    }
    Ok(())
}

impl fmt::Display for SqlExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SqlExpr::Const(SqlValue::Null) => f.write_str("null"),
            SqlExpr::Const(v) => write!(f, "{}", v),
            SqlExpr::Column { qualifier: Some(q), name, .. } => write!(f, "{}.{}", Ident(q), Ident(name)),
            SqlExpr::Column { qualifier: None, name, .. } => write!(f, "{}", Ident(name)),
            SqlExpr::Neg(x) => write!(f, "(- {})", x),
            SqlExpr::Arith(op, a, b) => write!(f, "({} {} {})", a, op.symbol(), b),
            SqlExpr::Agg(AggFn::CountStar, _) => f.write_str("count(*)"),
            SqlExpr::Agg(g, x) => write!(f, "{}({})", g.name(), x),
        }
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::True => f.write_str("true"),
            Cond::False => f.write_str("false"),
            Cond::And(a, b) => write!(f, "({} and {})", a, b),
            Cond::Or(a, b) => write!(f, "({} or {})", a, b),
            Cond::Not(a) => write!(f, "not ({})", a),
            Cond::Cmp(p, a, b) => write!(f, "({} {} {})", a, p.symbol(), b),
            Cond::Quant(p, k, e, q) => {
                let k = if *k == Quantifier::All { "all" } else { "any" };
                write!(f, "({} {} {} ({}))", e, p.symbol(), k, q)
            }
            Cond::In(es, q) if es.len() == 1 => write!(f, "({} in ({}))", es[0], q),
            Cond::In(es, q) => {
                f.write_str("((")?;
                list(f, es, |f, e| write!(f, "{}", e))?;
                write!(f, ") in ({}))", q)
            }
            Cond::Exists(q) => write!(f, "exists ({})", q),
        }
    }
}

fn from_item(f: &mut fmt::Formatter<'_>, it: &FromItem) -> fmt::Result {
    match &it.source {
        FromSource::Table(t) => write!(f, "{}", Ident(t))?,
        FromSource::Query(q) => write!(f, "({})", q)?,
    }
    if let Some(a) = &it.alias {
        write!(f, " {}", Ident(a))?;
        if let Some(cs) = &it.columns {
            f.write_str("(")?;
            list(f, cs, |f, c| write!(f, "{}", Ident(c)))?;
            f.write_str(")")?;
        }
    }
    Ok(())
}

impl fmt::Display for SelectBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("select ")?;
        list(f, &self.items, |f, it| match it {
            SelectItem::Star(None) => f.write_str("*"),
            SelectItem::Star(Some(q)) => write!(f, "{}.*", Ident(q)),
            SelectItem::Expr(e, None) => write!(f, "{}", e),
            SelectItem::Expr(e, Some(a)) => write!(f, "{} as {}", e, Ident(a)),
        })?;
        f.write_str(" from ")?;
        list(f, &self.from, from_item)?;
        if let Some(c) = &self.where_ {
            write!(f, " where {}", c)?;
        }
        if !self.group_by.is_empty() {
            f.write_str(" group by ")?;
            list(f, &self.group_by, |f, e| write!(f, "{}", e))?;
        }
        if let Some(c) = &self.having {
            write!(f, " having {}", c)?;
        }
        Ok(())
    }
}

impl fmt::Display for SqlQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SqlQuery::Select(b) => write!(f, "{}", b),
            SqlQuery::SetOp(op, all, l, r) => {
                let op = match op {
                    SetOp::Union => "union",
                    SetOp::Intersect => "intersect",
                    SetOp::Except => "except",
                };
                write!(f, "({}) {}{} ({})", l, op, if *all { " all" } else { "" }, r)
            }
        }
    }
}
