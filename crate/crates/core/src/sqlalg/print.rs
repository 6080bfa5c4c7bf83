use std::fmt;

use super::ast::{Expr, Formula, Quantifier, Query, Select};

pub(super) const KEYWORDS: &[&str] = &[
    "pi", "sigma", "gamma", "join", "union", "intersect", "except", "as", "and", "or", "not", "in",
    "all", "any", "exists", "true", "null", "TRUE", "FALSE", "sum", "count", "avg", "min", "max",
    "neg", "nan", "inf",
];

pub(super) fn is_plain_name(s: &str) -> bool {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '$' => {}
        _ => return false,
    }
    cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$' || c == '.')
        && !KEYWORDS.contains(&s)
}

struct Name<'a>(&'a str);

impl fmt::Display for Name<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if is_plain_name(self.0) {
            f.write_str(self.0)
        } else {
            f.write_str(&serde_json::to_string(self.0).unwrap())
        }
    }
}

fn list<T>(f: &mut fmt::Formatter<'_>, xs: &[T], w: impl Fn(&mut fmt::Formatter<'_>, &T) -> fmt::Result) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        w(f, x)?;
    }
    Ok(())
}

fn sel(f: &mut fmt::Formatter<'_>, s: &Select) -> fmt::Result {
    write!(f, "{} as {}", s.expr, Name(&s.name))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write!(f, "{}", v),
            Expr::Attr(a) => write!(f, "{}", Name(a)),
            Expr::Neg(e) => write!(f, "neg({})", e),
            Expr::Arith(op, a, b) => write!(f, "({} {} {})", a, op.symbol(), b),
            Expr::Agg(super::AggFn::CountStar, _) => write!(f, "count(*)"),
            Expr::Agg(g, e) => write!(f, "{}({})", g.name(), e),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::And(a, b) => write!(f, "({} and {})", a, b),
            Formula::Or(a, b) => write!(f, "({} or {})", a, b),
            Formula::Not(a) => write!(f, "not({})", a),
            Formula::Pred(p, a, b) => write!(f, "({} {} {})", a, p.symbol(), b),
            Formula::Quant(p, q, s, sub) => {
                let k = match q {
                    Quantifier::All => "all",
                    Quantifier::Any => "any",
                };
                write!(f, "{}[{}](", k, p.symbol())?;
                sel(f, s)?;
                write!(f, ", {})", sub)
            }
            Formula::In(ss, sub) => {
                write!(f, "in[")?;
                list(f, ss, sel)?;
                write!(f, "]({})", sub)
            }
            Formula::Exists(q) => write!(f, "exists({})", q),
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Empty => write!(f, "()"),
            Query::Table(t) => write!(f, "{}", Name(t)),
            Query::Union(a, b) => write!(f, "union({}, {})", a, b),
            Query::Intersect(a, b) => write!(f, "intersect({}, {})", a, b),
            Query::Except(a, b) => write!(f, "except({}, {})", a, b),
            Query::Join(a, b) => write!(f, "join({}, {})", a, b),
            Query::Project(s, q) => {
                write!(f, "pi[")?;
                list(f, s, sel)?;
                write!(f, "]({})", q)
            }
            Query::Filter(c, q) => write!(f, "sigma[{}]({})", c, q),
            Query::Group { select, keys, having, input } => {
                write!(f, "gamma[")?;
                list(f, select, sel)?;
                write!(f, "; ")?;
                list(f, keys, |f, k| write!(f, "{}", Name(k)))?;
                write!(f, "; {}]({})", having, input)
            }
        }
    }
}
