use super::ast::{Cond, FromSource, SelectBlock, SelectItem, SqlExpr, SqlQuery};
use super::normalize::output_names;
use crate::data::Schema;
use crate::error::{Error, Result};
use crate::sqlalg::{check_query, Expr, Formula, Query, Select};

fn attr(e: &SqlExpr) -> Result<String> {
    match e {
        SqlExpr::Column { qualifier: Some(q), name, .. } => Ok(format!("{}.{}", q, name)),
        _ => Err(Error::IllFormed(format!("expected a qualified column, found {}", e))),
    }
}

fn expr(e: &SqlExpr) -> Result<Expr> {
    Ok(match e {
        SqlExpr::Const(v) => Expr::Const(v.clone()),
        SqlExpr::Column { .. } => Expr::Attr(attr(e)?),
        SqlExpr::Neg(x) => Expr::Neg(Box::new(expr(x)?)),
        SqlExpr::Arith(op, a, b) => Expr::arith(*op, expr(a)?, expr(b)?),
        SqlExpr::Agg(f, x) => Expr::agg(*f, expr(x)?),
    })
}

fn cond(schema: &Schema, c: &Cond) -> Result<Formula> {
    Ok(match c {
        Cond::True => Formula::True,
        Cond::False => Formula::not(Formula::True),
        Cond::And(a, b) => Formula::and(cond(schema, a)?, cond(schema, b)?),
        Cond::Or(a, b) => Formula::or(cond(schema, a)?, cond(schema, b)?),
        Cond::Not(a) => Formula::not(cond(schema, a)?),
        Cond::Cmp(p, a, b) => Formula::Pred(*p, expr(a)?, expr(b)?),
        Cond::Quant(p, k, e, q) => {
            let name = output_names(q).remove(0);
            Formula::Quant(*p, *k, Select::new(expr(e)?, &name), Box::new(query(schema, q)?))
        }
        Cond::In(es, q) => {
            let sel = es
                .iter()
                .zip(output_names(q))
                .map(|(e, n)| Ok(Select::new(expr(e)?, &n)))
                .collect::<Result<Vec<_>>>()?;
            Formula::In(sel, Box::new(query(schema, q)?))
        }
        Cond::Exists(q) => Formula::exists(query(schema, q)?),
    })
}

fn block(schema: &Schema, b: &SelectBlock) -> Result<Query> {
    let mut input: Option<Query> = None;
    for it in &b.from {
        let alias = it.alias.as_deref().ok_or_else(|| Error::IllFormed("from-item without alias".into()))?;
        let (src, names) = match &it.source {
            FromSource::Table(t) => {
                let ts = schema.table(t).ok_or_else(|| Error::UnknownTable(t.clone()))?;
                (Query::table(t), ts.columns.iter().map(|(c, _)| ts.qualified(c)).collect::<Vec<_>>())
            }
            FromSource::Query(q) => (query(schema, q)?, output_names(q)),
        };
        let cols = it.columns.clone().ok_or_else(|| Error::IllFormed("from-item without columns".into()))?;
        let renaming =
            names.iter().zip(&cols).map(|(n, c)| Select::rename(n, &format!("{}.{}", alias, c))).collect();
        let q = Query::project(renaming, src);
        input = Some(match input {
            None => q,
            Some(acc) => Query::join(acc, q),
        });
    }
    let input = input.ok_or_else(|| Error::IllFormed("empty from clause".into()))?;
    let where_ = cond(schema, b.where_.as_ref().unwrap_or(&Cond::True))?;
    let filtered = Query::filter(where_, input);
    let sel = b
        .items
        .iter()
        .map(|it| match it {
            SelectItem::Expr(e, Some(n)) => Ok(Select::new(expr(e)?, n)),
            _ => Err(Error::IllFormed("select item without a name".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    match &b.having {
        None => Ok(Query::project(sel, filtered)),
        Some(h) => Ok(Query::Group {
            select: sel,
            keys: b.group_by.iter().map(attr).collect::<Result<_>>()?,
            having: cond(schema, h)?,
            input: Box::new(filtered),
        }),
    }
}

fn query(schema: &Schema, q: &SqlQuery) -> Result<Query> {
    use super::ast::SetOp;
    match q {
        SqlQuery::Select(b) => block(schema, b),
        SqlQuery::SetOp(op, _, l, r) => {
            let (l, r) = (Box::new(query(schema, l)?), Box::new(query(schema, r)?));
            Ok(match op {
                SetOp::Union => Query::Union(l, r),
                SetOp::Intersect => Query::Intersect(l, r),
                SetOp::Except => Query::Except(l, r),
            })
        }
    }
}

/// Lowers a normalized query to the algebra and checks the result is
/// well-formed.
pub fn to_sqlalg(q: &SqlQuery, schema: &Schema) -> Result<Query> {
    let out = query(schema, q)?;
    check_query(schema, &[], &out)?;
    Ok(out)
}
