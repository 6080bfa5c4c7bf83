use std::collections::BTreeSet;

use super::ast::{Cond, FromItem, FromSource, SelectBlock, SelectItem, SqlExpr, SqlQuery};
use crate::data::Schema;
use crate::error::{Error, Result};
use crate::sqlalg::AggFn;

/// A from-item in scope: the name the query uses for it, the fresh alias
/// it is given, and its visible columns.
struct Item {
    visible: String,
    alias: String,
    columns: Vec<String>,
}

struct Norm<'a> {
    schema: &'a Schema,
    next: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum Naming {
    /// Top-level and from-clause queries: derived names are column names.
    Outer,
    /// Sub-queries of predicates: derived names are prefixed by the alias.
    Nested,
}

fn col(alias: &str, name: &str) -> SqlExpr {
    SqlExpr::Column { qualifier: Some(alias.to_string()), name: name.to_string(), line: 0, col: 0 }
}

fn contains_agg(e: &SqlExpr) -> bool {
    match e {
        SqlExpr::Agg(..) => true,
        SqlExpr::Neg(x) => contains_agg(x),
        SqlExpr::Arith(_, a, b) => contains_agg(a) || contains_agg(b),
        _ => false,
    }
}

/// Output names of a normalized query.
pub fn output_names(q: &SqlQuery) -> Vec<String> {
    match q {
        SqlQuery::Select(b) => b
            .items
            .iter()
            .map(|it| match it {
                SelectItem::Expr(_, Some(n)) => n.clone(),
                _ => String::new(),
            })
            .collect(),
        SqlQuery::SetOp(_, _, l, _) => output_names(l),
    }
}

fn rename(q: &mut SqlQuery, names: &[String]) {
    match q {
        SqlQuery::Select(b) => {
            for (it, n) in b.items.iter_mut().zip(names) {
                if let SelectItem::Expr(_, alias) = it {
                    *alias = Some(n.clone());
                }
            }
        }
        SqlQuery::SetOp(_, _, l, r) => {
            rename(l, names);
            rename(r, names);
        }
    }
}

impl Norm<'_> {
    fn fresh(&mut self) -> String {
        let a = format!("t{}", self.next);
        self.next += 1;
        a
    }

    fn query(&mut self, q: &SqlQuery, scopes: &[&[Item]], naming: Naming) -> Result<SqlQuery> {
        match q {
            SqlQuery::Select(b) => self.block(b, scopes, naming),
            SqlQuery::SetOp(op, all, l, r) => {
                let l = self.query(l, scopes, naming)?;
                let mut r = self.query(r, scopes, naming)?;
                let names = output_names(&l);
                if output_names(&r).len() != names.len() {
                    return Err(Error::IllFormed("set operation over queries of different arity".into()));
                }
                rename(&mut r, &names);
                Ok(SqlQuery::SetOp(*op, *all, Box::new(l), Box::new(r)))
            }
        }
    }

    fn source_item(&mut self, f: &FromItem, scopes: &[&[Item]]) -> Result<(FromItem, Item)> {
        let alias = self.fresh();
        let (source, visible, columns) = match &f.source {
            FromSource::Table(t) => {
                let ts = self.schema.table(t).ok_or_else(|| Error::UnknownTable(t.clone()))?;
                let cols = ts.columns.iter().map(|(c, _)| c.clone()).collect();
                (FromSource::Table(t.clone()), f.alias.clone().unwrap_or_else(|| t.clone()), cols)
            }
            FromSource::Query(q) => {
                let nq = self.query(q, scopes, Naming::Outer)?;
                let cols = output_names(&nq);
                (FromSource::Query(nq), f.alias.clone().unwrap_or_else(|| alias.clone()), cols)
            }
        };
        let columns = match &f.columns {
            Some(cs) if cs.len() != columns.len() => {
                return Err(Error::IllFormed(format!(
                    "`{}` has {} columns but {} names were given",
                    visible,
                    columns.len(),
                    cs.len()
                )))
            }
            Some(cs) => cs.clone(),
            None => columns,
        };
        let mut seen = BTreeSet::new();
        for c in &columns {
            if !seen.insert(c) {
                return Err(Error::AmbiguousColumn(format!("{}.{}", visible, c)));
            }
        }
        let nf = FromItem {
            source,
            alias: Some(alias.clone()),
            columns: Some(columns.clone()),
            line: f.line,
            col: f.col,
        };
        Ok((nf, Item { visible, alias, columns }))
    }

    fn block(&mut self, b: &SelectBlock, scopes: &[&[Item]], naming: Naming) -> Result<SqlQuery> {
        let mut from = Vec::new();
        let mut items: Vec<Item> = Vec::new();
        for f in &b.from {
            let (nf, it) = self.source_item(f, scopes)?;
            if items.iter().any(|x| x.visible == it.visible) {
                return Err(Error::IllFormed(format!("`{}` appears twice in the from clause", it.visible)));
            }
            from.push(nf);
            items.push(it);
        }
        let mut inner: Vec<&[Item]> = scopes.to_vec();
        inner.push(&items);
        let where_ = match &b.where_ {
            Some(c) => self.cond(c, &inner)?,
            None => Cond::True,
        };
        let group_by = b.group_by.iter().map(|e| resolve_expr(e, &inner)).collect::<Result<Vec<_>>>()?;
        let having = b.having.as_ref().map(|c| self.cond(c, &inner)).transpose()?;

        // expand stars and resolve expressions, keeping explicit names
        let mut sel: Vec<(SqlExpr, Option<String>, String)> = Vec::new();
        for it in &b.items {
            match it {
                SelectItem::Star(q) => {
                    let chosen: Vec<&Item> = match q {
                        None => items.iter().collect(),
                        Some(q) => vec![items
                            .iter()
                            .find(|x| &x.visible == q)
                            .ok_or_else(|| Error::UnknownTable(q.clone()))?],
                    };
                    for x in chosen {
                        for c in &x.columns {
                            let base = match naming {
                                Naming::Outer => c.clone(),
                                Naming::Nested => format!("{}_{}", x.alias, c),
                            };
                            sel.push((col(&x.alias, c), None, base));
                        }
                    }
                }
                SelectItem::Expr(e, alias) => {
                    let ne = resolve_expr(e, &inner)?;
                    let base = match (&ne, naming) {
                        (SqlExpr::Column { name, .. }, Naming::Outer) => name.clone(),
                        (SqlExpr::Column { qualifier: Some(q), name, .. }, Naming::Nested) => {
                            format!("{}_{}", q, name)
                        }
                        (SqlExpr::Agg(f, _), _) => f.name().to_string(),
                        _ => format!("col{}", sel.len() + 1),
                    };
                    sel.push((ne, alias.clone(), base));
                }
            }
        }
        let mut taken = BTreeSet::new();
        for (_, a, _) in &sel {
            if let Some(a) = a {
                if !taken.insert(a.clone()) {
                    return Err(Error::DuplicateOutput(a.clone()));
                }
            }
        }
        let mut out_items = Vec::new();
        for (e, a, base) in sel {
            let name = match a {
                Some(a) => a,
                None => {
                    let mut n = base.clone();
                    let mut k = 1;
                    while taken.contains(&n) {
                        n = format!("{}_{}", base, k);
                        k += 1;
                    }
                    taken.insert(n.clone());
                    n
                }
            };
            out_items.push(SelectItem::Expr(e, Some(name)));
        }
        let grouped = !group_by.is_empty()
            || having.is_some()
            || out_items.iter().any(|it| matches!(it, SelectItem::Expr(e, _) if contains_agg(e)));
        Ok(SqlQuery::Select(Box::new(SelectBlock {
            items: out_items,
            from,
            where_: Some(where_),
            group_by,
            having: if grouped { Some(having.unwrap_or(Cond::True)) } else { None },
            line: b.line,
            col: b.col,
        })))
    }

    fn cond(&mut self, c: &Cond, scopes: &[&[Item]]) -> Result<Cond> {
        let sub = |n: &mut Self, q: &SqlQuery| -> Result<Box<SqlQuery>> {
            Ok(Box::new(n.query(q, scopes, Naming::Nested)?))
        };
        Ok(match c {
            Cond::True => Cond::True,
            Cond::False => Cond::False,
            Cond::And(a, b) => Cond::And(Box::new(self.cond(a, scopes)?), Box::new(self.cond(b, scopes)?)),
            Cond::Or(a, b) => Cond::Or(Box::new(self.cond(a, scopes)?), Box::new(self.cond(b, scopes)?)),
            Cond::Not(a) => Cond::Not(Box::new(self.cond(a, scopes)?)),
            Cond::Cmp(p, a, b) => Cond::Cmp(*p, resolve_expr(a, scopes)?, resolve_expr(b, scopes)?),
            Cond::Quant(p, k, e, q) => {
                let e = resolve_expr(e, scopes)?;
                let q = sub(self, q)?;
                if output_names(&q).len() != 1 {
                    return Err(Error::IllFormed("a quantified sub-query must return one column".into()));
                }
                Cond::Quant(*p, *k, e, q)
            }
            Cond::In(es, q) => {
                let es = es.iter().map(|e| resolve_expr(e, scopes)).collect::<Result<Vec<_>>>()?;
                let q = sub(self, q)?;
                if output_names(&q).len() != es.len() {
                    return Err(Error::IllFormed(format!(
                        "`in` compares {} values with a sub-query of {} columns",
                        es.len(),
                        output_names(&q).len()
                    )));
                }
                Cond::In(es, q)
            }
            Cond::Exists(q) => Cond::Exists(sub(self, q)?),
        })
    }
}

fn resolve_column(qualifier: &Option<String>, name: &str, scopes: &[&[Item]]) -> Result<SqlExpr> {
    for scope in scopes.iter().rev() {
        match qualifier {
            Some(q) => {
                if let Some(it) = scope.iter().find(|i| &i.visible == q) {
                    if it.columns.iter().any(|c| c == name) {
                        return Ok(col(&it.alias, name));
                    }
                    return Err(Error::UnknownColumn(format!("{}.{}", q, name)));
                }
            }
            None => {
                let hits: Vec<&Item> = scope.iter().filter(|i| i.columns.iter().any(|c| c == name)).collect();
                match hits.len() {
                    0 => {}
                    1 => return Ok(col(&hits[0].alias, name)),
                    _ => return Err(Error::AmbiguousColumn(name.to_string())),
                }
            }
        }
    }
    Err(Error::UnknownColumn(match qualifier {
        Some(q) => format!("{}.{}", q, name),
        None => name.to_string(),
    }))
}

fn resolve_expr(e: &SqlExpr, scopes: &[&[Item]]) -> Result<SqlExpr> {
    Ok(match e {
        SqlExpr::Const(v) => SqlExpr::Const(v.clone()),
        SqlExpr::Column { qualifier, name, .. } => resolve_column(qualifier, name, scopes)?,
        SqlExpr::Neg(x) => SqlExpr::Neg(Box::new(resolve_expr(x, scopes)?)),
        SqlExpr::Arith(op, a, b) => {
            SqlExpr::Arith(*op, Box::new(resolve_expr(a, scopes)?), Box::new(resolve_expr(b, scopes)?))
        }
        SqlExpr::Agg(AggFn::CountStar, x) => SqlExpr::Agg(AggFn::CountStar, x.clone()),
        SqlExpr::Agg(f, x) => SqlExpr::Agg(*f, Box::new(resolve_expr(x, scopes)?)),
    })
}

/// Rewrites a query into canonical form: every from-item gets a fresh alias
/// `t0, t1, …` with explicit column names, columns are qualified by those
/// aliases, `where` is explicit and every output is named.
pub fn normalize(q: &SqlQuery, schema: &Schema) -> Result<SqlQuery> {
    let mut n = Norm { schema, next: 0 };
    n.query(q, &[], Naming::Outer)
}
