use std::collections::BTreeSet;

use super::ast::{Expr, Formula, Query, Select};
use crate::data::Schema;
use crate::error::{Error, Result};

/// The compile-time part of a slice: its attributes and grouping attributes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StaticSlice {
    pub attrs: BTreeSet<String>,
    pub groups: Vec<String>,
}

impl StaticSlice {
    pub fn new(attrs: impl IntoIterator<Item = String>, groups: Vec<String>) -> StaticSlice {
        StaticSlice { attrs: attrs.into_iter().collect(), groups }
    }
}

fn ill(msg: impl Into<String>) -> Error {
    Error::IllFormed(msg.into())
}

/// The attribute names carried by the result of `q`.
pub fn sort_of(schema: &Schema, q: &Query) -> Result<BTreeSet<String>> {
    Ok(match q {
        Query::Empty => BTreeSet::new(),
        Query::Table(t) => {
            let ts = schema.table(t).ok_or_else(|| Error::UnknownTable(t.clone()))?;
            ts.columns.iter().map(|(c, _)| ts.qualified(c)).collect()
        }
        Query::Union(a, _) | Query::Intersect(a, _) | Query::Except(a, _) => sort_of(schema, a)?,
        Query::Join(a, b) => {
            let mut s = sort_of(schema, a)?;
            s.extend(sort_of(schema, b)?);
            s
        }
        Query::Project(sel, _) | Query::Group { select: sel, .. } => {
            sel.iter().map(|s| s.name.clone()).collect()
        }
        Query::Filter(_, q) => sort_of(schema, q)?,
    })
}

/// `e` is built upon `g` when it only combines constants and members of `g`.
pub fn is_built_upon(g: &BTreeSet<&str>, e: &Expr) -> bool {
    match e {
        Expr::Const(_) => true,
        Expr::Attr(a) => g.contains(a.as_str()),
        Expr::Neg(x) => is_built_upon(g, x),
        Expr::Arith(_, a, b) => is_built_upon(g, a) && is_built_upon(g, b),
        Expr::Agg(..) => false,
    }
}

/// Static counterpart of `find_eval_env`. Slices are ordered bottom first;
/// the result is the length of the selected prefix, whose last slice is
/// the one an aggregate over `e` folds over.
pub fn find_eval_index(slices: &[StaticSlice], e: &Expr) -> Option<usize> {
    if let Expr::Const(_) = e {
        return Some(slices.len());
    }
    let n = slices.len();
    if n == 0 {
        return None;
    }
    if let Some(k) = find_eval_index(&slices[..n - 1], e) {
        return Some(k);
    }
    let mut g: BTreeSet<&str> = slices[n - 1].attrs.iter().map(String::as_str).collect();
    for s in &slices[..n - 1] {
        g.extend(s.groups.iter().map(String::as_str));
    }
    if is_built_upon(&g, e) { Some(n) } else { None }
}

#[derive(Clone)]
struct Frame {
    slice: StaticSlice,
    grouped: bool,
}

/// Checks that `q` is well-formed under the static environment `env`
/// (bottom first, `grouped` flags marking slices introduced by γ) and
/// returns its sort.
///
/// Attributes must resolve; an attribute read outside an aggregate from a
/// grouped slice must be one of its grouping attributes; aggregates may not
/// nest and must fold over a grouped slice; set operations need equal
/// sorts, joins disjoint ones, and output names must be distinct.
pub fn check_query(schema: &Schema, env: &[(StaticSlice, bool)], q: &Query) -> Result<BTreeSet<String>> {
    let frames: Vec<Frame> =
        env.iter().map(|(s, g)| Frame { slice: s.clone(), grouped: *g }).collect();
    check_q(schema, &frames, q)
}

fn push(env: &[Frame], attrs: BTreeSet<String>, groups: Vec<String>, grouped: bool) -> Vec<Frame> {
    let mut v = env.to_vec();
    v.push(Frame { slice: StaticSlice { attrs, groups }, grouped });
    v
}

fn check_names(sel: &[Select]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for s in sel {
        if !seen.insert(&s.name) {
            return Err(Error::DuplicateOutput(s.name.clone()));
        }
    }
    Ok(())
}

fn check_q(schema: &Schema, env: &[Frame], q: &Query) -> Result<BTreeSet<String>> {
    match q {
        Query::Empty | Query::Table(_) => sort_of(schema, q),
        Query::Union(a, b) | Query::Intersect(a, b) | Query::Except(a, b) => {
            let sa = check_q(schema, env, a)?;
            let sb = check_q(schema, env, b)?;
            if sa != sb {
                return Err(ill(format!("set operation over different sorts {:?} and {:?}", sa, sb)));
            }
            Ok(sa)
        }
        Query::Join(a, b) => {
            let sa = check_q(schema, env, a)?;
            let sb = check_q(schema, env, b)?;
            if let Some(x) = sa.intersection(&sb).next() {
                return Err(ill(format!("join operands share attribute `{}`", x)));
            }
            Ok(sa.union(&sb).cloned().collect())
        }
        Query::Project(sel, input) => {
            let s = check_q(schema, env, input)?;
            let env2 = push(env, s, vec![], false);
            for x in sel {
                check_e(&env2, &x.expr, false)?;
            }
            check_names(sel)?;
            Ok(sel.iter().map(|s| s.name.clone()).collect())
        }
        Query::Filter(f, input) => {
            let s = check_q(schema, env, input)?;
            check_f(schema, &push(env, s.clone(), vec![], false), f)?;
            Ok(s)
        }
        Query::Group { select, keys, having, input } => {
            let s = check_q(schema, env, input)?;
            for k in keys {
                if !s.contains(k) {
                    return Err(ill(format!("grouping attribute `{}` not in input", k)));
                }
            }
            let env2 = push(env, s, keys.clone(), true);
            check_f(schema, &env2, having)?;
            for x in select {
                check_e(&env2, &x.expr, false)?;
            }
            check_names(select)?;
            Ok(select.iter().map(|s| s.name.clone()).collect())
        }
    }
}

fn check_f(schema: &Schema, env: &[Frame], f: &Formula) -> Result<()> {
    match f {
        Formula::True => Ok(()),
        Formula::And(a, b) | Formula::Or(a, b) => {
            check_f(schema, env, a)?;
            check_f(schema, env, b)
        }
        Formula::Not(a) => check_f(schema, env, a),
        Formula::Pred(_, a, b) => {
            check_e(env, a, false)?;
            check_e(env, b, false)
        }
        Formula::Quant(_, _, s, q) => {
            check_e(env, &s.expr, false)?;
            let sq = check_q(schema, env, q)?;
            if sq.len() != 1 || !sq.contains(&s.name) {
                return Err(ill(format!("quantified sub-query must have sort {{{}}}", s.name)));
            }
            Ok(())
        }
        Formula::In(sel, q) => {
            for s in sel {
                check_e(env, &s.expr, false)?;
            }
            check_names(sel)?;
            let sq = check_q(schema, env, q)?;
            let names: BTreeSet<String> = sel.iter().map(|s| s.name.clone()).collect();
            if names != sq {
                return Err(ill("`in` must match every attribute of its sub-query"));
            }
            Ok(())
        }
        Formula::Exists(q) => check_q(schema, env, q).map(|_| ()),
    }
}

fn check_e(env: &[Frame], e: &Expr, in_agg: bool) -> Result<()> {
    match e {
        Expr::Const(_) => Ok(()),
        Expr::Attr(a) => {
            let f = env
                .iter()
                .rev()
                .find(|f| f.slice.attrs.contains(a))
                .ok_or_else(|| ill(format!("attribute `{}` does not resolve", a)))?;
            if f.grouped && !f.slice.groups.contains(a) {
                return Err(ill(format!(
                    "attribute `{}` must be grouped or used inside an aggregate",
                    a
                )));
            }
            Ok(())
        }
        Expr::Neg(x) => check_e(env, x, in_agg),
        Expr::Arith(_, a, b) => {
            check_e(env, a, in_agg)?;
            check_e(env, b, in_agg)
        }
        Expr::Agg(_, x) => {
            if in_agg || x.contains_agg() {
                return Err(ill("nested aggregate"));
            }
            let slices: Vec<StaticSlice> = env.iter().map(|f| f.slice.clone()).collect();
            let k = find_eval_index(&slices, x)
                .ok_or_else(|| ill("aggregate argument has no evaluation environment"))?;
            if k == 0 || !env[k - 1].grouped {
                return Err(ill("aggregate outside of a grouped query"));
            }
            let mut inner = env[..k].to_vec();
            inner[k - 1].grouped = false;
            check_e(&inner, x, true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ArithOp;

    fn sl(attrs: &[&str], groups: &[&str]) -> StaticSlice {
        StaticSlice::new(
            attrs.iter().map(|s| s.to_string()),
            groups.iter().map(|s| s.to_string()).collect(),
        )
    }

    #[test]
    fn find_eval_examples() {
        // bottom: outer group over {a1,b1} keyed by a1; top: inner over {a2,b2} keyed by a2
        let env = vec![sl(&["a1", "b1"], &["a1"]), sl(&["a2", "b2"], &["a2"])];
        let plus = |a, b| Expr::arith(ArithOp::Add, a, b);
        let times = |a, b| Expr::arith(ArithOp::Mul, a, b);
        assert_eq!(find_eval_index(&env, &Expr::attr("b2")), Some(2));
        assert_eq!(find_eval_index(&env, &Expr::attr("b1")), Some(1));
        assert_eq!(find_eval_index(&env, &Expr::int(1)), Some(2));
        let e = plus(Expr::int(1), times(Expr::int(0), Expr::attr("b2")));
        assert_eq!(find_eval_index(&env, &e), Some(2));
        let e = plus(
            plus(Expr::int(1), times(Expr::int(0), Expr::attr("a1"))),
            times(Expr::int(0), Expr::attr("a2")),
        );
        assert_eq!(find_eval_index(&env, &e), Some(2));
        let e = plus(Expr::attr("b1"), Expr::attr("b2"));
        assert_eq!(find_eval_index(&env, &e), None);
        assert_eq!(find_eval_index(&env, &Expr::attr("zz")), None);
    }
}
