use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::ast::{AggFn, Expr, Formula, Pred, Quantifier, Query, Select};
use super::bool3::Bool3;
use super::wf::{find_eval_index, StaticSlice};
use crate::data::{
    apply_arith, bag_intersect, bag_minus, compare_values, fold_avg, fold_max, fold_min, fold_sum,
    negate, Bag, Instance, SqlValue, Tuple,
};
use crate::error::{Error, Result};

/// One level of the evaluation environment: the attributes in scope, the
/// grouping attributes, and the current tuple (or group of tuples).
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub attrs: BTreeSet<String>,
    pub groups: Vec<String>,
    pub tuples: Vec<Tuple>,
}

impl Slice {
    pub fn static_part(&self) -> StaticSlice {
        StaticSlice { attrs: self.attrs.clone(), groups: self.groups.clone() }
    }
}

/// A persistent stack of slices, bottom first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Env {
    slices: Vec<Arc<Slice>>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn from_slices(slices: Vec<Slice>) -> Env {
        Env { slices: slices.into_iter().map(Arc::new).collect() }
    }

    /// The environment extended with `s` on top.
    pub fn push(&self, s: Slice) -> Env {
        let mut slices = self.slices.clone();
        slices.push(Arc::new(s));
        Env { slices }
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// Slices, bottom first.
    pub fn slices(&self) -> impl DoubleEndedIterator<Item = &Slice> {
        self.slices.iter().map(|s| s.as_ref())
    }

    fn prefix(&self, n: usize) -> Env {
        Env { slices: self.slices[..n].to_vec() }
    }

    fn lookup(&self, a: &str) -> Result<SqlValue> {
        for s in self.slices.iter().rev() {
            if s.attrs.contains(a) {
                let t = s
                    .tuples
                    .first()
                    .ok_or_else(|| Error::Eval(format!("attribute `{}` read from an empty slice", a)))?;
                return t
                    .get(a)
                    .cloned()
                    .ok_or_else(|| Error::Eval(format!("tuple lacks attribute `{}`", a)));
            }
        }
        Err(Error::Eval(format!("attribute `{}` does not resolve", a)))
    }
}

/// The deepest suffix of `env` able to evaluate `e` (as a prefix, bottom
/// first), or `None` when there is none.
pub fn find_eval_env(env: &Env, e: &Expr) -> Option<Env> {
    let statics: Vec<StaticSlice> = env.slices().map(Slice::static_part).collect();
    find_eval_index(&statics, e).map(|k| env.prefix(k))
}

fn attrs_of(t: &Tuple) -> BTreeSet<String> {
    t.keys().cloned().collect()
}

fn tuple_slice(t: &Tuple) -> Slice {
    Slice { attrs: attrs_of(t), groups: vec![], tuples: vec![t.clone()] }
}

fn eval_select(sel: &[Select], env: &Env) -> Result<Tuple> {
    let mut out = Tuple::new();
    for s in sel {
        out.insert(s.name.clone(), eval_expr(&s.expr, env)?);
    }
    Ok(out)
}

/// Evaluates a query to a bag of tuples.
pub fn eval_query(q: &Query, env: &Env, i: &Instance) -> Result<Bag> {
    match q {
        Query::Empty => Ok(Vec::new()),
        Query::Table(t) => i.table(t).cloned().ok_or_else(|| Error::UnknownTable(t.clone())),
        Query::Union(a, b) => {
            let mut r = eval_query(a, env, i)?;
            r.extend(eval_query(b, env, i)?);
            Ok(r)
        }
        Query::Intersect(a, b) => Ok(bag_intersect(&eval_query(a, env, i)?, &eval_query(b, env, i)?)),
        Query::Except(a, b) => Ok(bag_minus(&eval_query(a, env, i)?, &eval_query(b, env, i)?)),
        Query::Join(a, b) => {
            let ra = eval_query(a, env, i)?;
            let rb = eval_query(b, env, i)?;
            let mut out = Vec::new();
            for t1 in &ra {
                for t2 in &rb {
                    let agree = t1.iter().all(|(k, v)| t2.get(k).is_none_or(|w| v == w));
                    if agree {
                        let mut t = t1.clone();
                        t.extend(t2.iter().map(|(k, v)| (k.clone(), v.clone())));
                        out.push(t);
                    }
                }
            }
            Ok(out)
        }
        Query::Project(sel, input) => eval_query(input, env, i)?
            .iter()
            .map(|t| eval_select(sel, &env.push(tuple_slice(t))))
            .collect(),
        Query::Filter(f, input) => {
            let mut out = Vec::new();
            for t in eval_query(input, env, i)? {
                if eval_formula(f, &env.push(tuple_slice(&t)), i)? == Bool3::True {
                    out.push(t);
                }
            }
            Ok(out)
        }
        Query::Group { select, keys, having, input } => {
            let rows = eval_query(input, env, i)?;
            let mut order: Vec<Vec<SqlValue>> = Vec::new();
            let mut groups: BTreeMap<Vec<SqlValue>, Vec<Tuple>> = BTreeMap::new();
            for t in rows {
                let key: Vec<SqlValue> = keys
                    .iter()
                    .map(|k| t.get(k).cloned().ok_or_else(|| Error::Eval(format!("no key `{}`", k))))
                    .collect::<Result<_>>()?;
                groups
                    .entry(key.clone())
                    .or_insert_with(|| {
                        order.push(key);
                        Vec::new()
                    })
                    .push(t);
            }
            let mut out = Vec::new();
            for key in order {
                let tuples = groups.remove(&key).unwrap();
                let slice = Slice { attrs: attrs_of(&tuples[0]), groups: keys.clone(), tuples };
                let env2 = env.push(slice);
                if eval_formula(having, &env2, i)? == Bool3::True {
                    out.push(eval_select(select, &env2)?);
                }
            }
            Ok(out)
        }
    }
}

fn compare3(p: Pred, a: &SqlValue, b: &SqlValue) -> Bool3 {
    if a.is_null() || b.is_null() {
        Bool3::Unknown
    } else {
        Bool3::from_bool(p.holds(compare_values(a, b)))
    }
}

fn single_value(t: &Tuple, name: &str) -> Result<SqlValue> {
    t.get(name).cloned().ok_or_else(|| Error::Eval(format!("sub-query tuple lacks `{}`", name)))
}

/// Evaluates a formula in three-valued logic.
pub fn eval_formula(f: &Formula, env: &Env, i: &Instance) -> Result<Bool3> {
    Ok(match f {
        Formula::True => Bool3::True,
        Formula::And(a, b) => eval_formula(a, env, i)?.and(eval_formula(b, env, i)?),
        Formula::Or(a, b) => eval_formula(a, env, i)?.or(eval_formula(b, env, i)?),
        Formula::Not(a) => eval_formula(a, env, i)?.not(),
        Formula::Pred(p, a, b) => compare3(*p, &eval_expr(a, env)?, &eval_expr(b, env)?),
        Formula::Quant(p, quant, s, q) => {
            let v = eval_expr(&s.expr, env)?;
            let mut results = Vec::new();
            for t in eval_query(q, env, i)? {
                results.push(compare3(*p, &v, &single_value(&t, &s.name)?));
            }
            match quant {
                Quantifier::All => results.into_iter().fold(Bool3::True, Bool3::and),
                Quantifier::Any => results.into_iter().fold(Bool3::False, Bool3::or),
            }
        }
        Formula::In(sel, q) => {
            let vals: Vec<SqlValue> =
                sel.iter().map(|s| eval_expr(&s.expr, env)).collect::<Result<_>>()?;
            let mut acc = Bool3::False;
            for t in eval_query(q, env, i)? {
                let mut m = Bool3::True;
                for (s, v) in sel.iter().zip(&vals) {
                    m = m.and(compare3(Pred::Eq, v, &single_value(&t, &s.name)?));
                }
                acc = acc.or(m);
            }
            acc
        }
        Formula::Exists(q) => Bool3::from_bool(!eval_query(q, env, i)?.is_empty()),
    })
}

/// Evaluates an expression; aggregates fold over the slice chosen by
/// [`find_eval_env`].
pub fn eval_expr(e: &Expr, env: &Env) -> Result<SqlValue> {
    match e {
        Expr::Const(v) => Ok(v.clone()),
        Expr::Attr(a) => env.lookup(a),
        Expr::Neg(x) => negate(&eval_expr(x, env)?),
        Expr::Arith(op, a, b) => apply_arith(*op, &eval_expr(a, env)?, &eval_expr(b, env)?),
        Expr::Agg(f, x) => {
            let e2 = find_eval_env(env, x)
                .filter(|e2| !e2.is_empty())
                .ok_or_else(|| Error::Eval("aggregate has no evaluation environment".into()))?;
            let n = e2.len();
            let top = e2.slices[n - 1].clone();
            let below = e2.prefix(n - 1);
            let mut vals = Vec::with_capacity(top.tuples.len());
            for t in &top.tuples {
                let s = Slice { attrs: top.attrs.clone(), groups: top.groups.clone(), tuples: vec![t.clone()] };
                vals.push(eval_expr(x, &below.push(s))?);
            }
            match f {
                AggFn::Sum => fold_sum(&vals),
                AggFn::Avg => fold_avg(&vals),
                AggFn::Min => Ok(fold_min(&vals)),
                AggFn::Max => Ok(fold_max(&vals)),
                AggFn::Count => Ok(SqlValue::int(vals.iter().filter(|v| !v.is_null()).count() as i64)),
                AggFn::CountStar => Ok(SqlValue::int(vals.len() as i64)),
            }
        }
    }
}
