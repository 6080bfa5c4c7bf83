use std::collections::BTreeSet;
use std::sync::Arc;

use super::{BinOp, UnOp};
use crate::data::{
    apply_arith, bag_intersect, bag_minus, compare_values, fold_avg, fold_max, fold_min, fold_sum,
    negate, ArithOp, Data, Record, SqlValue,
};
use crate::error::{type_err, Result};

fn bag<'a>(d: &'a Data, op: &str) -> Result<&'a [Data]> {
    match d.as_bag() {
        Some(b) => Ok(b),
        None => type_err(format!("{} expects a bag, got {}", op, d)),
    }
}

fn record<'a>(d: &'a Data, op: &str) -> Result<&'a Record> {
    match d.as_record() {
        Some(r) => Ok(r),
        None => type_err(format!("{} expects a record, got {}", op, d)),
    }
}

fn atom(d: &Data, op: &str) -> Result<SqlValue> {
    match d.as_atom() {
        Some(v) => Ok(v),
        None => type_err(format!("{} expects a scalar, got {}", op, d)),
    }
}

fn boolean(d: &Data, op: &str) -> Result<bool> {
    match d.as_bool() {
        Some(b) => Ok(b),
        None => type_err(format!("{} expects a boolean, got {}", op, d)),
    }
}

fn from_value(v: SqlValue, op: &str) -> Result<Data> {
    match Data::from_atom(v) {
        Some(d) => Ok(d),
        None => type_err(format!("{} has no result", op)),
    }
}

fn atoms(d: &Data, op: &str) -> Result<Vec<SqlValue>> {
    let b = bag(d, op)?;
    if b.is_empty() {
        return type_err(format!("{} of an empty bag", op));
    }
    b.iter().map(|x| atom(x, op)).collect()
}

/// Keeps the first occurrence of each element.
pub(crate) fn distinct(items: &[Data]) -> Vec<Data> {
    let mut seen = BTreeSet::new();
    items.iter().filter(|d| seen.insert(*d)).cloned().collect()
}

fn project(r: &Record, attrs: &[String]) -> Result<Data> {
    let mut out = Record::new();
    for a in attrs {
        match r.get(a) {
            Some(v) => out.insert(a.clone(), v.clone()),
            None => return type_err(format!("projection on missing label `{}`", a)),
        };
    }
    Ok(Data::Record(Arc::new(out)))
}

/// Built-in grouping: one record per distinct key (in order of first
/// occurrence) holding the key fields and, under `g`, the matching records.
pub fn group_by(g: &str, attrs: &[String], d: &Data) -> Result<Data> {
    let mut keys: Vec<Data> = Vec::new();
    let mut groups: Vec<Vec<Data>> = Vec::new();
    let mut index = std::collections::BTreeMap::new();
    for x in bag(d, "group_by")? {
        let k = project(record(x, "group_by")?, attrs)?;
        let i = *index.entry(k.clone()).or_insert_with(|| {
            keys.push(k);
            groups.push(Vec::new());
            keys.len() - 1
        });
        groups[i].push(x.clone());
    }
    let out = keys
        .into_iter()
        .zip(groups)
        .map(|(k, members)| {
            let mut r = k.as_record().unwrap().clone();
            r.insert(g.to_string(), Data::bag(members));
            Data::Record(Arc::new(r))
        })
        .collect();
    Ok(Data::bag(out))
}

pub fn apply_unary(op: &UnOp, d: &Data) -> Result<Data> {
    Ok(match op {
        UnOp::Not => Data::Bool(!boolean(d, "not")?),
        UnOp::Neg => from_value(negate(&atom(d, "neg")?)?, "neg")?,
        UnOp::Dot(a) => match record(d, "field access")?.get(a) {
            Some(v) => v.clone(),
            None => return type_err(format!("record {} has no label `{}`", d, a)),
        },
        UnOp::Rec(a) => Data::record([(a.clone(), d.clone())]),
        UnOp::Bag => Data::bag(vec![d.clone()]),
        UnOp::Distinct => Data::bag(distinct(bag(d, "distinct")?)),
        UnOp::Project(attrs) => project(record(d, "projection")?, attrs)?,
        UnOp::Count => Data::int(bag(d, "count")?.len() as i64),
        UnOp::Sum => from_value(fold_sum(&atoms(d, "sum")?)?, "sum")?,
        UnOp::Avg => from_value(fold_avg(&atoms(d, "avg")?)?, "avg")?,
        UnOp::Min => from_value(fold_min(&atoms(d, "min")?), "min")?,
        UnOp::Max => from_value(fold_max(&atoms(d, "max")?), "max")?,
        UnOp::Flatten => {
            let mut out = Vec::new();
            for x in bag(d, "flatten")? {
                out.extend_from_slice(bag(x, "flatten")?);
            }
            Data::bag(out)
        }
        UnOp::Left => Data::left(d.clone()),
        UnOp::Right => Data::right(d.clone()),
        UnOp::Single => match bag(d, "single")? {
            [x] => Data::left(x.clone()),
            _ => Data::null(),
        },
        UnOp::First => match bag(d, "first")?.first() {
            Some(x) => x.clone(),
            None => return type_err("first of an empty bag"),
        },
        UnOp::GroupBy(g, attrs) => group_by(g, attrs, d)?,
    })
}

fn arith(op: ArithOp, a: &Data, b: &Data) -> Result<SqlValue> {
    apply_arith(op, &atom(a, op.symbol())?, &atom(b, op.symbol())?)
}

pub fn apply_binary(op: BinOp, a: &Data, b: &Data) -> Result<Data> {
    Ok(match op {
        BinOp::Eq => Data::Bool(a == b),
        BinOp::Lt => Data::Bool(compare_values(&atom(a, "<")?, &atom(b, "<")?).is_lt()),
        BinOp::Le => Data::Bool(compare_values(&atom(a, "<=")?, &atom(b, "<=")?).is_le()),
        BinOp::Add => from_value(arith(ArithOp::Add, a, b)?, "+")?,
        BinOp::Sub => from_value(arith(ArithOp::Sub, a, b)?, "-")?,
        BinOp::Mul => from_value(arith(ArithOp::Mul, a, b)?, "*")?,
        BinOp::Concat => from_value(arith(ArithOp::Concat, a, b)?, "||")?,
        BinOp::Div => match arith(ArithOp::Div, a, b)? {
            SqlValue::Null => Data::null(),
            v => Data::left(from_value(v, "/")?),
        },
        BinOp::And => Data::Bool(boolean(a, "and")? && boolean(b, "and")?),
        BinOp::Or => Data::Bool(boolean(a, "or")? || boolean(b, "or")?),
        BinOp::Union => {
            let mut v = bag(a, "union")?.to_vec();
            v.extend_from_slice(bag(b, "union")?);
            Data::bag(v)
        }
        BinOp::Minus => Data::bag(bag_minus(bag(a, "minus")?, bag(b, "minus")?)),
        BinOp::Intersect => Data::bag(bag_intersect(bag(a, "intersect")?, bag(b, "intersect")?)),
        BinOp::RecConcat => {
            let mut r = record(a, "⊕")?.clone();
            for (k, v) in record(b, "⊕")? {
                r.insert(k.clone(), v.clone());
            }
            Data::Record(Arc::new(r))
        }
        BinOp::Contains => Data::Bool(bag(b, "contains")?.contains(a)),
    })
}
