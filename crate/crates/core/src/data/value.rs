use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, ToPrimitive, Zero};

use crate::error::{type_err, Result};

/// A flat SQL value.
#[derive(Debug, Clone)]
pub enum SqlValue {
    Null,
    Bool(bool),
    Int(BigInt),
    Double(f64),
    Text(String),
}

impl SqlValue {
    pub fn int(i: i64) -> SqlValue {
        SqlValue::Int(BigInt::from(i))
    }

    pub fn text(s: &str) -> SqlValue {
        SqlValue::Text(s.to_string())
    }

    pub fn is_null(&self) -> bool {
        matches!(self, SqlValue::Null)
    }

    fn rank(&self) -> u8 {
        match self {
            SqlValue::Null => 0,
            SqlValue::Bool(_) => 1,
            SqlValue::Int(_) | SqlValue::Double(_) => 2,
            SqlValue::Text(_) => 3,
        }
    }
}

/// Numeric comparison of an integer with a double. NaN sorts above every number.
pub fn cmp_int_f64(i: &BigInt, d: f64) -> Ordering {
    if d.is_nan() {
        return Ordering::Less;
    }
    if d.is_infinite() {
        return if d > 0.0 { Ordering::Less } else { Ordering::Greater };
    }
    let fl = d.floor();
    let fi = BigInt::from_f64(fl).expect("finite double");
    match i.cmp(&fi) {
        Ordering::Equal if d > fl => Ordering::Less,
        o => o,
    }
}

fn cmp_f64(a: f64, b: f64) -> Ordering {
    match (a.is_nan(), b.is_nan()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        _ => a.partial_cmp(&b).unwrap(),
    }
}

fn cmp_numeric(a: &SqlValue, b: &SqlValue) -> Ordering {
    match (a, b) {
        (SqlValue::Int(x), SqlValue::Int(y)) => x.cmp(y),
        (SqlValue::Double(x), SqlValue::Double(y)) => cmp_f64(*x, *y),
        (SqlValue::Int(x), SqlValue::Double(y)) => cmp_int_f64(x, *y),
        (SqlValue::Double(x), SqlValue::Int(y)) => cmp_int_f64(y, *x).reverse(),
        _ => unreachable!(),
    }
}

/// Comparison used by SQL predicates: integers and doubles compare
/// numerically and `1 = 1.0` holds. Values of different kinds are ordered by
/// kind so the function stays total.
pub fn compare_values(a: &SqlValue, b: &SqlValue) -> Ordering {
    match a.rank().cmp(&b.rank()) {
        Ordering::Equal => {}
        o => return o,
    }
    match (a, b) {
        (SqlValue::Null, SqlValue::Null) => Ordering::Equal,
        (SqlValue::Bool(x), SqlValue::Bool(y)) => x.cmp(y),
        (SqlValue::Text(x), SqlValue::Text(y)) => x.cmp(y),
        _ => cmp_numeric(a, b),
    }
}

/// The structural total order: like [`compare_values`] but an integer sorts
/// before a numerically equal double, so only identical values are equal.
pub fn value_total_order(a: &SqlValue, b: &SqlValue) -> Ordering {
    match compare_values(a, b) {
        Ordering::Equal => match (a, b) {
            (SqlValue::Int(_), SqlValue::Double(_)) => Ordering::Less,
            (SqlValue::Double(_), SqlValue::Int(_)) => Ordering::Greater,
            _ => Ordering::Equal,
        },
        o => o,
    }
}

impl PartialEq for SqlValue {
    fn eq(&self, other: &Self) -> bool {
        value_total_order(self, other) == Ordering::Equal
    }
}

impl Eq for SqlValue {}

impl PartialOrd for SqlValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SqlValue {
    fn cmp(&self, other: &Self) -> Ordering {
        value_total_order(self, other)
    }
}

pub(crate) fn fmt_double(d: f64) -> String {
    if d.is_nan() {
        "nan".into()
    } else if d.is_infinite() {
        if d > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{:?}", d)
    }
}

impl fmt::Display for SqlValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SqlValue::Null => write!(f, "null"),
            SqlValue::Bool(b) => write!(f, "{}", if *b { "TRUE" } else { "FALSE" }),
            SqlValue::Int(i) => write!(f, "{}", i),
            SqlValue::Double(d) => write!(f, "{}", fmt_double(*d)),
            SqlValue::Text(s) => write!(f, "'{}'", s.replace('\'', "''")),
        }
    }
}

/// Binary arithmetic and string functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Concat,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
            ArithOp::Concat => "||",
        }
    }
}

fn to_f64(v: &SqlValue) -> f64 {
    match v {
        SqlValue::Int(i) => i.to_f64().unwrap_or(f64::NAN),
        SqlValue::Double(d) => *d,
        _ => unreachable!(),
    }
}

/// Applies a binary function. Null arguments absorb; division by zero gives
/// null. Integer pairs stay integers, any double promotes the result.
pub fn apply_arith(op: ArithOp, a: &SqlValue, b: &SqlValue) -> Result<SqlValue> {
    use SqlValue::*;
    if a.is_null() || b.is_null() {
        return Ok(Null);
    }
    if op == ArithOp::Concat {
        return match (a, b) {
            (Text(x), Text(y)) => Ok(Text(format!("{}{}", x, y))),
            _ => type_err(format!("|| expects text, got {} and {}", a, b)),
        };
    }
    match (a, b) {
        (Int(x), Int(y)) => Ok(match op {
            ArithOp::Add => Int(x + y),
            ArithOp::Sub => Int(x - y),
            ArithOp::Mul => Int(x * y),
            ArithOp::Div => {
                if y.is_zero() {
                    Null
                } else {
                    Int(x / y)
                }
            }
            ArithOp::Concat => unreachable!(),
        }),
        (Int(_) | Double(_), Int(_) | Double(_)) => {
            let (x, y) = (to_f64(a), to_f64(b));
            Ok(match op {
                ArithOp::Add => Double(x + y),
                ArithOp::Sub => Double(x - y),
                ArithOp::Mul => Double(x * y),
                ArithOp::Div => {
                    if y == 0.0 {
                        Null
                    } else {
                        Double(x / y)
                    }
                }
                ArithOp::Concat => unreachable!(),
            })
        }
        _ => type_err(format!("{} expects numbers, got {} and {}", op.symbol(), a, b)),
    }
}

/// Unary minus, null-absorbing.
pub fn negate(a: &SqlValue) -> Result<SqlValue> {
    match a {
        SqlValue::Null => Ok(SqlValue::Null),
        SqlValue::Int(i) => Ok(SqlValue::Int(-i)),
        SqlValue::Double(d) => Ok(SqlValue::Double(-d)),
        _ => type_err(format!("unary - expects a number, got {}", a)),
    }
}

/// Left-to-right sum of non-null values; null when there are none.
pub fn fold_sum<'a>(vals: impl IntoIterator<Item = &'a SqlValue>) -> Result<SqlValue> {
    let mut acc: Option<SqlValue> = None;
    for v in vals {
        if v.is_null() {
            continue;
        }
        acc = Some(match acc {
            None => match v {
                SqlValue::Int(_) | SqlValue::Double(_) => v.clone(),
                _ => return type_err(format!("sum expects numbers, got {}", v)),
            },
            Some(a) => apply_arith(ArithOp::Add, &a, v)?,
        });
    }
    Ok(acc.unwrap_or(SqlValue::Null))
}

/// Average of non-null values as a double; null when there are none.
pub fn fold_avg<'a>(vals: impl IntoIterator<Item = &'a SqlValue>) -> Result<SqlValue> {
    let vals: Vec<&SqlValue> = vals.into_iter().filter(|v| !v.is_null()).collect();
    let n = vals.len();
    match fold_sum(vals)? {
        SqlValue::Null => Ok(SqlValue::Null),
        s => Ok(SqlValue::Double(to_f64(&s) / n as f64)),
    }
}

fn fold_extreme<'a>(
    vals: impl IntoIterator<Item = &'a SqlValue>,
    want: Ordering,
) -> SqlValue {
    let mut acc: Option<&SqlValue> = None;
    for v in vals {
        if v.is_null() {
            continue;
        }
        match acc {
            Some(a) if value_total_order(v, a) != want => {}
            _ => acc = Some(v),
        }
    }
    acc.cloned().unwrap_or(SqlValue::Null)
}

/// Smallest non-null value (first one on ties); null when there are none.
pub fn fold_min<'a>(vals: impl IntoIterator<Item = &'a SqlValue>) -> SqlValue {
    fold_extreme(vals, Ordering::Less)
}

/// Largest non-null value (first one on ties); null when there are none.
pub fn fold_max<'a>(vals: impl IntoIterator<Item = &'a SqlValue>) -> SqlValue {
    fold_extreme(vals, Ordering::Greater)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_order_examples() {
        assert_eq!(value_total_order(&SqlValue::Null, &SqlValue::int(0)), Ordering::Less);
        assert_eq!(value_total_order(&SqlValue::int(1), &SqlValue::int(1)), Ordering::Equal);
        assert_eq!(value_total_order(&SqlValue::text("a"), &SqlValue::text("b")), Ordering::Less);
        assert_eq!(value_total_order(&SqlValue::int(1), &SqlValue::Double(1.0)), Ordering::Less);
        assert_eq!(value_total_order(&SqlValue::Bool(true), &SqlValue::int(-5)), Ordering::Less);
        assert_eq!(compare_values(&SqlValue::int(1), &SqlValue::Double(1.0)), Ordering::Equal);
        assert_eq!(compare_values(&SqlValue::int(2), &SqlValue::Double(1.5)), Ordering::Greater);
        assert_eq!(compare_values(&SqlValue::int(-2), &SqlValue::Double(-1.5)), Ordering::Less);
        assert_eq!(compare_values(&SqlValue::int(1), &SqlValue::Double(1.5)), Ordering::Less);
    }

    #[test]
    fn arithmetic() {
        let r = apply_arith(ArithOp::Add, &SqlValue::int(1), &SqlValue::Double(0.5)).unwrap();
        assert_eq!(r, SqlValue::Double(1.5));
        let r = apply_arith(ArithOp::Div, &SqlValue::int(7), &SqlValue::int(2)).unwrap();
        assert_eq!(r, SqlValue::int(3));
        let r = apply_arith(ArithOp::Div, &SqlValue::int(7), &SqlValue::int(0)).unwrap();
        assert_eq!(r, SqlValue::Null);
        let r = apply_arith(ArithOp::Div, &SqlValue::Double(1.0), &SqlValue::Double(0.0)).unwrap();
        assert_eq!(r, SqlValue::Null);
        let r = apply_arith(ArithOp::Mul, &SqlValue::Null, &SqlValue::int(0)).unwrap();
        assert_eq!(r, SqlValue::Null);
        let big = SqlValue::Int(BigInt::from(i64::MAX));
        let r = apply_arith(ArithOp::Add, &big, &SqlValue::int(1)).unwrap();
        assert_eq!(r, SqlValue::Int(BigInt::from(i64::MAX) + 1));
        assert!(apply_arith(ArithOp::Add, &SqlValue::text("a"), &SqlValue::int(1)).is_err());
        let r = apply_arith(ArithOp::Concat, &SqlValue::text("a"), &SqlValue::text("b")).unwrap();
        assert_eq!(r, SqlValue::text("ab"));
    }

    #[test]
    fn folds() {
        let vals = vec![SqlValue::int(3), SqlValue::Null, SqlValue::int(1)];
        assert_eq!(fold_sum(&vals).unwrap(), SqlValue::int(4));
        assert_eq!(fold_avg(&vals).unwrap(), SqlValue::Double(2.0));
        assert_eq!(fold_min(&vals), SqlValue::int(1));
        assert_eq!(fold_max(&vals), SqlValue::int(3));
        let empty: Vec<SqlValue> = vec![SqlValue::Null];
        assert_eq!(fold_sum(&empty).unwrap(), SqlValue::Null);
        assert_eq!(fold_avg(&empty).unwrap(), SqlValue::Null);
        assert_eq!(fold_min(&empty), SqlValue::Null);
    }
}
