//! The EJson runtime library: one function per operation of the nested
//! data model, written directly against EJson values.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, ToPrimitive, Zero};

use crate::data::{EJson, LEFT_KEY, RIGHT_KEY};
use crate::error::{type_err, Error, Result};

macro_rules! runtime_functions {
    ($($v:ident => $name:literal / $n:literal),* $(,)?) => {
        /// Runtime functions of the EJson instantiation.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum EJsonFun { $($v),* }

        impl EJsonFun {
            pub const ALL: &'static [EJsonFun] = &[$(EJsonFun::$v),*];

            pub fn name(self) -> &'static str {
                match self { $(EJsonFun::$v => $name),* }
            }

            pub fn arity(self) -> usize {
                match self { $(EJsonFun::$v => $n),* }
            }

            pub fn from_name(s: &str) -> Option<EJsonFun> {
                match s { $($name => Some(EJsonFun::$v),)* _ => None }
            }
        }
    };
}

runtime_functions! {
    Equal => "equal" / 2,
    Lt => "lt" / 2,
    Le => "le" / 2,
    Neg => "neg" / 1,
    Add => "add" / 2,
    Sub => "sub" / 2,
    Mult => "mult" / 2,
    Div => "div" / 2,
    Concat => "concat" / 2,
    Rec => "rec" / 2,
    Dot => "dot" / 2,
    Project => "project" / 2,
    RecConcat => "recConcat" / 2,
    Bag => "bag" / 1,
    Distinct => "distinct" / 1,
    Count => "count" / 1,
    Sum => "sum" / 1,
    Avg => "avg" / 1,
    Min => "min" / 1,
    Max => "max" / 1,
    Flatten => "flatten" / 1,
    Union => "union" / 2,
    Minus => "minus" / 2,
    Intersect => "intersect" / 2,
    Contains => "contains" / 2,
    Single => "single" / 1,
    First => "first" / 1,
    Left => "left" / 1,
    Right => "right" / 1,
    Either => "either" / 1,
    GetLeft => "getLeft" / 1,
    GetRight => "getRight" / 1,
    GroupBy => "groupBy" / 3,
    Push => "push" / 2,
}

impl fmt::Display for EJsonFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn err<T>(f: EJsonFun, what: &str, v: &EJson) -> Result<T> {
    type_err(format!("{}: expected {}, got {}", f, what, v))
}

fn array(f: EJsonFun, v: &EJson) -> Result<&Arc<Vec<EJson>>> {
    match v {
        EJson::Array(a) => Ok(a),
        _ => err(f, "an array", v),
    }
}

fn object(f: EJsonFun, v: &EJson) -> Result<&BTreeMap<String, EJson>> {
    match v {
        EJson::Object(o) => Ok(o),
        _ => err(f, "an object", v),
    }
}

fn string(f: EJsonFun, v: &EJson) -> Result<&str> {
    match v {
        EJson::String(s) => Ok(s),
        _ => err(f, "a string", v),
    }
}

fn strings(f: EJsonFun, v: &EJson) -> Result<Vec<String>> {
    array(f, v)?.iter().map(|x| string(f, x).map(str::to_string)).collect()
}

fn scalar(f: EJsonFun, v: &EJson) -> Result<&EJson> {
    match v {
        EJson::Bool(_) | EJson::BigInt(_) | EJson::Number(_) | EJson::String(_) => Ok(v),
        _ => err(f, "a scalar", v),
    }
}

fn kind(v: &EJson) -> u8 {
    match v {
        EJson::Bool(_) => 0,
        EJson::BigInt(_) | EJson::Number(_) => 1,
        _ => 2,
    }
}

fn as_f64(i: &BigInt) -> f64 {
    i.to_f64().unwrap_or(f64::NAN)
}

/// Exact comparison of an integer with a double; NaN is above every number.
fn int_vs_number(i: &BigInt, x: f64) -> Ordering {
    if x.is_nan() || x == f64::INFINITY {
        return Ordering::Less;
    }
    if x == f64::NEG_INFINITY {
        return Ordering::Greater;
    }
    let whole = x.trunc();
    match i.cmp(&BigInt::from_f64(whole).unwrap()) {
        Ordering::Equal => 0.0f64.partial_cmp(&(x - whole)).unwrap(),
        o => o,
    }
}

fn number_vs_number(x: f64, y: f64) -> Ordering {
    x.partial_cmp(&y).unwrap_or_else(|| x.is_nan().cmp(&y.is_nan()))
}

/// Order on scalars used by `lt`/`le`: booleans, then numbers compared by
/// value, then strings.
fn compare(a: &EJson, b: &EJson) -> Ordering {
    kind(a).cmp(&kind(b)).then_with(|| match (a, b) {
        (EJson::Bool(x), EJson::Bool(y)) => x.cmp(y),
        (EJson::String(x), EJson::String(y)) => x.cmp(y),
        (EJson::BigInt(x), EJson::BigInt(y)) => x.cmp(y),
        (EJson::Number(x), EJson::Number(y)) => number_vs_number(*x, *y),
        (EJson::BigInt(x), EJson::Number(y)) => int_vs_number(x, *y),
        (EJson::Number(x), EJson::BigInt(y)) => int_vs_number(y, *x).reverse(),
        _ => Ordering::Equal,
    })
}

/// `compare` with integers placed before equal doubles, used by min/max.
fn compare_total(a: &EJson, b: &EJson) -> Ordering {
    compare(a, b).then_with(|| match (a, b) {
        (EJson::BigInt(_), EJson::Number(_)) => Ordering::Less,
        (EJson::Number(_), EJson::BigInt(_)) => Ordering::Greater,
        _ => Ordering::Equal,
    })
}

fn arith(f: EJsonFun, a: &EJson, b: &EJson) -> Result<EJson> {
    let (x, y) = match (a, b) {
        (EJson::BigInt(x), EJson::BigInt(y)) => {
            return Ok(EJson::BigInt(match f {
                EJsonFun::Add => x + y,
                EJsonFun::Sub => x - y,
                _ => x * y,
            }))
        }
        (EJson::BigInt(x), EJson::Number(y)) => (as_f64(x), *y),
        (EJson::Number(x), EJson::BigInt(y)) => (*x, as_f64(y)),
        (EJson::Number(x), EJson::Number(y)) => (*x, *y),
        (EJson::BigInt(_) | EJson::Number(_), _) => return err(f, "a number", b),
        _ => return err(f, "a number", a),
    };
    Ok(EJson::Number(match f {
        EJsonFun::Add => x + y,
        EJsonFun::Sub => x - y,
        _ => x * y,
    }))
}

fn none() -> EJson {
    EJson::tagged(RIGHT_KEY, EJson::Null)
}

fn some(v: EJson) -> EJson {
    EJson::tagged(LEFT_KEY, v)
}

fn div(a: &EJson, b: &EJson) -> Result<EJson> {
    let f = EJsonFun::Div;
    Ok(match (a, b) {
        (EJson::BigInt(x), EJson::BigInt(y)) => {
            if y.is_zero() {
                none()
            } else {
                some(EJson::BigInt(x / y))
            }
        }
        (EJson::BigInt(_) | EJson::Number(_), EJson::BigInt(_) | EJson::Number(_)) => {
            let x = if let EJson::BigInt(i) = a { as_f64(i) } else if let EJson::Number(n) = a { *n } else { unreachable!() };
            let y = if let EJson::BigInt(i) = b { as_f64(i) } else if let EJson::Number(n) = b { *n } else { unreachable!() };
            if y == 0.0 {
                none()
            } else {
                some(EJson::Number(x / y))
            }
        }
        (EJson::BigInt(_) | EJson::Number(_), _) => return err(f, "a number", b),
        _ => return err(f, "a number", a),
    })
}

/// Left-to-right sum; integers stay integers until a double shows up.
fn sum(f: EJsonFun, items: &[EJson]) -> Result<EJson> {
    let Some((head, tail)) = items.split_first() else {
        return type_err(format!("{} of an empty array", f));
    };
    let mut acc = match scalar(f, head)? {
        v @ (EJson::BigInt(_) | EJson::Number(_)) => v.clone(),
        v => return err(f, "a number", v),
    };
    for x in tail {
        acc = arith(EJsonFun::Add, &acc, scalar(f, x)?)?;
    }
    Ok(acc)
}

fn extreme(f: EJsonFun, items: &[EJson], want: Ordering) -> Result<EJson> {
    if items.is_empty() {
        return type_err(format!("{} of an empty array", f));
    }
    let mut best = scalar(f, &items[0])?;
    for x in &items[1..] {
        if compare_total(scalar(f, x)?, best) == want {
            best = x;
        }
    }
    Ok(best.clone())
}

fn key(v: &EJson) -> String {
    v.canonical_key()
}

fn counts(items: &[EJson]) -> HashMap<String, usize> {
    let mut m = HashMap::new();
    for x in items {
        *m.entry(key(x)).or_insert(0) += 1;
    }
    m
}

fn project(f: EJsonFun, o: &BTreeMap<String, EJson>, labels: &[String]) -> Result<EJson> {
    let mut out = BTreeMap::new();
    for l in labels {
        match o.get(l) {
            Some(v) => out.insert(l.clone(), v.clone()),
            None => return type_err(format!("{}: missing field `{}`", f, l)),
        };
    }
    Ok(EJson::Object(Arc::new(out)))
}

fn group_by(items: &[EJson], g: &str, labels: &[String]) -> Result<EJson> {
    let f = EJsonFun::GroupBy;
    let mut order: Vec<(EJson, Vec<EJson>)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for x in items {
        let k = project(f, object(f, x)?, labels)?;
        let i = *index.entry(key(&k)).or_insert_with(|| {
            order.push((k, Vec::new()));
            order.len() - 1
        });
        order[i].1.push(x.clone());
    }
    let out = order
        .into_iter()
        .map(|(k, members)| {
            let EJson::Object(mut o) = k else { unreachable!() };
            Arc::make_mut(&mut o).insert(g.to_string(), EJson::array(members));
            EJson::Object(o)
        })
        .collect();
    Ok(EJson::array(out))
}

fn tag<'a>(v: &'a EJson, t: &str) -> Option<&'a EJson> {
    match v {
        EJson::Object(o) if o.len() == 1 => o.get(t),
        _ => None,
    }
}

/// Applies a runtime function.
pub fn call_runtime(f: EJsonFun, args: Vec<EJson>) -> Result<EJson> {
    if args.len() != f.arity() {
        return Err(Error::Invalid(format!("{} takes {} arguments, got {}", f, f.arity(), args.len())));
    }
    let mut args = args;
    let a = &args[0];
    let b = args.get(1);
    use EJsonFun::*;
    Ok(match f {
        Equal => EJson::Bool(a == b.unwrap()),
        Lt => EJson::Bool(compare(scalar(f, a)?, scalar(f, b.unwrap())?) == Ordering::Less),
        Le => EJson::Bool(compare(scalar(f, a)?, scalar(f, b.unwrap())?) != Ordering::Greater),
        Neg => match a {
            EJson::BigInt(i) => EJson::BigInt(-i),
            EJson::Number(x) => EJson::Number(-x),
            _ => return err(f, "a number", a),
        },
        Add | Sub | Mult => arith(f, a, b.unwrap())?,
        Div => div(a, b.unwrap())?,
        Concat => EJson::String(format!("{}{}", string(f, a)?, string(f, b.unwrap())?)),
        Rec => EJson::object([(string(f, a)?.to_string(), b.unwrap().clone())]),
        Dot => {
            let l = string(f, b.unwrap())?;
            match object(f, a)?.get(l) {
                Some(v) => v.clone(),
                None => return type_err(format!("dot: missing field `{}`", l)),
            }
        }
        Project => project(f, object(f, a)?, &strings(f, b.unwrap())?)?,
        RecConcat => {
            let mut o = object(f, a)?.clone();
            for (k, v) in object(f, b.unwrap())? {
                o.insert(k.clone(), v.clone());
            }
            EJson::Object(Arc::new(o))
        }
        Bag => EJson::array(vec![a.clone()]),
        Distinct => {
            let mut seen = std::collections::HashSet::new();
            EJson::array(array(f, a)?.iter().filter(|x| seen.insert(key(x))).cloned().collect())
        }
        Count => EJson::BigInt(BigInt::from(array(f, a)?.len())),
        Sum => sum(f, array(f, a)?)?,
        Avg => {
            let items = array(f, a)?;
            let total = match sum(f, items)? {
                EJson::BigInt(i) => as_f64(&i),
                EJson::Number(x) => x,
                _ => unreachable!(),
            };
            EJson::Number(total / items.len() as f64)
        }
        Min => extreme(f, array(f, a)?, Ordering::Less)?,
        Max => extreme(f, array(f, a)?, Ordering::Greater)?,
        Flatten => {
            let mut out = Vec::new();
            for x in array(f, a)?.iter() {
                out.extend(array(f, x)?.iter().cloned());
            }
            EJson::array(out)
        }
        Union => {
            let mut out = array(f, a)?.to_vec();
            out.extend(array(f, b.unwrap())?.iter().cloned());
            EJson::array(out)
        }
        Minus | Intersect => {
            let mut c = counts(array(f, b.unwrap())?);
            let keep_common = f == Intersect;
            let mut out = Vec::new();
            for x in array(f, a)?.iter() {
                let hit = match c.get_mut(&key(x)) {
                    Some(n) if *n > 0 => {
                        *n -= 1;
                        true
                    }
                    _ => false,
                };
                if hit == keep_common {
                    out.push(x.clone());
                }
            }
            EJson::array(out)
        }
        Contains => {
            let k = key(a);
            EJson::Bool(array(f, b.unwrap())?.iter().any(|x| key(x) == k))
        }
        Single => match array(f, a)?.as_slice() {
            [x] => some(x.clone()),
            _ => none(),
        },
        First => match array(f, a)?.first() {
            Some(x) => x.clone(),
            None => return type_err("first of an empty array"),
        },
        Left => some(a.clone()),
        Right => EJson::tagged(RIGHT_KEY, a.clone()),
        Either => {
            if tag(a, LEFT_KEY).is_some() {
                EJson::Bool(true)
            } else if tag(a, RIGHT_KEY).is_some() {
                EJson::Bool(false)
            } else {
                return err(f, "a $left or $right object", a);
            }
        }
        GetLeft => match tag(a, LEFT_KEY) {
            Some(v) => v.clone(),
            None => return err(f, "a $left object", a),
        },
        GetRight => match tag(a, RIGHT_KEY) {
            Some(v) => v.clone(),
            None => return err(f, "a $right object", a),
        },
        GroupBy => group_by(array(f, a)?, string(f, b.unwrap())?, &strings(f, &args[2])?)?,
        Push => {
            let v = args.pop().unwrap();
            match args.pop().unwrap() {
                EJson::Array(mut items) => {
                    Arc::make_mut(&mut items).push(v);
                    EJson::Array(items)
                }
                other => return err(f, "an array", &other),
            }
        }
    })
}
