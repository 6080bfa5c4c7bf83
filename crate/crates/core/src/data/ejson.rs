use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use super::nra::Data;
use super::value::fmt_double;
use crate::error::{Error, Result};

pub const LEFT_KEY: &str = "$left";
pub const RIGHT_KEY: &str = "$right";

/// Extended JSON: JSON plus big integers.
#[derive(Debug, Clone)]
pub enum EJson {
    Null,
    Bool(bool),
    Number(f64),
    BigInt(BigInt),
    String(String),
    Array(Arc<Vec<EJson>>),
    Object(Arc<BTreeMap<String, EJson>>),
}

impl PartialEq for EJson {
    /// Structural equality; numbers compare with IEEE semantics.
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (EJson::Null, EJson::Null) => true,
            (EJson::Bool(a), EJson::Bool(b)) => a == b,
            (EJson::Number(a), EJson::Number(b)) => a == b,
            (EJson::BigInt(a), EJson::BigInt(b)) => a == b,
            (EJson::String(a), EJson::String(b)) => a == b,
            (EJson::Array(a), EJson::Array(b)) => a == b,
            (EJson::Object(a), EJson::Object(b)) => a == b,
            _ => false,
        }
    }
}

impl EJson {
    pub fn array(items: Vec<EJson>) -> EJson {
        EJson::Array(Arc::new(items))
    }

    pub fn object(fields: impl IntoIterator<Item = (String, EJson)>) -> EJson {
        EJson::Object(Arc::new(fields.into_iter().collect()))
    }

    pub fn int(i: i64) -> EJson {
        EJson::BigInt(BigInt::from(i))
    }

    pub fn str(s: &str) -> EJson {
        EJson::String(s.to_string())
    }

    pub fn tagged(key: &str, v: EJson) -> EJson {
        EJson::object([(key.to_string(), v)])
    }

    /// The payload of a `{"$left": v}` object.
    pub fn as_left(&self) -> Option<&EJson> {
        self.tag(LEFT_KEY)
    }

    /// The payload of a `{"$right": v}` object.
    pub fn as_right(&self) -> Option<&EJson> {
        self.tag(RIGHT_KEY)
    }

    fn tag(&self, key: &str) -> Option<&EJson> {
        match self {
            EJson::Object(o) if o.len() == 1 => o.get(key),
            _ => None,
        }
    }

    /// A string that is equal for two values exactly when they are
    /// structurally equal (with `-0` and `0` identified). Used for hashing.
    pub fn canonical_key(&self) -> String {
        let mut s = String::new();
        self.write_key(&mut s);
        s
    }

    fn write_key(&self, s: &mut String) {
        match self {
            EJson::Null => s.push('N'),
            EJson::Bool(b) => s.push(if *b { 'T' } else { 'F' }),
            EJson::Number(n) => {
                let n = if *n == 0.0 { 0.0 } else { *n };
                s.push_str(&format!("d{:?};", n));
            }
            EJson::BigInt(i) => s.push_str(&format!("i{};", i)),
            EJson::String(x) => s.push_str(&format!("s{:?}", x)),
            EJson::Array(a) => {
                s.push('[');
                for x in a.iter() {
                    x.write_key(s);
                    s.push(',');
                }
                s.push(']');
            }
            EJson::Object(o) => {
                s.push('{');
                for (k, v) in o.iter() {
                    s.push_str(&format!("{:?}:", k));
                    v.write_key(s);
                    s.push(',');
                }
                s.push('}');
            }
        }
    }
}

impl fmt::Display for EJson {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EJson::Null => write!(f, "null"),
            EJson::Bool(b) => write!(f, "{}", b),
            EJson::Number(n) => write!(f, "{}", fmt_double(*n)),
            EJson::BigInt(i) => write!(f, "{}n", i),
            EJson::String(s) => write!(f, "{:?}", s),
            EJson::Array(a) => {
                write!(f, "[")?;
                for (i, v) in a.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", v)?;
                }
                write!(f, "]")
            }
            EJson::Object(o) => {
                write!(f, "{{")?;
                for (i, (k, v)) in o.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{:?}: {}", k, v)?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// Encodes nested data as EJson. `left`/`right` become single-key objects
/// with the reserved labels, so records may not use those labels.
pub fn data_to_ejson(d: &Data) -> Result<EJson> {
    Ok(match d {
        Data::Unit => EJson::Null,
        Data::Bool(b) => EJson::Bool(*b),
        Data::Int(i) => EJson::BigInt(i.clone()),
        Data::Double(x) => EJson::Number(*x),
        Data::Text(s) => EJson::String(s.clone()),
        Data::Record(r) => {
            let mut o = BTreeMap::new();
            for (k, v) in r.iter() {
                if k == LEFT_KEY || k == RIGHT_KEY {
                    return Err(Error::ReservedLabel(k.clone()));
                }
                o.insert(k.clone(), data_to_ejson(v)?);
            }
            EJson::Object(Arc::new(o))
        }
        Data::Bag(b) => EJson::array(b.iter().map(data_to_ejson).collect::<Result<_>>()?),
        Data::Left(x) => EJson::tagged(LEFT_KEY, data_to_ejson(x)?),
        Data::Right(x) => EJson::tagged(RIGHT_KEY, data_to_ejson(x)?),
    })
}

/// Inverse of [`data_to_ejson`] on its image.
pub fn ejson_to_data(j: &EJson) -> Result<Data> {
    Ok(match j {
        EJson::Null => Data::Unit,
        EJson::Bool(b) => Data::Bool(*b),
        EJson::Number(x) => Data::Double(*x),
        EJson::BigInt(i) => Data::Int(i.clone()),
        EJson::String(s) => Data::Text(s.clone()),
        EJson::Array(a) => Data::bag(a.iter().map(ejson_to_data).collect::<Result<_>>()?),
        EJson::Object(o) => {
            if let Some(v) = j.as_left() {
                return Ok(Data::left(ejson_to_data(v)?));
            }
            if let Some(v) = j.as_right() {
                return Ok(Data::right(ejson_to_data(v)?));
            }
            let mut r = BTreeMap::new();
            for (k, v) in o.iter() {
                if k == LEFT_KEY || k == RIGHT_KEY {
                    return Err(Error::ReservedLabel(k.clone()));
                }
                r.insert(k.clone(), ejson_to_data(v)?);
            }
            Data::Record(Arc::new(r))
        }
    })
}
