use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use super::instance::Bag;
use super::value::{fmt_double, value_total_order, SqlValue};

/// Record fields in canonical (lexicographic) label order.
pub type Record = BTreeMap<String, Data>;

/// Nested data shared by every stage below SQL_Alg.
///
/// Records and bags sit behind `Arc` so that environment records and large
/// collections can be copied cheaply between interpreter frames.
#[derive(Debug, Clone)]
pub enum Data {
    Unit,
    Bool(bool),
    Int(BigInt),
    Double(f64),
    Text(String),
    Record(Arc<Record>),
    Bag(Arc<Vec<Data>>),
    Left(Arc<Data>),
    Right(Arc<Data>),
}

impl Data {
    pub fn int(i: i64) -> Data {
        Data::Int(BigInt::from(i))
    }

    pub fn text(s: &str) -> Data {
        Data::Text(s.to_string())
    }

    pub fn bag(items: Vec<Data>) -> Data {
        Data::Bag(Arc::new(items))
    }

    pub fn empty_bag() -> Data {
        Data::bag(Vec::new())
    }

    pub fn record(fields: impl IntoIterator<Item = (String, Data)>) -> Data {
        Data::Record(Arc::new(fields.into_iter().collect()))
    }

    pub fn empty_record() -> Data {
        Data::Record(Arc::new(Record::new()))
    }

    pub fn left(d: Data) -> Data {
        Data::Left(Arc::new(d))
    }

    pub fn right(d: Data) -> Data {
        Data::Right(Arc::new(d))
    }

    /// The boxed null, `right(unit)`.
    pub fn null() -> Data {
        Data::right(Data::Unit)
    }

    pub fn as_bag(&self) -> Option<&[Data]> {
        match self {
            Data::Bag(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_record(&self) -> Option<&Record> {
        match self {
            Data::Record(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Data::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// The scalar carried by an atom, if this is one.
    pub fn as_atom(&self) -> Option<SqlValue> {
        match self {
            Data::Bool(b) => Some(SqlValue::Bool(*b)),
            Data::Int(i) => Some(SqlValue::Int(i.clone())),
            Data::Double(d) => Some(SqlValue::Double(*d)),
            Data::Text(s) => Some(SqlValue::Text(s.clone())),
            _ => None,
        }
    }

    /// The atom for a non-null scalar.
    pub fn from_atom(v: SqlValue) -> Option<Data> {
        match v {
            SqlValue::Null => None,
            SqlValue::Bool(b) => Some(Data::Bool(b)),
            SqlValue::Int(i) => Some(Data::Int(i)),
            SqlValue::Double(d) => Some(Data::Double(d)),
            SqlValue::Text(s) => Some(Data::Text(s)),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Data::Unit => 0,
            Data::Bool(_) => 1,
            Data::Int(_) | Data::Double(_) => 2,
            Data::Text(_) => 3,
            Data::Record(_) => 4,
            Data::Bag(_) => 5,
            Data::Left(_) => 6,
            Data::Right(_) => 7,
        }
    }

    /// Nesting depth: atoms and unit are depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Data::Record(r) => 1 + r.values().map(Data::depth).max().unwrap_or(0),
            Data::Bag(b) => 1 + b.iter().map(Data::depth).max().unwrap_or(0),
            Data::Left(d) | Data::Right(d) => 1 + d.depth(),
            _ => 0,
        }
    }
}

impl Ord for Data {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.rank().cmp(&other.rank()) {
            Ordering::Equal => {}
            o => return o,
        }
        match (self, other) {
            (Data::Unit, Data::Unit) => Ordering::Equal,
            (Data::Record(a), Data::Record(b)) => a.iter().cmp(b.iter()),
            (Data::Bag(a), Data::Bag(b)) => a.iter().cmp(b.iter()),
            (Data::Left(a), Data::Left(b)) | (Data::Right(a), Data::Right(b)) => a.cmp(b),
            _ => value_total_order(&self.as_atom().unwrap(), &other.as_atom().unwrap()),
        }
    }
}

impl PartialOrd for Data {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Data {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Data {}

fn write_label(f: &mut fmt::Formatter<'_>, l: &str) -> fmt::Result {
    let plain = !l.is_empty()
        && l.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$' || c == '.');
    if plain {
        write!(f, "{}", l)
    } else {
        write!(f, "{:?}", l)
    }
}

impl fmt::Display for Data {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Data::Unit => write!(f, "()"),
            Data::Bool(b) => write!(f, "{}", b),
            Data::Int(i) => write!(f, "{}", i),
            Data::Double(d) => write!(f, "{}", fmt_double(*d)),
            Data::Text(s) => write!(f, "{:?}", s),
            Data::Record(r) => {
                write!(f, "{{")?;
                for (i, (k, v)) in r.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write_label(f, k)?;
                    write!(f, ": {}", v)?;
                }
                write!(f, "}}")
            }
            Data::Bag(b) => {
                write!(f, "[")?;
                for (i, v) in b.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", v)?;
                }
                write!(f, "]")
            }
            Data::Left(d) => write!(f, "left({})", d),
            Data::Right(d) => write!(f, "right({})", d),
        }
    }
}

/// Boxes a value: `left(atom)` for a present value, `right(unit)` for null.
pub fn value_to_data(v: &SqlValue) -> Data {
    match Data::from_atom(v.clone()) {
        Some(a) => Data::left(a),
        None => Data::null(),
    }
}

/// Inverse of [`value_to_data`].
pub fn data_to_value(d: &Data) -> Option<SqlValue> {
    match d {
        Data::Left(a) => a.as_atom(),
        Data::Right(u) if matches!(**u, Data::Unit) => Some(SqlValue::Null),
        _ => None,
    }
}

/// A bag of tuples as a bag of records of boxed values, order preserved.
pub fn bag_to_data(b: &Bag) -> Data {
    Data::bag(
        b.iter()
            .map(|t| Data::record(t.iter().map(|(k, v)| (k.clone(), value_to_data(v)))))
            .collect(),
    )
}

/// Multiset equality, independent of order.
pub fn bag_eq<T: Ord + Clone>(a: &[T], b: &[T]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    a == b
}

fn counts<T: Ord + Clone>(b: &[T]) -> BTreeMap<T, usize> {
    let mut m = BTreeMap::new();
    for x in b {
        *m.entry(x.clone()).or_insert(0) += 1;
    }
    m
}

/// Multiset difference: each element of `b` cancels one equal element of
/// `a`, earliest first. Survivors keep their order.
pub fn bag_minus<T: Ord + Clone>(a: &[T], b: &[T]) -> Vec<T> {
    let mut c = counts(b);
    let mut out = Vec::new();
    for x in a {
        match c.get_mut(x) {
            Some(n) if *n > 0 => *n -= 1,
            _ => out.push(x.clone()),
        }
    }
    out
}

/// Multiset intersection, keeping the order of `a`.
pub fn bag_intersect<T: Ord + Clone>(a: &[T], b: &[T]) -> Vec<T> {
    let mut c = counts(b);
    let mut out = Vec::new();
    for x in a {
        if let Some(n) = c.get_mut(x) {
            if *n > 0 {
                *n -= 1;
                out.push(x.clone());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Tuple;

    #[test]
    fn boxing() {
        assert_eq!(value_to_data(&SqlValue::int(1)), Data::left(Data::int(1)));
        assert_eq!(value_to_data(&SqlValue::Null), Data::right(Data::Unit));
        assert_eq!(value_to_data(&SqlValue::text("John")), Data::left(Data::text("John")));
        assert_eq!(data_to_value(&Data::null()), Some(SqlValue::Null));
        assert_ne!(Data::left(Data::Unit), Data::right(Data::Unit));
    }

    #[test]
    fn bags() {
        assert_eq!(bag_to_data(&vec![]), Data::empty_bag());
        let t1: Tuple = [("A".to_string(), SqlValue::Null)].into_iter().collect();
        let t2: Tuple = [("A".to_string(), SqlValue::Double(1.0))].into_iter().collect();
        let d = bag_to_data(&vec![t1, t2]);
        let expect = Data::bag(vec![
            Data::record([("A".to_string(), Data::null())]),
            Data::record([("A".to_string(), Data::left(Data::Double(1.0)))]),
        ]);
        assert_eq!(d, expect);
        assert!(bag_eq(&[1, 2, 2], &[2, 1, 2]));
        assert!(!bag_eq(&[1, 2], &[2, 2]));
        assert_eq!(bag_minus(&[1, 2, 2, 3], &[2, 4]), vec![1, 2, 3]);
        assert_eq!(bag_intersect(&[1, 2, 2, 3], &[2, 2, 2, 1]), vec![1, 2, 2]);
    }

    #[test]
    fn display() {
        let d = Data::record([
            ("a".to_string(), Data::left(Data::int(1))),
            ("b c".to_string(), Data::bag(vec![Data::Unit])),
        ]);
        assert_eq!(d.to_string(), "{a: left(1), \"b c\": [()]}");
    }
}
