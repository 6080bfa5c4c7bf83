//! JSON text for instances, results and typed EJson.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde_json::Value;

use super::ejson::EJson;
use super::instance::{ColumnType, Instance, Schema, Tuple};
use super::nra::Data;
use super::value::SqlValue;
use crate::error::{Error, Result};

fn is_integer_literal(n: &serde_json::Number) -> bool {
    let s = n.to_string();
    !s.contains(['.', 'e', 'E'])
}

fn parse_number(n: &serde_json::Number) -> Result<f64> {
    n.to_string()
        .parse::<f64>()
        .map_err(|e| Error::Instance(format!("bad number {}: {}", n, e)))
}

fn parse_bigint(n: &serde_json::Number) -> Result<BigInt> {
    n.to_string()
        .parse::<BigInt>()
        .map_err(|e| Error::Instance(format!("bad integer {}: {}", n, e)))
}

fn column_value(ty: ColumnType, v: &Value, col: &str) -> Result<SqlValue> {
    let bad = || Error::Instance(format!("value {} does not fit column `{}` of type {}", v, col, ty));
    Ok(match (ty, v) {
        (_, Value::Null) => SqlValue::Null,
        (ColumnType::Int, Value::Number(n)) if is_integer_literal(n) => SqlValue::Int(parse_bigint(n)?),
        (ColumnType::Double, Value::Number(n)) => SqlValue::Double(parse_number(n)?),
        (ColumnType::Text, Value::String(s)) => SqlValue::Text(s.clone()),
        (ColumnType::Bool, Value::Bool(b)) => SqlValue::Bool(*b),
        _ => return Err(bad()),
    })
}

/// Reads an instance: a JSON object mapping table names to arrays of flat
/// objects. Columns missing from a row are null; tables missing from the
/// object are empty.
pub fn parse_instance(schema: &Schema, text: &str) -> Result<Instance> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Instance(e.to_string()))?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Instance("instance must be a JSON object".into()))?;
    for k in obj.keys() {
        if schema.table(k).is_none() {
            return Err(Error::Instance(format!("table `{}` is not declared", k)));
        }
    }
    let mut inst = Instance::empty(schema.clone());
    for t in &schema.tables {
        let Some(rows) = obj.get(&t.name) else { continue };
        let rows = rows
            .as_array()
            .ok_or_else(|| Error::Instance(format!("table `{}` must be an array", t.name)))?;
        let bag = inst.tables.get_mut(&t.name).unwrap();
        for row in rows {
            let row = row
                .as_object()
                .ok_or_else(|| Error::Instance(format!("rows of `{}` must be objects", t.name)))?;
            for k in row.keys() {
                if k == "$left" || k == "$right" {
                    return Err(Error::ReservedLabel(k.clone()));
                }
                if t.column_type(k).is_none() {
                    return Err(Error::Instance(format!("unknown column `{}.{}`", t.name, k)));
                }
            }
            let mut tuple = Tuple::new();
            for (c, ty) in &t.columns {
                let v = row.get(c).unwrap_or(&Value::Null);
                tuple.insert(t.qualified(c), column_value(*ty, v, c)?);
            }
            bag.push(tuple);
        }
    }
    Ok(inst)
}

fn value_json(v: &SqlValue) -> Value {
    match v {
        SqlValue::Null => Value::Null,
        SqlValue::Bool(b) => Value::Bool(*b),
        SqlValue::Int(i) => Value::Number(i.to_string().parse().expect("integer literal")),
        SqlValue::Double(d) if d.is_finite() => {
            let s = format!("{:?}", d);
            Value::Number(s.parse().expect("finite double"))
        }
        SqlValue::Double(_) => Value::Null,
        SqlValue::Text(s) => Value::String(s.clone()),
    }
}

/// Prints an instance in the format [`parse_instance`] reads: unqualified
/// column names, doubles always with a fraction.
pub fn instance_json(i: &Instance) -> String {
    let mut obj = serde_json::Map::new();
    for t in &i.schema.tables {
        let rows = i.table(&t.name).map(|r| r.as_slice()).unwrap_or(&[]);
        let rows = rows
            .iter()
            .map(|row| {
                let mut o = serde_json::Map::new();
                for (c, _) in &t.columns {
                    let v = row.get(&t.qualified(c)).cloned().unwrap_or(SqlValue::Null);
                    o.insert(c.clone(), value_json(&v));
                }
                Value::Object(o)
            })
            .collect();
        obj.insert(t.name.clone(), Value::Array(rows));
    }
    Value::Object(obj).to_string()
}

/// Formats a double the way JavaScript's `JSON.stringify` does for the
/// common cases: integral values print without a fraction.
pub fn js_number(d: f64) -> String {
    if !d.is_finite() {
        return "null".into();
    }
    if d == d.trunc() && d.abs() < 1e21 {
        return format!("{}", d as i128);
    }
    format!("{}", d)
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).unwrap()
}

/// Plain JSON for a result: `left(v)` prints as `v`, `right(_)` as null,
/// integers and doubles as JSON numbers.
pub fn data_to_plain_json(d: &Data) -> String {
    let mut out = String::new();
    write_plain(d, &mut out);
    out
}

fn write_plain(d: &Data, out: &mut String) {
    match d {
        Data::Unit | Data::Right(_) => out.push_str("null"),
        Data::Left(x) => write_plain(x, out),
        Data::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Data::Int(i) => out.push_str(&i.to_string()),
        Data::Double(x) => out.push_str(&js_number(*x)),
        Data::Text(s) => out.push_str(&quote(s)),
        Data::Record(r) => {
            out.push('{');
            for (i, (k, v)) in r.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&quote(k));
                out.push(':');
                write_plain(v, out);
            }
            out.push('}');
        }
        Data::Bag(b) => {
            out.push('[');
            for (i, v) in b.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_plain(v, out);
            }
            out.push(']');
        }
    }
}

/// Canonical form of a plain JSON result: the elements of the top-level
/// array printed and sorted, so two bag-equal results compare equal.
pub fn canonical_result(json: &str) -> Result<Vec<String>> {
    let v: Value = serde_json::from_str(json).map_err(|e| Error::Instance(e.to_string()))?;
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Instance("result must be an array".into()))?;
    let mut rows: Vec<String> = arr.iter().map(canonical_value).collect();
    rows.sort();
    Ok(rows)
}

fn canonical_value(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.to_string().parse::<f64>() {
            Ok(d) if !is_integer_literal(n) => js_number(d),
            _ => n.to_string(),
        },
        Value::Object(o) => {
            let m: BTreeMap<&String, String> = o.iter().map(|(k, v)| (k, canonical_value(v))).collect();
            let parts: Vec<String> = m.iter().map(|(k, v)| format!("{}:{}", quote(k), v)).collect();
            format!("{{{}}}", parts.join(","))
        }
        Value::Array(a) => {
            let parts: Vec<String> = a.iter().map(canonical_value).collect();
            format!("[{}]", parts.join(","))
        }
        other => other.to_string(),
    }
}

/// Typed EJson text: integer literals are big integers, literals with a
/// fraction or exponent are numbers.
pub fn parse_typed_ejson(text: &str) -> Result<EJson> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Instance(e.to_string()))?;
    typed_from_value(&v)
}

pub fn typed_from_value(v: &Value) -> Result<EJson> {
    Ok(match v {
        Value::Null => EJson::Null,
        Value::Bool(b) => EJson::Bool(*b),
        Value::Number(n) if is_integer_literal(n) => EJson::BigInt(parse_bigint(n)?),
        Value::Number(n) => EJson::Number(parse_number(n)?),
        Value::String(s) => EJson::String(s.clone()),
        Value::Array(a) => EJson::array(a.iter().map(typed_from_value).collect::<Result<_>>()?),
        Value::Object(o) => {
            let mut m = BTreeMap::new();
            for (k, v) in o {
                m.insert(k.clone(), typed_from_value(v)?);
            }
            EJson::Object(m.into())
        }
    })
}

/// Prints EJson so that [`parse_typed_ejson`] reads it back unchanged
/// (finite numbers only).
pub fn typed_ejson_text(j: &EJson) -> String {
    match j {
        EJson::Null => "null".into(),
        EJson::Bool(b) => b.to_string(),
        EJson::Number(x) => {
            let s = format!("{:?}", x);
            if s.contains(['.', 'e', 'E']) { s } else { format!("{}.0", s) }
        }
        EJson::BigInt(i) => i.to_string(),
        EJson::String(s) => quote(s),
        EJson::Array(a) => {
            let parts: Vec<String> = a.iter().map(typed_ejson_text).collect();
            format!("[{}]", parts.join(","))
        }
        EJson::Object(o) => {
            let parts: Vec<String> =
                o.iter().map(|(k, v)| format!("{}:{}", quote(k), typed_ejson_text(v))).collect();
            format!("{{{}}}", parts.join(","))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::TableSchema;

    fn employees() -> Schema {
        let mut s = Schema::default();
        s.add(TableSchema {
            name: "employees".into(),
            columns: vec![("name".into(), ColumnType::Text), ("age".into(), ColumnType::Int)],
        })
        .unwrap();
        s
    }

    #[test]
    fn instance_parsing() {
        let i = parse_instance(
            &employees(),
            r#"{"employees":[{"name":"John","age":34},{"name":null,"age":35},{"name":"Jill"}]}"#,
        )
        .unwrap();
        let rows = i.table("employees").unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0]["employees.age"], SqlValue::int(34));
        assert_eq!(rows[1]["employees.name"], SqlValue::Null);
        assert_eq!(rows[2]["employees.age"], SqlValue::Null);
        i.validate().unwrap();
        assert!(parse_instance(&employees(), r#"{"employees":[{"age":3.5}]}"#).is_err());
        assert!(parse_instance(&employees(), r#"{"other":[]}"#).is_err());
        assert!(parse_instance(&employees(), r#"{"employees":[{"$left":1}]}"#).is_err());
    }

    #[test]
    fn instance_round_trip() {
        let text = r#"{"employees":[{"age":34,"name":"John"},{"age":null,"name":null}]}"#;
        let i = parse_instance(&employees(), text).unwrap();
        assert_eq!(instance_json(&i), text);
        let mut s = Schema::default();
        s.add(TableSchema { name: "R".into(), columns: vec![("A".into(), ColumnType::Double)] }).unwrap();
        let i = parse_instance(&s, r#"{"R":[{"A":1.0},{"A":-0.25}]}"#).unwrap();
        assert_eq!(instance_json(&i), r#"{"R":[{"A":1.0},{"A":-0.25}]}"#);
        assert_eq!(parse_instance(&s, &instance_json(&i)).unwrap(), i);
    }

    #[test]
    fn plain_output() {
        let d = Data::bag(vec![
            Data::record([("A".into(), Data::left(Data::Double(1.0)))]),
            Data::record([("A".into(), Data::null())]),
        ]);
        assert_eq!(data_to_plain_json(&d), r#"[{"A":1},{"A":null}]"#);
        assert_eq!(js_number(0.5), "0.5");
        assert_eq!(js_number(-0.0), "0");
    }

    #[test]
    fn canonical_results_ignore_order() {
        let a = canonical_result(r#"[{"A":1},{"A":null,"c":2}]"#).unwrap();
        let b = canonical_result(r#"[{"c":2,"A":null},{"A":1.0}]"#).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn typed_round_trip() {
        let j = EJson::array(vec![EJson::int(3), EJson::Number(3.0), EJson::str("x"), EJson::Null]);
        let t = typed_ejson_text(&j);
        assert_eq!(t, r#"[3,3.0,"x",null]"#);
        assert_eq!(parse_typed_ejson(&t).unwrap(), j);
    }
}
