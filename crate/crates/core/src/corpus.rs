//! Benchmark suites: a script of `create table` statements followed by
//! queries, each annotated with an `-- Expected:` comment, plus a JSON
//! instance.

use serde_json::{Map, Value};

use crate::data::json::{canonical_result, data_to_plain_json, parse_instance};
use crate::data::{Data, Instance};
use crate::error::{Error, Result};
use crate::pipeline::{compile_sql, Compiled, Options};

const EXPECTED: &str = "-- Expected:";

#[derive(Debug, Clone)]
pub struct Case {
    /// The query text alone.
    pub query: String,
    /// The expected result as written in the suite.
    pub expected: String,
}

#[derive(Debug, Clone)]
pub struct Suite {
    pub name: String,
    /// The `create table` statements shared by every case.
    pub prelude: String,
    pub cases: Vec<Case>,
    pub instance: String,
}

impl Case {
    /// The full script: prelude then query.
    pub fn script(&self, suite: &Suite) -> String {
        format!("{}\n{}\n", suite.prelude.trim_end(), self.query)
    }
}

impl Suite {
    pub fn parse(name: &str, queries: &str, instance: &str) -> Result<Suite> {
        let mut chunks = Vec::new();
        let mut current = String::new();
        for line in queries.lines() {
            if let Some(rest) = line.trim_start().strip_prefix(EXPECTED) {
                chunks.push((std::mem::take(&mut current), rest.trim().to_string()));
            } else {
                current.push_str(line);
                current.push('\n');
            }
        }
        if !current.trim().is_empty() {
            return Err(Error::Instance(format!("suite `{}`: query without an expected result", name)));
        }
        let mut prelude = String::new();
        let mut cases = Vec::new();
        for (i, (text, expected)) in chunks.into_iter().enumerate() {
            let query = if i == 0 {
                let (p, q) = split_prelude(&text);
                prelude = p;
                q
            } else {
                text
            };
            cases.push(Case { query: query.trim().to_string(), expected });
        }
        Ok(Suite { name: name.to_string(), prelude, cases, instance: instance.to_string() })
    }

    pub fn compile(&self, case: &Case, opts: Options) -> Result<Compiled> {
        compile_sql(&case.script(self), opts)
    }

    pub fn load_instance(&self, c: &Compiled) -> Result<Instance> {
        parse_instance(&c.schema, &self.instance)
    }
}

/// Splits the leading `create table` statements off a chunk.
fn split_prelude(text: &str) -> (String, String) {
    let mut end = 0;
    for piece in text.split_inclusive(';') {
        let code: String = piece
            .lines()
            .filter(|l| !l.trim_start().starts_with("--"))
            .collect::<Vec<_>>()
            .join("\n");
        if code.trim_start().to_ascii_lowercase().starts_with("create") {
            end += piece.len();
        } else {
            break;
        }
    }
    (text[..end].to_string(), text[end..].to_string())
}

/// Reads an expected result as a JSON array. Accepts JSON, `empty`, and the
/// tuple notation `(a=1,b=2); (a=3,b=4)`.
pub fn expected_json(raw: &str) -> Result<Value> {
    let raw = raw.trim();
    let bad = |m: &str| Error::Instance(format!("bad expected result `{}`: {}", raw, m));
    if raw == "empty" {
        return Ok(Value::Array(Vec::new()));
    }
    if raw.starts_with('[') {
        return serde_json::from_str(raw).map_err(|e| bad(&e.to_string()));
    }
    let mut rows = Vec::new();
    for t in raw.split(';') {
        let t = t.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| bad("tuples are written in parentheses"))?;
        let mut row = Map::new();
        for field in inner.split(',') {
            let (k, v) = field.split_once('=').ok_or_else(|| bad("fields are written `name=value`"))?;
            let v = v.trim();
            let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
            row.insert(k.trim().to_string(), v);
        }
        rows.push(Value::Object(row));
    }
    Ok(Value::Array(rows))
}

/// Bag-equality of a result with an expected result, after printing both as
/// plain JSON.
pub fn matches_expected(result: &Data, expected: &str) -> Result<bool> {
    let want = canonical_result(&expected_json(expected)?.to_string())?;
    let got = canonical_result(&data_to_plain_json(result))?;
    Ok(want == got)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_forms() {
        assert_eq!(expected_json("empty").unwrap(), serde_json::json!([]));
        assert_eq!(
            expected_json("(a1=1,max=10); (a1=2,max=10)").unwrap(),
            serde_json::json!([{"a1":1,"max":10},{"a1":2,"max":10}])
        );
        assert_eq!(expected_json(r#"[{"A":null, "c":2}]"#).unwrap(), serde_json::json!([{"A":null,"c":2}]));
        assert!(expected_json("a1=1").is_err());
    }

    #[test]
    fn suite_splitting() {
        let s = Suite::parse(
            "s",
            "create table R (A int);\ncreate table S (B int);\n\nselect A from R;\n-- Expected: []\n\n-- second\nselect B from S;\n-- Expected: empty  \n",
            "{}",
        )
        .unwrap();
        assert_eq!(s.prelude, "create table R (A int);\ncreate table S (B int);");
        assert_eq!(s.cases.len(), 2);
        assert_eq!(s.cases[0].query, "select A from R;");
        assert_eq!(s.cases[1].query, "-- second\nselect B from S;");
        assert_eq!(s.cases[1].expected, "empty");
        assert!(Suite::parse("s", "select 1;\n", "{}").is_err());
    }

    #[test]
    fn bag_equal_results() {
        let d = Data::bag(vec![
            Data::record([("A".into(), Data::left(Data::Double(1.0)))]),
            Data::record([("A".into(), Data::null())]),
        ]);
        assert!(matches_expected(&d, r#"[{"A":null},{"A":1}]"#).unwrap());
        assert!(!matches_expected(&d, r#"[{"A":1}]"#).unwrap());
    }
}
