use std::path::PathBuf;
use std::process::Command;

use dbx_core::corpus::Suite;
use dbx_core::imp::EJsonFun;
use dbx_core::pipeline::{compile_sql, schema_sidecar, Emit, Options};

const SUITES: [&str; 5] = ["null", "correlated", "groups", "exists", "employees"];

fn suite(name: &str) -> Suite {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    let q = std::fs::read_to_string(dir.join("queries.sql")).unwrap();
    let db = std::fs::read_to_string(dir.join("db.json")).unwrap();
    Suite::parse(name, &q, &db).unwrap()
}

fn all_js() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for name in SUITES {
        let s = suite(name);
        for (i, case) in s.cases.iter().enumerate() {
            for optimize in [false, true] {
                let c = s.compile(case, Options { optimize }).unwrap();
                out.push((format!("{}_{}_{}", name, i, optimize), c.emit(Emit::Js)));
            }
        }
    }
    out
}

/// Names called as `rt.name(`.
fn runtime_calls(js: &str) -> Vec<&str> {
    js.match_indices("rt.")
        .filter(|(i, _)| {
            !js[..*i].ends_with(|c: char| c.is_ascii_alphanumeric() || c == '_' || c == '$')
        })
        .filter_map(|(i, _)| {
            let rest = &js[i + 3..];
            let end = rest.find(|c: char| !c.is_ascii_alphanumeric())?;
            rest[end..].starts_with('(').then(|| &rest[..end])
        })
        .collect()
}

fn balanced(js: &str) -> bool {
    let mut stack = Vec::new();
    let mut in_str = false;
    let mut escaped = false;
    for c in js.chars() {
        if in_str {
            match (escaped, c) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_str = false,
                _ => {}
            }
            continue;
        }
        match c {
            '"' => in_str = true,
            '(' | '[' | '{' => stack.push(c),
            ')' | ']' | '}' => {
                let open = match c {
                    ')' => '(',
                    ']' => '[',
                    _ => '{',
                };
                if stack.pop() != Some(open) {
                    return false;
                }
            }
            _ => {}
        }
    }
    stack.is_empty() && !in_str
}

#[test]
fn module_shape() {
    for (name, js) in all_js() {
        assert!(js.starts_with("\"use strict\";\nconst rt = require(\"./dbxRuntime.js\");\n"), "{}", name);
        assert!(js.contains("function query(db) {\n  let ret;\n"), "{}", name);
        assert!(js.trim_end().ends_with("module.exports = { query };"), "{}", name);
        assert!(balanced(&js), "{}", name);
        assert!(!js.contains(" var "), "{}", name);
    }
}

#[test]
fn runtime_calls_are_known() {
    let helpers = ["iter", "toBool", "array"];
    for (name, js) in all_js() {
        for f in runtime_calls(&js) {
            assert!(
                helpers.contains(&f) || EJsonFun::from_name(f).is_some(),
                "{} calls unknown runtime function {}",
                name,
                f
            );
        }
    }
}

#[test]
fn emission_is_deterministic() {
    assert_eq!(all_js(), all_js());
}

#[test]
fn node_accepts_emitted_code() {
    let Ok(out) = Command::new("node").arg("--version").output() else {
        eprintln!("node not found; syntax check skipped");
        return;
    };
    assert!(out.status.success());
    let dir = std::env::temp_dir().join(format!("dbx-js-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (name, js) in all_js() {
        let p = dir.join(format!("{}.js", name));
        std::fs::write(&p, &js).unwrap();
        let st = Command::new("node").arg("--check").arg(&p).output().unwrap();
        assert!(st.status.success(), "{}: {}", name, String::from_utf8_lossy(&st.stderr));
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn schema_sidecar_lists_columns() {
    let c = compile_sql(
        "create table employees (name text, age int);\nselect name from employees where age > 32;",
        Options::default(),
    )
    .unwrap();
    assert_eq!(
        schema_sidecar(&c.schema),
        "{\n  \"employees\": {\n    \"age\": \"int\",\n    \"name\": \"text\"\n  }\n}\n"
    );
    let s = suite("null");
    let c = s.compile(&s.cases[0], Options::default()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&schema_sidecar(&c.schema)).unwrap();
    assert_eq!(v, serde_json::json!({
        "R": {"A": "double precision"},
        "S": {"A": "double precision"},
        "T": {"A": "double precision"},
    }));
}

#[test]
fn correlated_exists_algebra() {
    let s = suite("exists");
    let c = s.compile(&s.cases[0], Options::default()).unwrap();
    assert_eq!(
        c.emit(Emit::SqlAlg),
        "pi[t0.a as a](sigma[exists(pi[t1.b as t1_b](sigma[(t1.b = t0.a)](pi[S.b as t1.b](S))))](pi[R.a as t0.a](R)))\n"
    );
}

#[test]
fn runtime_call_scanner() {
    assert_eq!(runtime_calls("rt.push(t, rt.bag(x)); rt.x; art.y("), vec!["push", "bag"]);
    assert!(balanced("f(\"(\", [a, {b}])"));
    assert!(!balanced("f(]"));
}
