use std::path::PathBuf;
use std::process::{Command, Output};

fn dbx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dbx")).args(args).output().unwrap()
}

fn testdata(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../testdata").join(name).to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("dbx-cli-{}-{}", name, std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn run_prints_the_trace_result() {
    let o = dbx(&["run", &testdata("org2.sql"), "--db", &testdata("db1.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "[{\"name\":\"John\"},{\"name\":\"Jim\"},{\"name\":null}]\n");
}

#[test]
fn every_stage_prints_the_same_result() {
    let (sql, db) = (testdata("org2.sql"), testdata("db1.json"));
    let want = stdout(&dbx(&["run", &sql, "--db", &db, "--stage", "sqlalg"]));
    for s in ["nrae", "nnrc", "stratified", "nnrs", "noshadow", "nnrsimp", "impdata", "imp"] {
        for opt in [false, true] {
            let mut a = vec!["run", &sql, "--db", &db, "--stage", s];
            if opt {
                a.push("-O");
            }
            assert_eq!(stdout(&dbx(&a)), want, "stage {}", s);
        }
    }
}

#[test]
fn compile_writes_js_and_schema() {
    let d = scratch("js");
    let sql = d.join("org2.sql");
    std::fs::copy(testdata("org2.sql"), &sql).unwrap();
    let o = dbx(&["compile", sql.to_str().unwrap(), "--emit", "js"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let js = std::fs::read_to_string(d.join("org2.js")).unwrap();
    assert!(js.contains("function query(db)"));
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("org2.schema.json")).unwrap()).unwrap();
    assert_eq!(schema, serde_json::json!({"employees": {"name": "text", "age": "int"}}));
    let o = dbx(&["compile", sql.to_str().unwrap(), "-O", "-o", d.join("out.js").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(d.join("out.js").exists() && d.join("out.schema.json").exists());
    std::fs::remove_dir_all(&d).unwrap();
}

#[test]
fn compile_prints_intermediate_stages() {
    for e in ["sqlalg", "nrae", "nnrc", "nnrs", "nnrsimp", "imp"] {
        let o = dbx(&["compile", &testdata("org2.sql"), "--emit", e]);
        assert_eq!(o.status.code(), Some(0));
        assert!(!stdout(&o).is_empty());
    }
    let o = dbx(&["compile", &testdata("org2.sql"), "--emit", "sqlalg"]);
    assert_eq!(
        stdout(&o),
        "pi[t0.name as name](sigma[(t0.age > 32)](pi[employees.name as t0.name, employees.age as t0.age](employees)))\n"
    );
}

#[test]
fn user_errors_exit_with_2() {
    let d = scratch("err");
    let p = d.join("distinct.sql");
    std::fs::write(&p, "create table R (a int);\nselect distinct a from R;\n").unwrap();
    let o = dbx(&["compile", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("distinct"));
    std::fs::write(&p, "create table R (a int);\nselect b from R;\n").unwrap();
    assert_eq!(dbx(&["compile", p.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(dbx(&["compile", d.join("missing.sql").to_str().unwrap()]).status.code(), Some(2));
    let bad_db = d.join("bad.json");
    std::fs::write(&bad_db, r#"{"employees": [{"name": 3, "age": 1}]}"#).unwrap();
    let o = dbx(&["run", &testdata("org2.sql"), "--db", bad_db.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&d).unwrap();
}

#[test]
fn difftest_exit_codes() {
    let o = dbx(&["difftest", "--seed", "1", "--cases", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["passed"], 50);
    let o = dbx(&["difftest", "--cases", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let o = dbx(&["difftest", "--cases", "30", "--mutate", "broken-rule"]);
    assert_eq!(o.status.code(), Some(3));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["failures"][0]["pair"], "nrae -> nrae -O");
}

#[test]
fn bench_prints_the_table() {
    let o = dbx(&["bench"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[1].split_whitespace().collect::<Vec<_>>(), ["null", "4/4"]);
    assert_eq!(lines[2].split_whitespace().collect::<Vec<_>>(), ["correlated", "11/11"]);
    assert_eq!(out.matches("ms  ").count(), 19);
}
