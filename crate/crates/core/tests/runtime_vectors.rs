//! The runtime test vectors shared with the JavaScript runtime live in
//! `testdata/runtime_vectors.json` at the workspace root. Expected results
//! are computed by the nested-data operators and checked against the EJson
//! runtime. Set `DBX_BLESS=1` to rewrite the file.

use std::collections::BTreeMap;
use std::path::PathBuf;

use dbx_core::data::json::{parse_typed_ejson, typed_ejson_text, typed_from_value};
use dbx_core::data::{data_to_ejson, ejson_to_data, Data, EJson};
use dbx_core::imp::{call_runtime, EJsonFun};
use dbx_core::nrae::{apply_binary, apply_unary, BinOp, UnOp};

const MIN_VECTORS: usize = 5;

fn path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../testdata/runtime_vectors.json")
}

fn inputs() -> Vec<(&'static str, Vec<&'static str>)> {
    let v = |f, args: &[&'static str]| (f, args.to_vec());
    vec![
        v("equal", &["1", "1"]),
        v("equal", &["1", "1.0"]),
        v("equal", &[r#"{"a":[1,2]}"#, r#"{"a":[1,2]}"#]),
        v("equal", &[r#"[1,2]"#, r#"[2,1]"#]),
        v("equal", &[r#"{"$left":"x"}"#, r#"{"$right":null}"#]),
        v("equal", &["-0.0", "0.0"]),
        v("lt", &["1", "2"]),
        v("lt", &["2", "1.5"]),
        v("lt", &["1", "1.0"]),
        v("lt", &[r#""abc""#, r#""abd""#]),
        v("lt", &["false", "true"]),
        v("lt", &["-3", "-2.5"]),
        v("le", &["1", "1.0"]),
        v("le", &["2.5", "2"]),
        v("le", &[r#""b""#, r#""a""#]),
        v("le", &["true", "true"]),
        v("le", &["123456789012345678901234567890", "123456789012345678901234567891"]),
        v("neg", &["5"]),
        v("neg", &["-7"]),
        v("neg", &["2.5"]),
        v("neg", &["0"]),
        v("neg", &["123456789012345678901234567890"]),
        v("add", &["1", "2"]),
        v("add", &["1", "0.5"]),
        v("add", &["0.25", "0.5"]),
        v("add", &["9223372036854775807", "1"]),
        v("add", &["-3", "3"]),
        v("sub", &["1", "2"]),
        v("sub", &["1.5", "1"]),
        v("sub", &["0.0", "0.0"]),
        v("sub", &["-9223372036854775808", "1"]),
        v("sub", &["10", "0.5"]),
        v("mult", &["3", "4"]),
        v("mult", &["0", "0.5"]),
        v("mult", &["1.5", "2"]),
        v("mult", &["4294967296", "4294967296"]),
        v("mult", &["-2", "3"]),
        v("div", &["7", "2"]),
        v("div", &["-7", "2"]),
        v("div", &["1", "0"]),
        v("div", &["1.0", "4"]),
        v("div", &["3.0", "0.0"]),
        v("div", &["6", "3"]),
        v("concat", &[r#""ab""#, r#""cd""#]),
        v("concat", &[r#""""#, r#""x""#]),
        v("concat", &[r#""x""#, r#""""#]),
        v("concat", &[r#""é""#, r#""ü""#]),
        v("concat", &[r#""1""#, r#""2""#]),
        v("rec", &[r#""a""#, "1"]),
        v("rec", &[r#""t0.x""#, r#"{"$left":2}"#]),
        v("rec", &[r#""b""#, "[]"]),
        v("rec", &[r#""slice""#, r#"[{"a":1}]"#]),
        v("rec", &[r#""n""#, "null"]),
        v("dot", &[r#"{"a":1}"#, r#""a""#]),
        v("dot", &[r#"{"a":1,"b":[2]}"#, r#""b""#]),
        v("dot", &[r#"{"t0.x":{"$right":null}}"#, r#""t0.x""#]),
        v("dot", &[r#"{"slice":{"k":true},"tail":{}}"#, r#""tail""#]),
        v("dot", &[r#"{"z":"s"}"#, r#""z""#]),
        v("project", &[r#"{"a":1,"b":2,"c":3}"#, r#"["a","c"]"#]),
        v("project", &[r#"{"a":1}"#, "[]"]),
        v("project", &[r#"{"a":1,"b":2}"#, r#"["b"]"#]),
        v("project", &[r#"{"a":{"$left":1},"b":2}"#, r#"["a","b"]"#]),
        v("project", &[r#"{"x":[1],"y":2}"#, r#"["x"]"#]),
        v("recConcat", &[r#"{"a":1}"#, r#"{"b":2}"#]),
        v("recConcat", &[r#"{"a":1}"#, r#"{"a":2}"#]),
        v("recConcat", &["{}", "{}"]),
        v("recConcat", &[r#"{"a":1,"b":2}"#, r#"{"b":3,"c":4}"#]),
        v("recConcat", &[r#"{"slice":[]}"#, r#"{"tail":{}}"#]),
        v("bag", &["1"]),
        v("bag", &["[]"]),
        v("bag", &[r#"{"a":1}"#]),
        v("bag", &["null"]),
        v("bag", &[r#"{"$left":1.5}"#]),
        v("distinct", &["[1,2,1,3,2]"]),
        v("distinct", &["[]"]),
        v("distinct", &["[1,1.0]"]),
        v("distinct", &["[0.0,-0.0]"]),
        v("distinct", &[r#"[{"a":1},{"a":1},{"a":2}]"#]),
        v("count", &["[]"]),
        v("count", &["[1,2,3]"]),
        v("count", &["[[],[]]"]),
        v("count", &[r#"[{"a":1}]"#]),
        v("count", &["[null,null,null,null]"]),
        v("sum", &["[1,2,3]"]),
        v("sum", &["[1,0.5]"]),
        v("sum", &["[0.25,0.25]"]),
        v("sum", &["[9223372036854775807,9223372036854775807]"]),
        v("sum", &["[-1]"]),
        v("avg", &["[1,2]"]),
        v("avg", &["[1.0,2.0,4.5]"]),
        v("avg", &["[3]"]),
        v("avg", &["[1,0.5]"]),
        v("avg", &["[-2,2]"]),
        v("min", &["[3,1,2]"]),
        v("min", &["[1.0,1]"]),
        v("min", &["[1,1.0]"]),
        v("min", &[r#"["b","a"]"#]),
        v("min", &["[2.5,-1]"]),
        v("max", &["[3,1,2]"]),
        v("max", &["[1.0,1]"]),
        v("max", &["[1,1.0]"]),
        v("max", &[r#"["b","a"]"#]),
        v("max", &["[2.5,-1]"]),
        v("flatten", &["[[1],[2,3]]"]),
        v("flatten", &["[]"]),
        v("flatten", &["[[],[]]"]),
        v("flatten", &["[[[1]],[[2]]]"]),
        v("flatten", &[r#"[[{"a":1}],[],[{"a":2}]]"#]),
        v("union", &["[1,2]", "[2,3]"]),
        v("union", &["[]", "[]"]),
        v("union", &["[1]", "[]"]),
        v("union", &["[]", "[1.5]"]),
        v("union", &[r#"[{"a":1}]"#, r#"[{"a":1}]"#]),
        v("minus", &["[1,2,2,3]", "[2,4]"]),
        v("minus", &["[1,2]", "[]"]),
        v("minus", &["[]", "[1]"]),
        v("minus", &["[1,1.0]", "[1]"]),
        v("minus", &[r#"[{"A":{"$left":1.0}},{"A":{"$right":null}}]"#, r#"[{"A":{"$right":null}}]"#]),
        v("intersect", &["[1,2,2,3]", "[2,2,2,1]"]),
        v("intersect", &["[1,2]", "[]"]),
        v("intersect", &["[]", "[1]"]),
        v("intersect", &["[1.0]", "[1]"]),
        v("intersect", &[r#"[{"a":1},{"a":2}]"#, r#"[{"a":2}]"#]),
        v("contains", &["1", "[1,2]"]),
        v("contains", &["3", "[1,2]"]),
        v("contains", &["1", "[]"]),
        v("contains", &["1", "[1.0]"]),
        v("contains", &[r#"{"a":1}"#, r#"[{"a":1}]"#]),
        v("single", &["[1]"]),
        v("single", &["[]"]),
        v("single", &["[1,2]"]),
        v("single", &[r#"[{"a":1}]"#]),
        v("single", &["[[]]"]),
        v("first", &["[1,2]"]),
        v("first", &[r#"[{"a":1}]"#]),
        v("first", &["[[]]"]),
        v("first", &["[null]"]),
        v("first", &[r#"["x","y","z"]"#]),
        v("left", &["1"]),
        v("left", &["null"]),
        v("left", &["[]"]),
        v("left", &[r#"{"a":1}"#]),
        v("left", &["true"]),
        v("right", &["null"]),
        v("right", &["1"]),
        v("right", &["[1]"]),
        v("right", &[r#""s""#]),
        v("right", &["false"]),
        v("either", &[r#"{"$left":1}"#]),
        v("either", &[r#"{"$right":null}"#]),
        v("either", &[r#"{"$left":null}"#]),
        v("either", &[r#"{"$right":[1]}"#]),
        v("either", &[r#"{"$left":{"$right":null}}"#]),
        v("getLeft", &[r#"{"$left":1}"#]),
        v("getLeft", &[r#"{"$left":null}"#]),
        v("getLeft", &[r#"{"$left":[1,2]}"#]),
        v("getLeft", &[r#"{"$left":{"a":1}}"#]),
        v("getLeft", &[r#"{"$left":{"$left":2.5}}"#]),
        v("getRight", &[r#"{"$right":null}"#]),
        v("getRight", &[r#"{"$right":1}"#]),
        v("getRight", &[r#"{"$right":[]}"#]),
        v("getRight", &[r#"{"$right":{"a":"b"}}"#]),
        v("getRight", &[r#"{"$right":{"$left":0}}"#]),
        v("groupBy", &[r#"[{"x":1,"y":1},{"x":1,"y":2},{"x":2,"y":3}]"#, r#""g""#, r#"["x"]"#]),
        v("groupBy", &["[]", r#""g""#, r#"["x"]"#]),
        v("groupBy", &[r#"[{"x":1,"y":1},{"x":1.0,"y":2}]"#, r#""g""#, r#"["x"]"#]),
        v("groupBy", &[r#"[{"x":1,"y":1},{"x":2,"y":1}]"#, r#""g""#, r#"["y"]"#]),
        v("groupBy", &[r#"[{"x":1,"y":1},{"x":1,"y":2}]"#, r#""p""#, r#"["x","y"]"#]),
        v("groupBy", &[r#"[{"x":{"$right":null}},{"x":{"$right":null}},{"x":{"$left":1}}]"#, r#""g""#, r#"["x"]"#]),
        v("push", &["[]", "1"]),
        v("push", &["[1]", "1"]),
        v("push", &["[1,2]", "[]"]),
        v("push", &[r#"[{"a":1}]"#, r#"{"b":2}"#]),
        v("push", &["[null]", "null"]),
    ]
}

fn text(j: &EJson) -> String {
    match j {
        EJson::String(s) => s.clone(),
        _ => panic!("expected a string, got {}", j),
    }
}

fn labels(j: &EJson) -> Vec<String> {
    match j {
        EJson::Array(a) => a.iter().map(text).collect(),
        _ => panic!("expected a label array, got {}", j),
    }
}

/// The expected result, computed on nested data. `None` when the operation
/// is undefined on these arguments.
fn oracle(f: EJsonFun, args: &[EJson]) -> Option<EJson> {
    let d: Vec<Data> = args.iter().map(|a| ejson_to_data(a).unwrap()).collect();
    let bin = |op| apply_binary(op, &d[0], &d[1]).ok();
    let un = |op| apply_unary(&op, &d[0]).ok();
    use EJsonFun::*;
    let out = match f {
        Equal => match (&args[0], &args[1]) {
            // IEEE: -0 equals 0 and NaN differs from itself; data equality
            // agrees on everything but NaN.
            (EJson::Number(x), EJson::Number(y)) if x.is_nan() || y.is_nan() => Some(Data::Bool(false)),
            _ => bin(BinOp::Eq),
        },
        Lt => bin(BinOp::Lt),
        Le => bin(BinOp::Le),
        Neg => un(UnOp::Neg),
        Add => bin(BinOp::Add),
        Sub => bin(BinOp::Sub),
        Mult => bin(BinOp::Mul),
        Div => bin(BinOp::Div),
        Concat => bin(BinOp::Concat),
        Rec => apply_unary(&UnOp::Rec(text(&args[0])), &d[1]).ok(),
        Dot => un(UnOp::Dot(text(&args[1]))),
        Project => un(UnOp::Project(labels(&args[1]))),
        RecConcat => bin(BinOp::RecConcat),
        Bag => un(UnOp::Bag),
        Distinct => un(UnOp::Distinct),
        Count => un(UnOp::Count),
        Sum => un(UnOp::Sum),
        Avg => un(UnOp::Avg),
        Min => un(UnOp::Min),
        Max => un(UnOp::Max),
        Flatten => un(UnOp::Flatten),
        Union => bin(BinOp::Union),
        Minus => bin(BinOp::Minus),
        Intersect => bin(BinOp::Intersect),
        Contains => bin(BinOp::Contains),
        Single => un(UnOp::Single),
        First => un(UnOp::First),
        Left => un(UnOp::Left),
        Right => un(UnOp::Right),
        Either => match &d[0] {
            Data::Left(_) => Some(Data::Bool(true)),
            Data::Right(_) => Some(Data::Bool(false)),
            _ => None,
        },
        GetLeft => match &d[0] {
            Data::Left(x) => Some((**x).clone()),
            _ => None,
        },
        GetRight => match &d[0] {
            Data::Right(x) => Some((**x).clone()),
            _ => None,
        },
        GroupBy => apply_unary(&UnOp::GroupBy(text(&args[1]), labels(&args[2])), &d[0]).ok(),
        Push => apply_binary(BinOp::Union, &d[0], &Data::bag(vec![d[1].clone()])).ok(),
    };
    out.map(|d| data_to_ejson(&d).unwrap())
}

fn render(vectors: &BTreeMap<String, Vec<(Vec<EJson>, EJson)>>) -> String {
    let mut s = String::from("{\n");
    let n = vectors.len();
    for (i, (f, vs)) in vectors.iter().enumerate() {
        s.push_str(&format!("  \"{}\": [\n", f));
        for (j, (args, result)) in vs.iter().enumerate() {
            let args: Vec<String> = args.iter().map(typed_ejson_text).collect();
            s.push_str(&format!(
                "    {{\"args\": [{}], \"result\": {}}}{}\n",
                args.join(", "),
                typed_ejson_text(result),
                if j + 1 < vs.len() { "," } else { "" }
            ));
        }
        s.push_str(&format!("  ]{}\n", if i + 1 < n { "," } else { "" }));
    }
    s.push_str("}\n");
    s
}

fn generate() -> BTreeMap<String, Vec<(Vec<EJson>, EJson)>> {
    let mut out: BTreeMap<String, Vec<(Vec<EJson>, EJson)>> = BTreeMap::new();
    for (name, args) in inputs() {
        let f = EJsonFun::from_name(name).unwrap();
        let args: Vec<EJson> = args.iter().map(|a| parse_typed_ejson(a).unwrap()).collect();
        let want = oracle(f, &args).unwrap_or_else(|| panic!("{} undefined on {:?}", name, args));
        out.entry(name.to_string()).or_default().push((args, want));
    }
    out
}

fn load() -> BTreeMap<String, Vec<(Vec<EJson>, EJson)>> {
    let text = std::fs::read_to_string(path()).expect("runtime vector file");
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mut out = BTreeMap::new();
    for (f, vs) in v.as_object().unwrap() {
        let vs = vs
            .as_array()
            .unwrap()
            .iter()
            .map(|t| {
                let args = t["args"].as_array().unwrap().iter().map(|a| typed_from_value(a).unwrap()).collect();
                (args, typed_from_value(&t["result"]).unwrap())
            })
            .collect();
        out.insert(f.clone(), vs);
    }
    out
}

#[test]
fn vector_file_is_current() {
    let generated = render(&generate());
    if std::env::var("DBX_BLESS").is_ok() {
        std::fs::create_dir_all(path().parent().unwrap()).unwrap();
        std::fs::write(path(), &generated).unwrap();
    }
    let on_disk = std::fs::read_to_string(path()).expect("runtime vector file");
    assert_eq!(on_disk, generated, "rerun with DBX_BLESS=1");
}

#[test]
fn every_function_has_vectors() {
    let vectors = load();
    for f in EJsonFun::ALL {
        let n = vectors.get(f.name()).map_or(0, Vec::len);
        assert!(n >= MIN_VECTORS, "{} has {} vectors", f.name(), n);
    }
    assert_eq!(vectors.len(), EJsonFun::ALL.len());
}

#[test]
fn runtime_agrees_with_vectors() {
    for (name, vs) in load() {
        let f = EJsonFun::from_name(&name).unwrap();
        for (args, want) in vs {
            let got = call_runtime(f, args.clone()).unwrap();
            // Typed text round-trips the result, so compare its encoding to
            // tell -0 from 0.
            assert_eq!(typed_ejson_text(&got), typed_ejson_text(&want), "{}({:?})", name, args);
        }
    }
}
