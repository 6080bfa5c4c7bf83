//! One pass/fail line per acceptance criterion. Run with `--nocapture` to
//! see the lines; the test fails if any criterion fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use dbx_core::alg2nra::{bool3_to_data, connective};
use dbx_core::data::{
    data_to_ejson, ejson_to_data, value_to_data, ColumnType, Data, EJson, Instance, Schema, SqlValue, TableSchema,
};
use dbx_core::imp::{call_runtime, EJsonFun};
use dbx_core::nrae::{desugar_group_by, eval_nra, Nra};
use dbx_core::pipeline::{compile_sql, Options, Stage};
use dbx_core::sqlalg::Bool3;
use dbx_harness::bench::{run_suite, suite};
use dbx_harness::difftest::{difftest, Mutation};
use dbx_harness::fuzz::Config;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIFFTEST_SEED: u64 = 42;
const DIFFTEST_CASES: u64 = 1000;
const DIFFTEST_BUDGET: Duration = Duration::from_secs(300);
const SUITE_BUDGET: Duration = Duration::from_secs(1);
const EJSON_VALUES: usize = 10_000;
const EJSON_MAX_DEPTH: usize = 5;
const GROUP_BY_BAGS: usize = 1000;
const PERF_ROWS: usize = 58_800;
const PERF_BUDGET: Duration = Duration::from_secs(30);
/// 10x more pushes must take less than this factor more time.
const PUSH_SCALING_LIMIT: f64 = 20.0;

struct Line {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn corpus_criterion(name: &'static str, suites: &[&str]) -> Line {
    let start = Instant::now();
    let mut valid = 0;
    let mut total = 0;
    let mut bad = Vec::new();
    for s in suites {
        let r = run_suite(&suite(s).expect("suite exists")).expect("suite compiles");
        valid += r.valid();
        total += r.cases.len();
        for (i, c) in r.cases.iter().enumerate() {
            if !c.valid {
                bad.push(format!("{}#{} at {}", s, i + 1, c.mismatches.join(",")));
            }
        }
    }
    let t = start.elapsed();
    let pass = valid == total && t < SUITE_BUDGET;
    let mut detail = format!("{}/{} at every stage, {:.0} ms", valid, total, t.as_secs_f64() * 1000.0);
    if !bad.is_empty() {
        detail.push_str(&format!("; failing: {}", bad.join("; ")));
    }
    Line { name, pass, detail }
}

fn walkthroughs() -> Line {
    let mut l = corpus_criterion("walkthroughs", &["groups", "exists", "employees"]);
    l.detail = format!("nested-aggregate Q1/Q2, correlated exists, employees trace: {}", l.detail);
    l
}

/// Runs the differential test once; returns the translation line and the
/// stage-equivalence line.
fn differential() -> (Line, Line) {
    let start = Instant::now();
    let r = difftest(DIFFTEST_SEED, DIFFTEST_CASES, Config::default(), Mutation::None);
    let t = start.elapsed();
    let is_translation = |p: &str| p == "sqlalg -> nrae" || p.contains("[env]");
    let translation: Vec<String> =
        r.failures.iter().map(|f| f.divergence.pair()).filter(|p| is_translation(p)).collect();
    let stages: Vec<String> =
        r.failures.iter().map(|f| f.divergence.pair()).filter(|p| !is_translation(p)).collect();
    let thm = Line {
        name: "translation (empty and random environments)",
        pass: translation.is_empty() && r.cases == DIFFTEST_CASES,
        detail: format!(
            "seed {}, {} cases, {} failures{}",
            DIFFTEST_SEED,
            r.cases,
            translation.len(),
            if translation.is_empty() { String::new() } else { format!(": {}", translation.join(", ")) }
        ),
    };
    let eq = Line {
        name: "stage equivalence",
        pass: stages.is_empty() && t < DIFFTEST_BUDGET,
        detail: format!(
            "{} cases through every stage, optimized and not, {} failures, {:.1} s{}",
            r.cases,
            stages.len(),
            t.as_secs_f64(),
            if stages.is_empty() { String::new() } else { format!(": {}", stages.join(", ")) }
        ),
    };
    (thm, eq)
}

/// Kleene logic as min/max over false < unknown < true.
fn rank(b: Bool3) -> u8 {
    match b {
        Bool3::False => 0,
        Bool3::Unknown => 1,
        Bool3::True => 2,
    }
}

fn three_valued() -> Line {
    let unit = Data::Unit;
    let eval = |q: Nra| eval_nra(&q, &unit, &unit, &unit).ok();
    let mut ok = 0;
    let mut total = 0;
    for a in Bool3::ALL {
        for b in Bool3::ALL {
            for (name, got, want) in [
                ("and", a.and(b), rank(a).min(rank(b))),
                ("or", a.or(b), rank(a).max(rank(b))),
            ] {
                let circuit = eval(connective(name, Nra::Const(bool3_to_data(a)), Nra::Const(bool3_to_data(b))));
                total += 1;
                ok += (rank(got) == want && circuit == Some(bool3_to_data(got))) as usize;
            }
        }
        let circuit = eval(connective("not", Nra::Const(bool3_to_data(a)), Nra::Const(Data::Unit)));
        total += 1;
        ok += (rank(a.not()) == 2 - rank(a) && circuit == Some(bool3_to_data(a.not()))) as usize;
    }
    Line { name: "three-valued logic", pass: ok == 21 && total == 21, detail: format!("{}/{} combinations", ok, total) }
}

fn random_data(rng: &mut ChaCha8Rng, depth: usize) -> Data {
    let atom = depth <= 1 || rng.gen_bool(0.35);
    if atom {
        return match rng.gen_range(0..6) {
            0 => Data::Unit,
            1 => Data::Bool(rng.gen()),
            2 => Data::int(rng.gen_range(-3..=3)),
            3 => Data::Int(BigInt::from(rng.gen::<i64>()) * BigInt::from(1u64 << 40)),
            4 => Data::Double([0.0, -0.0, 0.5, -1.25, 1.0, 2.0, 1e300][rng.gen_range(0..7)]),
            _ => Data::text(["", "a", "b", "$x", "null"].choose(rng).unwrap()),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..4) {
        0 => {
            let n = rng.gen_range(0..=3);
            Data::record((0..n).map(|_| {
                let l = ["a", "b", "c", "left", "$"].choose(rng).unwrap().to_string();
                (l, random_data(rng, d))
            }))
        }
        1 => Data::bag((0..rng.gen_range(0..=3)).map(|_| random_data(rng, d)).collect()),
        2 => Data::left(random_data(rng, d)),
        _ => Data::right(random_data(rng, d)),
    }
}

fn ejson_injectivity() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut seen: BTreeMap<String, Data> = BTreeMap::new();
    let mut collisions = 0;
    let mut round_trip_failures = 0;
    let mut too_deep = 0;
    for _ in 0..EJSON_VALUES {
        let d = random_data(&mut rng, EJSON_MAX_DEPTH);
        too_deep += (d.depth() > EJSON_MAX_DEPTH) as usize;
        let j = data_to_ejson(&d).expect("no reserved labels");
        round_trip_failures += (ejson_to_data(&j).ok().as_ref() != Some(&d)) as usize;
        let key = j.to_string();
        match seen.get(&key) {
            Some(e) if *e != d => collisions += 1,
            Some(e) => {
                // Equal encodings of equal values must also be equal EJson.
                collisions += (data_to_ejson(e).unwrap() != j) as usize;
            }
            None => {
                seen.insert(key, d);
            }
        }
    }
    let distinct_ejson: Vec<&String> = seen.keys().collect();
    Line {
        name: "data_to_ejson injectivity",
        pass: collisions == 0 && round_trip_failures == 0 && too_deep == 0,
        detail: format!(
            "{} values ({} distinct), {} collisions, {} round-trip failures",
            EJSON_VALUES,
            distinct_ejson.len(),
            collisions,
            round_trip_failures
        ),
    }
}

/// Sorts every bag, so that bag-equal values become equal.
fn canon(d: &Data) -> Data {
    match d {
        Data::Bag(items) => {
            let mut v: Vec<Data> = items.iter().map(canon).collect();
            v.sort();
            Data::bag(v)
        }
        Data::Record(r) => Data::record(r.iter().map(|(k, v)| (k.clone(), canon(v)))),
        Data::Left(x) => Data::left(canon(x)),
        Data::Right(x) => Data::right(canon(x)),
        _ => d.clone(),
    }
}

fn xy(x: i64, y: i64) -> Data {
    Data::record([("x".to_string(), Data::int(x)), ("y".to_string(), Data::int(y))])
}

fn group_by_desugaring() -> Line {
    let unit = Data::Unit;
    let eval = |q: &Nra| eval_nra(q, &unit, &unit, &unit);
    let example = Data::bag(vec![xy(1, 1), xy(1, 2), xy(2, 3)]);
    let want = Data::bag(vec![
        Data::record([("x".to_string(), Data::int(1)), ("g".to_string(), Data::bag(vec![xy(1, 1), xy(1, 2)]))]),
        Data::record([("x".to_string(), Data::int(2)), ("g".to_string(), Data::bag(vec![xy(2, 3)]))]),
    ]);
    let x = vec!["x".to_string()];
    let example_ok = eval(&Nra::group_by("g", x.clone(), Nra::Const(example.clone()))).ok() == Some(want.clone())
        && eval(&desugar_group_by("g", &x, Nra::Const(example))).ok() == Some(want);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut agree = 0;
    for _ in 0..GROUP_BY_BAGS {
        let n = rng.gen_range(0..=8);
        let bag = Data::bag(
            (0..n)
                .map(|_| {
                    let v = |rng: &mut ChaCha8Rng| match rng.gen_range(0..4) {
                        0 => Data::null(),
                        _ => Data::left(Data::int(rng.gen_range(0..3))),
                    };
                    Data::record([("x".to_string(), v(&mut rng)), ("y".to_string(), v(&mut rng)), ("z".to_string(), v(&mut rng))])
                })
                .collect(),
        );
        let attrs: Vec<String> = match rng.gen_range(0..4) {
            0 => vec![],
            1 => vec!["x".into()],
            2 => vec!["x".into(), "y".into()],
            _ => vec!["z".into()],
        };
        let built_in = eval(&Nra::group_by("g", attrs.clone(), Nra::Const(bag.clone())));
        let desugared = eval(&desugar_group_by("g", &attrs, Nra::Const(bag)));
        agree += matches!((&built_in, &desugared), (Ok(a), Ok(b)) if canon(a) == canon(b)) as usize;
    }
    Line {
        name: "group_by desugaring",
        pass: example_ok && agree == GROUP_BY_BAGS,
        detail: format!(
            "worked example {}, {}/{} random bags agree",
            if example_ok { "reproduced" } else { "differs" },
            agree,
            GROUP_BY_BAGS
        ),
    }
}

fn employees(rows: usize) -> Instance {
    let mut s = Schema::default();
    s.add(TableSchema {
        name: "employees".into(),
        columns: vec![("name".into(), ColumnType::Text), ("age".into(), ColumnType::Double)],
    })
    .unwrap();
    let mut inst = Instance::empty(s);
    let table = (0..rows)
        .map(|i| {
            [
                ("employees.name".to_string(), SqlValue::text(&format!("e{}", i))),
                ("employees.age".to_string(), SqlValue::Double(age(i))),
            ]
            .into_iter()
            .collect()
        })
        .collect();
    inst.tables.insert("employees".into(), table);
    inst
}

fn age(i: usize) -> f64 {
    20.0 + (i * 7 % 45) as f64 * 0.5
}

const PRELUDE: &str = "create table employees (name text, age double precision);\n";

fn run_imp(query: &str, inst: &Instance) -> (Data, Duration) {
    let c = compile_sql(&format!("{}{}", PRELUDE, query), Options::default()).expect("query compiles");
    let start = Instant::now();
    let d = c.eval(Stage::Imp, inst).expect("query runs");
    (d, start.elapsed())
}

fn only_field(d: &Data) -> Option<Data> {
    let rows = d.as_bag()?;
    let [row] = rows else { return None };
    let r = row.as_record()?;
    (r.len() == 1).then(|| r.values().next().unwrap().clone())
}

/// Best of three runs of `pushes` runtime pushes onto one array.
fn push_time(pushes: usize) -> Duration {
    (0..3)
        .map(|_| {
            let start = Instant::now();
            let mut a = EJson::Array(Default::default());
            for i in 0..pushes {
                a = call_runtime(EJsonFun::Push, vec![a, EJson::Number(i as f64)]).unwrap();
            }
            assert!(matches!(&a, EJson::Array(v) if v.len() == pushes));
            start.elapsed()
        })
        .min()
        .unwrap()
}

fn performance() -> Line {
    let inst = employees(PERF_ROWS);
    let ages: Vec<f64> = (0..PERF_ROWS).map(age).collect();
    let over: Vec<f64> = ages.iter().copied().filter(|a| *a > 32.0).collect();
    let want_avg = Data::left(Data::Double(over.iter().sum::<f64>() / over.len() as f64));
    let (avg, t_avg) = run_imp("select avg(age) from employees where age > 32.0;", &inst);
    let avg_ok = only_field(&avg) == Some(want_avg);

    let mut counts: BTreeMap<u64, i64> = BTreeMap::new();
    for a in &ages {
        *counts.entry(a.to_bits()).or_default() += 1;
    }
    let want_groups: Vec<Data> = counts
        .iter()
        .map(|(a, n)| {
            Data::record([
                ("age".to_string(), value_to_data(&SqlValue::Double(f64::from_bits(*a)))),
                ("count".to_string(), Data::left(Data::int(*n))),
            ])
        })
        .collect();
    let (groups, t_groups) = run_imp("select age, count(*) as count from employees group by age;", &inst);
    let groups_ok = canon(&groups) == canon(&Data::bag(want_groups));

    // Through the interpreter: a projection pushes one tuple per row.
    let small = employees(PERF_ROWS / 10);
    let (_, t_small) = run_imp("select name from employees;", &small);
    let (_, t_large) = run_imp("select name from employees;", &inst);
    let interp_ratio = t_large.as_secs_f64() / t_small.as_secs_f64();
    let runtime_ratio = push_time(200_000).as_secs_f64() / push_time(20_000).as_secs_f64();
    let total = t_avg + t_groups;
    Line {
        name: "performance",
        pass: avg_ok
            && groups_ok
            && total < PERF_BUDGET
            && interp_ratio < PUSH_SCALING_LIMIT
            && runtime_ratio < PUSH_SCALING_LIMIT,
        detail: format!(
            "{} rows: avg {} in {:.2} s, group by {} in {:.2} s; push scaling x10 rows: interpreter {:.1}x, runtime {:.1}x",
            PERF_ROWS,
            if avg_ok { "correct" } else { "WRONG" },
            t_avg.as_secs_f64(),
            if groups_ok { "correct" } else { "WRONG" },
            t_groups.as_secs_f64(),
            interp_ratio,
            runtime_ratio
        ),
    }
}

#[test]
fn acceptance() {
    let (thm, eq) = differential();
    let lines = [
        corpus_criterion("null-semantics suite", &["null"]),
        corpus_criterion("correlated-query suite", &["correlated"]),
        walkthroughs(),
        thm,
        eq,
        three_valued(),
        ejson_injectivity(),
        group_by_desugaring(),
        performance(),
    ];
    for (i, l) in lines.iter().enumerate() {
        println!("{} {}. {}: {}", if l.pass { "PASS" } else { "FAIL" }, i + 1, l.name, l.detail);
    }
    let failed: Vec<&str> = lines.iter().filter(|l| !l.pass).map(|l| l.name).collect();
    assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
}
