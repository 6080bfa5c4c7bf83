//! The benchmark corpus, run at every stage with and without the optimizer.

use std::fmt::Write;
use std::time::{Duration, Instant};

use dbx_core::corpus::{matches_expected, Case, Suite};
use dbx_core::pipeline::{Options, Stage};
use dbx_core::Result;

/// The corpus: name, queries, instance.
pub const CORPUS: [(&str, &str, &str); 5] = [
    ("null", include_str!("../../../corpus/null/queries.sql"), include_str!("../../../corpus/null/db.json")),
    (
        "correlated",
        include_str!("../../../corpus/correlated/queries.sql"),
        include_str!("../../../corpus/correlated/db.json"),
    ),
    ("groups", include_str!("../../../corpus/groups/queries.sql"), include_str!("../../../corpus/groups/db.json")),
    ("exists", include_str!("../../../corpus/exists/queries.sql"), include_str!("../../../corpus/exists/db.json")),
    (
        "employees",
        include_str!("../../../corpus/employees/queries.sql"),
        include_str!("../../../corpus/employees/db.json"),
    ),
];

pub fn suites() -> Vec<Suite> {
    CORPUS.iter().map(|(n, q, d)| Suite::parse(n, q, d).expect("corpus parses")).collect()
}

pub fn suite(name: &str) -> Option<Suite> {
    suites().into_iter().find(|s| s.name == name)
}

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub query: String,
    /// Every stage, optimized or not, matched the expected result.
    pub valid: bool,
    /// Stages that did not match, with `-O` for optimized ones.
    pub mismatches: Vec<String>,
    pub time: Duration,
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: String,
    pub cases: Vec<CaseResult>,
}

impl SuiteResult {
    pub fn valid(&self) -> usize {
        self.cases.iter().filter(|c| c.valid).count()
    }
}

/// Runs one case at every stage. Compilation errors are reported, not
/// counted as mismatches.
pub fn run_case(s: &Suite, case: &Case) -> Result<CaseResult> {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    for optimize in [false, true] {
        let c = s.compile(case, Options { optimize })?;
        let inst = s.load_instance(&c)?;
        for stage in Stage::ALL {
            let ok = match c.eval(stage, &inst) {
                Ok(d) => matches_expected(&d, &case.expected)?,
                Err(_) => false,
            };
            if !ok {
                mismatches.push(format!("{}{}", stage.name(), if optimize { " -O" } else { "" }));
            }
        }
    }
    Ok(CaseResult {
        query: case.query.clone(),
        valid: mismatches.is_empty(),
        mismatches,
        time: start.elapsed(),
    })
}

pub fn run_suite(s: &Suite) -> Result<SuiteResult> {
    let cases = s.cases.iter().map(|c| run_case(s, c)).collect::<Result<_>>()?;
    Ok(SuiteResult { name: s.name.clone(), cases })
}

pub fn run_all() -> Result<Vec<SuiteResult>> {
    suites().iter().map(run_suite).collect()
}

fn one_line(q: &str) -> String {
    let q: String = q
        .lines()
        .filter(|l| !l.trim_start().starts_with("--"))
        .collect::<Vec<_>>()
        .join(" ");
    let q = q.split_whitespace().collect::<Vec<_>>().join(" ");
    if q.chars().count() > 60 {
        format!("{}...", q.chars().take(57).collect::<String>())
    } else {
        q
    }
}

/// The summary table followed by per-case timings.
pub fn render(results: &[SuiteResult]) -> String {
    let mut out = String::new();
    writeln!(out, "{:<12} {:>7}", "suite", "valid").unwrap();
    for r in results {
        writeln!(out, "{:<12} {:>7}", r.name, format!("{}/{}", r.valid(), r.cases.len())).unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "{:<12} {:>4} {:>6} {:>10}  query", "suite", "case", "valid", "time").unwrap();
    for r in results {
        for (i, c) in r.cases.iter().enumerate() {
            writeln!(
                out,
                "{:<12} {:>4} {:>6} {:>8.2}ms  {}",
                r.name,
                i + 1,
                if c.valid { "yes" } else { "no" },
                c.time.as_secs_f64() * 1000.0,
                one_line(&c.query)
            )
            .unwrap();
            if !c.valid {
                writeln!(out, "{:>24}  mismatched at: {}", "", c.mismatches.join(", ")).unwrap();
            }
        }
    }
    out
}
