//! Differential testing: every generated case is evaluated at every stage
//! and adjacent stages are compared. Failures are shrunk greedily.

use dbx_core::alg2nra::{runtime_of, static_of, translate_query};
use dbx_core::data::json::{data_to_plain_json, instance_json};
use dbx_core::data::{bag_eq, bag_to_data, instance_to_data, Data, Instance};
use dbx_core::Result as CoreResult;
use dbx_core::imp::data::{DataOp, DataProgram};
use dbx_core::imp::ejson::imp_data_to_imp_ejson;
use dbx_core::imp::{ImpExpr, ImpStmt};
use dbx_core::nrae::{default_rules, eval_nra, eval_top, optimize_with, BinOp, Nra, Rule};
use dbx_core::pipeline::{lower, Lowered, Stage};
use dbx_core::sqlalg::{check_query, eval_query, Env, Formula, Query};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::fuzz::{gen_case, Case, Config};

/// A deliberate compiler bug, to check that the harness notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    None,
    /// An optimizer rule that drops every selection.
    BrokenRule,
    /// `<` compiled as `<=` in Imp over nested data.
    FlipCompare,
}

/// Two adjacent evaluations that disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    pub left: String,
    pub right: String,
    pub left_result: String,
    pub right_result: String,
}

impl Divergence {
    pub fn pair(&self) -> String {
        format!("{} -> {}", self.left, self.right)
    }
}

/// Mixes a run seed with a case index (splitmix64), so each case has its own
/// seed independent of scheduling.
pub fn case_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn show(r: &CoreResult<Data>) -> String {
    match r {
        Ok(d) => data_to_plain_json(d),
        Err(e) => format!("error: {}", e),
    }
}

fn agree(a: &CoreResult<Data>, b: &CoreResult<Data>) -> bool {
    match (a, b) {
        (Ok(x), Ok(y)) => match (x.as_bag(), y.as_bag()) {
            (Some(a), Some(b)) => bag_eq(a, b),
            _ => x == y,
        },
        (Err(_), Err(_)) => true,
        _ => false,
    }
}

/// The first adjacent pair of a chain that disagrees.
fn first_divergence(chain: &[(String, CoreResult<Data>)]) -> Option<Divergence> {
    chain.windows(2).find(|w| !agree(&w[0].1, &w[1].1)).map(|w| Divergence {
        left: w[0].0.clone(),
        right: w[1].0.clone(),
        left_result: show(&w[0].1),
        right_result: show(&w[1].1),
    })
}

fn drop_selects(q: &Nra) -> Option<Nra> {
    match q {
        Nra::Select(_, src) => Some((**src).clone()),
        _ => None,
    }
}

fn flip_expr(e: &mut ImpExpr<Data, DataOp, dbx_core::imp::data::DataFun>) {
    match e {
        ImpExpr::Const(_) | ImpExpr::Var(_) => {}
        ImpExpr::Op(op, args) => {
            if *op == DataOp::Binary(BinOp::Lt) {
                *op = DataOp::Binary(BinOp::Le);
            }
            args.iter_mut().for_each(flip_expr);
        }
        ImpExpr::Call(_, args) => args.iter_mut().for_each(flip_expr),
    }
}

fn flip_stmt(s: &mut ImpStmt<Data, DataOp, dbx_core::imp::data::DataFun>) {
    match s {
        ImpStmt::Block(decls, body) => {
            decls.iter_mut().filter_map(|(_, e)| e.as_mut()).for_each(flip_expr);
            body.iter_mut().for_each(flip_stmt);
        }
        ImpStmt::Assign(_, e) => flip_expr(e),
        ImpStmt::For(_, e, body) => {
            flip_expr(e);
            flip_stmt(body);
        }
        ImpStmt::If(c, a, b) => {
            flip_expr(c);
            flip_stmt(a);
            flip_stmt(b);
        }
    }
}

/// Rewrites every `<` of an Imp(Data) program into `<=`.
pub fn flip_compare(p: &DataProgram) -> DataProgram {
    let mut p = p.clone();
    flip_stmt(&mut p.body);
    p
}

fn lower_with(q: &Nra, m: Mutation) -> CoreResult<Lowered> {
    let mut l = lower(q)?;
    if m == Mutation::FlipCompare {
        l.imp_data = flip_compare(&l.imp_data);
        l.imp = imp_data_to_imp_ejson(&l.imp_data)?;
    }
    Ok(l)
}

const LOWERED: [Stage; 7] = [
    Stage::Nnrc,
    Stage::Stratified,
    Stage::Nnrs,
    Stage::NoShadow,
    Stage::NnrsImp,
    Stage::ImpData,
    Stage::Imp,
];

/// Appends the evaluations of every lowered stage to a chain.
fn push_lowered(chain: &mut Vec<(String, CoreResult<Data>)>, nrae: &Nra, db: &Data, m: Mutation, suffix: &str) {
    match lower_with(nrae, m) {
        Ok(l) => {
            for s in LOWERED {
                chain.push((format!("{}{}", s.name(), suffix), l.eval(s, db)));
            }
        }
        Err(e) => chain.push((format!("lower{}", suffix), Err(e))),
    }
}

fn rules(m: Mutation) -> Vec<Rule> {
    let mut r = default_rules();
    if m == Mutation::BrokenRule {
        r.insert(0, ("drop-select", drop_selects));
    }
    r
}

/// The stage chain of a closed query: the algebra oracle, NRAe and every
/// lowered program, then the optimized NRAe and its lowerings.
fn stage_chain(inst: &Instance, q: &Query, m: Mutation) -> Vec<(String, CoreResult<Data>)> {
    let db = instance_to_data(inst);
    let nrae = translate_query(&inst.schema, &[], q);
    let mut chain = vec![
        (Stage::SqlAlg.name().to_string(), eval_query(q, &Env::new(), inst).map(|b| bag_to_data(&b))),
        (Stage::Nrae.name().to_string(), eval_top(&nrae, &db)),
    ];
    push_lowered(&mut chain, &nrae, &db, m, "");
    let opt = optimize_with(&nrae, &rules(m));
    // The optimized chain restarts from the unoptimized NRAe result.
    chain.push((Stage::Nrae.name().to_string(), eval_top(&nrae, &db)));
    chain.push(("nrae -O".to_string(), eval_top(&opt, &db)));
    push_lowered(&mut chain, &opt, &db, m, " -O");
    chain
}

/// The algebra and its translation under a non-empty environment.
fn env_chain(inst: &Instance, env: &Env, q: &Query) -> Vec<(String, CoreResult<Data>)> {
    let db = instance_to_data(inst);
    let nrae = translate_query(&inst.schema, &static_of(env), q);
    vec![
        ("sqlalg[env]".to_string(), eval_query(q, env, inst).map(|b| bag_to_data(&b))),
        ("nrae[env]".to_string(), eval_nra(&nrae, &db, &runtime_of(env), &db)),
    ]
}

/// Checks one case: the stage chain of the closed query, then the
/// environment query.
pub fn check_case(c: &Case, m: Mutation) -> Option<Divergence> {
    first_divergence(&stage_chain(&c.instance, &c.query, m))
        .or_else(|| first_divergence(&env_chain(&c.instance, &c.env, &c.env_query)))
}

/// Which query of a case diverged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Closed,
    Env,
}

fn divergence_of(c: &Case, part: Part, m: Mutation) -> Option<Divergence> {
    match part {
        Part::Closed => first_divergence(&stage_chain(&c.instance, &c.query, m)),
        Part::Env => first_divergence(&env_chain(&c.instance, &c.env, &c.env_query)),
    }
}

fn size(c: &Case, part: Part) -> usize {
    let q = match part {
        Part::Closed => &c.query,
        Part::Env => &c.env_query,
    };
    q.size() + c.instance.tables.values().map(Vec::len).sum::<usize>()
}

fn formula_candidates(f: &Formula) -> Vec<Formula> {
    let mut out = Vec::new();
    if *f != Formula::True {
        out.push(Formula::True);
    }
    match f {
        Formula::True | Formula::Pred(..) => {}
        Formula::And(a, b) | Formula::Or(a, b) => {
            out.push((**a).clone());
            out.push((**b).clone());
            let rebuild = |x: Formula, y: Formula| match f {
                Formula::And(..) => Formula::and(x, y),
                _ => Formula::or(x, y),
            };
            out.extend(formula_candidates(a).into_iter().map(|x| rebuild(x, (**b).clone())));
            out.extend(formula_candidates(b).into_iter().map(|y| rebuild((**a).clone(), y)));
        }
        Formula::Not(a) => {
            out.push((**a).clone());
            out.extend(formula_candidates(a).into_iter().map(Formula::not));
        }
        Formula::Quant(p, qf, s, q) => out.extend(
            query_candidates(q).into_iter().map(|q| Formula::Quant(*p, *qf, s.clone(), Box::new(q))),
        ),
        Formula::In(s, q) => {
            out.extend(query_candidates(q).into_iter().map(|q| Formula::In(s.clone(), Box::new(q))))
        }
        Formula::Exists(q) => out.extend(query_candidates(q).into_iter().map(Formula::exists)),
    }
    out
}

/// Smaller queries: subterms, simpler formulas, fewer select items. Many are
/// ill-formed; the caller filters them.
pub fn query_candidates(q: &Query) -> Vec<Query> {
    let mut out = Vec::new();
    let b = |q: Query| Box::new(q);
    match q {
        Query::Empty | Query::Table(_) => {}
        Query::Union(x, y) | Query::Intersect(x, y) | Query::Except(x, y) | Query::Join(x, y) => {
            out.push((**x).clone());
            out.push((**y).clone());
            let rebuild = |x: Query, y: Query| match q {
                Query::Union(..) => Query::Union(b(x), b(y)),
                Query::Intersect(..) => Query::Intersect(b(x), b(y)),
                Query::Except(..) => Query::Except(b(x), b(y)),
                _ => Query::Join(b(x), b(y)),
            };
            out.extend(query_candidates(x).into_iter().map(|x| rebuild(x, (**y).clone())));
            out.extend(query_candidates(y).into_iter().map(|y| rebuild((**x).clone(), y)));
        }
        Query::Project(sel, x) => {
            out.push((**x).clone());
            for i in 0..sel.len() {
                if sel.len() > 1 {
                    let mut s = sel.clone();
                    s.remove(i);
                    out.push(Query::Project(s, x.clone()));
                }
            }
            out.extend(query_candidates(x).into_iter().map(|x| Query::Project(sel.clone(), b(x))));
        }
        Query::Filter(f, x) => {
            out.push((**x).clone());
            out.extend(formula_candidates(f).into_iter().map(|f| Query::Filter(f, x.clone())));
            out.extend(query_candidates(x).into_iter().map(|x| Query::Filter(f.clone(), b(x))));
        }
        Query::Group { select, keys, having, input } => {
            out.push((**input).clone());
            let group = |select: Vec<_>, having: Formula, input: Box<Query>| Query::Group {
                select,
                keys: keys.clone(),
                having,
                input,
            };
            for i in 0..select.len() {
                if select.len() > 1 {
                    let mut s = select.clone();
                    s.remove(i);
                    out.push(group(s, having.clone(), input.clone()));
                }
            }
            out.extend(formula_candidates(having).into_iter().map(|h| group(select.clone(), h, input.clone())));
            out.extend(query_candidates(input).into_iter().map(|x| group(select.clone(), having.clone(), b(x))));
        }
    }
    out
}

fn instance_candidates(i: &Instance) -> Vec<Instance> {
    let mut out = Vec::new();
    for (name, rows) in &i.tables {
        for k in 0..rows.len() {
            let mut j = i.clone();
            j.tables.get_mut(name).expect("table present").remove(k);
            out.push(j);
        }
    }
    out
}

const MAX_SHRINK_STEPS: usize = 1000;

/// Greedily shrinks a failing case: a candidate is kept when it is
/// well-formed, strictly smaller and diverges at the same stage pair. Every
/// step strictly decreases the size, so shrinking terminates.
pub fn shrink(c: &Case, d: &Divergence, m: Mutation) -> (Case, Divergence) {
    let part = if d.left.ends_with("[env]") { Part::Env } else { Part::Closed };
    let mut best = c.clone();
    let mut best_d = d.clone();
    for _ in 0..MAX_SHRINK_STEPS {
        let q = match part {
            Part::Closed => &best.query,
            Part::Env => &best.env_query,
        };
        let statics: &[_] = match part {
            Part::Closed => &[],
            Part::Env => &best.env_statics,
        };
        let mut candidates: Vec<Case> = query_candidates(q)
            .into_iter()
            .filter(|q| check_query(best.schema(), statics, q).is_ok())
            .map(|q| {
                let mut n = best.clone();
                match part {
                    Part::Closed => n.query = q,
                    Part::Env => n.env_query = q,
                }
                n
            })
            .collect();
        candidates.extend(instance_candidates(&best.instance).into_iter().map(|i| Case { instance: i, ..best.clone() }));
        let cur = size(&best, part);
        let next = candidates.into_iter().filter(|n| size(n, part) < cur).find_map(|n| {
            let nd = divergence_of(&n, part, m)?;
            (nd.left == best_d.left && nd.right == best_d.right).then_some((n, nd))
        });
        match next {
            Some((n, nd)) => {
                best = n;
                best_d = nd;
            }
            None => break,
        }
    }
    (best, best_d)
}

/// One failing case, with its minimized counterexample.
#[derive(Debug, Clone)]
pub struct Failure {
    pub index: u64,
    pub seed: u64,
    pub divergence: Divergence,
    pub minimized: Case,
    pub minimized_divergence: Divergence,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub seed: u64,
    pub cases: u64,
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let failures: Vec<Value> = self
            .failures
            .iter()
            .map(|f| {
                let c = &f.minimized;
                let env_part = f.minimized_divergence.left.ends_with("[env]");
                let mut v = json!({
                    "case": f.index,
                    "case_seed": f.seed,
                    "pair": f.divergence.pair(),
                    "minimized": {
                        "pair": f.minimized_divergence.pair(),
                        "left": f.minimized_divergence.left_result,
                        "right": f.minimized_divergence.right_result,
                        "query": (if env_part { &c.env_query } else { &c.query }).to_string(),
                        "instance": serde_json::from_str::<Value>(&instance_json(&c.instance)).expect("valid JSON"),
                    },
                });
                if env_part {
                    v["minimized"]["environment"] = json!(format!("{:?}", c.env));
                }
                v
            })
            .collect();
        json!({
            "seed": self.seed,
            "cases": self.cases,
            "passed": self.cases - self.failures.len() as u64,
            "failed": self.failures.len(),
            "failures": failures,
        })
    }
}

/// Failures beyond this many are counted but not shrunk.
const MAX_SHRUNK: usize = 5;

/// Generates and checks `n` cases in parallel. The report is independent of
/// the number of threads.
pub fn difftest(seed: u64, n: u64, cfg: Config, m: Mutation) -> Report {
    let found: Vec<(u64, u64, Case, Divergence)> = (0..n)
        .into_par_iter()
        .filter_map(|i| {
            let s = case_seed(seed, i);
            let c = gen_case(s, cfg);
            check_case(&c, m).map(|d| (i, s, c, d))
        })
        .collect();
    let failures = found
        .into_iter()
        .enumerate()
        .map(|(k, (index, seed, c, d))| {
            let (minimized, minimized_divergence) =
                if k < MAX_SHRUNK { shrink(&c, &d, m) } else { (c, d.clone()) };
            Failure { index, seed, divergence: d, minimized, minimized_divergence }
        })
        .collect();
    Report { seed, cases: n, failures }
}
