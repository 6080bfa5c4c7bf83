//! Random well-formed algebra queries over random small instances.

use std::collections::BTreeSet;

use dbx_core::data::{ArithOp, ColumnType, Instance, Schema, SqlValue, TableSchema, Tuple};
use dbx_core::sqlalg::{
    check_query, AggFn, Env, Expr, Formula, Pred, Quantifier, Query, Select, Slice, StaticSlice,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generation limits.
#[derive(Debug, Clone, Copy)]
pub struct Config {
    pub depth: usize,
    pub max_tables: usize,
    pub max_rows: usize,
    pub null_rate: f64,
}

impl Default for Config {
    fn default() -> Config {
        Config { depth: 3, max_tables: 3, max_rows: 4, null_rate: 0.25 }
    }
}

/// One generated test case: a query over the instance in the empty
/// environment, and a second query checked against `env`.
#[derive(Debug, Clone)]
pub struct Case {
    pub instance: Instance,
    pub query: Query,
    pub env: Env,
    /// The static view of `env`, with a flag for grouped slices.
    pub env_statics: Vec<(StaticSlice, bool)>,
    pub env_query: Query,
}

impl Case {
    pub fn schema(&self) -> &Schema {
        &self.instance.schema
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Ty {
    Num,
    Text,
}

fn ty_of(c: ColumnType) -> Ty {
    match c {
        ColumnType::Text => Ty::Text,
        _ => Ty::Num,
    }
}

type Sort = Vec<(String, Ty)>;

#[derive(Debug, Clone)]
struct Frame {
    attrs: Sort,
    /// Grouping attributes, for a grouped frame.
    keys: Option<Vec<String>>,
}

struct Gen<'a> {
    rng: &'a mut ChaCha8Rng,
    schema: &'a Schema,
    cfg: Config,
    next: usize,
}

impl Gen<'_> {
    fn fresh(&mut self) -> String {
        self.next += 1;
        format!("c{}", self.next)
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn table(&mut self) -> (Query, Sort) {
        let t = self.schema.tables.choose(self.rng).expect("at least one table");
        let sort = t.columns.iter().map(|(c, ty)| (t.qualified(c), ty_of(*ty))).collect();
        (Query::table(&t.name), sort)
    }

    fn query(&mut self, depth: usize, frames: &[Frame]) -> (Query, Sort) {
        if depth == 0 {
            return self.table();
        }
        let d = depth - 1;
        match self.rng.gen_range(0..100) {
            0..=9 => self.table(),
            10..=24 => {
                let (q, s) = self.query(d, frames);
                let inner = push(frames, &s, None);
                let n = self.rng.gen_range(1..=3);
                let mut sel = Vec::new();
                let mut sort = Vec::new();
                for _ in 0..n {
                    let ty = self.ty();
                    let name = self.fresh();
                    sel.push(Select::new(self.expr(ty, &inner, false, 2), &name));
                    sort.push((name, ty));
                }
                (Query::project(sel, q), sort)
            }
            25..=44 => {
                let (q, s) = self.query(d, frames);
                let f = self.formula(d, &push(frames, &s, None), 2);
                (Query::filter(f, q), s)
            }
            45..=74 => self.group(d, frames),
            75..=84 => {
                let (a, sa) = self.query(d, frames);
                let (b, sb) = self.query(d, frames);
                let names: BTreeSet<&String> = sa.iter().map(|(n, _)| n).collect();
                let (b, sb) = if sb.iter().any(|(n, _)| names.contains(n)) {
                    let renamed: Sort = sb.iter().map(|(_, t)| (self.fresh(), *t)).collect();
                    let sel = sb.iter().zip(&renamed).map(|((o, _), (n, _))| Select::rename(o, n)).collect();
                    (Query::project(sel, b), renamed)
                } else {
                    (b, sb)
                };
                let mut sort = sa;
                sort.extend(sb);
                (Query::join(a, b), sort)
            }
            _ => {
                let (a, sa) = self.query(d, frames);
                // A filter of the left side keeps intersections non-trivial.
                let b = if self.chance(0.5) {
                    Query::filter(self.formula(d, &push(frames, &sa, None), 1), a.clone())
                } else {
                    self.shaped(d, frames, &sa)
                };
                let q = match self.rng.gen_range(0..3) {
                    0 => Query::Union(Box::new(a), Box::new(b)),
                    1 => Query::Intersect(Box::new(a), Box::new(b)),
                    _ => Query::Except(Box::new(a), Box::new(b)),
                };
                (q, sa)
            }
        }
    }

    /// A query whose sort is exactly `sort`.
    fn shaped(&mut self, depth: usize, frames: &[Frame], sort: &Sort) -> Query {
        let (q, s) = self.query(depth, frames);
        let inner = push(frames, &s, None);
        let sel = sort.iter().map(|(n, t)| Select::new(self.expr(*t, &inner, false, 1), n)).collect();
        Query::project(sel, q)
    }

    fn group(&mut self, depth: usize, frames: &[Frame]) -> (Query, Sort) {
        let (q, s) = self.query(depth, frames);
        let mut keys: Vec<String> = s.iter().map(|(n, _)| n.clone()).collect();
        keys.shuffle(self.rng);
        keys.truncate(self.rng.gen_range(0..=2.min(keys.len())));
        let inner = push(frames, &s, Some(keys.clone()));
        let mut sel = Vec::new();
        let mut sort = Vec::new();
        for k in &keys {
            if self.chance(0.8) {
                let name = self.fresh();
                let ty = s.iter().find(|(n, _)| n == k).unwrap().1;
                sel.push(Select::rename(k, &name));
                sort.push((name, ty));
            }
        }
        let aggs = if sel.is_empty() { self.rng.gen_range(1..=2) } else { self.rng.gen_range(0..=2) };
        for _ in 0..aggs {
            let name = self.fresh();
            sel.push(Select::new(self.aggregate(&inner), &name));
            sort.push((name, Ty::Num));
        }
        let having = if self.chance(0.7) { self.formula(depth, &inner, 2) } else { Formula::True };
        (Query::Group { select: sel, keys, having, input: Box::new(q) }, sort)
    }

    fn aggregate(&mut self, frames: &[Frame]) -> Expr {
        let f = [AggFn::Sum, AggFn::Count, AggFn::Avg, AggFn::Min, AggFn::Max, AggFn::CountStar]
            .choose(self.rng)
            .copied()
            .unwrap();
        if f == AggFn::CountStar {
            return Expr::count_star();
        }
        Expr::agg(f, self.expr_in(Ty::Num, frames, false, true, 1))
    }

    fn ty(&mut self) -> Ty {
        if self.chance(0.8) {
            Ty::Num
        } else {
            Ty::Text
        }
    }

    fn formula(&mut self, depth: usize, frames: &[Frame], size: usize) -> Formula {
        let agg_ok = frames.iter().any(|f| f.keys.is_some());
        let nested = depth > 0;
        let roll = self.rng.gen_range(0..100);
        match roll {
            0..=4 => Formula::True,
            5..=19 if size > 0 => {
                let a = self.formula(depth, frames, size - 1);
                let b = self.formula(depth, frames, size - 1);
                if self.chance(0.5) {
                    Formula::and(a, b)
                } else {
                    Formula::or(a, b)
                }
            }
            20..=26 if size > 0 => Formula::not(self.formula(depth, frames, size - 1)),
            27..=41 if nested => Formula::exists(self.query(depth - 1, frames).0),
            42..=49 if nested => {
                let n = self.rng.gen_range(1..=2);
                let sort: Sort = (0..n).map(|_| (self.fresh(), self.ty())).collect();
                let sub = self.shaped(depth - 1, frames, &sort);
                let sel = sort.iter().map(|(n, t)| Select::new(self.expr(*t, frames, agg_ok, 1), n)).collect();
                Formula::In(sel, Box::new(sub))
            }
            50..=56 if nested => {
                let ty = self.ty();
                let sort = vec![(self.fresh(), ty)];
                let sub = self.shaped(depth - 1, frames, &sort);
                let p = *Pred::ALL.choose(self.rng).unwrap();
                let qf = if self.chance(0.5) { Quantifier::All } else { Quantifier::Any };
                let s = Select::new(self.expr(ty, frames, agg_ok, 1), &sort[0].0);
                Formula::Quant(p, qf, s, Box::new(sub))
            }
            _ => {
                let ty = self.ty();
                let p = *Pred::ALL.choose(self.rng).unwrap();
                let a = self.expr(ty, frames, agg_ok, 2);
                let b = self.expr(ty, frames, agg_ok, 2);
                Formula::Pred(p, a, b)
            }
        }
    }

    /// Attributes readable outside an aggregate (`in_agg` false) or inside.
    fn attrs(&self, frames: &[Frame], ty: Ty, in_agg: bool) -> Vec<String> {
        let mut out = Vec::new();
        for f in frames {
            for (n, t) in &f.attrs {
                let ok = in_agg || f.keys.as_ref().is_none_or(|k| k.contains(n));
                if *t == ty && ok {
                    out.push(n.clone());
                }
            }
        }
        out
    }

    fn value(&mut self, ty: Ty) -> SqlValue {
        match ty {
            Ty::Num if self.chance(0.5) => SqlValue::int(self.rng.gen_range(-3..=3)),
            Ty::Num => SqlValue::Double(dyadic(self.rng)),
            Ty::Text => SqlValue::text(["a", "b", "c"].choose(self.rng).unwrap()),
        }
    }

    /// `agg` allows aggregates at this position; `in_agg` is set inside one.
    fn expr(&mut self, ty: Ty, frames: &[Frame], agg: bool, size: usize) -> Expr {
        self.expr_in(ty, frames, agg, false, size)
    }

    fn expr_in(&mut self, ty: Ty, frames: &[Frame], agg: bool, in_agg: bool, size: usize) -> Expr {
        let attrs = self.attrs(frames, ty, in_agg);
        let roll = self.rng.gen_range(0..100);
        match roll {
            0..=44 if !attrs.is_empty() => Expr::attr(attrs.choose(self.rng).unwrap()),
            45..=64 if size > 0 && ty == Ty::Num => {
                let op = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div].choose(self.rng).copied().unwrap();
                let a = self.expr_in(ty, frames, agg, in_agg, size - 1);
                let b = self.expr_in(ty, frames, agg, in_agg, size - 1);
                Expr::arith(op, a, b)
            }
            65..=69 if size > 0 && ty == Ty::Num => Expr::Neg(Box::new(self.expr_in(ty, frames, agg, in_agg, size - 1))),
            70..=74 if size > 0 && ty == Ty::Text => {
                let a = self.expr_in(ty, frames, agg, in_agg, size - 1);
                let b = self.expr_in(ty, frames, agg, in_agg, size - 1);
                Expr::arith(ArithOp::Concat, a, b)
            }
            75..=89 if agg && !in_agg && ty == Ty::Num => {
                let f = [AggFn::Sum, AggFn::Count, AggFn::Avg, AggFn::Min, AggFn::Max, AggFn::CountStar]
                    .choose(self.rng)
                    .copied()
                    .unwrap();
                if f == AggFn::CountStar {
                    Expr::count_star()
                } else {
                    Expr::agg(f, self.expr_in(Ty::Num, frames, false, true, 1))
                }
            }
            90..=93 => Expr::Const(SqlValue::Null),
            _ => Expr::Const(self.value(ty)),
        }
    }
}

fn push(frames: &[Frame], sort: &Sort, keys: Option<Vec<String>>) -> Vec<Frame> {
    let mut v = frames.to_vec();
    v.push(Frame { attrs: sort.clone(), keys });
    v
}

/// A small dyadic rational: exact in binary floating point, so sums and
/// products of a few of them never round.
fn dyadic(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-8..=8) as f64 / 4.0
}

fn random_schema(rng: &mut ChaCha8Rng, cfg: &Config) -> Schema {
    let mut s = Schema::default();
    let n = rng.gen_range(1..=cfg.max_tables);
    for t in 0..n {
        let cols = rng.gen_range(1..=3);
        let columns = (0..cols)
            .map(|c| {
                let ty = match rng.gen_range(0..100) {
                    0..=44 => ColumnType::Int,
                    45..=79 => ColumnType::Double,
                    _ => ColumnType::Text,
                };
                (["a", "b", "c"][c].to_string(), ty)
            })
            .collect();
        s.add(TableSchema { name: format!("r{}", t + 1), columns }).expect("distinct table names");
    }
    s
}

fn random_value(rng: &mut ChaCha8Rng, ty: ColumnType, null_rate: f64) -> SqlValue {
    if rng.gen_bool(null_rate) {
        return SqlValue::Null;
    }
    match ty {
        ColumnType::Int => SqlValue::int(rng.gen_range(-3..=3)),
        ColumnType::Double => SqlValue::Double(dyadic(rng)),
        ColumnType::Text => SqlValue::text(["a", "b", "c"].choose(rng).unwrap()),
        ColumnType::Bool => SqlValue::Bool(rng.gen()),
    }
}

fn random_row(rng: &mut ChaCha8Rng, t: &TableSchema, null_rate: f64) -> Tuple {
    t.columns.iter().map(|(c, ty)| (t.qualified(c), random_value(rng, *ty, null_rate))).collect()
}

fn random_instance(rng: &mut ChaCha8Rng, schema: &Schema, cfg: &Config) -> Instance {
    let mut inst = Instance::empty(schema.clone());
    for t in &schema.tables {
        let n = rng.gen_range(1..=cfg.max_rows);
        let rows = (0..n).map(|_| random_row(rng, t, cfg.null_rate)).collect();
        inst.tables.insert(t.name.clone(), rows);
    }
    inst
}

/// A random environment of one or two slices built from instance rows.
fn random_env(rng: &mut ChaCha8Rng, inst: &Instance, cfg: &Config) -> (Env, Vec<Frame>) {
    let mut slices = Vec::new();
    let mut frames = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let t = inst.schema.tables.choose(rng).unwrap().clone();
        let attrs: Sort = t.columns.iter().map(|(c, ty)| (t.qualified(c), ty_of(*ty))).collect();
        let rows = inst.table(&t.name).unwrap();
        let first = match rows.choose(rng) {
            Some(r) => r.clone(),
            None => random_row(rng, &t, cfg.null_rate),
        };
        let (keys, tuples) = if rng.gen_bool(0.5) {
            let mut keys: Vec<String> = attrs.iter().map(|(n, _)| n.clone()).collect();
            keys.shuffle(rng);
            keys.truncate(rng.gen_range(0..=1));
            let mut tuples: Vec<Tuple> =
                rows.iter().filter(|r| keys.iter().all(|k| r[k] == first[k])).cloned().collect();
            if tuples.is_empty() {
                tuples.push(first);
            }
            (Some(keys), tuples)
        } else {
            (None, vec![first])
        };
        slices.push(Slice {
            attrs: attrs.iter().map(|(n, _)| n.clone()).collect(),
            groups: keys.clone().unwrap_or_default(),
            tuples,
        });
        frames.push(Frame { attrs, keys });
    }
    (Env::from_slices(slices), frames)
}

const ATTEMPTS: usize = 200;

fn checked(
    g: &mut Gen<'_>,
    frames: &[Frame],
    statics: &[(StaticSlice, bool)],
) -> Query {
    for _ in 0..ATTEMPTS {
        let (q, _) = g.query(g.cfg.depth, frames);
        if check_query(g.schema, statics, &q).is_ok() {
            return q;
        }
    }
    g.table().0
}

/// The case for a seed; equal seeds give equal cases.
pub fn gen_case(seed: u64, cfg: Config) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let schema = random_schema(&mut rng, &cfg);
    let instance = random_instance(&mut rng, &schema, &cfg);
    let (env, frames) = random_env(&mut rng, &instance, &cfg);
    // A grouped slice without keys still folds, so the flag comes from the
    // generator's frames rather than from the slice.
    let env_statics: Vec<(StaticSlice, bool)> =
        env.slices().zip(&frames).map(|(s, f)| (s.static_part(), f.keys.is_some())).collect();
    let mut g = Gen { rng: &mut rng, schema: &schema, cfg, next: 0 };
    let query = checked(&mut g, &[], &[]);
    let env_query = checked(&mut g, &frames, &env_statics);
    Case { instance, query, env, env_statics, env_query }
}

/// Statistics over generated queries, to check the feature mix.
#[derive(Debug, Default, Clone, Copy)]
pub struct Mix {
    pub queries: usize,
    pub with_having: usize,
    pub with_subquery: usize,
    pub null_values: usize,
    pub values: usize,
}

pub fn mix(cases: &[Case]) -> Mix {
    let mut m = Mix::default();
    for c in cases {
        for q in [&c.query, &c.env_query] {
            m.queries += 1;
            m.with_having += has_having(q) as usize;
            m.with_subquery += has_subquery(q) as usize;
        }
        for rows in c.instance.tables.values() {
            for t in rows {
                for v in t.values() {
                    m.values += 1;
                    m.null_values += v.is_null() as usize;
                }
            }
        }
    }
    m
}

fn children(q: &Query) -> Vec<&Query> {
    match q {
        Query::Empty | Query::Table(_) => vec![],
        Query::Union(a, b) | Query::Intersect(a, b) | Query::Except(a, b) | Query::Join(a, b) => vec![a, b],
        Query::Project(_, q) | Query::Filter(_, q) => vec![q],
        Query::Group { input, .. } => vec![input],
    }
}

fn formula_queries(f: &Formula) -> Vec<&Query> {
    match f {
        Formula::True | Formula::Pred(..) => vec![],
        Formula::And(a, b) | Formula::Or(a, b) => {
            let mut v = formula_queries(a);
            v.extend(formula_queries(b));
            v
        }
        Formula::Not(a) => formula_queries(a),
        Formula::Quant(_, _, _, q) | Formula::In(_, q) | Formula::Exists(q) => vec![q],
    }
}

fn formulas(q: &Query) -> Vec<&Formula> {
    match q {
        Query::Filter(f, _) => vec![f],
        Query::Group { having, .. } => vec![having],
        _ => vec![],
    }
}

fn has_having(q: &Query) -> bool {
    matches!(q, Query::Group { having, .. } if *having != Formula::True)
        || children(q).into_iter().any(has_having)
        || formulas(q).into_iter().flat_map(formula_queries).any(has_having)
}

fn has_subquery(q: &Query) -> bool {
    formulas(q).into_iter().any(|f| !formula_queries(f).is_empty()) || children(q).into_iter().any(has_subquery)
}
