//! The whole compiler: every intermediate program of a query, evaluation at
//! any stage and the artifacts written by the command-line tool.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::alg2nra::translate_query;
use crate::data::{
    bag_to_data, data_to_ejson, ejson_to_data, instance_to_data, Data, Instance, Schema,
};
use crate::error::{Error, Result};
use crate::imp::data::{nnrsimp_to_imp_data, DataInst, DataProgram};
use crate::imp::ejson::{imp_data_to_imp_ejson, EJsonInst, EJsonProgram};
use crate::imp::{check_imp, eval_imp};
use crate::js::{imp_to_js, print_js};
use crate::lowering::{
    check_nnrsimp, check_phases, eval_nnrc_top, eval_nnrs, eval_nnrsimp, is_cross_shadow_free,
    is_stratified, nnrc_to_nnrs, nnrs_to_nnrsimp, nrae_to_nnrc_top, stratify, uncross_shadow, Nnrc,
    Nnrs, NnrsImp,
};
use crate::nrae::{eval_top, optimize, Nra};
use crate::sql::{normalize, parse, script, to_sqlalg, SqlQuery};
use crate::sqlalg::{check_query, eval_query, Env, Query};

/// Stages whose program can be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    SqlAlg,
    Nrae,
    Nnrc,
    Stratified,
    Nnrs,
    NoShadow,
    NnrsImp,
    ImpData,
    Imp,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::SqlAlg,
        Stage::Nrae,
        Stage::Nnrc,
        Stage::Stratified,
        Stage::Nnrs,
        Stage::NoShadow,
        Stage::NnrsImp,
        Stage::ImpData,
        Stage::Imp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::SqlAlg => "sqlalg",
            Stage::Nrae => "nrae",
            Stage::Nnrc => "nnrc",
            Stage::Stratified => "stratified",
            Stage::Nnrs => "nnrs",
            Stage::NoShadow => "noshadow",
            Stage::NnrsImp => "nnrsimp",
            Stage::ImpData => "impdata",
            Stage::Imp => "imp",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Stage, String> {
        Stage::ALL
            .iter()
            .copied()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage `{}`", s))
    }
}

/// Artifacts `compile` can print.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emit {
    SqlAlg,
    Nrae,
    Nnrc,
    Nnrs,
    NnrsImp,
    Imp,
    Js,
}

impl Emit {
    pub const ALL: [Emit; 7] =
        [Emit::SqlAlg, Emit::Nrae, Emit::Nnrc, Emit::Nnrs, Emit::NnrsImp, Emit::Imp, Emit::Js];

    pub fn name(self) -> &'static str {
        match self {
            Emit::SqlAlg => "sqlalg",
            Emit::Nrae => "nrae",
            Emit::Nnrc => "nnrc",
            Emit::Nnrs => "nnrs",
            Emit::NnrsImp => "nnrsimp",
            Emit::Imp => "imp",
            Emit::Js => "js",
        }
    }
}

impl FromStr for Emit {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Emit, String> {
        Emit::ALL
            .iter()
            .copied()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown emit stage `{}`", s))
    }
}

/// Every program below NRAe.
#[derive(Debug, Clone)]
pub struct Lowered {
    pub nnrc: Nnrc,
    pub stratified: Nnrc,
    pub nnrs: Nnrs,
    pub noshadow: Nnrs,
    pub nnrsimp: NnrsImp,
    pub imp_data: DataProgram,
    pub imp: EJsonProgram,
}

fn bug(stage: &str, e: impl fmt::Display) -> Error {
    Error::Invalid(format!("compiler bug after {}: {}", stage, e))
}

/// Lowers an NRAe query to Imp over EJson, validating each intermediate
/// program.
pub fn lower(q: &Nra) -> Result<Lowered> {
    let nnrc = nrae_to_nnrc_top(q);
    let stratified = stratify(&nnrc);
    if !is_stratified(&stratified) {
        return Err(bug("stratify", "result is not stratified"));
    }
    let nnrs = nnrc_to_nnrs(&stratified).map_err(|e| bug("nnrs", e))?;
    check_phases(&nnrs).map_err(|e| bug("nnrs", e))?;
    let noshadow = uncross_shadow(&nnrs);
    if !is_cross_shadow_free(&noshadow) {
        return Err(bug("uncross_shadow", "result is not cross-shadow-free"));
    }
    check_phases(&noshadow).map_err(|e| bug("uncross_shadow", e))?;
    let nnrsimp = nnrs_to_nnrsimp(&noshadow).map_err(|e| bug("nnrsimp", e))?;
    check_nnrsimp(&nnrsimp).map_err(|e| bug("nnrsimp", e))?;
    let imp_data = nnrsimp_to_imp_data(&nnrsimp);
    check_imp(&imp_data).map_err(|e| bug("imp", e))?;
    let imp = imp_data_to_imp_ejson(&imp_data)?;
    Ok(Lowered { nnrc, stratified, nnrs, noshadow, nnrsimp, imp_data, imp })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Options {
    /// Run the NRAe rewrites before lowering.
    pub optimize: bool,
}

/// A compiled query with its program at every stage.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub schema: Schema,
    /// The normalized SQL, when compiled from source.
    pub sql: Option<SqlQuery>,
    pub sqlalg: Query,
    pub nrae: Nra,
    pub lowered: Lowered,
}

/// Compiles an algebra query that has already passed `check_query`.
pub fn compile_sqlalg(schema: &Schema, q: &Query, opts: Options) -> Result<Compiled> {
    let mut nrae = translate_query(schema, &[], q);
    if opts.optimize {
        nrae = optimize(&nrae);
    }
    let lowered = lower(&nrae)?;
    Ok(Compiled { schema: schema.clone(), sql: None, sqlalg: q.clone(), nrae, lowered })
}

/// Compiles a script: `create table` statements followed by one query.
pub fn compile_sql(src: &str, opts: Options) -> Result<Compiled> {
    let (schema, q) = script(parse(src)?)?;
    let q = normalize(&q, &schema)?;
    let alg = to_sqlalg(&q, &schema)?;
    check_query(&schema, &[], &alg)?;
    let mut c = compile_sqlalg(&schema, &alg, opts)?;
    c.sql = Some(q);
    Ok(c)
}

impl Compiled {
    /// Evaluates the program of one stage on an instance.
    pub fn eval(&self, stage: Stage, inst: &Instance) -> Result<Data> {
        if stage == Stage::SqlAlg {
            return Ok(bag_to_data(&eval_query(&self.sqlalg, &Env::new(), inst)?));
        }
        let db = instance_to_data(inst);
        match stage {
            Stage::Nrae => eval_top(&self.nrae, &db),
            s => self.lowered.eval(s, &db),
        }
    }

    /// The printed program of a stage.
    pub fn emit(&self, e: Emit) -> String {
        let l = &self.lowered;
        match e {
            Emit::SqlAlg => format!("{}\n", self.sqlalg),
            Emit::Nrae => format!("{}\n", self.nrae),
            Emit::Nnrc => format!("{}\n", l.stratified),
            Emit::Nnrs => l.noshadow.to_string(),
            Emit::NnrsImp => l.nnrsimp.to_string(),
            Emit::Imp => l.imp.to_string(),
            Emit::Js => print_js(&imp_to_js(&l.imp)),
        }
    }
}

impl Lowered {
    /// Evaluates the program of a stage below NRAe on the instance record.
    pub fn eval(&self, stage: Stage, db: &Data) -> Result<Data> {
        match stage {
            Stage::SqlAlg | Stage::Nrae => {
                Err(Error::Invalid(format!("stage {} is not a lowered stage", stage.name())))
            }
            Stage::Nnrc => eval_nnrc_top(&self.nnrc, db),
            Stage::Stratified => eval_nnrc_top(&self.stratified, db),
            Stage::Nnrs => eval_nnrs(&self.nnrs, db),
            Stage::NoShadow => eval_nnrs(&self.noshadow, db),
            Stage::NnrsImp => eval_nnrsimp(&self.nnrsimp, db),
            Stage::ImpData => eval_imp(&self.imp_data, &DataInst, db.clone()),
            Stage::Imp => ejson_to_data(&eval_imp(&self.imp, &EJsonInst, data_to_ejson(db)?)?),
        }
    }
}

/// The schema file shipped next to emitted JavaScript: table name to column
/// name to column type.
pub fn schema_sidecar(schema: &Schema) -> String {
    let mut m: BTreeMap<&str, BTreeMap<&str, &str>> = BTreeMap::new();
    for t in &schema.tables {
        let cols = m.entry(&t.name).or_default();
        for (c, ty) in &t.columns {
            cols.insert(c, ty.name());
        }
    }
    let mut s = serde_json::to_string_pretty(&m).expect("serializable");
    s.push('\n');
    s
}
