use crate::data::{ArithOp, SqlValue, TableSchema};
use crate::sqlalg::{AggFn, Pred, Quantifier};

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    CreateTable(TableSchema),
    Query(SqlQuery),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersect,
    Except,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SqlQuery {
    Select(Box<SelectBlock>),
    /// The flag records `all`; both forms have multiset semantics.
    SetOp(SetOp, bool, Box<SqlQuery>, Box<SqlQuery>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectBlock {
    pub items: Vec<SelectItem>,
    pub from: Vec<FromItem>,
    pub where_: Option<Cond>,
    pub group_by: Vec<SqlExpr>,
    pub having: Option<Cond>,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelectItem {
    /// `*` or `q.*`
    Star(Option<String>),
    Expr(SqlExpr, Option<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FromSource {
    Table(String),
    Query(SqlQuery),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FromItem {
    pub source: FromSource,
    pub alias: Option<String>,
    pub columns: Option<Vec<String>>,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SqlExpr {
    Const(SqlValue),
    Column { qualifier: Option<String>, name: String, line: usize, col: usize },
    Neg(Box<SqlExpr>),
    Arith(ArithOp, Box<SqlExpr>, Box<SqlExpr>),
    /// `count(*)` is `Agg(CountStar, 1)`.
    Agg(AggFn, Box<SqlExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cond {
    True,
    False,
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
    Not(Box<Cond>),
    Cmp(Pred, SqlExpr, SqlExpr),
    Quant(Pred, Quantifier, SqlExpr, Box<SqlQuery>),
    In(Vec<SqlExpr>, Box<SqlQuery>),
    Exists(Box<SqlQuery>),
}
