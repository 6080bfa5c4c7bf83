//! The nested relational algebra with environments: combinators evaluated
//! against an environment and an input value.

mod eval;
mod ops;
mod optim;
mod print;

pub use eval::{desugar_group_by, eval_nra, eval_top};
pub use ops::{apply_binary, apply_unary, group_by};
pub use optim::{default_rules, optimize, optimize_with, Rule};

use crate::data::Data;

/// Reserved label holding a partition in the output of group-by.
pub const GROUP_LABEL: &str = "$group";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnOp {
    Not,
    Neg,
    /// Field access `.a`.
    Dot(String),
    /// Record construction `{a: _}`.
    Rec(String),
    /// Singleton bag.
    Bag,
    Distinct,
    /// Record projection onto the listed labels.
    Project(Vec<String>),
    Count,
    Sum,
    Avg,
    Min,
    Max,
    Flatten,
    Left,
    Right,
    /// `left(d)` for a singleton bag `[d]`, `right(unit)` otherwise.
    Single,
    /// The first element of a non-empty bag.
    First,
    /// Group records by the listed labels; each output record carries the
    /// key fields plus the partition under the given label.
    GroupBy(String, Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Eq,
    Lt,
    Le,
    Add,
    Sub,
    Mul,
    /// Division whose result is boxed: `right(unit)` when dividing by zero.
    Div,
    Concat,
    And,
    Or,
    Union,
    Minus,
    Intersect,
    /// Record concatenation; the right operand wins on shared labels.
    RecConcat,
    /// Bag membership of the left operand in the right one.
    Contains,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Nra {
    Const(Data),
    In,
    Env,
    /// A table of the instance, read from the top-level input.
    Table(String),
    Unary(UnOp, Box<Nra>),
    Binary(BinOp, Box<Nra>, Box<Nra>),
    /// `q2 ∘ q1`: evaluate `q2` with the result of `q1` as input.
    Compose(Box<Nra>, Box<Nra>),
    /// `map⟨body⟩(input)`.
    Map(Box<Nra>, Box<Nra>),
    /// `select⟨pred⟩(input)`.
    Select(Box<Nra>, Box<Nra>),
    Product(Box<Nra>, Box<Nra>),
    /// `q1 || q2`: `q2` when `q1` is the empty bag.
    Default(Box<Nra>, Box<Nra>),
    Either(Box<Nra>, Box<Nra>),
    /// `q2 ∘e q1`: evaluate `q2` with the result of `q1` as environment.
    ComposeEnv(Box<Nra>, Box<Nra>),
    /// Map over the environment, which must be a bag.
    MapEnv(Box<Nra>),
}

impl Nra {
    pub fn unary(op: UnOp, q: Nra) -> Nra {
        Nra::Unary(op, Box::new(q))
    }

    pub fn binary(op: BinOp, a: Nra, b: Nra) -> Nra {
        Nra::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn compose(q2: Nra, q1: Nra) -> Nra {
        Nra::Compose(Box::new(q2), Box::new(q1))
    }

    pub fn compose_env(q2: Nra, q1: Nra) -> Nra {
        Nra::ComposeEnv(Box::new(q2), Box::new(q1))
    }

    pub fn map(body: Nra, input: Nra) -> Nra {
        Nra::Map(Box::new(body), Box::new(input))
    }

    pub fn select(pred: Nra, input: Nra) -> Nra {
        Nra::Select(Box::new(pred), Box::new(input))
    }

    pub fn either(l: Nra, r: Nra) -> Nra {
        Nra::Either(Box::new(l), Box::new(r))
    }

    pub fn product(a: Nra, b: Nra) -> Nra {
        Nra::Product(Box::new(a), Box::new(b))
    }

    pub fn default(a: Nra, b: Nra) -> Nra {
        Nra::Default(Box::new(a), Box::new(b))
    }

    pub fn dot(q: Nra, a: &str) -> Nra {
        Nra::unary(UnOp::Dot(a.to_string()), q)
    }

    pub fn rec(a: &str, q: Nra) -> Nra {
        Nra::unary(UnOp::Rec(a.to_string()), q)
    }

    /// A record literal built from (label, query) pairs.
    pub fn record(fields: Vec<(String, Nra)>) -> Nra {
        let mut it = fields.into_iter();
        match it.next() {
            None => Nra::Const(Data::empty_record()),
            Some((a, q)) => it.fold(Nra::rec(&a, q), |acc, (a, q)| {
                Nra::binary(BinOp::RecConcat, acc, Nra::rec(&a, q))
            }),
        }
    }

    pub fn group_by(g: &str, attrs: Vec<String>, q: Nra) -> Nra {
        Nra::unary(UnOp::GroupBy(g.to_string(), attrs), q)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn children(&self) -> Vec<&Nra> {
        match self {
            Nra::Const(_) | Nra::In | Nra::Env | Nra::Table(_) => vec![],
            Nra::Unary(_, q) | Nra::MapEnv(q) => vec![q],
            Nra::Binary(_, a, b)
            | Nra::Compose(a, b)
            | Nra::Map(a, b)
            | Nra::Select(a, b)
            | Nra::Product(a, b)
            | Nra::Default(a, b)
            | Nra::Either(a, b)
            | Nra::ComposeEnv(a, b) => vec![a, b],
        }
    }
}
