use crate::data::{ArithOp, SqlValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggFn {
    Sum,
    Count,
    Avg,
    Min,
    Max,
    /// `count(*)`: counts rows; its argument is the constant 1.
    CountStar,
}

impl AggFn {
    pub fn name(self) -> &'static str {
        match self {
            AggFn::Sum => "sum",
            AggFn::Count | AggFn::CountStar => "count",
            AggFn::Avg => "avg",
            AggFn::Min => "min",
            AggFn::Max => "max",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(SqlValue),
    Attr(String),
    Neg(Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Agg(AggFn, Box<Expr>),
}

impl Expr {
    pub fn attr(a: &str) -> Expr {
        Expr::Attr(a.to_string())
    }

    pub fn int(i: i64) -> Expr {
        Expr::Const(SqlValue::int(i))
    }

    pub fn double(d: f64) -> Expr {
        Expr::Const(SqlValue::Double(d))
    }

    pub fn arith(op: ArithOp, a: Expr, b: Expr) -> Expr {
        Expr::Arith(op, Box::new(a), Box::new(b))
    }

    pub fn agg(f: AggFn, e: Expr) -> Expr {
        Expr::Agg(f, Box::new(e))
    }

    pub fn count_star() -> Expr {
        Expr::agg(AggFn::CountStar, Expr::int(1))
    }

    pub fn contains_agg(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Attr(_) => false,
            Expr::Neg(e) => e.contains_agg(),
            Expr::Arith(_, a, b) => a.contains_agg() || b.contains_agg(),
            Expr::Agg(..) => true,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Attr(_) => 1,
            Expr::Neg(e) | Expr::Agg(_, e) => 1 + e.size(),
            Expr::Arith(_, a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// Comparison predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pred {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Pred {
    pub const ALL: [Pred; 6] = [Pred::Eq, Pred::Ne, Pred::Lt, Pred::Le, Pred::Gt, Pred::Ge];

    pub fn symbol(self) -> &'static str {
        match self {
            Pred::Eq => "=",
            Pred::Ne => "<>",
            Pred::Lt => "<",
            Pred::Le => "<=",
            Pred::Gt => ">",
            Pred::Ge => ">=",
        }
    }

    pub fn holds(self, o: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            Pred::Eq => o == Equal,
            Pred::Ne => o != Equal,
            Pred::Lt => o == Less,
            Pred::Le => o != Greater,
            Pred::Gt => o == Greater,
            Pred::Ge => o != Less,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    All,
    Any,
}

/// An expression named by an attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct Select {
    pub expr: Expr,
    pub name: String,
}

impl Select {
    pub fn new(expr: Expr, name: &str) -> Select {
        Select { expr, name: name.to_string() }
    }

    /// `a as b` for attributes.
    pub fn rename(from: &str, to: &str) -> Select {
        Select::new(Expr::attr(from), to)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    True,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Pred(Pred, Expr, Expr),
    /// `e p all(Q)` / `e p any(Q)`; the select names the single attribute of Q.
    Quant(Pred, Quantifier, Select, Box<Query>),
    /// `(e1, …, en) in Q`; each select names the attribute of Q it is matched with.
    In(Vec<Select>, Box<Query>),
    Exists(Box<Query>),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn exists(q: Query) -> Formula {
        Formula::Exists(Box::new(q))
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::True => 1,
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
            Formula::Not(a) => 1 + a.size(),
            Formula::Pred(_, a, b) => 1 + a.size() + b.size(),
            Formula::Quant(_, _, s, q) => 1 + s.expr.size() + q.size(),
            Formula::In(s, q) => 1 + s.iter().map(|s| s.expr.size()).sum::<usize>() + q.size(),
            Formula::Exists(q) => 1 + q.size(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Query {
    /// `()`, which evaluates to the empty bag.
    Empty,
    Table(String),
    Union(Box<Query>, Box<Query>),
    Intersect(Box<Query>, Box<Query>),
    Except(Box<Query>, Box<Query>),
    Join(Box<Query>, Box<Query>),
    Project(Vec<Select>, Box<Query>),
    Filter(Formula, Box<Query>),
    /// γ: partition `input` by the key attributes, keep the groups
    /// satisfying `having`, and produce one tuple per group.
    Group { select: Vec<Select>, keys: Vec<String>, having: Formula, input: Box<Query> },
}

impl Query {
    pub fn table(t: &str) -> Query {
        Query::Table(t.to_string())
    }

    pub fn project(sel: Vec<Select>, q: Query) -> Query {
        Query::Project(sel, Box::new(q))
    }

    pub fn filter(f: Formula, q: Query) -> Query {
        Query::Filter(f, Box::new(q))
    }

    pub fn join(a: Query, b: Query) -> Query {
        Query::Join(Box::new(a), Box::new(b))
    }

    pub fn group(select: Vec<Select>, keys: Vec<&str>, having: Formula, q: Query) -> Query {
        Query::Group {
            select,
            keys: keys.into_iter().map(String::from).collect(),
            having,
            input: Box::new(q),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Query::Empty | Query::Table(_) => 1,
            Query::Union(a, b) | Query::Intersect(a, b) | Query::Except(a, b) | Query::Join(a, b) => {
                1 + a.size() + b.size()
            }
            Query::Project(s, q) => 1 + s.iter().map(|s| s.expr.size()).sum::<usize>() + q.size(),
            Query::Filter(f, q) => 1 + f.size() + q.size(),
            Query::Group { select, having, input, .. } => {
                1 + select.iter().map(|s| s.expr.size()).sum::<usize>() + having.size() + input.size()
            }
        }
    }
}
