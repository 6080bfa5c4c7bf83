use std::fmt;

use super::{BinOp, Nra, UnOp};

impl fmt::Display for UnOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnOp::Not => write!(f, "not"),
            UnOp::Neg => write!(f, "neg"),
            UnOp::Dot(a) => write!(f, ".{}", a),
            UnOp::Rec(a) => write!(f, "rec[{}]", a),
            UnOp::Bag => write!(f, "bag"),
            UnOp::Distinct => write!(f, "distinct"),
            UnOp::Project(attrs) => write!(f, "pi[{}]", attrs.join(", ")),
            UnOp::Count => write!(f, "count"),
            UnOp::Sum => write!(f, "sum"),
            UnOp::Avg => write!(f, "avg"),
            UnOp::Min => write!(f, "min"),
            UnOp::Max => write!(f, "max"),
            UnOp::Flatten => write!(f, "flatten"),
            UnOp::Left => write!(f, "left"),
            UnOp::Right => write!(f, "right"),
            UnOp::Single => write!(f, "single"),
            UnOp::First => write!(f, "first"),
            UnOp::GroupBy(g, attrs) => write!(f, "group_by[{}; {}]", g, attrs.join(", ")),
        }
    }
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Eq => "=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Concat => "||",
            BinOp::And => "and",
            BinOp::Or => "or",
            BinOp::Union => "union",
            BinOp::Minus => "minus",
            BinOp::Intersect => "intersect",
            BinOp::RecConcat => "+r",
            BinOp::Contains => "in",
        }
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl fmt::Display for Nra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nra::Const(d) => write!(f, "{}", d),
            Nra::In => write!(f, "In"),
            Nra::Env => write!(f, "Env"),
            Nra::Table(t) => write!(f, "table({})", t),
            Nra::Unary(UnOp::Dot(a), q) => write!(f, "{}.{}", q, a),
            Nra::Unary(UnOp::Rec(a), q) => write!(f, "{{{}: {}}}", a, q),
            Nra::Unary(op, q) => write!(f, "{}({})", op, q),
            Nra::Binary(op, a, b) => write!(f, "({} {} {})", a, op, b),
            Nra::Compose(a, b) => write!(f, "({} @ {})", a, b),
            Nra::Map(a, b) => write!(f, "chi<{}>({})", a, b),
            Nra::Select(a, b) => write!(f, "sigma<{}>({})", a, b),
            Nra::Product(a, b) => write!(f, "({} x {})", a, b),
            Nra::Default(a, b) => write!(f, "({} || {})", a, b),
            Nra::Either(a, b) => write!(f, "either<{}><{}>", a, b),
            Nra::ComposeEnv(a, b) => write!(f, "({} @e {})", a, b),
            Nra::MapEnv(a) => write!(f, "chi_e<{}>", a),
        }
    }
}
