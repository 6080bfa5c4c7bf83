use std::fmt;

use crate::data::Data;
use crate::error::{Error, Result};
use crate::nrae::{apply_binary, apply_unary, BinOp, UnOp};

/// Operator expressions over variables and constants, shared by the
/// statement languages.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(String),
    Const(Data),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(x: &str) -> Expr {
        Expr::Var(x.to_string())
    }

    pub fn unary(op: UnOp, e: Expr) -> Expr {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    /// Calls `f` on every variable occurrence.
    pub fn visit_vars(&self, f: &mut dyn FnMut(&str)) {
        match self {
            Expr::Var(x) => f(x),
            Expr::Const(_) => {}
            Expr::Unary(_, e) => e.visit_vars(f),
            Expr::Binary(_, a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
        }
    }

    pub fn rename(&self, from: &str, to: &str) -> Expr {
        match self {
            Expr::Var(x) if x == from => Expr::var(to),
            Expr::Var(_) | Expr::Const(_) => self.clone(),
            Expr::Unary(op, e) => Expr::unary(op.clone(), e.rename(from, to)),
            Expr::Binary(op, a, b) => Expr::binary(*op, a.rename(from, to), b.rename(from, to)),
        }
    }
}

/// Evaluates an expression; `lookup` resolves variables.
pub fn eval_expr(e: &Expr, lookup: &dyn Fn(&str) -> Result<Data>) -> Result<Data> {
    match e {
        Expr::Var(x) => lookup(x),
        Expr::Const(d) => Ok(d.clone()),
        Expr::Unary(op, a) => apply_unary(op, &eval_expr(a, lookup)?),
        Expr::Binary(op, a, b) => apply_binary(*op, &eval_expr(a, lookup)?, &eval_expr(b, lookup)?),
    }
}

pub(crate) fn unbound(x: &str) -> Error {
    Error::Unbound(x.to_string())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(x) => write!(f, "{}", x),
            Expr::Const(d) => write!(f, "{}", d),
            Expr::Unary(UnOp::Dot(a), e) => write!(f, "{}.{}", e, a),
            Expr::Unary(UnOp::Rec(a), e) => write!(f, "{{{}: {}}}", a, e),
            Expr::Unary(op, e) => write!(f, "{}({})", op, e),
            Expr::Binary(op, a, b) => write!(f, "({} {} {})", a, op, b),
        }
    }
}
