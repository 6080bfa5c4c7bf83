//! Imp over EJson. `not`, `and` and `or` stay operators; everything else
//! is a call into the runtime library.

use std::fmt;

use super::data::{DataExpr, DataFun, DataOp, DataProgram, DataStmt};
use super::{call_runtime, EJsonFun, ImpExpr, ImpFunction, ImpStmt, Instantiation, Render};
use crate::data::{data_to_ejson, EJson};
use crate::error::{type_err, Error, Result};
use crate::nrae::{BinOp, UnOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EJsonOp {
    Not,
    And,
    Or,
}

pub type EJsonExpr = ImpExpr<EJson, EJsonOp, EJsonFun>;
pub type EJsonStmt = ImpStmt<EJson, EJsonOp, EJsonFun>;
pub type EJsonProgram = ImpFunction<EJson, EJsonOp, EJsonFun>;

impl Render for EJsonOp {
    fn render(&self, args: &[String]) -> String {
        match (self, args) {
            (EJsonOp::Not, [a]) => format!("!{}", a),
            (EJsonOp::And, [a, b]) => format!("({} && {})", a, b),
            (EJsonOp::Or, [a, b]) => format!("({} || {})", a, b),
            (op, args) => format!("{}({})", op, args.join(", ")),
        }
    }
}

impl fmt::Display for EJsonOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EJsonOp::Not => "not",
            EJsonOp::And => "and",
            EJsonOp::Or => "or",
        })
    }
}

fn boolean(v: &EJson) -> Result<bool> {
    match v {
        EJson::Bool(b) => Ok(*b),
        _ => type_err(format!("expected a boolean, got {}", v)),
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EJsonInst;

impl Instantiation for EJsonInst {
    type Value = EJson;
    type Op = EJsonOp;
    type Fun = EJsonFun;

    fn op(&self, op: &EJsonOp, args: Vec<EJson>) -> Result<EJson> {
        match (op, args.as_slice()) {
            (EJsonOp::Not, [a]) => Ok(EJson::Bool(!boolean(a)?)),
            (EJsonOp::And, [a, b]) => Ok(EJson::Bool(boolean(a)? && boolean(b)?)),
            (EJsonOp::Or, [a, b]) => Ok(EJson::Bool(boolean(a)? || boolean(b)?)),
            _ => Err(Error::Invalid(format!("{} applied to {} arguments", op, args.len()))),
        }
    }

    fn call(&self, f: &EJsonFun, args: Vec<EJson>) -> Result<EJson> {
        call_runtime(*f, args)
    }

    fn to_bool(&self, v: &EJson) -> Result<bool> {
        boolean(v)
    }

    fn to_list(&self, v: &EJson) -> Result<Vec<EJson>> {
        match v {
            EJson::Array(items) => Ok(items.to_vec()),
            _ => type_err(format!("loop over a non-array {}", v)),
        }
    }
}

fn label(l: &str) -> EJsonExpr {
    ImpExpr::Const(EJson::str(l))
}

fn labels(ls: &[String]) -> EJsonExpr {
    ImpExpr::Const(EJson::array(ls.iter().map(|l| EJson::str(l)).collect()))
}

fn call(f: EJsonFun, args: Vec<EJsonExpr>) -> EJsonExpr {
    ImpExpr::Call(f, args)
}

fn unary(op: &UnOp, a: EJsonExpr) -> EJsonExpr {
    use EJsonFun as F;
    match op {
        UnOp::Not => ImpExpr::Op(EJsonOp::Not, vec![a]),
        UnOp::Dot(l) => call(F::Dot, vec![a, label(l)]),
        UnOp::Rec(l) => call(F::Rec, vec![label(l), a]),
        UnOp::Project(ls) => call(F::Project, vec![a, labels(ls)]),
        UnOp::GroupBy(g, ls) => call(F::GroupBy, vec![a, label(g), labels(ls)]),
        UnOp::Neg => call(F::Neg, vec![a]),
        UnOp::Bag => call(F::Bag, vec![a]),
        UnOp::Distinct => call(F::Distinct, vec![a]),
        UnOp::Count => call(F::Count, vec![a]),
        UnOp::Sum => call(F::Sum, vec![a]),
        UnOp::Avg => call(F::Avg, vec![a]),
        UnOp::Min => call(F::Min, vec![a]),
        UnOp::Max => call(F::Max, vec![a]),
        UnOp::Flatten => call(F::Flatten, vec![a]),
        UnOp::Left => call(F::Left, vec![a]),
        UnOp::Right => call(F::Right, vec![a]),
        UnOp::Single => call(F::Single, vec![a]),
        UnOp::First => call(F::First, vec![a]),
    }
}

fn binary(op: BinOp, a: EJsonExpr, b: EJsonExpr) -> EJsonExpr {
    use EJsonFun as F;
    let f = match op {
        BinOp::And => return ImpExpr::Op(EJsonOp::And, vec![a, b]),
        BinOp::Or => return ImpExpr::Op(EJsonOp::Or, vec![a, b]),
        BinOp::Eq => F::Equal,
        BinOp::Lt => F::Lt,
        BinOp::Le => F::Le,
        BinOp::Add => F::Add,
        BinOp::Sub => F::Sub,
        BinOp::Mul => F::Mult,
        BinOp::Div => F::Div,
        BinOp::Concat => F::Concat,
        BinOp::Union => F::Union,
        BinOp::Minus => F::Minus,
        BinOp::Intersect => F::Intersect,
        BinOp::RecConcat => F::RecConcat,
        BinOp::Contains => F::Contains,
    };
    call(f, vec![a, b])
}

fn expr(e: &DataExpr) -> Result<EJsonExpr> {
    Ok(match e {
        ImpExpr::Const(d) => ImpExpr::Const(data_to_ejson(d)?),
        ImpExpr::Var(x) => ImpExpr::Var(x.clone()),
        ImpExpr::Op(op, args) => {
            let mut args = args.iter().map(expr).collect::<Result<Vec<_>>>()?;
            match (op, args.len()) {
                (DataOp::Unary(u), 1) => unary(u, args.pop().unwrap()),
                (DataOp::Binary(b), 2) => {
                    let y = args.pop().unwrap();
                    binary(*b, args.pop().unwrap(), y)
                }
                _ => return Err(Error::Invalid(format!("{:?} applied to {} arguments", op, args.len()))),
            }
        }
        ImpExpr::Call(f, args) => {
            let args = args.iter().map(expr).collect::<Result<Vec<_>>>()?;
            let f = match f {
                DataFun::Either => EJsonFun::Either,
                DataFun::GetLeft => EJsonFun::GetLeft,
                DataFun::GetRight => EJsonFun::GetRight,
                DataFun::Push => EJsonFun::Push,
            };
            call(f, args)
        }
    })
}

fn stmt(s: &DataStmt) -> Result<EJsonStmt> {
    Ok(match s {
        ImpStmt::Block(decls, body) => ImpStmt::Block(
            decls
                .iter()
                .map(|(x, init)| Ok((x.clone(), init.as_ref().map(expr).transpose()?)))
                .collect::<Result<_>>()?,
            body.iter().map(stmt).collect::<Result<_>>()?,
        ),
        ImpStmt::Assign(x, e) => ImpStmt::Assign(x.clone(), expr(e)?),
        ImpStmt::For(x, e, body) => ImpStmt::For(x.clone(), expr(e)?, Box::new(stmt(body)?)),
        ImpStmt::If(c, a, b) => ImpStmt::If(expr(c)?, Box::new(stmt(a)?), Box::new(stmt(b)?)),
    })
}

/// Switches the data model: constants go through `data_to_ejson` and each
/// operator becomes its runtime counterpart.
pub fn imp_data_to_imp_ejson(p: &DataProgram) -> Result<EJsonProgram> {
    Ok(ImpFunction { input: p.input.clone(), body: stmt(&p.body)?, ret: p.ret.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Data;
    use crate::imp::data::DataInst;
    use crate::imp::eval_imp;

    #[test]
    fn constants_are_encoded() {
        let body = ImpStmt::Block(
            vec![("ret".into(), Some(ImpExpr::Const(Data::left(Data::int(1)))))],
            vec![],
        );
        let p = DataProgram { input: "db".into(), body, ret: "ret".into() };
        let q = imp_data_to_imp_ejson(&p).unwrap();
        let ImpStmt::Block(decls, _) = &q.body else { panic!() };
        assert_eq!(decls[0].1, Some(ImpExpr::Const(EJson::tagged("$left", EJson::int(1)))));
        let out = eval_imp(&q, &EJsonInst, EJson::Null).unwrap();
        assert_eq!(out, data_to_ejson(&eval_imp(&p, &DataInst, Data::Unit).unwrap()).unwrap());
    }

    #[test]
    fn either_tests_the_left_tag() {
        let e = |v: EJson| call_runtime(EJsonFun::Either, vec![v]);
        assert_eq!(e(EJson::tagged("$left", EJson::int(1))).unwrap(), EJson::Bool(true));
        assert_eq!(e(EJson::tagged("$right", EJson::Null)).unwrap(), EJson::Bool(false));
        assert!(e(EJson::int(1)).is_err());
    }
}
