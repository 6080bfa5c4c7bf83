//! Imp over nested data. The operators are the algebra's unary and binary
//! operators; the runtime functions are `either`, `getLeft`, `getRight`
//! and `push`.

use std::fmt;
use std::sync::Arc;

use super::{ImpExpr, ImpFunction, ImpStmt, Instantiation, Render};
use crate::data::Data;
use crate::error::{type_err, Error, Result};
use crate::lowering::{Expr, ImpStmt as NStmt, NnrsImp, DB_VAR};
use crate::lowering::Fresh;
use crate::nrae::{apply_binary, apply_unary, BinOp, UnOp};

#[derive(Debug, Clone, PartialEq)]
pub enum DataOp {
    Unary(UnOp),
    Binary(BinOp),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFun {
    /// True on `left(_)`, false on `right(_)`.
    Either,
    GetLeft,
    GetRight,
    /// Appends an element to a bag.
    Push,
}

pub type DataExpr = ImpExpr<Data, DataOp, DataFun>;
pub type DataStmt = ImpStmt<Data, DataOp, DataFun>;
pub type DataProgram = ImpFunction<Data, DataOp, DataFun>;

impl Render for DataOp {
    fn render(&self, args: &[String]) -> String {
        match (self, args) {
            (DataOp::Unary(UnOp::Dot(a)), [x]) => format!("{}.{}", x, a),
            (DataOp::Unary(UnOp::Rec(a)), [x]) => format!("{{{}: {}}}", a, x),
            (DataOp::Unary(op), [x]) => format!("{}({})", op, x),
            (DataOp::Binary(op), [a, b]) => format!("({} {} {})", a, op, b),
            (op, args) => format!("{:?}({})", op, args.join(", ")),
        }
    }
}

impl fmt::Display for DataFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DataFun::Either => "either",
            DataFun::GetLeft => "getLeft",
            DataFun::GetRight => "getRight",
            DataFun::Push => "push",
        })
    }
}

fn arity<T>(name: &str, n: usize, args: Vec<T>) -> Result<Vec<T>> {
    if args.len() == n {
        Ok(args)
    } else {
        Err(Error::Invalid(format!("{} takes {} arguments, got {}", name, n, args.len())))
    }
}

/// The nested-data instantiation.
#[derive(Debug, Clone, Copy, Default)]
pub struct DataInst;

impl Instantiation for DataInst {
    type Value = Data;
    type Op = DataOp;
    type Fun = DataFun;

    fn op(&self, op: &DataOp, args: Vec<Data>) -> Result<Data> {
        match op {
            DataOp::Unary(u) => apply_unary(u, &arity("unary operator", 1, args)?[0]),
            DataOp::Binary(b) => {
                let a = arity("binary operator", 2, args)?;
                apply_binary(*b, &a[0], &a[1])
            }
        }
    }

    fn call(&self, f: &DataFun, args: Vec<Data>) -> Result<Data> {
        match f {
            DataFun::Either | DataFun::GetLeft | DataFun::GetRight => {
                let v = arity(&f.to_string(), 1, args)?.pop().unwrap();
                match (f, v) {
                    (DataFun::Either, Data::Left(_)) => Ok(Data::Bool(true)),
                    (DataFun::Either, Data::Right(_)) => Ok(Data::Bool(false)),
                    (DataFun::GetLeft, Data::Left(d)) | (DataFun::GetRight, Data::Right(d)) => {
                        Ok(Arc::unwrap_or_clone(d))
                    }
                    (f, v) => type_err(format!("{} does not apply to {}", f, v)),
                }
            }
            DataFun::Push => {
                let mut a = arity("push", 2, args)?;
                let v = a.pop().unwrap();
                match a.pop().unwrap() {
                    Data::Bag(mut items) => {
                        Arc::make_mut(&mut items).push(v);
                        Ok(Data::Bag(items))
                    }
                    d => type_err(format!("push onto a non-bag {}", d)),
                }
            }
        }
    }

    fn to_bool(&self, v: &Data) -> Result<bool> {
        match v {
            Data::Bool(b) => Ok(*b),
            _ => type_err(format!("condition is not a boolean: {}", v)),
        }
    }

    fn to_list(&self, v: &Data) -> Result<Vec<Data>> {
        match v {
            Data::Bag(items) => Ok(items.to_vec()),
            _ => type_err(format!("loop over a non-bag {}", v)),
        }
    }
}

fn expr(e: &Expr) -> DataExpr {
    match e {
        Expr::Var(x) => ImpExpr::Var(x.clone()),
        Expr::Const(d) => ImpExpr::Const(d.clone()),
        Expr::Unary(op, a) => ImpExpr::Op(DataOp::Unary(op.clone()), vec![expr(a)]),
        Expr::Binary(op, a, b) => ImpExpr::Op(DataOp::Binary(*op), vec![expr(a), expr(b)]),
    }
}

struct ToImp {
    fresh: Fresh,
}

impl ToImp {
    fn stmts(&mut self, s: &NStmt, out: &mut Vec<DataStmt>) {
        match s {
            NStmt::Seq(a, b) => {
                self.stmts(a, out);
                self.stmts(b, out);
            }
            _ => out.push(self.stmt(s)),
        }
    }

    fn block(&mut self, decls: Vec<(String, Option<DataExpr>)>, s: &NStmt) -> DataStmt {
        let mut body = Vec::new();
        self.stmts(s, &mut body);
        ImpStmt::Block(decls, body)
    }

    fn stmt(&mut self, s: &NStmt) -> DataStmt {
        match s {
            NStmt::Seq(..) => self.block(vec![], s),
            NStmt::Let(x, init, body) => self.block(vec![(x.clone(), init.as_ref().map(expr))], body),
            NStmt::Assign(x, e) => match crate::lowering::as_push(x, e) {
                Some(v) => ImpStmt::Assign(
                    x.clone(),
                    ImpExpr::Call(DataFun::Push, vec![ImpExpr::Var(x.clone()), expr(v)]),
                ),
                None => ImpStmt::Assign(x.clone(), expr(e)),
            },
            NStmt::For(x, e, body) => {
                let b = self.block(vec![], body);
                ImpStmt::For(x.clone(), expr(e), Box::new(b))
            }
            NStmt::If(c, a, b) => {
                let (a, b) = (self.block(vec![], a), self.block(vec![], b));
                ImpStmt::If(expr(c), Box::new(a), Box::new(b))
            }
            NStmt::Either(e, x, l, y, r) => {
                let v = self.fresh.name("v");
                let var = || ImpExpr::Var(v.clone());
                let l = self.block(vec![(x.clone(), Some(ImpExpr::Call(DataFun::GetLeft, vec![var()])))], l);
                let r = self.block(vec![(y.clone(), Some(ImpExpr::Call(DataFun::GetRight, vec![var()])))], r);
                let test = ImpStmt::If(ImpExpr::Call(DataFun::Either, vec![var()]), Box::new(l), Box::new(r));
                ImpStmt::Block(vec![(v.clone(), Some(expr(e)))], vec![test])
            }
        }
    }
}

/// Statement shapes carry over; either-matches become a test with
/// `either` and branches reading the payload with `getLeft`/`getRight`,
/// and `x := x ∪ bag(e)` becomes `x = push(x, e)`.
pub fn nnrsimp_to_imp_data(p: &NnrsImp) -> DataProgram {
    let mut used = std::collections::BTreeSet::new();
    used.insert(DB_VAR.to_string());
    used.insert(p.ret.clone());
    p.body.collect_names(&mut used);
    let mut t = ToImp { fresh: Fresh::new(used) };
    let body = t.block(vec![(p.ret.clone(), None)], &p.body);
    ImpFunction { input: DB_VAR.to_string(), body, ret: p.ret.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imp::{check_imp, eval_imp};

    fn r(k: &str, v: i64) -> Data {
        Data::record([(k.to_string(), Data::int(v))])
    }

    /// `var tmp0 = []; for (id0 in db.R) { tmp0 = push(tmp0, {x: id0.a}) }`
    #[test]
    fn loop_fragment() {
        let push = ImpStmt::Assign(
            "tmp0".into(),
            ImpExpr::Call(
                DataFun::Push,
                vec![
                    ImpExpr::Var("tmp0".into()),
                    ImpExpr::Op(
                        DataOp::Unary(UnOp::Rec("x".into())),
                        vec![ImpExpr::Op(DataOp::Unary(UnOp::Dot("a".into())), vec![ImpExpr::Var("id0".into())])],
                    ),
                ],
            ),
        );
        let rows = ImpExpr::Op(DataOp::Unary(UnOp::Dot("R".into())), vec![ImpExpr::Var("db".into())]);
        let body = ImpStmt::Block(
            vec![("ret".into(), None), ("tmp0".into(), Some(ImpExpr::Const(Data::empty_bag())))],
            vec![
                ImpStmt::For("id0".into(), rows, Box::new(push)),
                ImpStmt::Assign("ret".into(), ImpExpr::Var("tmp0".into())),
            ],
        );
        let p = DataProgram { input: "db".into(), body, ret: "ret".into() };
        check_imp(&p).unwrap();
        let db = Data::record([("R".to_string(), Data::bag(vec![r("a", 1), r("a", 2)]))]);
        assert_eq!(eval_imp(&p, &DataInst, db).unwrap(), Data::bag(vec![r("x", 1), r("x", 2)]));
    }

    #[test]
    fn preassigned_ret() {
        let body = ImpStmt::Block(vec![("ret".into(), Some(ImpExpr::Const(Data::int(9))))], vec![]);
        let p = DataProgram { input: "db".into(), body, ret: "ret".into() };
        assert_eq!(eval_imp(&p, &DataInst, Data::Unit).unwrap(), Data::int(9));
    }

    #[test]
    fn block_scoping() {
        // var x = 1; { var x = 2; ret = x; } ret = x + ...: reads the outer x after the block.
        let inner = ImpStmt::Block(
            vec![("x".into(), Some(ImpExpr::Const(Data::int(2))))],
            vec![ImpStmt::Assign("y".into(), ImpExpr::Var("x".into()))],
        );
        let body = ImpStmt::Block(
            vec![("ret".into(), None), ("x".into(), Some(ImpExpr::Const(Data::int(1)))), ("y".into(), None)],
            vec![
                inner,
                ImpStmt::Assign(
                    "ret".into(),
                    ImpExpr::Op(
                        DataOp::Binary(BinOp::RecConcat),
                        vec![
                            ImpExpr::Op(DataOp::Unary(UnOp::Rec("x".into())), vec![ImpExpr::Var("x".into())]),
                            ImpExpr::Op(DataOp::Unary(UnOp::Rec("y".into())), vec![ImpExpr::Var("y".into())]),
                        ],
                    ),
                ),
            ],
        );
        let p = DataProgram { input: "db".into(), body, ret: "ret".into() };
        let want = Data::record([("x".to_string(), Data::int(1)), ("y".to_string(), Data::int(2))]);
        assert_eq!(eval_imp(&p, &DataInst, Data::Unit).unwrap(), want);
    }

    #[test]
    fn strict_coercions() {
        assert!(DataInst.to_bool(&Data::int(1)).is_err());
        assert!(DataInst.to_list(&Data::empty_record()).is_err());
        let uninit = DataProgram {
            input: "db".into(),
            body: ImpStmt::Block(vec![("ret".into(), None)], vec![]),
            ret: "ret".into(),
        };
        assert!(matches!(eval_imp(&uninit, &DataInst, Data::Unit), Err(Error::Uninitialized(_))));
    }

    #[test]
    fn either_match_on_left() {
        let body = NStmt::Either(
            Expr::var(DB_VAR),
            "a".into(),
            Box::new(NStmt::Assign("ret".into(), Expr::var("a"))),
            "b".into(),
            Box::new(NStmt::Assign("ret".into(), Expr::Const(Data::int(0)))),
        );
        let p = nnrsimp_to_imp_data(&NnrsImp { body, ret: "ret".into() });
        check_imp(&p).unwrap();
        assert_eq!(eval_imp(&p, &DataInst, Data::left(Data::int(1))).unwrap(), Data::int(1));
        assert_eq!(eval_imp(&p, &DataInst, Data::null()).unwrap(), Data::int(0));
        assert!(p.to_string().contains("if (either(v$0))"));
    }
}
