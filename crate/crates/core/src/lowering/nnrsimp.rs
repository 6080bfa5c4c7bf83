use std::fmt;
use std::sync::Arc;

use super::expr::{eval_expr, unbound, Expr};
use super::nnrs::{Nnrs, Stmt};
use super::{is_cross_shadow_free, DB_VAR};
use crate::data::Data;
use crate::error::{type_err, Error, Result};
use crate::nrae::{BinOp, UnOp};

/// Statements over a single namespace of mutable variables.
#[derive(Debug, Clone, PartialEq)]
pub enum ImpStmt {
    Seq(Box<ImpStmt>, Box<ImpStmt>),
    /// Declares a variable, optionally initialized, scoped to the body.
    Let(String, Option<Expr>, Box<ImpStmt>),
    Assign(String, Expr),
    For(String, Expr, Box<ImpStmt>),
    If(Expr, Box<ImpStmt>, Box<ImpStmt>),
    Either(Expr, String, Box<ImpStmt>, String, Box<ImpStmt>),
}

impl ImpStmt {
    pub(crate) fn collect_names(&self, out: &mut std::collections::BTreeSet<String>) {
        let ex = |e: &Expr, out: &mut std::collections::BTreeSet<String>| {
            e.visit_vars(&mut |x| {
                out.insert(x.to_string());
            })
        };
        match self {
            ImpStmt::Seq(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            ImpStmt::Let(x, init, s) => {
                out.insert(x.clone());
                if let Some(e) = init {
                    ex(e, out);
                }
                s.collect_names(out);
            }
            ImpStmt::Assign(x, e) => {
                out.insert(x.clone());
                ex(e, out);
            }
            ImpStmt::For(x, e, s) => {
                out.insert(x.clone());
                ex(e, out);
                s.collect_names(out);
            }
            ImpStmt::If(c, a, b) => {
                ex(c, out);
                a.collect_names(out);
                b.collect_names(out);
            }
            ImpStmt::Either(e, x, l, y, r) => {
                out.insert(x.clone());
                out.insert(y.clone());
                ex(e, out);
                l.collect_names(out);
                r.collect_names(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NnrsImp {
    pub body: ImpStmt,
    pub ret: String,
}

/// `x ∪ bag(e)` assigned back to `x`: how pushes are written here.
pub(crate) fn as_push<'a>(x: &str, e: &'a Expr) -> Option<&'a Expr> {
    match e {
        Expr::Binary(BinOp::Union, a, b) => match (&**a, &**b) {
            (Expr::Var(y), Expr::Unary(UnOp::Bag, v)) if y == x => Some(v),
            _ => None,
        },
        _ => None,
    }
}

fn push_expr(x: &str, e: &Expr) -> Expr {
    Expr::binary(BinOp::Union, Expr::var(x), Expr::unary(UnOp::Bag, e.clone()))
}

fn tr(s: &Stmt) -> ImpStmt {
    let b = |s: &Stmt| Box::new(tr(s));
    match s {
        Stmt::Seq(a, c) => ImpStmt::Seq(b(a), b(c)),
        Stmt::Let(x, e, body) => ImpStmt::Let(x.clone(), Some(e.clone()), b(body)),
        Stmt::LetMut(x, s1, s2) => ImpStmt::Let(x.clone(), None, Box::new(ImpStmt::Seq(b(s1), b(s2)))),
        Stmt::LetMutColl(x, s1, s2) => ImpStmt::Let(
            x.clone(),
            Some(Expr::Const(Data::empty_bag())),
            Box::new(ImpStmt::Seq(b(s1), b(s2))),
        ),
        Stmt::Assign(x, e) => ImpStmt::Assign(x.clone(), e.clone()),
        Stmt::Push(x, e) => ImpStmt::Assign(x.clone(), push_expr(x, e)),
        Stmt::For(x, e, body) => ImpStmt::For(x.clone(), e.clone(), b(body)),
        Stmt::If(c, s1, s2) => ImpStmt::If(c.clone(), b(s1), b(s2)),
        Stmt::Either(e, x, l, y, r) => ImpStmt::Either(e.clone(), x.clone(), b(l), y.clone(), b(r)),
    }
}

/// Merges the three namespaces. Requires a cross-shadow-free program.
pub fn nnrs_to_nnrsimp(p: &Nnrs) -> Result<NnrsImp> {
    if !is_cross_shadow_free(p) {
        return Err(Error::Invalid("NNRSimp translation needs a cross-shadow-free program".into()));
    }
    Ok(NnrsImp { body: tr(&p.body), ret: p.ret.clone() })
}

fn check(s: &ImpStmt, scope: &mut Vec<String>) -> Result<()> {
    let read = |e: &Expr, scope: &[String]| -> Result<()> {
        let mut bad = None;
        e.visit_vars(&mut |x| {
            if bad.is_none() && !scope.iter().any(|y| y == x) {
                bad = Some(x.to_string());
            }
        });
        bad.map_or(Ok(()), |x| Err(Error::Invalid(format!("`{}` is not in scope", x))))
    };
    let scoped = |x: &str, s: &ImpStmt, scope: &mut Vec<String>| {
        scope.push(x.to_string());
        let r = check(s, scope);
        scope.pop();
        r
    };
    match s {
        ImpStmt::Seq(a, b) => {
            check(a, scope)?;
            check(b, scope)
        }
        ImpStmt::Let(x, init, body) => {
            if let Some(e) = init {
                read(e, scope)?;
            }
            scoped(x, body, scope)
        }
        ImpStmt::Assign(x, e) => {
            read(e, scope)?;
            if !scope.contains(x) {
                return Err(Error::Invalid(format!("assignment to undeclared `{}`", x)));
            }
            Ok(())
        }
        ImpStmt::For(x, e, body) => {
            read(e, scope)?;
            scoped(x, body, scope)
        }
        ImpStmt::If(c, a, b) => {
            read(c, scope)?;
            check(a, scope)?;
            check(b, scope)
        }
        ImpStmt::Either(e, x, l, y, r) => {
            read(e, scope)?;
            scoped(x, l, scope)?;
            scoped(y, r, scope)
        }
    }
}

/// Every read and assignment refers to a variable in scope.
pub fn check_nnrsimp(p: &NnrsImp) -> Result<()> {
    check(&p.body, &mut vec![DB_VAR.to_string(), p.ret.clone()])
}

type Store = Vec<(String, Option<Data>)>;

fn slot<'a>(st: &'a mut Store, x: &str) -> Result<&'a mut Option<Data>> {
    st.iter_mut().rev().find(|(y, _)| y == x).map(|(_, v)| v).ok_or_else(|| unbound(x))
}

fn eval_e(e: &Expr, st: &Store) -> Result<Data> {
    eval_expr(e, &|x| match st.iter().rev().find(|(y, _)| y == x) {
        Some((_, Some(v))) => Ok(v.clone()),
        Some((_, None)) => Err(Error::Uninitialized(x.to_string())),
        None => Err(unbound(x)),
    })
}

fn scoped(st: &mut Store, x: &str, v: Option<Data>, s: &ImpStmt) -> Result<()> {
    st.push((x.to_string(), v));
    let r = exec(s, st);
    st.pop();
    r
}

fn exec(s: &ImpStmt, st: &mut Store) -> Result<()> {
    match s {
        ImpStmt::Seq(a, b) => {
            exec(a, st)?;
            exec(b, st)
        }
        ImpStmt::Let(x, init, body) => {
            let v = match init {
                Some(e) => Some(eval_e(e, st)?),
                None => None,
            };
            scoped(st, x, v, body)
        }
        ImpStmt::Assign(x, e) => {
            if let Some(v) = as_push(x, e) {
                let v = eval_e(v, st)?;
                let cell = slot(st, x)?;
                match cell {
                    Some(Data::Bag(items)) => Arc::make_mut(items).push(v),
                    Some(d) => return type_err(format!("push onto a non-bag {}", d)),
                    None => return Err(Error::Uninitialized(x.clone())),
                }
                return Ok(());
            }
            let v = eval_e(e, st)?;
            *slot(st, x)? = Some(v);
            Ok(())
        }
        ImpStmt::For(x, e, body) => {
            let src = eval_e(e, st)?;
            let Some(items) = src.as_bag() else {
                return type_err(format!("for expects a bag, got {}", src));
            };
            for item in items {
                scoped(st, x, Some(item.clone()), body)?;
            }
            Ok(())
        }
        ImpStmt::If(c, a, b) => match eval_e(c, st)? {
            Data::Bool(true) => exec(a, st),
            Data::Bool(false) => exec(b, st),
            d => type_err(format!("if expects a boolean, got {}", d)),
        },
        ImpStmt::Either(e, x, l, y, r) => match eval_e(e, st)? {
            Data::Left(v) => scoped(st, x, Some((*v).clone()), l),
            Data::Right(v) => scoped(st, y, Some((*v).clone()), r),
            d => type_err(format!("match expects left or right, got {}", d)),
        },
    }
}

pub fn eval_nnrsimp(p: &NnrsImp, db: &Data) -> Result<Data> {
    let mut st = vec![(DB_VAR.to_string(), Some(db.clone())), (p.ret.clone(), None)];
    exec(&p.body, &mut st)?;
    st.pop().unwrap().1.ok_or_else(|| Error::Uninitialized(p.ret.clone()))
}

fn indent(f: &mut fmt::Formatter<'_>, n: usize) -> fmt::Result {
    write!(f, "{:1$}", "", n * 2)
}

fn block(s: &ImpStmt, f: &mut fmt::Formatter<'_>, n: usize) -> fmt::Result {
    writeln!(f, "{{")?;
    print_stmt(s, f, n + 1)?;
    indent(f, n)?;
    write!(f, "}}")
}

fn print_stmt(s: &ImpStmt, f: &mut fmt::Formatter<'_>, n: usize) -> fmt::Result {
    match s {
        ImpStmt::Seq(a, b) => {
            print_stmt(a, f, n)?;
            print_stmt(b, f, n)
        }
        ImpStmt::Let(x, init, body) => {
            indent(f, n)?;
            match init {
                Some(e) => write!(f, "var {} = {}; ", x, e)?,
                None => write!(f, "var {}; ", x)?,
            }
            block(body, f, n)?;
            writeln!(f)
        }
        ImpStmt::Assign(x, e) => {
            indent(f, n)?;
            match as_push(x, e) {
                Some(v) => writeln!(f, "{} := push({}, {});", x, x, v),
                None => writeln!(f, "{} := {};", x, e),
            }
        }
        ImpStmt::For(x, e, body) => {
            indent(f, n)?;
            write!(f, "for ({} in {}) ", x, e)?;
            block(body, f, n)?;
            writeln!(f)
        }
        ImpStmt::If(c, a, b) => {
            indent(f, n)?;
            write!(f, "if ({}) ", c)?;
            block(a, f, n)?;
            write!(f, " else ")?;
            block(b, f, n)?;
            writeln!(f)
        }
        ImpStmt::Either(e, x, l, y, r) => {
            indent(f, n)?;
            write!(f, "match {} with left {} ", e, x)?;
            block(l, f, n)?;
            write!(f, " | right {} ", y)?;
            block(r, f, n)?;
            writeln!(f)
        }
    }
}

impl fmt::Display for NnrsImp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "var {};", self.ret)?;
        print_stmt(&self.body, f, 0)?;
        writeln!(f, "return {}", self.ret)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lowering::{eval_nnrs, RET_VAR};

    #[test]
    fn length_example() {
        let fill = Stmt::for_(
            "x",
            Expr::var(DB_VAR),
            Stmt::Push("t1".into(), Expr::binary(BinOp::Add, Expr::var("x"), Expr::Const(Data::int(3)))),
        );
        let body = Stmt::let_mut_coll("t1", fill, Stmt::Assign(RET_VAR.into(), Expr::unary(UnOp::Count, Expr::var("t1"))));
        let p = Nnrs { body, ret: RET_VAR.into() };
        let q = nnrs_to_nnrsimp(&p).unwrap();
        check_nnrsimp(&q).unwrap();
        assert_eq!(
            q.to_string(),
            "var ret;\nvar t1 = []; {\n  for (x in db) {\n    t1 := push(t1, (x + 3));\n  }\n  ret := count(t1);\n}\nreturn ret\n"
        );
        let y = Data::bag(vec![Data::int(1), Data::int(2), Data::int(3)]);
        assert_eq!(eval_nnrsimp(&q, &y).unwrap(), Data::int(3));
        assert_eq!(eval_nnrs(&p, &y).unwrap(), Data::int(3));
    }

    #[test]
    fn immutable_let_is_assigned_once() {
        let body = Stmt::let_("a", Expr::Const(Data::int(1)), Stmt::Assign(RET_VAR.into(), Expr::var("a")));
        let q = nnrs_to_nnrsimp(&Nnrs { body, ret: RET_VAR.into() }).unwrap();
        assert_eq!(
            q.body,
            ImpStmt::Let(
                "a".into(),
                Some(Expr::Const(Data::int(1))),
                Box::new(ImpStmt::Assign(RET_VAR.into(), Expr::var("a")))
            )
        );
    }

    #[test]
    fn nested_loops_push_row_major() {
        let pair = Expr::binary(
            BinOp::RecConcat,
            Expr::unary(UnOp::Rec("i".into()), Expr::var("i")),
            Expr::unary(UnOp::Rec("j".into()), Expr::var("j")),
        );
        let inner = Stmt::for_("j", Expr::var(DB_VAR), Stmt::Push("c".into(), pair));
        let body = Stmt::let_mut_coll(
            "c",
            Stmt::for_("i", Expr::var(DB_VAR), inner),
            Stmt::Assign(RET_VAR.into(), Expr::var("c")),
        );
        let q = nnrs_to_nnrsimp(&Nnrs { body, ret: RET_VAR.into() }).unwrap();
        let db = Data::bag(vec![Data::int(0), Data::int(1)]);
        let mut want = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                want.push(Data::record([("i".to_string(), Data::int(i)), ("j".to_string(), Data::int(j))]));
            }
        }
        assert_eq!(eval_nnrsimp(&q, &db).unwrap(), Data::bag(want));
    }
}
