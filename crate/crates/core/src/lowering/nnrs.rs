use std::collections::BTreeSet;
use std::fmt;

use super::expr::{eval_expr, unbound, Expr};
use super::{is_stratified, Fresh, Nnrc, DB_VAR};
use crate::data::Data;
use crate::error::{type_err, Error, Result};

/// Mutable variable that receives the result of a program.
pub const RET_VAR: &str = "ret";

/// Statements with three namespaces: immutable variables (read by
/// expressions), mutable data variables (assigned) and mutable collections
/// (pushed). `LetMut` and `LetMutColl` make their variable writable in the
/// first statement and move it to the immutable namespace for the second.
#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Seq(Box<Stmt>, Box<Stmt>),
    Let(String, Expr, Box<Stmt>),
    LetMut(String, Box<Stmt>, Box<Stmt>),
    LetMutColl(String, Box<Stmt>, Box<Stmt>),
    Assign(String, Expr),
    Push(String, Expr),
    For(String, Expr, Box<Stmt>),
    If(Expr, Box<Stmt>, Box<Stmt>),
    Either(Expr, String, Box<Stmt>, String, Box<Stmt>),
}

/// A program reads the immutable [`DB_VAR`] and leaves its result in the
/// mutable data variable `ret`.
#[derive(Debug, Clone, PartialEq)]
pub struct Nnrs {
    pub body: Stmt,
    pub ret: String,
}

impl Stmt {
    pub fn let_(x: &str, e: Expr, s: Stmt) -> Stmt {
        Stmt::Let(x.to_string(), e, Box::new(s))
    }

    pub fn let_mut(x: &str, s1: Stmt, s2: Stmt) -> Stmt {
        Stmt::LetMut(x.to_string(), Box::new(s1), Box::new(s2))
    }

    pub fn let_mut_coll(x: &str, s1: Stmt, s2: Stmt) -> Stmt {
        Stmt::LetMutColl(x.to_string(), Box::new(s1), Box::new(s2))
    }

    pub fn for_(x: &str, e: Expr, s: Stmt) -> Stmt {
        Stmt::For(x.to_string(), e, Box::new(s))
    }

    pub fn if_(c: Expr, a: Stmt, b: Stmt) -> Stmt {
        Stmt::If(c, Box::new(a), Box::new(b))
    }

    pub fn either(e: Expr, x: &str, l: Stmt, y: &str, r: Stmt) -> Stmt {
        Stmt::Either(e, x.to_string(), Box::new(l), y.to_string(), Box::new(r))
    }

    pub(crate) fn collect_names(&self, out: &mut BTreeSet<String>) {
        let ex = |e: &Expr, out: &mut BTreeSet<String>| {
            e.visit_vars(&mut |x| {
                out.insert(x.to_string());
            })
        };
        match self {
            Stmt::Seq(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Stmt::Let(x, e, s) | Stmt::For(x, e, s) => {
                out.insert(x.clone());
                ex(e, out);
                s.collect_names(out);
            }
            Stmt::LetMut(x, a, b) | Stmt::LetMutColl(x, a, b) => {
                out.insert(x.clone());
                a.collect_names(out);
                b.collect_names(out);
            }
            Stmt::Assign(x, e) | Stmt::Push(x, e) => {
                out.insert(x.clone());
                ex(e, out);
            }
            Stmt::If(c, a, b) => {
                ex(c, out);
                a.collect_names(out);
                b.collect_names(out);
            }
            Stmt::Either(e, x, l, y, r) => {
                out.insert(x.clone());
                out.insert(y.clone());
                ex(e, out);
                l.collect_names(out);
                r.collect_names(out);
            }
        }
    }
}

impl Nnrs {
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        out.insert(DB_VAR.to_string());
        out.insert(self.ret.clone());
        self.body.collect_names(&mut out);
        out
    }
}

fn to_expr(e: &Nnrc) -> Result<Expr> {
    Ok(match e {
        Nnrc::Var(x) => Expr::Var(x.clone()),
        Nnrc::Const(d) => Expr::Const(d.clone()),
        Nnrc::Unary(op, a) => Expr::unary(op.clone(), to_expr(a)?),
        Nnrc::Binary(op, a, b) => Expr::binary(*op, to_expr(a)?, to_expr(b)?),
        _ => return Err(Error::Invalid(format!("expected an operator expression, got {}", e))),
    })
}

#[derive(Clone, Copy)]
enum Target<'a> {
    Assign(&'a str),
    Push(&'a str),
}

impl Target<'_> {
    fn put(self, e: Expr) -> Stmt {
        match self {
            Target::Assign(x) => Stmt::Assign(x.to_string(), e),
            Target::Push(x) => Stmt::Push(x.to_string(), e),
        }
    }
}

struct ToNnrs {
    fresh: Fresh,
}

impl ToNnrs {
    fn tr(&mut self, e: &Nnrc, k: Target) -> Result<Stmt> {
        Ok(match e {
            Nnrc::Let(x, a, b) => match &**a {
                Nnrc::For(y, src, body) => {
                    let fill = Stmt::for_(y, to_expr(src)?, self.tr(body, Target::Push(x))?);
                    Stmt::let_mut_coll(x, fill, self.tr(b, k)?)
                }
                a if !a.is_complex() => Stmt::let_(x, to_expr(a)?, self.tr(b, k)?),
                a => Stmt::let_mut(x, self.tr(a, Target::Assign(x))?, self.tr(b, k)?),
            },
            Nnrc::For(x, src, body) => {
                let t = self.fresh.name("t");
                let fill = Stmt::for_(x, to_expr(src)?, self.tr(body, Target::Push(&t))?);
                Stmt::let_mut_coll(&t, fill, k.put(Expr::var(&t)))
            }
            Nnrc::If(c, a, b) => Stmt::if_(to_expr(c)?, self.tr(a, k)?, self.tr(b, k)?),
            Nnrc::Either(s, x, l, y, r) => {
                Stmt::either(to_expr(s)?, x, self.tr(l, k)?, y, self.tr(r, k)?)
            }
            _ => k.put(to_expr(e)?),
        })
    }
}

/// Translates a stratified expression, threading the variable that receives
/// each subresult.
pub fn nnrc_to_nnrs(e: &Nnrc) -> Result<Nnrs> {
    if !is_stratified(e) {
        return Err(Error::Invalid("NNRS translation needs a stratified expression".into()));
    }
    let mut used = e.names();
    used.insert(DB_VAR.to_string());
    used.insert(RET_VAR.to_string());
    let mut t = ToNnrs { fresh: Fresh::new(used) };
    let body = t.tr(e, Target::Assign(RET_VAR))?;
    Ok(Nnrs { body, ret: RET_VAR.to_string() })
}

#[derive(Default)]
struct Scopes {
    imm: Vec<String>,
    data: Vec<String>,
    coll: Vec<String>,
}

fn phase(s: &Stmt, sc: &mut Scopes) -> Result<()> {
    let read = |e: &Expr, sc: &Scopes| -> Result<()> {
        let mut bad = None;
        e.visit_vars(&mut |x| {
            if !sc.imm.iter().any(|y| y == x) && bad.is_none() {
                bad = Some(x.to_string());
            }
        });
        match bad {
            Some(x) => Err(Error::Invalid(format!("read of `{}` outside its read phase", x))),
            None => Ok(()),
        }
    };
    match s {
        Stmt::Seq(a, b) => {
            phase(a, sc)?;
            phase(b, sc)
        }
        Stmt::Let(x, e, body) | Stmt::For(x, e, body) => {
            read(e, sc)?;
            sc.imm.push(x.clone());
            let r = phase(body, sc);
            sc.imm.pop();
            r
        }
        Stmt::LetMut(x, a, b) => {
            sc.data.push(x.clone());
            let r = phase(a, sc);
            sc.data.pop();
            r?;
            sc.imm.push(x.clone());
            let r = phase(b, sc);
            sc.imm.pop();
            r
        }
        Stmt::LetMutColl(x, a, b) => {
            sc.coll.push(x.clone());
            let r = phase(a, sc);
            sc.coll.pop();
            r?;
            sc.imm.push(x.clone());
            let r = phase(b, sc);
            sc.imm.pop();
            r
        }
        Stmt::Assign(x, e) => {
            read(e, sc)?;
            if !sc.data.contains(x) {
                return Err(Error::Invalid(format!("assignment to `{}` outside its write phase", x)));
            }
            Ok(())
        }
        Stmt::Push(x, e) => {
            read(e, sc)?;
            if !sc.coll.contains(x) {
                return Err(Error::Invalid(format!("push to `{}` outside its write phase", x)));
            }
            Ok(())
        }
        Stmt::If(c, a, b) => {
            read(c, sc)?;
            phase(a, sc)?;
            phase(b, sc)
        }
        Stmt::Either(e, x, l, y, r) => {
            read(e, sc)?;
            sc.imm.push(x.clone());
            let res = phase(l, sc);
            sc.imm.pop();
            res?;
            sc.imm.push(y.clone());
            let res = phase(r, sc);
            sc.imm.pop();
            res
        }
    }
}

/// Static check of the phase discipline: expressions read only immutable
/// variables in scope, assignments and pushes target mutable variables in
/// their write phase.
pub fn check_phases(p: &Nnrs) -> Result<()> {
    let mut sc = Scopes { imm: vec![DB_VAR.to_string()], data: vec![p.ret.clone()], ..Default::default() };
    phase(&p.body, &mut sc)
}

#[derive(Default)]
struct Stores {
    imm: Vec<(String, Data)>,
    data: Vec<(String, Option<Data>)>,
    coll: Vec<(String, Vec<Data>)>,
}

fn find<'a, T>(v: &'a mut [(String, T)], x: &str) -> Result<&'a mut T> {
    v.iter_mut().rev().find(|(y, _)| y == x).map(|(_, d)| d).ok_or_else(|| unbound(x))
}

fn eval_e(e: &Expr, st: &Stores) -> Result<Data> {
    eval_expr(e, &|x| {
        st.imm.iter().rev().find(|(y, _)| y == x).map(|(_, d)| d.clone()).ok_or_else(|| unbound(x))
    })
}

fn exec(s: &Stmt, st: &mut Stores) -> Result<()> {
    match s {
        Stmt::Seq(a, b) => {
            exec(a, st)?;
            exec(b, st)
        }
        Stmt::Let(x, e, body) => {
            let v = eval_e(e, st)?;
            st.imm.push((x.clone(), v));
            let r = exec(body, st);
            st.imm.pop();
            r
        }
        Stmt::LetMut(x, a, b) => {
            st.data.push((x.clone(), None));
            let r = exec(a, st);
            let (_, v) = st.data.pop().unwrap();
            r?;
            let v = v.ok_or_else(|| Error::Uninitialized(x.clone()))?;
            st.imm.push((x.clone(), v));
            let r = exec(b, st);
            st.imm.pop();
            r
        }
        Stmt::LetMutColl(x, a, b) => {
            st.coll.push((x.clone(), Vec::new()));
            let r = exec(a, st);
            let (_, items) = st.coll.pop().unwrap();
            r?;
            st.imm.push((x.clone(), Data::bag(items)));
            let r = exec(b, st);
            st.imm.pop();
            r
        }
        Stmt::Assign(x, e) => {
            let v = eval_e(e, st)?;
            *find(&mut st.data, x)? = Some(v);
            Ok(())
        }
        Stmt::Push(x, e) => {
            let v = eval_e(e, st)?;
            find(&mut st.coll, x)?.push(v);
            Ok(())
        }
        Stmt::For(x, e, body) => {
            let src = eval_e(e, st)?;
            let Some(items) = src.as_bag() else {
                return type_err(format!("for expects a bag, got {}", src));
            };
            for item in items {
                st.imm.push((x.clone(), item.clone()));
                let r = exec(body, st);
                st.imm.pop();
                r?;
            }
            Ok(())
        }
        Stmt::If(c, a, b) => match eval_e(c, st)? {
            Data::Bool(true) => exec(a, st),
            Data::Bool(false) => exec(b, st),
            d => type_err(format!("if expects a boolean, got {}", d)),
        },
        Stmt::Either(e, x, l, y, r) => {
            let (name, v, branch) = match eval_e(e, st)? {
                Data::Left(v) => (x, v, l),
                Data::Right(v) => (y, v, r),
                d => return type_err(format!("match expects left or right, got {}", d)),
            };
            st.imm.push((name.clone(), (*v).clone()));
            let res = exec(branch, st);
            st.imm.pop();
            res
        }
    }
}

pub fn eval_nnrs(p: &Nnrs, db: &Data) -> Result<Data> {
    let mut st = Stores {
        imm: vec![(DB_VAR.to_string(), db.clone())],
        data: vec![(p.ret.clone(), None)],
        ..Default::default()
    };
    exec(&p.body, &mut st)?;
    st.data.pop().unwrap().1.ok_or_else(|| Error::Uninitialized(p.ret.clone()))
}

fn indent(f: &mut fmt::Formatter<'_>, n: usize) -> fmt::Result {
    write!(f, "{:1$}", "", n * 2)
}

fn block(s: &Stmt, f: &mut fmt::Formatter<'_>, n: usize) -> fmt::Result {
    writeln!(f, "{{")?;
    print_stmt(s, f, n + 1)?;
    indent(f, n)?;
    write!(f, "}}")
}

fn print_stmt(s: &Stmt, f: &mut fmt::Formatter<'_>, n: usize) -> fmt::Result {
    match s {
        Stmt::Seq(a, b) => {
            print_stmt(a, f, n)?;
            print_stmt(b, f, n)
        }
        Stmt::Let(x, e, body) => {
            indent(f, n)?;
            writeln!(f, "let {} = {};", x, e)?;
            print_stmt(body, f, n)
        }
        Stmt::LetMut(x, a, b) => {
            indent(f, n)?;
            write!(f, "letMut {} from ", x)?;
            block(a, f, n)?;
            writeln!(f, ";")?;
            print_stmt(b, f, n)
        }
        Stmt::LetMutColl(x, a, b) => {
            indent(f, n)?;
            write!(f, "letMutColl {} from ", x)?;
            block(a, f, n)?;
            writeln!(f, ";")?;
            print_stmt(b, f, n)
        }
        Stmt::Assign(x, e) => {
            indent(f, n)?;
            writeln!(f, "{} := {};", x, e)
        }
        Stmt::Push(x, e) => {
            indent(f, n)?;
            writeln!(f, "push({}, {});", x, e)
        }
        Stmt::For(x, e, body) => {
            indent(f, n)?;
            write!(f, "for ({} in {}) ", x, e)?;
            block(body, f, n)?;
            writeln!(f)
        }
        Stmt::If(c, a, b) => {
            indent(f, n)?;
            write!(f, "if ({}) ", c)?;
            block(a, f, n)?;
            write!(f, " else ")?;
            block(b, f, n)?;
            writeln!(f)
        }
        Stmt::Either(e, x, l, y, r) => {
            indent(f, n)?;
            write!(f, "match {} with left {} ", e, x)?;
            block(l, f, n)?;
            write!(f, " | right {} ", y)?;
            block(r, f, n)?;
            writeln!(f)
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print_stmt(self, f, 0)
    }
}

impl fmt::Display for Nnrs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print_stmt(&self.body, f, 0)?;
        writeln!(f, "return {}", self.ret)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nrae::{BinOp, UnOp};

    #[test]
    fn length_example() {
        let body = Nnrc::binary(BinOp::Add, Nnrc::var("x"), Nnrc::Const(Data::int(3)));
        let e = Nnrc::let_(
            "t1",
            Nnrc::for_("x", Nnrc::var(DB_VAR), body),
            Nnrc::unary(UnOp::Count, Nnrc::var("t1")),
        );
        let p = nnrc_to_nnrs(&e).unwrap();
        check_phases(&p).unwrap();
        assert_eq!(
            p.to_string(),
            "letMutColl t1 from {\n  for (x in db) {\n    push(t1, (x + 3));\n  }\n};\nret := count(t1);\nreturn ret\n"
        );
        let y = Data::bag(vec![Data::int(1), Data::int(2), Data::int(3)]);
        assert_eq!(eval_nnrs(&p, &y).unwrap(), Data::int(3));
    }

    #[test]
    fn constant_is_one_assignment() {
        let p = nnrc_to_nnrs(&Nnrc::Const(Data::int(4))).unwrap();
        assert_eq!(p.body, Stmt::Assign(RET_VAR.into(), Expr::Const(Data::int(4))));
    }

    #[test]
    fn either_assigns_in_both_branches() {
        let e = Nnrc::either(Nnrc::var(DB_VAR), "a", Nnrc::var("a"), "b", Nnrc::Const(Data::int(0)));
        let p = nnrc_to_nnrs(&e).unwrap();
        match &p.body {
            Stmt::Either(_, _, l, _, r) => {
                assert!(matches!(**l, Stmt::Assign(..)));
                assert!(matches!(**r, Stmt::Assign(..)));
            }
            other => panic!("unexpected {}", other),
        }
        assert_eq!(eval_nnrs(&p, &Data::left(Data::int(5))).unwrap(), Data::int(5));
        assert_eq!(eval_nnrs(&p, &Data::null()).unwrap(), Data::int(0));
    }

    #[test]
    fn phase_violations() {
        let read_early = Nnrs {
            body: Stmt::let_mut("x", Stmt::Assign("x".into(), Expr::var("x")), Stmt::Assign(RET_VAR.into(), Expr::var("x"))),
            ret: RET_VAR.into(),
        };
        assert!(check_phases(&read_early).is_err());
        let late_push = Nnrs {
            body: Stmt::let_mut_coll("c", Stmt::Push("c".into(), Expr::var(DB_VAR)), Stmt::Push("c".into(), Expr::var("c"))),
            ret: RET_VAR.into(),
        };
        assert!(check_phases(&late_push).is_err());
    }
}
