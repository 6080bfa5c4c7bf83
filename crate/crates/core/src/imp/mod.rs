//! A small imperative language parameterized by its data model: the
//! operators, runtime functions and the `to_bool`/`to_list` coercions come
//! from an [`Instantiation`]. Two instantiations are provided, over nested
//! data ([`data`]) and over EJson ([`ejson`]).

pub mod data;
pub mod ejson;
mod runtime;

pub use runtime::{call_runtime, EJsonFun};

use std::fmt;

use crate::error::{Error, Result};

/// Renders an operator application from its printed arguments.
pub trait Render {
    fn render(&self, args: &[String]) -> String;
}

#[derive(Debug, Clone, PartialEq)]
pub enum ImpExpr<V, O, F> {
    Const(V),
    Var(String),
    Op(O, Vec<ImpExpr<V, O, F>>),
    Call(F, Vec<ImpExpr<V, O, F>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ImpStmt<V, O, F> {
    /// Declarations (each optionally initialized, in order) scoped to the
    /// statements of the block.
    Block(Vec<(String, Option<ImpExpr<V, O, F>>)>, Vec<ImpStmt<V, O, F>>),
    Assign(String, ImpExpr<V, O, F>),
    For(String, ImpExpr<V, O, F>, Box<ImpStmt<V, O, F>>),
    If(ImpExpr<V, O, F>, Box<ImpStmt<V, O, F>>, Box<ImpStmt<V, O, F>>),
}

/// `fun(input) { body; return ret }`. The body is a block that declares
/// `ret`; its value is read before the block's declarations are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpFunction<V, O, F> {
    pub input: String,
    pub body: ImpStmt<V, O, F>,
    pub ret: String,
}

/// The data model of a program.
pub trait Instantiation {
    type Value: Clone + fmt::Display;
    type Op: Clone + fmt::Debug + Render;
    type Fun: Clone + fmt::Debug + fmt::Display;

    fn op(&self, op: &Self::Op, args: Vec<Self::Value>) -> Result<Self::Value>;
    fn call(&self, f: &Self::Fun, args: Vec<Self::Value>) -> Result<Self::Value>;
    fn to_bool(&self, v: &Self::Value) -> Result<bool>;
    fn to_list(&self, v: &Self::Value) -> Result<Vec<Self::Value>>;
}

type Store<V> = Vec<(String, Option<V>)>;

fn slot<'a, V>(st: &'a mut Store<V>, x: &str) -> Result<&'a mut Option<V>> {
    st.iter_mut()
        .rev()
        .find(|(y, _)| y == x)
        .map(|(_, v)| v)
        .ok_or_else(|| Error::Unbound(x.to_string()))
}

struct Machine<'a, I: Instantiation> {
    inst: &'a I,
    store: Store<I::Value>,
}

impl<I: Instantiation> Machine<'_, I> {
    fn eval(&self, e: &ImpExpr<I::Value, I::Op, I::Fun>) -> Result<I::Value> {
        match e {
            ImpExpr::Const(v) => Ok(v.clone()),
            ImpExpr::Var(x) => match self.store.iter().rev().find(|(y, _)| y == x) {
                Some((_, Some(v))) => Ok(v.clone()),
                Some((_, None)) => Err(Error::Uninitialized(x.clone())),
                None => Err(Error::Unbound(x.clone())),
            },
            ImpExpr::Op(op, args) => {
                let vs = args.iter().map(|a| self.eval(a)).collect::<Result<Vec<_>>>()?;
                self.inst.op(op, vs)
            }
            ImpExpr::Call(f, args) => {
                let vs = args.iter().map(|a| self.eval(a)).collect::<Result<Vec<_>>>()?;
                self.inst.call(f, vs)
            }
        }
    }

    fn declare(&mut self, decls: &[(String, Option<ImpExpr<I::Value, I::Op, I::Fun>>)]) -> Result<()> {
        for (x, init) in decls {
            let v = match init {
                Some(e) => Some(self.eval(e)?),
                None => None,
            };
            self.store.push((x.clone(), v));
        }
        Ok(())
    }

    fn exec(&mut self, s: &ImpStmt<I::Value, I::Op, I::Fun>) -> Result<()> {
        match s {
            ImpStmt::Block(decls, body) => {
                let depth = self.store.len();
                let r = self.declare(decls).and_then(|_| body.iter().try_for_each(|s| self.exec(s)));
                self.store.truncate(depth);
                r
            }
            ImpStmt::Assign(x, e) => {
                let v = match e {
                    // `x = f(x, ...)`: the old value of x is dead once the
                    // call starts, so hand it over instead of copying it.
                    ImpExpr::Call(f, args) if matches!(args.first(), Some(ImpExpr::Var(y)) if y == x) => {
                        let rest = args[1..].iter().map(|a| self.eval(a)).collect::<Result<Vec<_>>>()?;
                        let old = slot(&mut self.store, x)?
                            .take()
                            .ok_or_else(|| Error::Uninitialized(x.clone()))?;
                        let mut vs = Vec::with_capacity(args.len());
                        vs.push(old);
                        vs.extend(rest);
                        self.inst.call(f, vs)?
                    }
                    _ => self.eval(e)?,
                };
                *slot(&mut self.store, x)? = Some(v);
                Ok(())
            }
            ImpStmt::For(x, e, body) => {
                let items = self.inst.to_list(&self.eval(e)?)?;
                for item in items {
                    self.store.push((x.clone(), Some(item)));
                    let r = self.exec(body);
                    self.store.pop();
                    r?;
                }
                Ok(())
            }
            ImpStmt::If(c, a, b) => {
                if self.inst.to_bool(&self.eval(c)?)? {
                    self.exec(a)
                } else {
                    self.exec(b)
                }
            }
        }
    }
}

/// Runs a function on an input value.
pub fn eval_imp<I: Instantiation>(
    p: &ImpFunction<I::Value, I::Op, I::Fun>,
    inst: &I,
    input: I::Value,
) -> Result<I::Value> {
    let mut m = Machine { inst, store: vec![(p.input.clone(), Some(input))] };
    let ImpStmt::Block(decls, body) = &p.body else {
        return Err(Error::Invalid("function body must be a block".into()));
    };
    m.declare(decls)?;
    body.iter().try_for_each(|s| m.exec(s))?;
    match slot(&mut m.store, &p.ret)?.take() {
        Some(v) => Ok(v),
        None => Err(Error::Uninitialized(p.ret.clone())),
    }
}

fn check_expr<V, O, F>(e: &ImpExpr<V, O, F>, scope: &[String]) -> Result<()> {
    match e {
        ImpExpr::Const(_) => Ok(()),
        ImpExpr::Var(x) if scope.contains(x) => Ok(()),
        ImpExpr::Var(x) => Err(Error::Invalid(format!("`{}` is not declared", x))),
        ImpExpr::Op(_, args) | ImpExpr::Call(_, args) => {
            args.iter().try_for_each(|a| check_expr(a, scope))
        }
    }
}

fn check_stmt<V, O, F>(s: &ImpStmt<V, O, F>, scope: &mut Vec<String>) -> Result<()> {
    match s {
        ImpStmt::Block(decls, body) => {
            let depth = scope.len();
            let r = (|| {
                for (x, init) in decls {
                    if let Some(e) = init {
                        check_expr(e, scope)?;
                    }
                    scope.push(x.clone());
                }
                body.iter().try_for_each(|s| check_stmt(s, scope))
            })();
            scope.truncate(depth);
            r
        }
        ImpStmt::Assign(x, e) => {
            check_expr(e, scope)?;
            if scope.contains(x) {
                Ok(())
            } else {
                Err(Error::Invalid(format!("assignment to undeclared `{}`", x)))
            }
        }
        ImpStmt::For(x, e, body) => {
            check_expr(e, scope)?;
            scope.push(x.clone());
            let r = check_stmt(body, scope);
            scope.pop();
            r
        }
        ImpStmt::If(c, a, b) => {
            check_expr(c, scope)?;
            check_stmt(a, scope)?;
            check_stmt(b, scope)
        }
    }
}

/// Checks that variables are declared before use and that the body is a
/// block declaring the return variable.
pub fn check_imp<V, O, F>(p: &ImpFunction<V, O, F>) -> Result<()> {
    match &p.body {
        ImpStmt::Block(decls, _) if decls.iter().any(|(x, _)| *x == p.ret) => {}
        _ => return Err(Error::Invalid(format!("`{}` must be declared by the body", p.ret))),
    }
    check_stmt(&p.body, &mut vec![p.input.clone()])
}

impl<V: fmt::Display, O: Render, F: fmt::Display> fmt::Display for ImpExpr<V, O, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |args: &[ImpExpr<V, O, F>]| args.iter().map(|a| a.to_string()).collect::<Vec<_>>();
        match self {
            ImpExpr::Const(v) => write!(f, "{}", v),
            ImpExpr::Var(x) => write!(f, "{}", x),
            ImpExpr::Op(op, args) => write!(f, "{}", op.render(&show(args))),
            ImpExpr::Call(g, args) => write!(f, "{}({})", g, show(args).join(", ")),
        }
    }
}

fn indent(f: &mut fmt::Formatter<'_>, n: usize) -> fmt::Result {
    write!(f, "{:1$}", "", n * 2)
}

fn print_block<V: fmt::Display, O: Render, F: fmt::Display>(
    s: &ImpStmt<V, O, F>,
    f: &mut fmt::Formatter<'_>,
    n: usize,
) -> fmt::Result {
    match s {
        ImpStmt::Block(decls, body) => {
            writeln!(f, "{{")?;
            for (x, init) in decls {
                indent(f, n + 1)?;
                match init {
                    Some(e) => writeln!(f, "var {} = {};", x, e)?,
                    None => writeln!(f, "var {};", x)?,
                }
            }
            for s in body {
                print_stmt(s, f, n + 1)?;
            }
        }
        s => {
            writeln!(f, "{{")?;
            print_stmt(s, f, n + 1)?;
        }
    }
    indent(f, n)?;
    write!(f, "}}")
}

fn print_stmt<V: fmt::Display, O: Render, F: fmt::Display>(
    s: &ImpStmt<V, O, F>,
    f: &mut fmt::Formatter<'_>,
    n: usize,
) -> fmt::Result {
    match s {
        ImpStmt::Block(..) => {
            indent(f, n)?;
            print_block(s, f, n)?;
            writeln!(f)
        }
        ImpStmt::Assign(x, e) => {
            indent(f, n)?;
            writeln!(f, "{} = {};", x, e)
        }
        ImpStmt::For(x, e, body) => {
            indent(f, n)?;
            write!(f, "for ({} in {}) ", x, e)?;
            print_block(body, f, n)?;
            writeln!(f)
        }
        ImpStmt::If(c, a, b) => {
            indent(f, n)?;
            write!(f, "if ({}) ", c)?;
            print_block(a, f, n)?;
            write!(f, " else ")?;
            print_block(b, f, n)?;
            writeln!(f)
        }
    }
}

impl<V: fmt::Display, O: Render, F: fmt::Display> fmt::Display for ImpStmt<V, O, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print_stmt(self, f, 0)
    }
}

impl<V: fmt::Display, O: Render, F: fmt::Display> fmt::Display for ImpFunction<V, O, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fun({}) {{", self.input)?;
        match &self.body {
            ImpStmt::Block(decls, body) => {
                for (x, init) in decls {
                    indent(f, 1)?;
                    match init {
                        Some(e) => writeln!(f, "var {} = {};", x, e)?,
                        None => writeln!(f, "var {};", x)?,
                    }
                }
                for s in body {
                    print_stmt(s, f, 1)?;
                }
            }
            s => print_stmt(s, f, 1)?,
        }
        indent(f, 1)?;
        writeln!(f, "return {};", self.ret)?;
        writeln!(f, "}}")
    }
}
