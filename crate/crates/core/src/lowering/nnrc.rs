use std::collections::BTreeSet;
use std::fmt;

use super::Fresh;
use crate::data::Data;
use crate::error::{type_err, Error, Result};
use crate::nrae::{apply_binary, apply_unary, BinOp, Nra, UnOp};

/// Variable holding the instance, which is also the initial input.
pub const DB_VAR: &str = "db";
/// Variable holding the initial environment.
pub const ENV_VAR: &str = "env";

/// The named nested relational calculus.
#[derive(Debug, Clone, PartialEq)]
pub enum Nnrc {
    Var(String),
    Const(Data),
    Let(String, Box<Nnrc>, Box<Nnrc>),
    /// `{ body | x in source }`.
    For(String, Box<Nnrc>, Box<Nnrc>),
    If(Box<Nnrc>, Box<Nnrc>, Box<Nnrc>),
    /// `match e with left x -> l | right y -> r`.
    Either(Box<Nnrc>, String, Box<Nnrc>, String, Box<Nnrc>),
    Unary(UnOp, Box<Nnrc>),
    Binary(BinOp, Box<Nnrc>, Box<Nnrc>),
}

impl Nnrc {
    pub fn var(x: &str) -> Nnrc {
        Nnrc::Var(x.to_string())
    }

    pub fn let_(x: &str, e1: Nnrc, e2: Nnrc) -> Nnrc {
        Nnrc::Let(x.to_string(), Box::new(e1), Box::new(e2))
    }

    pub fn for_(x: &str, src: Nnrc, body: Nnrc) -> Nnrc {
        Nnrc::For(x.to_string(), Box::new(src), Box::new(body))
    }

    pub fn if_(c: Nnrc, a: Nnrc, b: Nnrc) -> Nnrc {
        Nnrc::If(Box::new(c), Box::new(a), Box::new(b))
    }

    pub fn either(e: Nnrc, x: &str, l: Nnrc, y: &str, r: Nnrc) -> Nnrc {
        Nnrc::Either(Box::new(e), x.to_string(), Box::new(l), y.to_string(), Box::new(r))
    }

    pub fn unary(op: UnOp, e: Nnrc) -> Nnrc {
        Nnrc::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinOp, a: Nnrc, b: Nnrc) -> Nnrc {
        Nnrc::Binary(op, Box::new(a), Box::new(b))
    }

    /// Let, for, if and either-match.
    pub fn is_complex(&self) -> bool {
        matches!(self, Nnrc::Let(..) | Nnrc::For(..) | Nnrc::If(..) | Nnrc::Either(..))
    }

    /// Every variable name, bound or free.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Nnrc::Var(x) => {
                out.insert(x.clone());
            }
            Nnrc::Const(_) => {}
            Nnrc::Let(x, a, b) | Nnrc::For(x, a, b) => {
                out.insert(x.clone());
                a.collect_names(out);
                b.collect_names(out);
            }
            Nnrc::If(c, a, b) => {
                c.collect_names(out);
                a.collect_names(out);
                b.collect_names(out);
            }
            Nnrc::Either(e, x, l, y, r) => {
                out.insert(x.clone());
                out.insert(y.clone());
                e.collect_names(out);
                l.collect_names(out);
                r.collect_names(out);
            }
            Nnrc::Unary(_, e) => e.collect_names(out),
            Nnrc::Binary(_, a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Nnrc::Var(_) | Nnrc::Const(_) => 1,
            Nnrc::Let(_, a, b) | Nnrc::For(_, a, b) | Nnrc::Binary(_, a, b) => 1 + a.size() + b.size(),
            Nnrc::If(c, a, b) | Nnrc::Either(c, _, a, _, b) => 1 + c.size() + a.size() + b.size(),
            Nnrc::Unary(_, e) => 1 + e.size(),
        }
    }
}

struct ToNnrc {
    fresh: Fresh,
}

impl ToNnrc {
    fn tr(&mut self, q: &Nra, input: &str, env: &str) -> Nnrc {
        match q {
            Nra::Const(d) => Nnrc::Const(d.clone()),
            Nra::In => Nnrc::var(input),
            Nra::Env => Nnrc::var(env),
            Nra::Table(t) => Nnrc::unary(UnOp::Dot(t.clone()), Nnrc::var(DB_VAR)),
            Nra::Unary(op, a) => Nnrc::unary(op.clone(), self.tr(a, input, env)),
            Nra::Binary(op, a, b) => {
                Nnrc::binary(*op, self.tr(a, input, env), self.tr(b, input, env))
            }
            Nra::Compose(q2, q1) => {
                let e1 = self.tr(q1, input, env);
                let x = self.fresh.name("x");
                Nnrc::let_(&x, e1, self.tr(q2, &x, env))
            }
            Nra::Map(body, src) => {
                let e1 = self.tr(src, input, env);
                let x = self.fresh.name("x");
                Nnrc::for_(&x, e1, self.tr(body, &x, env))
            }
            Nra::Select(pred, src) => {
                let e1 = self.tr(src, input, env);
                let x = self.fresh.name("x");
                let keep = Nnrc::if_(
                    self.tr(pred, &x, env),
                    Nnrc::unary(UnOp::Bag, Nnrc::var(&x)),
                    Nnrc::Const(Data::empty_bag()),
                );
                Nnrc::unary(UnOp::Flatten, Nnrc::for_(&x, e1, keep))
            }
            Nra::Product(a, b) => {
                let ea = self.tr(a, input, env);
                let eb = self.tr(b, input, env);
                let (ta, tb) = (self.fresh.name("p"), self.fresh.name("p"));
                let (x, y) = (self.fresh.name("x"), self.fresh.name("x"));
                let inner = Nnrc::for_(
                    &y,
                    Nnrc::var(&tb),
                    Nnrc::binary(BinOp::RecConcat, Nnrc::var(&x), Nnrc::var(&y)),
                );
                let outer = Nnrc::unary(UnOp::Flatten, Nnrc::for_(&x, Nnrc::var(&ta), inner));
                Nnrc::let_(&ta, ea, Nnrc::let_(&tb, eb, outer))
            }
            Nra::Default(a, b) => {
                let ea = self.tr(a, input, env);
                let t = self.fresh.name("d");
                let empty = Nnrc::binary(BinOp::Eq, Nnrc::var(&t), Nnrc::Const(Data::empty_bag()));
                let eb = self.tr(b, input, env);
                Nnrc::let_(&t, ea, Nnrc::if_(empty, eb, Nnrc::var(&t)))
            }
            Nra::Either(l, r) => {
                let (x, y) = (self.fresh.name("x"), self.fresh.name("x"));
                let el = self.tr(l, &x, env);
                let er = self.tr(r, &y, env);
                Nnrc::either(Nnrc::var(input), &x, el, &y, er)
            }
            Nra::ComposeEnv(q2, q1) => {
                let e1 = self.tr(q1, input, env);
                let e = self.fresh.name("e");
                Nnrc::let_(&e, e1, self.tr(q2, input, &e))
            }
            Nra::MapEnv(body) => {
                let e = self.fresh.name("e");
                Nnrc::for_(&e, Nnrc::var(env), self.tr(body, input, &e))
            }
        }
    }
}

/// Translates an NRAe query. The result has two free variables: [`DB_VAR`]
/// stands for the instance (the initial input) and [`ENV_VAR`] for the
/// environment.
pub fn nrae_to_nnrc(q: &Nra) -> Nnrc {
    let used = [DB_VAR, ENV_VAR].iter().map(|s| s.to_string()).collect();
    ToNnrc { fresh: Fresh::new(used) }.tr(q, DB_VAR, ENV_VAR)
}

/// Translates a whole query: as [`nrae_to_nnrc`], with the environment
/// bound to the empty record so that only [`DB_VAR`] is free.
pub fn nrae_to_nnrc_top(q: &Nra) -> Nnrc {
    Nnrc::let_(ENV_VAR, Nnrc::Const(Data::empty_record()), nrae_to_nnrc(q))
}

fn lookup<'a>(env: &'a [(String, Data)], x: &str) -> Result<&'a Data> {
    env.iter()
        .rev()
        .find(|(y, _)| y == x)
        .map(|(_, d)| d)
        .ok_or_else(|| Error::Unbound(x.to_string()))
}

fn eval_in(e: &Nnrc, env: &mut Vec<(String, Data)>) -> Result<Data> {
    match e {
        Nnrc::Var(x) => lookup(env, x).cloned(),
        Nnrc::Const(d) => Ok(d.clone()),
        Nnrc::Let(x, a, b) => {
            let v = eval_in(a, env)?;
            env.push((x.clone(), v));
            let r = eval_in(b, env);
            env.pop();
            r
        }
        Nnrc::For(x, a, b) => {
            let src = eval_in(a, env)?;
            let items = match src.as_bag() {
                Some(items) => items,
                None => return type_err(format!("for expects a bag, got {}", src)),
            };
            let mut out = Vec::with_capacity(items.len());
            for item in items {
                env.push((x.clone(), item.clone()));
                let r = eval_in(b, env);
                env.pop();
                out.push(r?);
            }
            Ok(Data::bag(out))
        }
        Nnrc::If(c, a, b) => match eval_in(c, env)? {
            Data::Bool(true) => eval_in(a, env),
            Data::Bool(false) => eval_in(b, env),
            d => type_err(format!("if expects a boolean, got {}", d)),
        },
        Nnrc::Either(s, x, l, y, r) => {
            let (name, v, branch) = match eval_in(s, env)? {
                Data::Left(v) => (x, v, l),
                Data::Right(v) => (y, v, r),
                d => return type_err(format!("match expects left or right, got {}", d)),
            };
            env.push((name.clone(), (*v).clone()));
            let res = eval_in(branch, env);
            env.pop();
            res
        }
        Nnrc::Unary(op, a) => apply_unary(op, &eval_in(a, env)?),
        Nnrc::Binary(op, a, b) => {
            let va = eval_in(a, env)?;
            apply_binary(*op, &va, &eval_in(b, env)?)
        }
    }
}

/// Evaluates under the given bindings (later bindings shadow earlier ones).
pub fn eval_nnrc(e: &Nnrc, bindings: &[(String, Data)]) -> Result<Data> {
    let mut env = bindings.to_vec();
    eval_in(e, &mut env)
}

/// Evaluates a translated query on an instance with the empty environment.
pub fn eval_nnrc_top(e: &Nnrc, db: &Data) -> Result<Data> {
    eval_nnrc(
        e,
        &[(DB_VAR.to_string(), db.clone()), (ENV_VAR.to_string(), Data::empty_record())],
    )
}

impl fmt::Display for Nnrc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nnrc::Var(x) => write!(f, "{}", x),
            Nnrc::Const(d) => write!(f, "{}", d),
            Nnrc::Let(x, a, b) => write!(f, "(let {} = {} in {})", x, a, b),
            Nnrc::For(x, a, b) => write!(f, "{{ {} | {} in {} }}", b, x, a),
            Nnrc::If(c, a, b) => write!(f, "(if {} then {} else {})", c, a, b),
            Nnrc::Either(e, x, l, y, r) => {
                write!(f, "(match {} with left {} -> {} | right {} -> {})", e, x, l, y, r)
            }
            Nnrc::Unary(UnOp::Dot(a), e) => write!(f, "{}.{}", e, a),
            Nnrc::Unary(UnOp::Rec(a), e) => write!(f, "{{{}: {}}}", a, e),
            Nnrc::Unary(op, e) => write!(f, "{}({})", op, e),
            Nnrc::Binary(op, a, b) => write!(f, "({} {} {})", a, op, b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nrae::eval_top;

    fn r(a: i64) -> Data {
        Data::record([("a".to_string(), Data::int(a))])
    }

    #[test]
    fn map_becomes_for() {
        let q = Nra::map(Nra::rec("x", Nra::dot(Nra::In, "a")), Nra::Table("R".into()));
        let e = nrae_to_nnrc(&q);
        assert_eq!(e.to_string(), "{ {x: x$0.a} | x$0 in db.R }");
        let db = Data::record([("R".to_string(), Data::bag(vec![r(1), r(2)]))]);
        let want = Data::bag(vec![
            Data::record([("x".to_string(), Data::int(1))]),
            Data::record([("x".to_string(), Data::int(2))]),
        ]);
        assert_eq!(eval_nnrc_top(&e, &db).unwrap(), want);
        assert_eq!(eval_top(&q, &db).unwrap(), want);
    }

    #[test]
    fn identity_is_the_input_variable() {
        assert_eq!(nrae_to_nnrc(&Nra::In), Nnrc::var(DB_VAR));
        assert_eq!(nrae_to_nnrc(&Nra::Env), Nnrc::var(ENV_VAR));
    }

    #[test]
    fn compose_env_rebinds_environment() {
        let q = Nra::compose_env(Nra::dot(Nra::Env, "k"), Nra::rec("k", Nra::Const(Data::int(7))));
        let e = nrae_to_nnrc(&q);
        assert_eq!(e.to_string(), "(let e$0 = {k: 7} in e$0.k)");
        assert_eq!(eval_nnrc_top(&e, &Data::empty_record()).unwrap(), Data::int(7));
    }
}
