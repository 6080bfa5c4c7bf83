use super::ops::{apply_binary, apply_unary};
use super::{BinOp, Nra, UnOp};
use crate::data::Data;
use crate::error::{type_err, Error, Result};

fn located(e: Error, q: &Nra) -> Error {
    match e {
        Error::Type(m) => Error::Eval(format!("{} in `{}`", m, q)),
        e => e,
    }
}

fn bag_of<'a>(d: &'a Data, what: &str) -> Result<&'a [Data]> {
    match d.as_bag() {
        Some(b) => Ok(b),
        None => type_err(format!("{} over a non-bag {}", what, d)),
    }
}

/// Evaluates `q` in environment `env` on input `input`. `db` is the
/// top-level input, from which `Table` leaves read.
pub fn eval_nra(q: &Nra, db: &Data, env: &Data, input: &Data) -> Result<Data> {
    let ev = |q: &Nra, env: &Data, input: &Data| eval_nra(q, db, env, input);
    match q {
        Nra::Const(d) => Ok(d.clone()),
        Nra::In => Ok(input.clone()),
        Nra::Env => Ok(env.clone()),
        Nra::Table(t) => apply_unary(&UnOp::Dot(t.clone()), db).map_err(|e| located(e, q)),
        Nra::Unary(op, a) => {
            let v = ev(a, env, input)?;
            apply_unary(op, &v).map_err(|e| located(e, q))
        }
        Nra::Binary(op, a, b) => {
            let va = ev(a, env, input)?;
            let vb = ev(b, env, input)?;
            apply_binary(*op, &va, &vb).map_err(|e| located(e, q))
        }
        Nra::Compose(q2, q1) => {
            let d1 = ev(q1, env, input)?;
            ev(q2, env, &d1)
        }
        Nra::Map(body, src) => {
            let d = ev(src, env, input)?;
            let items = bag_of(&d, "map").map_err(|e| located(e, q))?;
            let out = items.iter().map(|x| ev(body, env, x)).collect::<Result<Vec<_>>>()?;
            Ok(Data::bag(out))
        }
        Nra::Select(pred, src) => {
            let d = ev(src, env, input)?;
            let items = bag_of(&d, "select").map_err(|e| located(e, q))?;
            let mut out = Vec::new();
            for x in items {
                match ev(pred, env, x)? {
                    Data::Bool(true) => out.push(x.clone()),
                    Data::Bool(false) => {}
                    v => return Err(located(Error::Type(format!("select condition gave {}", v)), q)),
                }
            }
            Ok(Data::bag(out))
        }
        Nra::Product(a, b) => {
            let da = ev(a, env, input)?;
            let db2 = ev(b, env, input)?;
            let (xs, ys) = (bag_of(&da, "product")?, bag_of(&db2, "product")?);
            let mut out = Vec::with_capacity(xs.len() * ys.len());
            for x in xs {
                for y in ys {
                    out.push(apply_binary(BinOp::RecConcat, x, y).map_err(|e| located(e, q))?);
                }
            }
            Ok(Data::bag(out))
        }
        Nra::Default(a, b) => {
            let d = ev(a, env, input)?;
            match d.as_bag() {
                Some([]) => ev(b, env, input),
                _ => Ok(d),
            }
        }
        Nra::Either(l, r) => match input {
            Data::Left(d) => ev(l, env, d),
            Data::Right(d) => ev(r, env, d),
            d => Err(located(Error::Type(format!("either over untagged {}", d)), q)),
        },
        Nra::ComposeEnv(q2, q1) => {
            let env2 = ev(q1, env, input)?;
            ev(q2, &env2, input)
        }
        Nra::MapEnv(body) => {
            let items = bag_of(env, "map over the environment").map_err(|e| located(e, q))?;
            let out = items.iter().map(|e| ev(body, e, input)).collect::<Result<Vec<_>>>()?;
            Ok(Data::bag(out))
        }
    }
}

/// Evaluates a whole query: the instance record is both the input and the
/// source of tables, and the environment is the empty record.
pub fn eval_top(q: &Nra, db: &Data) -> Result<Data> {
    eval_nra(q, db, &Data::empty_record(), db)
}

/// Group-by expressed with the core combinators.
pub fn desugar_group_by(g: &str, attrs: &[String], q: Nra) -> Nra {
    let key = || Nra::unary(UnOp::Project(attrs.to_vec()), Nra::In);
    let members = Nra::compose_env(
        Nra::select(
            Nra::binary(BinOp::Eq, Nra::dot(Nra::Env, "key"), key()),
            Nra::dot(Nra::Env, "input"),
        ),
        Nra::binary(BinOp::RecConcat, Nra::rec("key", Nra::In), Nra::Env),
    );
    let keys = Nra::unary(UnOp::Distinct, Nra::map(key(), Nra::dot(Nra::Env, "input")));
    Nra::compose_env(
        Nra::map(Nra::binary(BinOp::RecConcat, Nra::In, Nra::rec(g, members)), keys),
        Nra::rec("input", q),
    )
}
