//! Translation of the relational algebra into the nested algebra.
//!
//! Scalars are boxed: a value `v` becomes `left(v)`, null becomes
//! `right(unit)`. Three-valued truth values use the same encoding over
//! booleans. The evaluation environment is a chain of records
//! `{slice: bag, tail: env}` ending in the empty record.

use crate::data::{bag_to_data, value_to_data, ArithOp, Data};
use crate::nrae::{BinOp, Nra, UnOp, GROUP_LABEL};
use crate::sqlalg::{
    find_eval_index, AggFn, Env, Expr, Formula, Pred, Quantifier, Query, Select, StaticSlice,
};
use crate::sqlalg::Bool3;

/// The compile-time environment, bottom first.
pub type TransEnv = Vec<StaticSlice>;

fn c(d: Data) -> Nra {
    Nra::Const(d)
}

fn null() -> Nra {
    c(Data::null())
}

fn env_dot(a: &str) -> Nra {
    Nra::dot(Nra::Env, a)
}

fn rec2(a: &str, qa: Nra, b: &str, qb: Nra) -> Nra {
    Nra::binary(BinOp::RecConcat, Nra::rec(a, qa), Nra::rec(b, qb))
}

/// `{slice: [In], tail: Env}`
pub fn push_one() -> Nra {
    rec2("slice", Nra::unary(UnOp::Bag, Nra::In), "tail", Nra::Env)
}

/// `{slice: In, tail: Env}`
pub fn push_bag() -> Nra {
    rec2("slice", Nra::In, "tail", Nra::Env)
}

/// Erases the tuples of a runtime environment.
pub fn static_of(e: &Env) -> TransEnv {
    e.slices().map(|s| s.static_part()).collect()
}

/// The runtime environment record for `e`.
pub fn runtime_of(e: &Env) -> Data {
    e.slices().fold(Data::empty_record(), |tail, s| {
        Data::record([("slice".to_string(), bag_to_data(&s.tuples)), ("tail".to_string(), tail)])
    })
}

/// The boxed encoding of a truth value.
pub fn bool3_to_data(b: Bool3) -> Data {
    match b {
        Bool3::True => Data::left(Data::Bool(true)),
        Bool3::False => Data::left(Data::Bool(false)),
        Bool3::Unknown => Data::null(),
    }
}

/// Applies a binary operation to two boxed operands; null absorbs.
/// `op` receives queries for the unboxed operands and must produce the
/// unboxed result; with `boxed` it produces a boxed result itself.
fn lift2(q1: Nra, q2: Nra, op: impl FnOnce(Nra, Nra) -> Nra, boxed: bool) -> Nra {
    let mut res = op(env_dot("v1"), Nra::In);
    if !boxed {
        res = Nra::unary(UnOp::Left, res);
    }
    let inner = Nra::compose_env(
        Nra::compose(Nra::either(res, null()), env_dot("r")),
        Nra::binary(BinOp::RecConcat, Nra::rec("v1", Nra::In), Nra::Env),
    );
    Nra::compose_env(
        Nra::compose(Nra::either(inner, null()), env_dot("l")),
        rec2("l", q1, "r", q2),
    )
}

fn lift1(q: Nra, op: UnOp) -> Nra {
    Nra::compose(Nra::either(Nra::unary(UnOp::Left, Nra::unary(op, Nra::In)), null()), q)
}

/// `either(In, false) ∘ q`: a boxed truth value read as a boolean.
pub fn is_true(q: Nra) -> Nra {
    Nra::compose(Nra::either(Nra::In, c(Data::Bool(false))), q)
}

fn is_false(q: Nra) -> Nra {
    Nra::compose(Nra::either(Nra::unary(UnOp::Not, Nra::In), c(Data::Bool(false))), q)
}

/// The boxed truth value that is true when `t` holds, false when `f`
/// holds and unknown otherwise. `t` and `f` are never both true.
fn from3(t: Nra, f: Nra) -> Nra {
    let yes = Nra::select(Nra::In, Nra::unary(UnOp::Bag, t));
    let no = Nra::map(Nra::unary(UnOp::Not, Nra::In), Nra::select(Nra::In, Nra::unary(UnOp::Bag, f)));
    Nra::unary(UnOp::Single, Nra::binary(BinOp::Union, no, yes))
}

fn and_b(a: Nra, b: Nra) -> Nra {
    let t = Nra::binary(BinOp::And, is_true(env_dot("l")), is_true(env_dot("r")));
    let f = Nra::binary(BinOp::Or, is_false(env_dot("l")), is_false(env_dot("r")));
    Nra::compose_env(from3(t, f), rec2("l", a, "r", b))
}

fn or_b(a: Nra, b: Nra) -> Nra {
    let t = Nra::binary(BinOp::Or, is_true(env_dot("l")), is_true(env_dot("r")));
    let f = Nra::binary(BinOp::And, is_false(env_dot("l")), is_false(env_dot("r")));
    Nra::compose_env(from3(t, f), rec2("l", a, "r", b))
}

fn not_b(a: Nra) -> Nra {
    lift1(a, UnOp::Not)
}

/// The three-valued connectives over boxed operands, exposed for testing.
pub fn connective(name: &str, a: Nra, b: Nra) -> Nra {
    match name {
        "and" => and_b(a, b),
        "or" => or_b(a, b),
        _ => not_b(a),
    }
}

fn compare(p: Pred, a: Nra, b: Nra) -> Nra {
    let le = |x: Nra, y: Nra| Nra::binary(BinOp::Le, x, y);
    match p {
        Pred::Lt => lift2(a, b, |x, y| Nra::binary(BinOp::Lt, x, y), false),
        Pred::Le => lift2(a, b, le, false),
        Pred::Gt => lift2(b, a, |x, y| Nra::binary(BinOp::Lt, x, y), false),
        Pred::Ge => lift2(b, a, le, false),
        Pred::Eq => lift2(a, b, move |x, y| Nra::binary(BinOp::And, le(x.clone(), y.clone()), le(y, x)), false),
        Pred::Ne => lift2(
            a,
            b,
            move |x, y| Nra::unary(UnOp::Not, Nra::binary(BinOp::And, le(x.clone(), y.clone()), le(y, x))),
            false,
        ),
    }
}

fn count(q: Nra) -> Nra {
    Nra::unary(UnOp::Count, q)
}

fn zero() -> Nra {
    c(Data::int(0))
}

fn count_where(pred: Nra, q: Nra) -> Nra {
    count(Nra::select(pred, q))
}

/// Truth value of `all`/`any` over a bag of boxed truth values in `Env.res`.
fn quantify(all: bool) -> Nra {
    let res = || env_dot("res");
    let gt0 = |q| Nra::binary(BinOp::Lt, zero(), q);
    let eq0 = |q| Nra::binary(BinOp::Eq, q, zero());
    if all {
        from3(
            eq0(count_where(Nra::unary(UnOp::Not, is_true(Nra::In)), res())),
            gt0(count_where(is_false(Nra::In), res())),
        )
    } else {
        from3(
            gt0(count_where(is_true(Nra::In), res())),
            eq0(count_where(Nra::unary(UnOp::Not, is_false(Nra::In)), res())),
        )
    }
}

fn tail_n(n: usize) -> Nra {
    (0..n).fold(Nra::Env, |q, _| Nra::dot(q, "tail"))
}

pub fn translate_expr(a: &[StaticSlice], e: &Expr) -> Nra {
    match e {
        Expr::Const(v) => c(value_to_data(v)),
        Expr::Attr(x) => {
            let n = a.len();
            if n == 0 || a[n - 1].attrs.contains(x) {
                Nra::dot(Nra::unary(UnOp::First, env_dot("slice")), x)
            } else {
                Nra::compose_env(translate_expr(&a[..n - 1], e), env_dot("tail"))
            }
        }
        Expr::Neg(x) => lift1(translate_expr(a, x), UnOp::Neg),
        Expr::Arith(op, x, y) => {
            let (qx, qy) = (translate_expr(a, x), translate_expr(a, y));
            let bop = match op {
                ArithOp::Add => BinOp::Add,
                ArithOp::Sub => BinOp::Sub,
                ArithOp::Mul => BinOp::Mul,
                ArithOp::Div => BinOp::Div,
                ArithOp::Concat => BinOp::Concat,
            };
            lift2(qx, qy, |l, r| Nra::binary(bop, l, r), bop == BinOp::Div)
        }
        Expr::Agg(f, x) => {
            let n = a.len();
            let k = find_eval_index(a, x).unwrap_or(n).max(1).min(n);
            let inner = &a[..k];
            let per_tuple = Nra::compose_env(
                translate_expr(inner, x),
                rec2("slice", Nra::unary(UnOp::Bag, Nra::In), "tail", env_dot("tail")),
            );
            let vals = Nra::map(per_tuple, env_dot("slice"));
            let non_null = || {
                Nra::unary(
                    UnOp::Flatten,
                    Nra::map(Nra::either(Nra::unary(UnOp::Bag, Nra::In), c(Data::empty_bag())), vals.clone()),
                )
            };
            let folded = match f {
                AggFn::CountStar => Nra::unary(UnOp::Left, count(vals.clone())),
                AggFn::Count => Nra::unary(UnOp::Left, count(non_null())),
                AggFn::Sum | AggFn::Avg | AggFn::Min | AggFn::Max => {
                    let op = match f {
                        AggFn::Sum => UnOp::Sum,
                        AggFn::Avg => UnOp::Avg,
                        AggFn::Min => UnOp::Min,
                        _ => UnOp::Max,
                    };
                    let guarded = Nra::select(
                        Nra::binary(BinOp::Lt, zero(), count(Nra::In)),
                        Nra::unary(UnOp::Bag, non_null()),
                    );
                    let applied = Nra::map(Nra::unary(UnOp::Left, Nra::unary(op, Nra::In)), guarded);
                    Nra::compose(Nra::either(Nra::In, null()), Nra::unary(UnOp::Single, applied))
                }
            };
            if k == n {
                folded
            } else {
                Nra::compose_env(folded, tail_n(n - k))
            }
        }
    }
}

fn translate_select(a: &[StaticSlice], sel: &[Select]) -> Nra {
    Nra::record(sel.iter().map(|s| (s.name.clone(), translate_expr(a, &s.expr))).collect())
}

fn pushed(a: &[StaticSlice], s: StaticSlice) -> TransEnv {
    let mut v = a.to_vec();
    v.push(s);
    v
}

/// Translates a formula to a query producing a boxed truth value.
pub fn translate_formula(a: &[StaticSlice], sorts: &dyn Fn(&Query) -> Vec<String>, f: &Formula) -> Nra {
    let tf = |g: &Formula| translate_formula(a, sorts, g);
    match f {
        Formula::True => c(Data::left(Data::Bool(true))),
        Formula::And(x, y) => and_b(tf(x), tf(y)),
        Formula::Or(x, y) => or_b(tf(x), tf(y)),
        Formula::Not(x) => not_b(tf(x)),
        Formula::Pred(p, x, y) => compare(*p, translate_expr(a, x), translate_expr(a, y)),
        Formula::Quant(p, quant, s, q) => {
            let per = Nra::map(compare(*p, env_dot("l"), Nra::dot(Nra::In, &s.name)), env_dot("r"));
            let body = Nra::compose_env(quantify(*quant == Quantifier::All), Nra::rec("res", per));
            Nra::compose_env(body, rec2("l", translate_expr(a, &s.expr), "r", translate_query_in(a, sorts, q)))
        }
        Formula::In(sel, q) => {
            let per_tuple = sel
                .iter()
                .map(|s| compare(Pred::Eq, Nra::dot(env_dot("l"), &s.name), Nra::dot(Nra::In, &s.name)))
                .reduce(and_b)
                .unwrap_or_else(|| c(Data::left(Data::Bool(true))));
            let body = Nra::compose_env(quantify(false), Nra::rec("res", Nra::map(per_tuple, env_dot("r"))));
            Nra::compose_env(body, rec2("l", translate_select(a, sel), "r", translate_query_in(a, sorts, q)))
        }
        Formula::Exists(q) => {
            Nra::unary(UnOp::Left, Nra::binary(BinOp::Lt, zero(), count(translate_query_in(a, sorts, q))))
        }
    }
}

fn translate_query_in(a: &[StaticSlice], sorts: &dyn Fn(&Query) -> Vec<String>, q: &Query) -> Nra {
    let tq = |x: &Query| translate_query_in(a, sorts, x);
    let bin = |op, x: &Query, y: &Query| Nra::binary(op, tq(x), tq(y));
    match q {
        Query::Empty => c(Data::empty_bag()),
        Query::Table(t) => Nra::Table(t.clone()),
        Query::Union(x, y) => bin(BinOp::Union, x, y),
        Query::Intersect(x, y) => bin(BinOp::Intersect, x, y),
        Query::Except(x, y) => bin(BinOp::Minus, x, y),
        Query::Join(x, y) => Nra::product(tq(x), tq(y)),
        Query::Project(sel, input) => {
            let a2 = pushed(a, StaticSlice::new(sorts(input), vec![]));
            Nra::map(Nra::compose_env(translate_select(&a2, sel), push_one()), tq(input))
        }
        Query::Filter(Formula::True, input) => tq(input),
        Query::Filter(f, input) => {
            let a2 = pushed(a, StaticSlice::new(sorts(input), vec![]));
            let cond = is_true(translate_formula(&a2, sorts, f));
            Nra::select(Nra::compose_env(cond, push_one()), tq(input))
        }
        Query::Group { select, keys, having, input } => {
            let a2 = pushed(a, StaticSlice::new(sorts(input), keys.clone()));
            let groups = Nra::map(
                Nra::dot(Nra::In, GROUP_LABEL),
                Nra::group_by(GROUP_LABEL, keys.clone(), tq(input)),
            );
            let filtered = match having {
                Formula::True => groups,
                f => Nra::select(
                    Nra::compose_env(is_true(translate_formula(&a2, sorts, f)), push_bag()),
                    groups,
                ),
            };
            Nra::map(Nra::compose_env(translate_select(&a2, select), push_bag()), filtered)
        }
    }
}

/// Translates `q` under the compile-time environment `a` (bottom first).
/// `schema` supplies table sorts.
pub fn translate_query(schema: &crate::data::Schema, a: &[StaticSlice], q: &Query) -> Nra {
    let sorts = |x: &Query| -> Vec<String> {
        crate::sqlalg::sort_of(schema, x).map(|s| s.into_iter().collect()).unwrap_or_default()
    };
    translate_query_in(a, &sorts, q)
}

/// Formula translation with table sorts taken from `schema`.
pub fn translate_formula_with(schema: &crate::data::Schema, a: &[StaticSlice], f: &Formula) -> Nra {
    let sorts = |x: &Query| -> Vec<String> {
        crate::sqlalg::sort_of(schema, x).map(|s| s.into_iter().collect()).unwrap_or_default()
    };
    translate_formula(a, &sorts, f)
}
