use super::{Nra, UnOp};
use crate::data::Data;

/// A local rewrite: returns the replacement for a node, if it applies.
pub type Rule = (&'static str, fn(&Nra) -> Option<Nra>);

fn either_left(q: &Nra) -> Option<Nra> {
    match q {
        Nra::Compose(e, arg) => match (e.as_ref(), arg.as_ref()) {
            (Nra::Either(l, _), Nra::Unary(UnOp::Left, x)) => Some(Nra::compose((**l).clone(), (**x).clone())),
            (Nra::Either(_, r), Nra::Unary(UnOp::Right, x)) => Some(Nra::compose((**r).clone(), (**x).clone())),
            _ => None,
        },
        _ => None,
    }
}

fn either_const(q: &Nra) -> Option<Nra> {
    match q {
        Nra::Compose(e, arg) => match (e.as_ref(), arg.as_ref()) {
            (Nra::Either(l, _), Nra::Const(Data::Left(d))) => {
                Some(Nra::compose((**l).clone(), Nra::Const((**d).clone())))
            }
            (Nra::Either(_, r), Nra::Const(Data::Right(d))) => {
                Some(Nra::compose((**r).clone(), Nra::Const((**d).clone())))
            }
            _ => None,
        },
        _ => None,
    }
}

fn compose_in(q: &Nra) -> Option<Nra> {
    match q {
        Nra::Compose(a, b) if **b == Nra::In => Some((**a).clone()),
        Nra::Compose(a, b) if **a == Nra::In => Some((**b).clone()),
        _ => None,
    }
}

fn compose_const(q: &Nra) -> Option<Nra> {
    // a closed query ignores its input; the argument is still evaluated
    // unless it is itself a constant
    match q {
        Nra::Compose(a, b) if matches!(**a, Nra::Const(_)) && matches!(**b, Nra::Const(_)) => {
            Some((**a).clone())
        }
        _ => None,
    }
}

fn map_id(q: &Nra) -> Option<Nra> {
    match q {
        Nra::Map(body, src) if **body == Nra::In => Some((**src).clone()),
        _ => None,
    }
}

fn select_true(q: &Nra) -> Option<Nra> {
    match q {
        Nra::Select(p, src) if **p == Nra::Const(Data::Bool(true)) => Some((**src).clone()),
        _ => None,
    }
}

fn flatten_singleton(q: &Nra) -> Option<Nra> {
    match q {
        Nra::Unary(UnOp::Flatten, x) => match x.as_ref() {
            Nra::Unary(UnOp::Bag, y) => Some((**y).clone()),
            _ => None,
        },
        _ => None,
    }
}

/// The validated rewrite set.
pub fn default_rules() -> Vec<Rule> {
    vec![
        ("either-left", either_left),
        ("either-const", either_const),
        ("compose-in", compose_in),
        ("compose-const", compose_const),
        ("map-id", map_id),
        ("select-true", select_true),
        ("flatten-singleton", flatten_singleton),
    ]
}

const MAX_PASSES: usize = 100;

fn rebuild(q: &Nra, f: &mut impl FnMut(&Nra) -> Nra) -> Nra {
    let b = |x: &Nra, f: &mut dyn FnMut(&Nra) -> Nra| Box::new(f(x));
    match q {
        Nra::Const(_) | Nra::In | Nra::Env | Nra::Table(_) => q.clone(),
        Nra::Unary(op, a) => Nra::Unary(op.clone(), b(a, f)),
        Nra::MapEnv(a) => Nra::MapEnv(b(a, f)),
        Nra::Binary(op, x, y) => Nra::Binary(*op, b(x, f), b(y, f)),
        Nra::Compose(x, y) => Nra::Compose(b(x, f), b(y, f)),
        Nra::Map(x, y) => Nra::Map(b(x, f), b(y, f)),
        Nra::Select(x, y) => Nra::Select(b(x, f), b(y, f)),
        Nra::Product(x, y) => Nra::Product(b(x, f), b(y, f)),
        Nra::Default(x, y) => Nra::Default(b(x, f), b(y, f)),
        Nra::Either(x, y) => Nra::Either(b(x, f), b(y, f)),
        Nra::ComposeEnv(x, y) => Nra::ComposeEnv(b(x, f), b(y, f)),
    }
}

fn pass(q: &Nra, rules: &[Rule], changed: &mut bool) -> Nra {
    let mut q = rebuild(q, &mut |c| pass(c, rules, changed));
    loop {
        match rules.iter().find_map(|(_, r)| r(&q)) {
            Some(q2) => {
                *changed = true;
                q = q2;
            }
            None => return q,
        }
    }
}

/// Applies `rules` bottom-up until nothing changes (at most 100 passes).
pub fn optimize_with(q: &Nra, rules: &[Rule]) -> Nra {
    let mut q = q.clone();
    for _ in 0..MAX_PASSES {
        let mut changed = false;
        q = pass(&q, rules, &mut changed);
        if !changed {
            break;
        }
    }
    q
}

pub fn optimize(q: &Nra) -> Nra {
    optimize_with(q, &default_rules())
}
