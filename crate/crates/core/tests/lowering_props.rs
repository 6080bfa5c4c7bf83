//! Random well-typed NRAe terms pushed through every lowering pass.

use dbx_core::data::Data;
use dbx_core::lowering::{
    is_cross_shadow_free, is_stratified, nnrc_to_nnrs, nrae_to_nnrc_top, stratify, uncross_shadow,
};
use dbx_core::nrae::{eval_top, optimize, BinOp, Nra, UnOp};
use dbx_core::pipeline::{lower, Stage};
use proptest::prelude::*;

#[derive(Clone, Copy, PartialEq, Debug)]
enum Ty {
    Int,
    Bool,
    /// `{a: int}`
    Rec,
    BagRec,
    BagInt,
    /// `left(int)` or `right(unit)`
    Opt,
    Unit,
    /// The instance record, `{R: bag of {a: int}}`.
    Db,
}

/// Draws choices from a byte string; exhausted input always picks 0, which
/// is a leaf for every type.
struct Gen<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Gen<'_> {
    fn pick(&mut self, n: usize) -> usize {
        let b = self.bytes.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        b as usize % n
    }

    fn int(&mut self) -> i64 {
        self.pick(7) as i64 - 3
    }

    fn leaf(&mut self, t: Ty, input: Ty, env: Ty) -> Nra {
        if input == t && self.pick(2) == 0 {
            return Nra::In;
        }
        if env == t && self.pick(2) == 0 {
            return Nra::Env;
        }
        let rec = |i: i64| Data::record([("a".to_string(), Data::int(i))]);
        match t {
            Ty::Int => Nra::Const(Data::int(self.int())),
            Ty::Bool => Nra::Const(Data::Bool(self.pick(2) == 0)),
            Ty::Rec => Nra::Const(rec(self.int())),
            Ty::BagRec if input == Ty::Db || env == Ty::Db => Nra::Table("R".into()),
            Ty::BagRec => Nra::Const(Data::bag((0..self.pick(3)).map(|_| rec(self.int())).collect())),
            Ty::BagInt => Nra::Const(Data::bag((0..self.pick(3)).map(|_| Data::int(self.int())).collect())),
            Ty::Opt if self.pick(2) == 0 => Nra::Const(Data::left(Data::int(self.int()))),
            Ty::Opt => Nra::Const(Data::null()),
            Ty::Unit => Nra::Const(Data::Unit),
            Ty::Db => Nra::In,
        }
    }

    fn term(&mut self, t: Ty, input: Ty, env: Ty, depth: usize) -> Nra {
        if depth == 0 || self.pick(4) == 0 {
            return self.leaf(t, input, env);
        }
        let d = depth - 1;
        // Combinators shared by every type.
        match self.pick(8) {
            0 => {
                let mid = self.ty();
                return Nra::compose(self.term(t, mid, env, d), self.term(mid, input, env, d));
            }
            1 => {
                let mid = self.ty();
                return Nra::compose_env(self.term(t, input, mid, d), self.term(mid, input, env, d));
            }
            2 => {
                let l = self.term(t, Ty::Int, env, d);
                let r = self.term(t, Ty::Unit, env, d);
                return Nra::compose(Nra::either(l, r), self.term(Ty::Opt, input, env, d));
            }
            _ => {}
        }
        let c = (input, env, d);
        match t {
            Ty::Int => match self.pick(6) {
                0 => Nra::binary([BinOp::Add, BinOp::Sub, BinOp::Mul][self.pick(3)], self.sub(Ty::Int, c), self.sub(Ty::Int, c)),
                1 => {
                    let src = self.ty_bag();
                    Nra::unary(UnOp::Count, self.sub(src, c))
                }
                2 => Nra::dot(self.sub(Ty::Rec, c), "a"),
                3 => Nra::unary(UnOp::Neg, self.sub(Ty::Int, c)),
                4 => Nra::unary([UnOp::Sum, UnOp::Max, UnOp::Min][self.pick(3)].clone(), self.sub(Ty::BagInt, c)),
                _ => Nra::dot(Nra::unary(UnOp::First, self.sub(Ty::BagRec, c)), "a"),
            },
            Ty::Bool => match self.pick(5) {
                0 => Nra::binary([BinOp::Eq, BinOp::Lt, BinOp::Le][self.pick(3)], self.sub(Ty::Int, c), self.sub(Ty::Int, c)),
                1 => Nra::unary(UnOp::Not, self.sub(Ty::Bool, c)),
                2 => Nra::binary([BinOp::And, BinOp::Or][self.pick(2)], self.sub(Ty::Bool, c), self.sub(Ty::Bool, c)),
                3 => Nra::binary(BinOp::Contains, self.sub(Ty::Int, c), self.sub(Ty::BagInt, c)),
                _ => Nra::binary(BinOp::Eq, self.sub(Ty::BagRec, c), self.sub(Ty::BagRec, c)),
            },
            Ty::Rec => match self.pick(3) {
                0 => Nra::rec("a", self.sub(Ty::Int, c)),
                1 => Nra::unary(UnOp::Project(vec!["a".into()]), self.sub(Ty::Rec, c)),
                _ => Nra::binary(BinOp::RecConcat, self.sub(Ty::Rec, c), self.sub(Ty::Rec, c)),
            },
            Ty::BagRec => match self.pick(9) {
                0 => {
                    let src = self.ty_bag();
                    let body = self.term(Ty::Rec, elem(src), env, d);
                    Nra::map(body, self.sub(src, c))
                }
                1 => Nra::select(self.term(Ty::Bool, Ty::Rec, env, d), self.sub(Ty::BagRec, c)),
                2 => Nra::binary(
                    [BinOp::Union, BinOp::Minus, BinOp::Intersect][self.pick(3)],
                    self.sub(Ty::BagRec, c),
                    self.sub(Ty::BagRec, c),
                ),
                3 => Nra::unary(UnOp::Distinct, self.sub(Ty::BagRec, c)),
                4 => Nra::default(self.sub(Ty::BagRec, c), self.sub(Ty::BagRec, c)),
                5 => Nra::unary(UnOp::Bag, self.sub(Ty::Rec, c)),
                6 => {
                    let src = self.ty_bag();
                    let body = self.term(Ty::BagRec, elem(src), env, d);
                    Nra::unary(UnOp::Flatten, Nra::map(body, self.sub(src, c)))
                }
                7 => Nra::product(self.sub(Ty::BagRec, c), self.sub(Ty::BagRec, c)),
                _ => Nra::compose_env(Nra::MapEnv(Box::new(self.term(Ty::Rec, input, Ty::Rec, d))), self.sub(Ty::BagRec, c)),
            },
            Ty::BagInt => match self.pick(4) {
                0 => {
                    let src = self.ty_bag();
                    let body = self.term(Ty::Int, elem(src), env, d);
                    Nra::map(body, self.sub(src, c))
                }
                1 => Nra::unary(UnOp::Bag, self.sub(Ty::Int, c)),
                2 => Nra::binary(
                    [BinOp::Union, BinOp::Minus, BinOp::Intersect][self.pick(3)],
                    self.sub(Ty::BagInt, c),
                    self.sub(Ty::BagInt, c),
                ),
                _ => Nra::select(self.term(Ty::Bool, Ty::Int, env, d), self.sub(Ty::BagInt, c)),
            },
            Ty::Opt => match self.pick(3) {
                0 => Nra::unary(UnOp::Left, self.sub(Ty::Int, c)),
                1 => Nra::binary(BinOp::Div, self.sub(Ty::Int, c), self.sub(Ty::Int, c)),
                _ => Nra::compose(
                    Nra::either(Nra::unary(UnOp::Left, Nra::dot(Nra::In, "a")), Nra::unary(UnOp::Right, Nra::In)),
                    Nra::unary(UnOp::Single, self.sub(Ty::BagRec, c)),
                ),
            },
            Ty::Unit | Ty::Db => self.leaf(t, input, env),
        }
    }

    fn sub(&mut self, t: Ty, (input, env, d): (Ty, Ty, usize)) -> Nra {
        self.term(t, input, env, d)
    }

    fn ty(&mut self) -> Ty {
        [Ty::Int, Ty::Bool, Ty::Rec, Ty::BagRec, Ty::BagInt, Ty::Opt][self.pick(6)]
    }

    fn ty_bag(&mut self) -> Ty {
        [Ty::BagRec, Ty::BagInt][self.pick(2)]
    }
}

fn elem(t: Ty) -> Ty {
    match t {
        Ty::BagRec => Ty::Rec,
        _ => Ty::Int,
    }
}

fn query(bytes: &[u8]) -> Nra {
    Gen { bytes, pos: 0 }.term(Ty::BagRec, Ty::Db, Ty::Unit, 4)
}

fn instance(rows: &[i8]) -> Data {
    let r = rows.iter().map(|&a| Data::record([("a".to_string(), Data::int(a as i64 % 4))])).collect();
    Data::record([("R".to_string(), Data::bag(r))])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn stages_agree(bytes in prop::collection::vec(any::<u8>(), 0..96),
                    rows in prop::collection::vec(any::<i8>(), 0..4)) {
        let q = query(&bytes);
        let db = instance(&rows);
        let l = lower(&q).unwrap();
        if let Ok(want) = eval_top(&q, &db) {
            for s in Stage::ALL.into_iter().filter(|s| !matches!(s, Stage::SqlAlg | Stage::Nrae)) {
                prop_assert_eq!(l.eval(s, &db), Ok(want.clone()), "stage {} on {}", s.name(), q);
            }
            prop_assert_eq!(eval_top(&optimize(&q), &db), Ok(want), "optimized {}", q);
        }
    }

    #[test]
    fn passes_are_idempotent(bytes in prop::collection::vec(any::<u8>(), 0..96)) {
        let e = nrae_to_nnrc_top(&query(&bytes));
        let s = stratify(&e);
        prop_assert!(is_stratified(&s));
        prop_assert_eq!(stratify(&s), s.clone());
        let p = uncross_shadow(&nnrc_to_nnrs(&s).unwrap());
        prop_assert!(is_cross_shadow_free(&p));
        prop_assert_eq!(uncross_shadow(&p), p);
    }
}

/// Checks that the generator is not vacuous: most terms evaluate.
#[test]
fn generator_mostly_succeeds() {
    let db = instance(&[1, 2, 2]);
    let mut ok = 0;
    let n = 500;
    for i in 0..n {
        let bytes: Vec<u8> = (0..96u32).map(|j| (i * 7919 + j * 104729 + (i * j) % 251) as u8).collect();
        let q = query(&bytes);
        ok += eval_top(&q, &db).is_ok() as u32;
    }
    assert!(ok * 2 > n, "only {} of {} generated terms evaluate", ok, n);
}
