use super::{Fresh, Nnrc};

/// Operator applications whose arguments are variables, constants or
/// operator applications.
fn is_basic(e: &Nnrc) -> bool {
    match e {
        Nnrc::Var(_) | Nnrc::Const(_) => true,
        Nnrc::Unary(_, a) => is_basic(a),
        Nnrc::Binary(_, a, b) => is_basic(a) && is_basic(b),
        _ => false,
    }
}

/// No let, for, if or match occurs inside an operator argument, a loop
/// source, a condition or a match scrutinee.
pub fn is_stratified(e: &Nnrc) -> bool {
    match e {
        Nnrc::Let(_, a, b) => is_stratified(a) && is_stratified(b),
        Nnrc::For(_, src, body) => is_basic(src) && is_stratified(body),
        Nnrc::If(c, a, b) => is_basic(c) && is_stratified(a) && is_stratified(b),
        Nnrc::Either(s, _, l, _, r) => is_basic(s) && is_stratified(l) && is_stratified(r),
        _ => is_basic(e),
    }
}

struct Stratifier {
    fresh: Fresh,
}

fn wrap(binds: Vec<(String, Nnrc)>, body: Nnrc) -> Nnrc {
    binds.into_iter().rev().fold(body, |acc, (t, e)| Nnrc::let_(&t, e, acc))
}

impl Stratifier {
    fn stmt(&mut self, e: &Nnrc) -> Nnrc {
        match e {
            Nnrc::Let(x, a, b) => Nnrc::let_(x, self.stmt(a), self.stmt(b)),
            Nnrc::For(x, src, body) => {
                let mut binds = Vec::new();
                let s = self.lift(src, &mut binds);
                wrap(binds, Nnrc::for_(x, s, self.stmt(body)))
            }
            Nnrc::If(c, a, b) => {
                let mut binds = Vec::new();
                let c = self.lift(c, &mut binds);
                wrap(binds, Nnrc::if_(c, self.stmt(a), self.stmt(b)))
            }
            Nnrc::Either(s, x, l, y, r) => {
                let mut binds = Vec::new();
                let s = self.lift(s, &mut binds);
                wrap(binds, Nnrc::either(s, x, self.stmt(l), y, self.stmt(r)))
            }
            _ => {
                let mut binds = Vec::new();
                let b = self.lift(e, &mut binds);
                wrap(binds, b)
            }
        }
    }

    /// Returns a basic expression, hoisting complex subterms into `binds`
    /// from left to right.
    fn lift(&mut self, e: &Nnrc, binds: &mut Vec<(String, Nnrc)>) -> Nnrc {
        match e {
            Nnrc::Var(_) | Nnrc::Const(_) => e.clone(),
            Nnrc::Unary(op, a) => Nnrc::unary(op.clone(), self.lift(a, binds)),
            Nnrc::Binary(op, a, b) => {
                let a = self.lift(a, binds);
                Nnrc::binary(*op, a, self.lift(b, binds))
            }
            _ => {
                let t = self.fresh.name("t");
                let s = self.stmt(e);
                binds.push((t.clone(), s));
                Nnrc::Var(t)
            }
        }
    }
}

/// Hoists complex subexpressions out of operator arguments into lets bound
/// to fresh temporaries `t$0`, `t$1`, ...
pub fn stratify(e: &Nnrc) -> Nnrc {
    Stratifier { fresh: Fresh::new(e.names()) }.stmt(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Data;
    use crate::lowering::eval_nnrc;
    use crate::nrae::{BinOp, UnOp};

    fn plus3_over_y() -> Nnrc {
        Nnrc::for_(
            "x",
            Nnrc::var("y"),
            Nnrc::binary(BinOp::Add, Nnrc::var("x"), Nnrc::Const(Data::int(3))),
        )
    }

    #[test]
    fn length_example() {
        let e = Nnrc::unary(UnOp::Count, plus3_over_y());
        assert!(!is_stratified(&e));
        let s = stratify(&e);
        assert_eq!(s, Nnrc::let_("t$0", plus3_over_y(), Nnrc::unary(UnOp::Count, Nnrc::var("t$0"))));
        assert!(is_stratified(&s));
        assert_eq!(stratify(&s), s);
        let y = Data::bag(vec![Data::int(1), Data::int(2), Data::int(3)]);
        let env = [("y".to_string(), y)];
        assert_eq!(eval_nnrc(&s, &env).unwrap(), Data::int(3));
        assert_eq!(eval_nnrc(&e, &env).unwrap(), Data::int(3));
    }

    #[test]
    fn hoists_left_to_right() {
        let e = Nnrc::binary(BinOp::Union, plus3_over_y(), Nnrc::for_("z", Nnrc::var("y"), Nnrc::var("z")));
        let s = stratify(&e);
        match &s {
            Nnrc::Let(t0, a, rest) => {
                assert_eq!(t0, "t$0");
                assert_eq!(**a, plus3_over_y());
                match &**rest {
                    Nnrc::Let(t1, _, body) => {
                        assert_eq!(t1, "t$1");
                        assert_eq!(
                            **body,
                            Nnrc::binary(BinOp::Union, Nnrc::var("t$0"), Nnrc::var("t$1"))
                        );
                    }
                    other => panic!("expected a second let, got {}", other),
                }
            }
            other => panic!("expected a let, got {}", other),
        }
        let y = Data::bag(vec![Data::int(1), Data::int(2), Data::int(3)]);
        let env = [("y".to_string(), y)];
        assert_eq!(eval_nnrc(&s, &env).unwrap(), eval_nnrc(&e, &env).unwrap());
    }

    #[test]
    fn avoids_existing_temporaries() {
        let e = Nnrc::let_("t$0", Nnrc::Const(Data::int(1)), Nnrc::unary(UnOp::Count, plus3_over_y()));
        let s = stratify(&e);
        assert!(s.names().contains("t$1"));
        assert!(is_stratified(&s));
    }
}
