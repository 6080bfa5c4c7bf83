use super::nnrs::{Nnrs, Stmt};
use super::{Fresh, DB_VAR};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ns {
    Imm,
    Data,
    Coll,
}

fn conflicts(scope: &[(String, Ns)], x: &str, ns: Ns) -> bool {
    scope.iter().any(|(y, m)| y == x && *m != ns)
}

/// Renames the occurrences of `from` in namespace `ns` that refer to the
/// binding in scope at the root of `s`.
fn rename(s: &Stmt, ns: Ns, from: &str, to: &str) -> Stmt {
    let ren_e = |e: &super::Expr| if ns == Ns::Imm { e.rename(from, to) } else { e.clone() };
    let go = |s: &Stmt| Box::new(rename(s, ns, from, to));
    let under = |x: &str, bind: Ns, s: &Stmt| {
        if x == from && bind == ns {
            Box::new(s.clone())
        } else {
            go(s)
        }
    };
    let target = |x: &str, t: Ns| if x == from && t == ns { to.to_string() } else { x.to_string() };
    match s {
        Stmt::Seq(a, b) => Stmt::Seq(go(a), go(b)),
        Stmt::Let(x, e, b) => Stmt::Let(x.clone(), ren_e(e), under(x, Ns::Imm, b)),
        Stmt::For(x, e, b) => Stmt::For(x.clone(), ren_e(e), under(x, Ns::Imm, b)),
        Stmt::LetMut(x, a, b) => Stmt::LetMut(x.clone(), under(x, Ns::Data, a), under(x, Ns::Imm, b)),
        Stmt::LetMutColl(x, a, b) => {
            Stmt::LetMutColl(x.clone(), under(x, Ns::Coll, a), under(x, Ns::Imm, b))
        }
        Stmt::Assign(x, e) => Stmt::Assign(target(x, Ns::Data), ren_e(e)),
        Stmt::Push(x, e) => Stmt::Push(target(x, Ns::Coll), ren_e(e)),
        Stmt::If(c, a, b) => Stmt::If(ren_e(c), go(a), go(b)),
        Stmt::Either(e, x, l, y, r) => Stmt::Either(
            ren_e(e),
            x.clone(),
            under(x, Ns::Imm, l),
            y.clone(),
            under(y, Ns::Imm, r),
        ),
    }
}

struct Uncross {
    fresh: Fresh,
    scope: Vec<(String, Ns)>,
    renamed: usize,
}

impl Uncross {
    fn scoped(&mut self, x: &str, ns: Ns, s: &Stmt) -> Stmt {
        self.scope.push((x.to_string(), ns));
        let r = self.go(s);
        self.scope.pop();
        r
    }

    /// A fresh name for a binder of `x` in `ns`, or `x` itself when it does
    /// not clash.
    fn binder(&mut self, x: &str, nss: &[Ns]) -> Option<String> {
        if nss.iter().any(|ns| conflicts(&self.scope, x, *ns)) {
            self.renamed += 1;
            Some(self.fresh.name(x))
        } else {
            None
        }
    }

    fn go(&mut self, s: &Stmt) -> Stmt {
        match s {
            Stmt::Seq(a, b) => Stmt::Seq(Box::new(self.go(a)), Box::new(self.go(b))),
            Stmt::Let(x, e, b) | Stmt::For(x, e, b) => {
                let (x, b) = match self.binder(x, &[Ns::Imm]) {
                    Some(y) => {
                        let b = rename(b, Ns::Imm, x, &y);
                        (y, b)
                    }
                    None => (x.clone(), (**b).clone()),
                };
                let b = Box::new(self.scoped(&x, Ns::Imm, &b));
                match s {
                    Stmt::Let(..) => Stmt::Let(x, e.clone(), b),
                    _ => Stmt::For(x, e.clone(), b),
                }
            }
            Stmt::LetMut(x, a, b) | Stmt::LetMutColl(x, a, b) => {
                let ns = if matches!(s, Stmt::LetMut(..)) { Ns::Data } else { Ns::Coll };
                let (x, a, b) = match self.binder(x, &[ns, Ns::Imm]) {
                    Some(y) => (y.clone(), rename(a, ns, x, &y), rename(b, Ns::Imm, x, &y)),
                    None => (x.clone(), (**a).clone(), (**b).clone()),
                };
                let a = Box::new(self.scoped(&x, ns, &a));
                let b = Box::new(self.scoped(&x, Ns::Imm, &b));
                match ns {
                    Ns::Data => Stmt::LetMut(x, a, b),
                    _ => Stmt::LetMutColl(x, a, b),
                }
            }
            Stmt::Assign(..) | Stmt::Push(..) => s.clone(),
            Stmt::If(c, a, b) => Stmt::If(c.clone(), Box::new(self.go(a)), Box::new(self.go(b))),
            Stmt::Either(e, x, l, y, r) => {
                let mut branch = |v: &String, body: &Stmt| match self.binder(v, &[Ns::Imm]) {
                    Some(w) => {
                        let body = rename(body, Ns::Imm, v, &w);
                        let body = self.scoped(&w, Ns::Imm, &body);
                        (w, body)
                    }
                    None => (v.clone(), self.scoped(v, Ns::Imm, body)),
                };
                let (x, l) = branch(x, l);
                let (y, r) = branch(y, r);
                Stmt::Either(e.clone(), x, Box::new(l), y, Box::new(r))
            }
        }
    }
}

fn top_scope(p: &Nnrs) -> Vec<(String, Ns)> {
    vec![(DB_VAR.to_string(), Ns::Imm), (p.ret.clone(), Ns::Data)]
}

fn run(p: &Nnrs) -> (Nnrs, usize) {
    let mut u = Uncross { fresh: Fresh::new(p.names()), scope: top_scope(p), renamed: 0 };
    let body = u.go(&p.body);
    (Nnrs { body, ret: p.ret.clone() }, u.renamed)
}

/// Renames binders whose name is live in another namespace at the binding
/// point. Other binders keep their names.
pub fn uncross_shadow(p: &Nnrs) -> Nnrs {
    run(p).0
}

/// True when no variable name is bound in two namespaces along a scope path.
pub fn is_cross_shadow_free(p: &Nnrs) -> bool {
    run(p).1 == 0
}
