//! From the algebra to statements: NRAe is translated to a named calculus
//! (NNRC), stratified, turned into a statement language with three
//! namespaces (NNRS), made cross-shadow-free and finally collapsed into a
//! single-namespace statement language (NNRSimp).

mod expr;
mod nnrc;
mod nnrs;
mod nnrsimp;
mod shadow;
mod stratify;

pub use expr::{eval_expr, Expr};
pub use nnrc::{eval_nnrc, eval_nnrc_top, nrae_to_nnrc, nrae_to_nnrc_top, Nnrc, DB_VAR, ENV_VAR};
pub use nnrs::{check_phases, eval_nnrs, nnrc_to_nnrs, Nnrs, Stmt, RET_VAR};
pub(crate) use nnrsimp::as_push;
pub use nnrsimp::{check_nnrsimp, eval_nnrsimp, nnrs_to_nnrsimp, ImpStmt, NnrsImp};
pub use shadow::{is_cross_shadow_free, uncross_shadow};
pub use stratify::{is_stratified, stratify};

use std::collections::{BTreeMap, BTreeSet};

/// A generator of names `base$N` that avoids every name in `used`. Numbers
/// for a given base increase in generation order.
pub(crate) struct Fresh {
    used: BTreeSet<String>,
    next: BTreeMap<String, usize>,
}

impl Fresh {
    pub(crate) fn new(used: BTreeSet<String>) -> Fresh {
        Fresh { used, next: BTreeMap::new() }
    }

    pub(crate) fn name(&mut self, base: &str) -> String {
        let n = self.next.entry(base.to_string()).or_insert(0);
        loop {
            let cand = format!("{}${}", base, n);
            *n += 1;
            if self.used.insert(cand.clone()) {
                return cand;
            }
        }
    }
}
