//! SQL_Alg: a relational algebra whose expressions are evaluated in a
//! stack of environment slices. Its interpreter is the reference semantics
//! for the whole pipeline.

mod ast;
mod bool3;
mod eval;
mod parse;
mod print;
mod wf;

pub use ast::{AggFn, Expr, Formula, Pred, Quantifier, Query, Select};
pub use bool3::Bool3;
pub use eval::{eval_expr, eval_formula, eval_query, find_eval_env, Env, Slice};
pub use parse::parse_query;
pub use wf::{check_query, find_eval_index, is_built_upon, sort_of, StaticSlice};
