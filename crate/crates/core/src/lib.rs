//! Compiler and reference interpreters for a SQL subset.
//!
//! Queries are lowered through a chain of intermediate languages:
//! SQL, a relational algebra with environments ([`sqlalg`]), a nested
//! relational algebra ([`nrae`]), a named calculus and two statement
//! languages ([`lowering`]), a generic imperative language ([`imp`]) and
//! finally JavaScript source text ([`js`]). Every language has an
//! interpreter so each step can be checked against the previous one.

pub mod alg2nra;
pub mod corpus;
pub mod data;
mod error;
pub mod imp;
pub mod js;
pub mod lowering;
pub mod nrae;
pub mod pipeline;
pub mod sql;
pub mod sqlalg;

pub use error::{Error, Result};
