//! The SQL front-end: parsing, normalization and lowering to the algebra.

mod ast;
mod lexer;
mod lower;
mod normalize;
mod parser;
mod print;

pub use ast::{Cond, FromItem, FromSource, SelectBlock, SelectItem, SetOp, SqlExpr, SqlQuery, Statement};
pub use lower::to_sqlalg;
pub use normalize::{normalize, output_names};
pub use parser::parse;

use crate::data::Schema;
use crate::error::{Error, Result};

/// Splits a script into its schema and its single query.
pub fn script(stmts: Vec<Statement>) -> Result<(Schema, SqlQuery)> {
    let mut schema = Schema::default();
    let mut query = None;
    for s in stmts {
        match s {
            Statement::CreateTable(t) => {
                if query.is_some() {
                    return Err(Error::IllFormed("create table after the query".into()));
                }
                schema.add(t)?;
            }
            Statement::Query(q) => {
                if query.replace(q).is_some() {
                    return Err(Error::IllFormed("a script holds exactly one query".into()));
                }
            }
        }
    }
    let q = query.ok_or_else(|| Error::IllFormed("the script has no query".into()))?;
    Ok((schema, q))
}
