//! Value universes shared by every stage and the conversions between them.

mod ejson;
mod instance;
pub mod json;
mod nra;
mod value;

pub use ejson::{data_to_ejson, ejson_to_data, EJson, LEFT_KEY, RIGHT_KEY};
pub use instance::{instance_to_data, Bag, ColumnType, Instance, Schema, TableSchema, Tuple};
pub use nra::{bag_eq, bag_intersect, bag_minus, bag_to_data, data_to_value, value_to_data, Data, Record};
pub use value::{
    cmp_int_f64, compare_values, value_total_order, ArithOp, SqlValue,
};
pub use value::{apply_arith, fold_avg, fold_max, fold_min, fold_sum, negate};
