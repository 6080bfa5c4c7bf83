use std::collections::BTreeMap;
use std::fmt;

use super::nra::{value_to_data, Data};
use super::value::SqlValue;
use crate::error::{Error, Result};

/// Attribute name to value, in canonical label order.
pub type Tuple = BTreeMap<String, SqlValue>;

/// A multiset of tuples stored in insertion order.
pub type Bag = Vec<Tuple>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnType {
    Int,
    Text,
    Bool,
    Double,
}

impl ColumnType {
    pub fn name(self) -> &'static str {
        match self {
            ColumnType::Int => "int",
            ColumnType::Text => "text",
            ColumnType::Bool => "boolean",
            ColumnType::Double => "double precision",
        }
    }

    pub fn admits(self, v: &SqlValue) -> bool {
        matches!(
            (self, v),
            (_, SqlValue::Null)
                | (ColumnType::Int, SqlValue::Int(_))
                | (ColumnType::Text, SqlValue::Text(_))
                | (ColumnType::Bool, SqlValue::Bool(_))
                | (ColumnType::Double, SqlValue::Double(_))
        )
    }
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableSchema {
    pub name: String,
    pub columns: Vec<(String, ColumnType)>,
}

impl TableSchema {
    /// The attribute name under which a column appears in instance tuples.
    pub fn qualified(&self, column: &str) -> String {
        format!("{}.{}", self.name, column)
    }

    pub fn column_type(&self, column: &str) -> Option<ColumnType> {
        self.columns.iter().find(|(c, _)| c == column).map(|(_, t)| *t)
    }
}

/// Table declarations in the order they were created.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Schema {
    pub tables: Vec<TableSchema>,
}

impl Schema {
    pub fn table(&self, name: &str) -> Option<&TableSchema> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Declares a table. Names may not contain `.` or `$`, which are
    /// reserved for qualified and generated names.
    pub fn add(&mut self, t: TableSchema) -> Result<()> {
        for n in std::iter::once(&t.name).chain(t.columns.iter().map(|(c, _)| c)) {
            if n.contains(['.', '$']) || n.is_empty() {
                return Err(Error::ReservedLabel(n.clone()));
            }
        }
        if self.table(&t.name).is_some() {
            return Err(Error::IllFormed(format!("table `{}` declared twice", t.name)));
        }
        for (i, (c, _)) in t.columns.iter().enumerate() {
            if t.columns[..i].iter().any(|(d, _)| d == c) {
                return Err(Error::IllFormed(format!("column `{}` declared twice", c)));
            }
        }
        self.tables.push(t);
        Ok(())
    }
}

/// A database: every declared table with its contents.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub schema: Schema,
    pub tables: BTreeMap<String, Bag>,
}

impl Instance {
    /// An instance where every table is empty.
    pub fn empty(schema: Schema) -> Instance {
        let tables = schema.tables.iter().map(|t| (t.name.clone(), Vec::new())).collect();
        Instance { schema, tables }
    }

    pub fn table(&self, name: &str) -> Option<&Bag> {
        self.tables.get(name)
    }

    /// Checks every tuple against the schema.
    pub fn validate(&self) -> Result<()> {
        for t in &self.schema.tables {
            let rows = self
                .tables
                .get(&t.name)
                .ok_or_else(|| Error::Instance(format!("missing table `{}`", t.name)))?;
            for row in rows {
                if row.len() != t.columns.len() {
                    return Err(Error::Instance(format!("row of `{}` has wrong arity", t.name)));
                }
                for (c, ty) in &t.columns {
                    let v = row.get(&t.qualified(c)).ok_or_else(|| {
                        Error::Instance(format!("row of `{}` lacks `{}`", t.name, c))
                    })?;
                    if !ty.admits(v) {
                        return Err(Error::Instance(format!(
                            "value {} in `{}.{}` is not of type {}",
                            v, t.name, c, ty
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The instance as one record mapping table names to bags of records.
pub fn instance_to_data(i: &Instance) -> Data {
    Data::record(i.tables.iter().map(|(name, bag)| {
        let rows = bag
            .iter()
            .map(|t| Data::record(t.iter().map(|(k, v)| (k.clone(), value_to_data(v)))))
            .collect();
        (name.clone(), Data::bag(rows))
    }))
}
