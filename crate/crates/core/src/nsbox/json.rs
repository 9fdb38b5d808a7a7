//! `nsbox/behavior-v1` JSON file format.

use serde::{Deserialize, Serialize};

use super::behavior::{Behavior, Table};
use super::NsError;

pub const SCHEMA: &str = "nsbox/behavior-v1";
pub const ROW_ORDER: &str = "xy:00,01,10,11";
pub const COL_ORDER: &str = "ab:00,01,10,11";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BehaviorFile {
    pub schema: String,
    pub row_order: String,
    pub col_order: String,
    pub p: Table,
}

impl BehaviorFile {
    pub fn new(p: Table) -> Self {
        Self {
            schema: SCHEMA.into(),
            row_order: ROW_ORDER.into(),
            col_order: COL_ORDER.into(),
            p,
        }
    }
}

pub fn to_json(b: &Behavior) -> String {
    serde_json::to_string(&BehaviorFile::new(*b.table())).expect("plain data serializes")
}

/// Parses the raw table without validating it as a behavior, so callers can report
/// invariant violations separately from schema errors.
pub fn parse_table(text: &str) -> Result<Table, NsError> {
    let file: BehaviorFile =
        serde_json::from_str(text).map_err(|e| NsError::Schema(e.to_string()))?;
    if file.schema != SCHEMA {
        return Err(NsError::Schema(format!("unknown schema {:?}", file.schema)));
    }
    if file.row_order != ROW_ORDER || file.col_order != COL_ORDER {
        return Err(NsError::Schema(format!(
            "unsupported ordering row_order={:?} col_order={:?}",
            file.row_order, file.col_order
        )));
    }
    Ok(file.p)
}

pub fn from_json(text: &str) -> Result<Behavior, NsError> {
    Behavior::new(parse_table(text)?)
}
