use serde::{Deserialize, Serialize};

/// One finding of a check: the table/line/pair indices involved and a short note.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub indices: Vec<usize>,
    pub detail: String,
}

impl Violation {
    pub fn new(indices: Vec<usize>, detail: impl Into<String>) -> Self {
        Self {
            indices,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn from_violations(check: impl Into<String>, violations: Vec<Violation>) -> Self {
        Self {
            check: check.into(),
            pass: violations.is_empty(),
            violations,
        }
    }
}
