use serde::Serialize;
use serde_json::Value;

/// One line of a check report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub check: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl CheckEntry {
    pub fn new(check: impl Into<String>, ok: bool, witness: Option<Value>) -> Self {
        CheckEntry { check: check.into(), status: if ok { "pass" } else { "fail" }, witness }
    }

    pub fn pass(check: impl Into<String>) -> Self {
        CheckEntry::new(check, true, None)
    }

    pub fn fail(check: impl Into<String>, witness: Value) -> Self {
        CheckEntry::new(check, false, Some(witness))
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

pub fn all_passed(entries: &[CheckEntry]) -> bool {
    entries.iter().all(CheckEntry::passed)
}
