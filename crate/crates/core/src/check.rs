use serde::{Deserialize, Serialize};

/// A named numeric check: passes iff `residual <= tolerance`.
///
/// Boolean properties are encoded with `residual` equal to the number of
/// violations and `tolerance` zero, so every check in a certificate carries a
/// number that can be diffed across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn within(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            detail: String::new(),
        }
    }

    pub fn count(name: impl Into<String>, violations: usize) -> Self {
        Check::within(name, violations as f64, 0.0)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
