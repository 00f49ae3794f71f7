//! Named pass/fail checks shared by the verification reports.

use serde::Serialize;

/// One verification step: a stable name, the outcome, and a human-readable
/// detail line (counts, orders, or the reason for a failure).
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, pass: bool, details: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            pass,
            details: details.into(),
        }
    }
}

/// True when every check passed.
pub fn all_pass(checks: &[CheckResult]) -> bool {
    checks.iter().all(|c| c.pass)
}
