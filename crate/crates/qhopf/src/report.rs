//! Machine-readable pass/fail reports shared by the library checks and the
//! CLI.

use serde::Serialize;

/// Outcome of a single structural check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    /// Name of the check, e.g. "covering" or "trivialization-a".
    pub check: String,
    /// The instance it ran on, e.g. "sphere" or "chi_p".
    pub instance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    pub status: Status,
    /// Counterexample or diagnostic, present exactly when the check failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl CheckReport {
    pub fn pass(check: &str, instance: &str, degree: Option<usize>) -> Self {
        CheckReport {
            check: check.to_string(),
            instance: instance.to_string(),
            degree,
            status: Status::Pass,
            witness: None,
        }
    }

    pub fn fail(check: &str, instance: &str, degree: Option<usize>, witness: String) -> Self {
        CheckReport {
            check: check.to_string(),
            instance: instance.to_string(),
            degree,
            status: Status::Fail,
            witness: Some(witness),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// True iff every report in the slice passed.
pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(CheckReport::passed)
}
