//! Verification records shared by every suite.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
    Inconclusive,
}

/// One verified identity. `anchor` names the statement being tested.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub anchor: String,
    pub status: Status,
    pub residual: f64,
    pub details: String,
}

impl Check {
    /// Passes iff `residual < threshold`.
    pub fn below(
        anchor: impl Into<String>,
        residual: f64,
        threshold: f64,
        details: impl Into<String>,
    ) -> Self {
        let status = if residual < threshold {
            Status::Pass
        } else {
            Status::Fail
        };
        Check {
            anchor: anchor.into(),
            status,
            residual: sanitize(residual),
            details: details.into(),
        }
    }

    pub fn flag(anchor: impl Into<String>, ok: bool, details: impl Into<String>) -> Self {
        Check {
            anchor: anchor.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: 0.0,
            details: details.into(),
        }
    }

    pub fn vacuous(anchor: impl Into<String>, details: impl Into<String>) -> Self {
        Check {
            anchor: anchor.into(),
            status: Status::Vacuous,
            residual: 0.0,
            details: details.into(),
        }
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, Status::Pass | Status::Vacuous)
    }
}

fn sanitize(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        f64::MAX
    }
}

/// `true` when no record failed. Inconclusive records do not count as failures.
pub fn no_failures(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.status != Status::Fail)
}

pub fn max_residual(checks: &[Check]) -> f64 {
    checks.iter().map(|c| c.residual).fold(0.0, f64::max)
}
