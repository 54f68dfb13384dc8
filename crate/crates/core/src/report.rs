//! Machine-readable verification reports shared by all checkers.

use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    Exact,
    Float,
}

/// One violated identity: what failed, where, and by how much.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Finding {
    pub kind: String,
    pub location: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<Scalar>,
}

impl Finding {
    pub fn residual(kind: &str, location: String, residual: Scalar) -> Self {
        Finding {
            kind: kind.to_string(),
            location,
            lhs: None,
            rhs: None,
            residual: Some(residual),
        }
    }

    pub fn mismatch(kind: &str, location: String, lhs: Scalar, rhs: Scalar) -> Self {
        let residual = &lhs - &rhs;
        Finding {
            kind: kind.to_string(),
            location,
            lhs: Some(lhs),
            rhs: Some(rhs),
            residual: Some(residual),
        }
    }
}

/// Verdict plus sorted findings. PASS iff `findings` is empty.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub verdict: Verdict,
    pub mode: NumericMode,
    pub findings: Vec<Finding>,
}

impl Report {
    /// Findings are sorted by (location, kind) so identical inputs yield
    /// byte-identical reports regardless of evaluation order.
    pub fn new(mode: NumericMode, mut findings: Vec<Finding>) -> Self {
        findings.sort_by(|a, b| (&a.location, &a.kind).cmp(&(&b.location, &b.kind)));
        Report {
            verdict: if findings.is_empty() {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            mode,
            findings,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}
