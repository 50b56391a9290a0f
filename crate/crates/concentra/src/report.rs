//! JSON-serializable verifier reports with a stable four-field schema.

use serde::{Deserialize, Serialize};

/// Relative slack granted to the exponential bounds before a comparison is
/// flagged, absorbing floating-point roundoff in probability sums.
pub const BOUND_REL_EPS: f64 = 1e-9;

/// Default `t` grid for the deviation verifiers; attained values of the
/// compared statistic are merged in where the operation calls for it.
pub const DEFAULT_T_GRID: [f64; 6] = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

/// Outcome of one exhaustive inequality sweep.
///
/// Wire schema: `{"inequality", "grid", "max_lhs_over_bound", "violations"}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerifierReport {
    pub inequality: String,
    pub grid: Vec<f64>,
    pub max_lhs_over_bound: f64,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Violation {
    pub t: f64,
    /// Level `a` for inequalities quantified over a level grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    pub lhs: f64,
    pub bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl VerifierReport {
    pub fn new(inequality: impl Into<String>, grid: Vec<f64>) -> Self {
        VerifierReport {
            inequality: inequality.into(),
            grid,
            max_lhs_over_bound: 0.0,
            violations: Vec::new(),
        }
    }

    /// Records one grid cell: updates the worst slack and flags `lhs > bound`
    /// beyond roundoff.
    pub fn record(&mut self, t: f64, level: Option<f64>, lhs: f64, bound: f64) {
        if bound > 0.0 {
            let ratio = lhs / bound;
            if ratio > self.max_lhs_over_bound {
                self.max_lhs_over_bound = ratio;
            }
        }
        if lhs > bound * (1.0 + BOUND_REL_EPS) {
            self.violations.push(Violation { t, level, lhs, bound, detail: None });
        }
    }

    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
