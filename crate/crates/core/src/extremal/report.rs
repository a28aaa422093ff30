use serde::Serialize;

use crate::eigensolver::EigenPair;
use crate::measures::Potential;

/// One outer iteration: `λ₀` of the iterate and its characterization defect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    pub lambda0: f64,
    pub residual: f64,
}

/// Result of an extremal solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalReport {
    /// The majorant estimate `λ₀(q̂)`.
    #[serde(rename = "M")]
    pub m: f64,
    pub q_hat: Potential,
    pub ground_state: EigenPair,
    pub residual: f64,
    pub constraint: f64,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}
