//! Machine-readable run reports.

use openholo_core::jumps::VisibilityFactor;
use openholo_core::ComplexMatrix;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// A complex matrix as separate real and imaginary row arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixParts {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&ComplexMatrix> for MatrixParts {
    fn from(m: &ComplexMatrix) -> Self {
        let (re, im) = m.to_parts();
        Self { re, im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub model: String,
    pub path_label: String,
    /// Closed-system holonomy of the configured path.
    pub holonomy: MatrixParts,
    /// Ideal gate and its fidelity with `holonomy`, for gate models.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gate: Option<GateSummary>,
    pub diagnostics: Diagnostics,
    pub trajectories: Vec<TrajectoryRow>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub density: Option<DensitySummary>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub robustness: Vec<RobustnessEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub table: Vec<TableRow>,
    /// Excluded from determinism comparisons.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_clock_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSummary {
    pub label: String,
    pub ideal: MatrixParts,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kappa_class: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub step_dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub completeness_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub completeness_bound: Option<f64>,
    /// Norm of the no-jump propagator's component outside the tracked subspace.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub leakage: Option<f64>,
    /// No-jump propagator on the tracked subspace.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub subspace_propagator: Option<MatrixParts>,
    /// Phase-insensitive fidelity of the rescaled subspace propagator with the holonomy.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nojump_fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub visibility: Option<VisibilityFactor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub index: usize,
    /// `(step, channel)` pairs.
    pub jumps: Vec<(usize, usize)>,
    pub weight: f64,
    /// `|<psi_ideal|psi>|^2` against the noise-free evolution.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySummary {
    pub matrix: MatrixParts,
    pub trace: f64,
    /// Trace distance to the master-equation oracle.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle_trace_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportedJump {
    pub fraction: f64,
    pub op: String,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessEntry {
    pub jumps: Vec<ReportedJump>,
    /// `robust`, `sign_flip` or `destroyed`.
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub effective_angle: Option<f64>,
    pub fidelity: f64,
    pub kappa_class: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prediction_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub route_discrepancy: Option<f64>,
    pub singular_values: Vec<f64>,
    pub holonomy: MatrixParts,
    pub subspace_map: MatrixParts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub jump: String,
    /// `+1`, `-1` or `destroyed`.
    pub algebraic: String,
    pub transported: String,
    pub fidelity: f64,
}
