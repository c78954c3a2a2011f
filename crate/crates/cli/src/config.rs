//! Run configuration: a TOML document, validated field by field.
//!
//! ```toml
//! mode = "enumerate"        # nojump | enumerate | montecarlo | master | robustness
//! dt = 1e-3                 # default 1e-3
//! total_time = 0.1          # required except in robustness mode
//! seed = 0                  # default 0
//! max_jumps = 2             # enumerate mode, default 2
//! n_traj = 1000             # montecarlo mode, default 1000
//! initial_state = [[1.0, 0.0], [0.0, 0.0]]   # optional (re, im) pairs
//!
//! [model]
//! id = "qubit_gate"         # spin_half | qubit_gate | two_qubit_gate
//! axis = 1                  # qubit_gate
//! axes = [1, 1]             # two_qubit_gate
//! angle = 0.7               # gate angle (enclosed solid angle)
//! gap = 50.0
//!
//! [path]
//! kind = "sphere_loop"      # sphere_loop | latitude | waypoints
//! theta = 0.9               # polar angle; defaults to the gate angle's latitude
//! latitude_steps = 1024
//! meridian_steps = 16
//! phi_start = 0.0           # latitude
//! phi_end = 6.283185307179586
//! waypoints = [[0.0, 0.0], [0.5, 1.0]]       # waypoints
//! steps_per_leg = 100
//!
//! [[noise]]
//! op = "Z"                  # I X Y Z + - or two-letter Pauli strings such as "XI"
//! rate = 0.1
//!
//! [robustness]
//! fractions = [0.25, 0.5, 0.75]
//! patterns = [[{ fraction = 0.2, op = 0 }, { fraction = 0.6, op = 0 }]]
//! table = true
//!
//! [output]
//! dir = "out"
//! structured = true         # report.json
//! tabular = true            # trajectories.csv
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_MAX_JUMPS: usize = 2;
pub const DEFAULT_N_TRAJ: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Nojump,
    Enumerate,
    Montecarlo,
    Master,
    Robustness,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::Nojump,
        Mode::Enumerate,
        Mode::Montecarlo,
        Mode::Master,
        Mode::Robustness,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Nojump => "nojump",
            Mode::Enumerate => "enumerate",
            Mode::Montecarlo => "montecarlo",
            Mode::Master => "master",
            Mode::Robustness => "robustness",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown mode `{s}` (expected nojump, enumerate, montecarlo, master or robustness)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_time: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_jumps")]
    pub max_jumps: usize,
    #[serde(default = "default_n_traj")]
    pub n_traj: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<Vec<[f64; 2]>>,
    pub model: ModelConfig,
    #[serde(default)]
    pub path: PathConfig,
    #[serde(default)]
    pub noise: Vec<NoiseConfig>,
    #[serde(default)]
    pub robustness: RobustnessConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_max_jumps() -> usize {
    DEFAULT_MAX_JUMPS
}

fn default_n_traj() -> usize {
    DEFAULT_N_TRAJ
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    SpinHalf,
    QubitGate,
    TwoQubitGate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub id: ModelId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default = "default_gap")]
    pub gap: f64,
}

fn default_gap() -> f64 {
    openholo_core::holonomy::catalog::DEFAULT_GAP
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    #[default]
    SphereLoop,
    Latitude,
    Waypoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    #[serde(default)]
    pub kind: PathKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default = "default_latitude_steps")]
    pub latitude_steps: usize,
    #[serde(default = "default_meridian_steps")]
    pub meridian_steps: usize,
    #[serde(default)]
    pub phi_start: f64,
    #[serde(default = "default_phi_end")]
    pub phi_end: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub waypoints: Vec<[f64; 2]>,
    #[serde(default = "default_steps_per_leg")]
    pub steps_per_leg: usize,
}

fn default_latitude_steps() -> usize {
    1024
}

fn default_meridian_steps() -> usize {
    16
}

fn default_phi_end() -> f64 {
    std::f64::consts::TAU
}

fn default_steps_per_leg() -> usize {
    100
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            kind: PathKind::default(),
            theta: None,
            latitude_steps: default_latitude_steps(),
            meridian_steps: default_meridian_steps(),
            phi_start: 0.0,
            phi_end: default_phi_end(),
            waypoints: Vec::new(),
            steps_per_leg: default_steps_per_leg(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub op: String,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternJump {
    pub fraction: f64,
    pub op: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustnessConfig {
    #[serde(default = "default_fractions")]
    pub fractions: Vec<f64>,
    #[serde(default)]
    pub patterns: Vec<Vec<PatternJump>>,
    #[serde(default = "default_true")]
    pub table: bool,
}

fn default_fractions() -> Vec<f64> {
    vec![0.25, 0.5, 0.75]
}

fn default_true() -> bool {
    true
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        Self {
            fractions: default_fractions(),
            patterns: Vec::new(),
            table: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_true")]
    pub structured: bool,
    #[serde(default = "default_true")]
    pub tabular: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            structured: true,
            tabular: true,
        }
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let config: RunConfig = toml::from_str(text).map_err(|e| CliError::Validation(describe_toml_error(&e)))?;
    config.validate()?;
    Ok(config)
}

/// Appends a "did you mean" hint to unknown-field errors.
fn describe_toml_error(e: &toml::de::Error) -> String {
    let msg = e.to_string();
    let Some(rest) = msg.split("unknown field `").nth(1) else {
        return msg;
    };
    let unknown = rest.split('`').next().unwrap_or_default();
    let expected: Vec<&str> = rest
        .split("expected")
        .nth(1)
        .map(|s| s.split('`').skip(1).step_by(2).collect())
        .unwrap_or_default();
    let distance = |cand: &str| strsim::damerau_levenshtein(unknown, cand);
    let Some(best) = expected.iter().map(|c| distance(c)).min().filter(|d| *d <= 2) else {
        return msg;
    };
    let names: Vec<String> = expected
        .iter()
        .filter(|c| distance(c) == best)
        .map(|c| format!("`{c}`"))
        .collect();
    format!("{msg}\nhint: did you mean {}?", names.join(" or "))
}

fn invalid(field: &str, detail: impl fmt::Display) -> CliError {
    CliError::Validation(format!("{field}: {detail}"))
}

fn positive(field: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be a positive finite number, got {x}")))
    }
}

fn finite(field: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be finite, got {x}")))
    }
}

/// Code-space dimension of each model.
pub fn code_dim(id: ModelId) -> usize {
    match id {
        ModelId::SpinHalf | ModelId::QubitGate => 2,
        ModelId::TwoQubitGate => 4,
    }
}

/// System dimension of each model.
pub fn system_dim(id: ModelId) -> usize {
    match id {
        ModelId::SpinHalf => 2,
        ModelId::QubitGate => 4,
        ModelId::TwoQubitGate => 6,
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("dt", self.dt)?;
        if self.mode != Mode::Robustness {
            match self.total_time {
                Some(t) => positive("total_time", t)?,
                None => return Err(invalid("total_time", format!("required in {} mode", self.mode))),
            }
            if let Some(t) = self.total_time {
                if self.dt > t {
                    return Err(invalid("dt", format!("{} exceeds total_time {t}", self.dt)));
                }
            }
        }
        if self.mode == Mode::Montecarlo && self.n_traj == 0 {
            return Err(invalid("n_traj", "must be at least 1"));
        }
        self.validate_model()?;
        self.validate_path()?;
        for (i, n) in self.noise.iter().enumerate() {
            let rate_ok = n.rate.is_finite() && n.rate >= 0.0;
            if !rate_ok {
                return Err(invalid(
                    &format!("noise[{i}].rate"),
                    format!("must be non-negative, got {}", n.rate),
                ));
            }
            crate::runner::noise_operator(self.model.id, &n.op).map_err(|e| invalid(&format!("noise[{i}].op"), e))?;
        }
        if let Some(psi) = &self.initial_state {
            let dim = system_dim(self.model.id);
            if psi.len() != dim {
                return Err(invalid(
                    "initial_state",
                    format!("needs {dim} amplitudes, got {}", psi.len()),
                ));
            }
            if psi.iter().flatten().any(|x| !x.is_finite()) {
                return Err(invalid("initial_state", "amplitudes must be finite"));
            }
            let norm: f64 = psi.iter().map(|[a, b]| a * a + b * b).sum();
            if norm == 0.0 {
                return Err(invalid("initial_state", "state must be nonzero"));
            }
        }
        self.validate_robustness()?;
        if self.output.dir.as_os_str().is_empty() {
            return Err(invalid("output.dir", "must not be empty"));
        }
        Ok(())
    }

    fn validate_model(&self) -> Result<(), CliError> {
        let m = &self.model;
        positive("model.gap", m.gap)?;
        if let Some(a) = m.angle {
            if !(a > 0.0 && a < 4.0 * std::f64::consts::PI) {
                return Err(invalid("model.angle", format!("must lie in (0, 4 pi), got {a}")));
            }
        }
        match m.id {
            ModelId::SpinHalf => {
                if m.axis.is_some() || m.axes.is_some() {
                    return Err(invalid("model.axis", "spin_half takes no axis"));
                }
            }
            ModelId::QubitGate => match m.axis {
                Some(1..=3) => {}
                Some(a) => return Err(invalid("model.axis", format!("must be 1, 2 or 3, got {a}"))),
                None => return Err(invalid("model.axis", "required for qubit_gate")),
            },
            ModelId::TwoQubitGate => match m.axes {
                Some([1..=2, 1..=2]) => {}
                Some(a) => return Err(invalid("model.axes", format!("entries must be 1 or 2, got {a:?}"))),
                None => return Err(invalid("model.axes", "required for two_qubit_gate")),
            },
        }
        if self.mode == Mode::Robustness {
            if m.id == ModelId::SpinHalf {
                return Err(invalid("model.id", "robustness mode needs a gate model"));
            }
            if m.angle.is_none() {
                return Err(invalid("model.angle", "required in robustness mode"));
            }
        }
        Ok(())
    }

    fn validate_path(&self) -> Result<(), CliError> {
        let p = &self.path;
        if let Some(t) = p.theta {
            if !(t.is_finite() && t > 0.0 && t < std::f64::consts::PI) {
                return Err(invalid("path.theta", format!("must lie in (0, pi), got {t}")));
            }
        }
        match p.kind {
            PathKind::SphereLoop | PathKind::Latitude => {
                if p.theta.is_none() && self.model.angle.is_none() {
                    return Err(invalid("path.theta", "required unless model.angle is given"));
                }
                if p.latitude_steps == 0 {
                    return Err(invalid("path.latitude_steps", "must be at least 1"));
                }
                if p.kind == PathKind::SphereLoop && p.meridian_steps == 0 {
                    return Err(invalid("path.meridian_steps", "must be at least 1"));
                }
                finite("path.phi_start", p.phi_start)?;
                finite("path.phi_end", p.phi_end)?;
                if p.kind == PathKind::Latitude && p.phi_start == p.phi_end {
                    return Err(invalid("path.phi_end", "must differ from phi_start"));
                }
            }
            PathKind::Waypoints => {
                if p.waypoints.len() < 2 {
                    return Err(invalid("path.waypoints", "need at least two waypoints"));
                }
                if p.waypoints.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(invalid("path.waypoints", "coordinates must be finite"));
                }
                if p.steps_per_leg == 0 {
                    return Err(invalid("path.steps_per_leg", "must be at least 1"));
                }
            }
        }
        if self.mode == Mode::Robustness && p.kind != PathKind::SphereLoop {
            return Err(invalid("path.kind", "robustness mode uses the gate's sphere loop"));
        }
        Ok(())
    }

    fn validate_robustness(&self) -> Result<(), CliError> {
        let r = &self.robustness;
        for (i, f) in r.fractions.iter().enumerate() {
            if !(0.0..=1.0).contains(f) {
                return Err(invalid(
                    &format!("robustness.fractions[{i}]"),
                    format!("must lie in [0, 1], got {f}"),
                ));
            }
        }
        for (i, pattern) in r.patterns.iter().enumerate() {
            for (j, jump) in pattern.iter().enumerate() {
                let field = format!("robustness.patterns[{i}][{j}]");
                if !(0.0..=1.0).contains(&jump.fraction) {
                    return Err(invalid(
                        &field,
                        format!("fraction must lie in [0, 1], got {}", jump.fraction),
                    ));
                }
                if jump.op >= self.noise.len() {
                    return Err(invalid(&field, format!("op {} does not name a noise entry", jump.op)));
                }
            }
        }
        if self.mode == Mode::Robustness {
            if let Some(first) = self.noise.first() {
                if let Some((i, n)) = self.noise.iter().enumerate().find(|(_, n)| n.rate != first.rate) {
                    return Err(invalid(
                        &format!("noise[{i}].rate"),
                        format!(
                            "robustness mode needs one common rate, got {} and {}",
                            first.rate, n.rate
                        ),
                    ));
                }
                if first.rate == 0.0 {
                    return Err(invalid("noise[0].rate", "robustness mode needs a positive rate"));
                }
            }
        }
        Ok(())
    }
}
