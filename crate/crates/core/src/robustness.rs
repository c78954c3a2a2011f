//! The holonomic gate set under quantum jumps.
//!
//! A jump `W` that anticommutes with the gate generator `K` reverses the
//! sign of the angle accumulated after it, so a trajectory with jumps
//! realizes `W_n ... W_1 exp(i theta_e K)` with
//! `theta_e = sum_m s_m theta_m`, where `theta_m` is the solid angle swept
//! between jumps and `s_m` the product of the signs of all earlier jumps.
//! Jumps that commute with `K` are harmless; raising and lowering jumps
//! collapse the code space and destroy the gate.

use rayon::prelude::*;

use crate::holonomy::catalog::{self, DEFAULT_GAP};
use crate::holonomy::{
    connection_at, holonomy, holonomy_with_jumps, ControlManifold, HolonomyError, IsospectralFamily, Jump,
    ParameterPath, SphereLoop, JUMP_UNITARITY_TOL,
};
use crate::linalg::{c64, pauli, phase_insensitive_fidelity, singular_values, tensor, ComplexMatrix};
use crate::lindblad::{classify_kappa, KappaClass, LindbladError, LindbladModel};

/// Default fidelity threshold of the `Robust` verdict.
pub const ROBUST_TOL: f64 = 1e-6;
/// Largest tolerated gap between predicted and transported holonomy.
pub const CONSISTENCY_TOL: f64 = 1e-4;
/// Closed-system gate accuracy demanded of a [`GateSpec`].
pub const GATE_TOL: f64 = 1e-6;
/// Default number of samples on the latitude leg of a gate loop.
pub const DEFAULT_LATITUDE_STEPS: usize = 1024;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RobustnessError {
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
    #[error(transparent)]
    Lindblad(#[from] LindbladError),
    #[error("robustness: {0}")]
    Domain(String),
    #[error("robustness: jump operator is neither Pauli-type nor a ladder operator: {0}")]
    NotPauliType(String),
    #[error("robustness: prediction and transport disagree by {distance:e}")]
    InternalConsistency { distance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    SingleQubit { axis: usize, angle: f64 },
    TwoQubit { axes: (usize, usize), angle: f64 },
}

impl GateKind {
    pub fn angle(&self) -> f64 {
        match *self {
            GateKind::SingleQubit { angle, .. } | GateKind::TwoQubit { angle, .. } => angle,
        }
    }

    /// Gate generator `K` in code coordinates.
    pub fn generator(&self) -> ComplexMatrix {
        match *self {
            GateKind::SingleQubit { axis, .. } => pauli::sigma(axis),
            GateKind::TwoQubit { axes: (i, j), .. } => tensor(&pauli::sigma(i), &pauli::sigma(j)),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            GateKind::SingleQubit { axis, angle } => format!("exp(i {angle} sigma{axis})"),
            GateKind::TwoQubit { axes: (i, j), angle } => format!("exp(i {angle} sigma{i} x sigma{j})"),
        }
    }
}

/// A gate together with the family and loop that realize it.
#[derive(Debug, Clone)]
pub struct GateSpec {
    pub kind: GateKind,
    pub family: IsospectralFamily,
    pub sphere_loop: SphereLoop,
}

impl GateSpec {
    pub fn single_qubit(axis: usize, angle: f64) -> Result<Self, RobustnessError> {
        Self::build(
            GateKind::SingleQubit { axis, angle },
            DEFAULT_GAP,
            DEFAULT_LATITUDE_STEPS,
        )
    }

    pub fn two_qubit(i: usize, j: usize, angle: f64) -> Result<Self, RobustnessError> {
        Self::build(
            GateKind::TwoQubit { axes: (i, j), angle },
            DEFAULT_GAP,
            DEFAULT_LATITUDE_STEPS,
        )
    }

    /// Builds the family and loop for `kind` and checks that the
    /// closed-system holonomy is the ideal gate within [`GATE_TOL`].
    pub fn build(kind: GateKind, gap: f64, latitude_steps: usize) -> Result<Self, RobustnessError> {
        let angle = kind.angle();
        if !(angle > 0.0 && angle < 4.0 * std::f64::consts::PI) {
            return Err(RobustnessError::Domain(format!(
                "gate angle must lie in (0, 4 pi), got {angle}"
            )));
        }
        if !(gap.is_finite() && gap > 0.0) {
            return Err(RobustnessError::Domain(format!("gap must be positive, got {gap}")));
        }
        let family = match kind {
            GateKind::SingleQubit { axis, .. } => catalog::single_qubit_gate(axis, gap)?,
            GateKind::TwoQubit { axes: (i, j), .. } => catalog::two_qubit_gate(i, j, gap)?,
        };
        let theta = catalog::latitude_for_solid_angle(angle);
        let sphere_loop = SphereLoop::new(theta, latitude_steps, 16)?;
        let gate = Self {
            kind,
            family,
            sphere_loop,
        };
        let err = holonomy(&gate.family, gate.path())?.u.distance(&gate.ideal());
        if err > GATE_TOL {
            return Err(RobustnessError::Domain(format!(
                "loop realizes the gate only to {err:e}"
            )));
        }
        Ok(gate)
    }

    pub fn path(&self) -> &ParameterPath {
        &self.sphere_loop.path
    }

    pub fn generator(&self) -> ComplexMatrix {
        self.kind.generator()
    }

    pub fn ideal(&self) -> ComplexMatrix {
        catalog::involutory_exp(&self.generator(), self.kind.angle())
    }

    pub fn code_dim(&self) -> usize {
        self.family.subspace_dim()
    }

    /// Path sample at fraction `f` of the latitude leg.
    pub fn jump_sample(&self, fraction: f64) -> usize {
        self.sphere_loop.latitude_index(fraction)
    }
}

/// Error operators in code coordinates, all sharing one rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorChannel {
    pub ops: Vec<ComplexMatrix>,
    pub rate: f64,
}

impl ErrorChannel {
    pub fn new(ops: Vec<ComplexMatrix>, rate: f64) -> Result<Self, RobustnessError> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(RobustnessError::Domain(format!(
                "rate must be non-negative, got {rate}"
            )));
        }
        if let Some(op) = ops.iter().find(|o| !o.is_square() || o.rows() != ops[0].rows()) {
            return Err(RobustnessError::Domain(format!(
                "operator of shape {:?} does not fit the channel",
                op.shape()
            )));
        }
        Ok(Self { ops, rate })
    }

    fn check_fits(&self, gate: &GateSpec) -> Result<(), RobustnessError> {
        if self.ops.iter().any(|o| o.rows() != gate.code_dim()) {
            return Err(RobustnessError::Domain(format!(
                "channel operators must act on the {}-dimensional code space",
                gate.code_dim()
            )));
        }
        Ok(())
    }

    /// `L_k = sqrt(rate) op_k` on the full system. Unitary operators act as
    /// the identity outside the code space; ladder operators as zero.
    pub fn lindblad_ops(&self, gate: &GateSpec) -> Result<Vec<ComplexMatrix>, RobustnessError> {
        self.check_fits(gate)?;
        self.ops
            .iter()
            .map(|op| {
                let unitary = op.is_unitary(JUMP_UNITARITY_TOL);
                Ok(catalog::embed_code_operator(&gate.family, op, unitary)?.scale_real(self.rate.sqrt()))
            })
            .collect()
    }

    /// Classification of `kappa` against the family's `H0`.
    pub fn classify(&self, gate: &GateSpec) -> Result<KappaClass, RobustnessError> {
        let h0 = gate.family.h0().clone();
        let model = LindbladModel::fixed(h0.clone(), self.lindblad_ops(gate)?)?;
        Ok(classify_kappa(&model, &h0))
    }
}

/// A jump on the latitude leg of a gate loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpSpec {
    /// Fraction of the latitude leg in `[0, 1]`.
    pub fraction: f64,
    /// Index into [`ErrorChannel::ops`].
    pub op: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Robust,
    SignFlipLaw { effective_angle: f64 },
    GateDestroyed { residual: ComplexMatrix },
}

#[derive(Debug, Clone)]
pub struct RobustnessReport {
    pub gate: GateKind,
    pub channel: ErrorChannel,
    pub kappa_class: KappaClass,
    pub jump_pattern: Vec<JumpSpec>,
    /// Control parameters at each jump.
    pub jump_points: Vec<Vec<f64>>,
    pub verdict: Verdict,
    pub effective_angle: Option<f64>,
    pub fidelity: f64,
    /// Transported code-space holonomy in the jumped frame.
    pub holonomy: ComplexMatrix,
    /// `C u`, the full action of the trajectory on code coordinates.
    pub subspace_map: ComplexMatrix,
    /// Singular values of `subspace_map`, descending.
    pub singular_values: Vec<f64>,
    /// Distance between `exp(i theta_e K)` and the transported holonomy.
    pub prediction_error: Option<f64>,
    pub route_discrepancy: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConjugationSign {
    Plus,
    Minus,
    Destroyed,
}

impl ConjugationSign {
    pub fn as_i8(self) -> Option<i8> {
        match self {
            ConjugationSign::Plus => Some(1),
            ConjugationSign::Minus => Some(-1),
            ConjugationSign::Destroyed => None,
        }
    }
}

/// Sign of `J^dagger K J = +- alpha K`; `Destroyed` for singular `J`
/// (raising/lowering type).
pub fn conjugation_sign(k: &ComplexMatrix, j: &ComplexMatrix) -> Result<ConjugationSign, RobustnessError> {
    if j.shape() != k.shape() {
        return Err(RobustnessError::Domain(format!(
            "jump {:?} vs generator {:?}",
            j.shape(),
            k.shape()
        )));
    }
    let n = j.rows();
    let alpha = (j.dagger() * j.clone()).trace().re / n as f64;
    let sv = singular_values(j);
    if alpha <= 0.0 || sv.last().copied().unwrap_or(0.0) <= 1e-10 * sv[0] {
        return Ok(ConjugationSign::Destroyed);
    }
    let wdw = j.dagger() * j.clone();
    if wdw.distance(&ComplexMatrix::identity(n).scale_real(alpha)) > JUMP_UNITARITY_TOL * alpha.max(1.0) {
        return Err(RobustnessError::NotPauliType(
            "J^dagger J is not proportional to the identity".into(),
        ));
    }
    let conj = j.sandwich(k);
    let tol = 1e-9 * alpha * k.norm_fro().max(1.0);
    if conj.distance(&k.scale_real(alpha)) <= tol {
        Ok(ConjugationSign::Plus)
    } else if conj.distance(&k.scale_real(-alpha)) <= tol {
        Ok(ConjugationSign::Minus)
    } else {
        Err(RobustnessError::NotPauliType(
            "jump neither commutes nor anticommutes with the generator".into(),
        ))
    }
}

/// Partial gate angles of the segments between consecutive `jump_samples`
/// (sorted sample indices), from the abelian part
/// `theta = (i/n) tr(K a)` of the connection along each segment.
pub fn solid_angle_split(
    family: &IsospectralFamily,
    generator: &ComplexMatrix,
    path: &ParameterPath,
    jump_samples: &[usize],
) -> Result<Vec<f64>, RobustnessError> {
    if family.manifold() != ControlManifold::Sphere {
        return Err(HolonomyError::UnsupportedManifold(family.name().to_string()).into());
    }
    let n = family.subspace_dim();
    if generator.shape() != (n, n) {
        return Err(RobustnessError::Domain(
            "generator does not act on the code space".into(),
        ));
    }
    let last = path.segment_count();
    if jump_samples.windows(2).any(|w| w[0] > w[1]) || jump_samples.last().is_some_and(|&s| s > last) {
        return Err(RobustnessError::Domain(
            "jump samples must be sorted and on the path".into(),
        ));
    }
    let mut bounds = vec![0];
    bounds.extend_from_slice(jump_samples);
    bounds.push(last);
    bounds
        .windows(2)
        .map(|w| {
            let mut theta = 0.0;
            for s in w[0]..w[1] {
                let (mid, delta) = path.segment(s);
                let a = connection_at(family, &mid, &delta)?.a;
                theta += (c64(0.0, 1.0) * (generator * &a).trace()).re / n as f64;
            }
            Ok(theta)
        })
        .collect()
}

/// `sum_m (-1)^m theta_m`, first segment counted positive.
pub fn effective_angle(thetas: &[f64]) -> f64 {
    thetas
        .iter()
        .enumerate()
        .map(|(m, t)| if m % 2 == 0 { *t } else { -*t })
        .sum()
}

/// `sum_m s_m theta_m`, where `s_m` multiplies the signs of the jumps
/// preceding segment `m` (`signs.len() == thetas.len() - 1`).
pub fn effective_angle_with_signs(thetas: &[f64], signs: &[i8]) -> f64 {
    let mut s = 1.0;
    let mut total = thetas.first().copied().unwrap_or(0.0);
    for (t, sign) in thetas.iter().skip(1).zip(signs) {
        s *= f64::from(*sign);
        total += s * t;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    /// `Robust` requires fidelity at least `1 - robust_tolerance`.
    pub robust_tolerance: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            robust_tolerance: ROBUST_TOL,
        }
    }
}

pub fn analyze_gate(
    gate: &GateSpec,
    channel: &ErrorChannel,
    pattern: &[JumpSpec],
) -> Result<RobustnessReport, RobustnessError> {
    analyze_gate_with(gate, channel, pattern, AnalysisOptions::default())
}

/// Transports the code space through the jumped loop, predicts the result
/// from conjugation signs and partial angles, and classifies it.
pub fn analyze_gate_with(
    gate: &GateSpec,
    channel: &ErrorChannel,
    pattern: &[JumpSpec],
    options: AnalysisOptions,
) -> Result<RobustnessReport, RobustnessError> {
    channel.check_fits(gate)?;
    let kappa_class = channel.classify(gate)?;
    if kappa_class == (KappaClass::Other { ladder: false }) {
        return Err(RobustnessError::Domain(
            "channel kappa is neither proportional to 1 nor to H0, and has no ladder operator".into(),
        ));
    }
    if !pattern.is_empty() && channel.rate <= 0.0 {
        return Err(RobustnessError::Domain("jumps need a positive channel rate".into()));
    }
    let mut pattern = pattern.to_vec();
    for j in &pattern {
        if !(0.0..=1.0).contains(&j.fraction) || j.op >= channel.ops.len() {
            return Err(RobustnessError::Domain(format!("invalid jump {j:?}")));
        }
    }
    pattern.sort_by(|a, b| a.fraction.total_cmp(&b.fraction));
    let samples: Vec<usize> = pattern.iter().map(|j| gate.jump_sample(j.fraction)).collect();
    let jumps: Vec<Jump> = pattern
        .iter()
        .zip(&samples)
        .map(|(j, &s)| Jump::new(s, channel.ops[j.op].scale_real(channel.rate.sqrt()), channel.rate))
        .collect();
    let actual = holonomy_with_jumps(&gate.family, gate.path(), &jumps)?;
    let k = gate.generator();
    let n = gate.code_dim();
    let signs: Vec<ConjugationSign> = pattern
        .iter()
        .map(|j| conjugation_sign(&k, &channel.ops[j.op]))
        .collect::<Result<_, _>>()?;
    let sv = singular_values(&actual.subspace_map);
    let jump_points = samples.iter().map(|&s| gate.path().samples()[s].clone()).collect();
    let ideal = gate.ideal();

    let mut report = RobustnessReport {
        gate: gate.kind,
        channel: channel.clone(),
        kappa_class,
        jump_pattern: pattern,
        jump_points,
        verdict: Verdict::Robust,
        effective_angle: None,
        fidelity: 0.0,
        holonomy: actual.holonomy.u.clone(),
        subspace_map: actual.subspace_map.clone(),
        singular_values: sv,
        prediction_error: None,
        route_discrepancy: actual.route_discrepancy,
    };

    if signs.contains(&ConjugationSign::Destroyed) {
        let m = &actual.subspace_map;
        let top = report.singular_values[0];
        report.fidelity = if top > 0.0 {
            ((ideal.dagger() * m.clone()).trace().norm() / (n as f64 * top)).min(1.0)
        } else {
            0.0
        };
        report.verdict = Verdict::GateDestroyed { residual: m.clone() };
        return Ok(report);
    }

    let thetas = solid_angle_split(&gate.family, &k, gate.path(), &samples)?;
    let int_signs: Vec<i8> = signs
        .iter()
        .map(|s| s.as_i8().expect("destroyed handled above"))
        .collect();
    let theta_e = effective_angle_with_signs(&thetas, &int_signs);
    let predicted = catalog::involutory_exp(&k, theta_e);
    let distance = predicted.distance(&actual.holonomy.u);
    if distance > CONSISTENCY_TOL {
        return Err(RobustnessError::InternalConsistency { distance });
    }
    report.prediction_error = Some(distance);
    report.effective_angle = Some(theta_e);
    report.fidelity = phase_insensitive_fidelity(&ideal, &actual.holonomy.u).min(1.0);
    report.verdict = if report.fidelity >= 1.0 - options.robust_tolerance {
        Verdict::Robust
    } else {
        Verdict::SignFlipLaw {
            effective_angle: theta_e,
        }
    };
    Ok(report)
}

/// One row of the two-qubit jump table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    /// Pauli string such as `"XI"` (first qubit first).
    pub label: String,
    pub paulis: (usize, usize),
    /// From the algebra of `J^dagger K J`.
    pub algebraic: ConjugationSign,
    /// From the verdict of a transported loop with one such jump.
    pub transported: ConjugationSign,
    pub fidelity: f64,
}

/// Fraction of the loop at which [`two_qubit_table`] places its test jump.
pub const TABLE_JUMP_FRACTION: f64 = 0.25;

pub fn pauli_label(i: usize) -> char {
    ['I', 'X', 'Y', 'Z'][i]
}

/// All sixteen Pauli-pair jumps on a two-qubit gate, in row-major
/// `(first, second)` order.
pub fn two_qubit_table(gate: &GateSpec) -> Result<Vec<TableEntry>, RobustnessError> {
    if !matches!(gate.kind, GateKind::TwoQubit { .. }) {
        return Err(RobustnessError::Domain("the jump table needs a two-qubit gate".into()));
    }
    let k = gate.generator();
    (0..16)
        .into_par_iter()
        .map(|idx| {
            let (a, b) = (idx / 4, idx % 4);
            let j = tensor(&pauli::sigma(a), &pauli::sigma(b));
            let algebraic = conjugation_sign(&k, &j)?;
            let channel = ErrorChannel::new(vec![j], 1.0)?;
            let jump = JumpSpec {
                fraction: TABLE_JUMP_FRACTION,
                op: 0,
            };
            let report = analyze_gate(gate, &channel, &[jump])?;
            let transported = match report.verdict {
                Verdict::Robust => ConjugationSign::Plus,
                Verdict::SignFlipLaw { .. } => ConjugationSign::Minus,
                Verdict::GateDestroyed { .. } => ConjugationSign::Destroyed,
            };
            Ok(TableEntry {
                label: format!("{}{}", pauli_label(a), pauli_label(b)),
                paulis: (a, b),
                algebraic,
                transported,
                fidelity: report.fidelity,
            })
        })
        .collect()
}
