//! Dense Lindblad master-equation integrator.
//!
//! Serves as the reference the trajectory engine is checked against, so it
//! is deliberately simple: classical RK4 on the full density matrix, with
//! positivity monitored but never repaired.

use crate::holonomy::{HolonomyError, IsospectralFamily, ParameterPath};
use crate::linalg::{c64, ComplexMatrix, DensityMatrix, LinalgError};

/// Tolerance for `kappa` being hermitian positive semidefinite.
pub const KAPPA_TOL: f64 = 1e-10;
/// Tolerance of the two proportionality tests in [`classify_kappa`].
pub const CLASSIFY_TOL: f64 = 1e-9;
/// Most negative eigenvalue tolerated before [`evolve`] gives up.
pub const POSITIVITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LindbladError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
    #[error("lindblad: {0}")]
    Domain(String),
    #[error("lindblad: integration failure at t = {time}: eigenvalue {min_eigenvalue} (dt too large)")]
    IntegrationFailure { time: f64, min_eigenvalue: f64 },
}

/// Where `H(t)` comes from.
#[derive(Debug, Clone)]
pub enum HamiltonianSource {
    Fixed(ComplexMatrix),
    /// `H(t) = H(lambda(t / T))`, with the path traversed uniformly in sample index.
    Path {
        family: Box<IsospectralFamily>,
        path: ParameterPath,
        total_time: f64,
    },
}

#[derive(Debug, Clone)]
pub struct LindbladModel {
    source: HamiltonianSource,
    ops: Vec<ComplexMatrix>,
    kappa: ComplexMatrix,
}

impl LindbladModel {
    /// Constant Hamiltonian. Rates are folded into the operators.
    pub fn fixed(h: ComplexMatrix, ops: Vec<ComplexMatrix>) -> Result<Self, LindbladError> {
        if !h.is_square() || !h.is_hermitian(1e-10 * h.norm_fro().max(1.0)) {
            return Err(LindbladError::Domain("hamiltonian must be square and hermitian".into()));
        }
        let dim = h.rows();
        Self::build(HamiltonianSource::Fixed(h), dim, ops)
    }

    pub fn along_path(
        family: IsospectralFamily,
        path: ParameterPath,
        total_time: f64,
        ops: Vec<ComplexMatrix>,
    ) -> Result<Self, LindbladError> {
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(LindbladError::Domain(format!(
                "total time must be positive, got {total_time}"
            )));
        }
        if path.dim() != family.param_dim() {
            return Err(LindbladError::Domain(format!(
                "path has {} coordinates, family {} takes {}",
                path.dim(),
                family.name(),
                family.param_dim()
            )));
        }
        let dim = family.dim();
        Self::build(
            HamiltonianSource::Path {
                family: Box::new(family),
                path,
                total_time,
            },
            dim,
            ops,
        )
    }

    fn build(source: HamiltonianSource, dim: usize, ops: Vec<ComplexMatrix>) -> Result<Self, LindbladError> {
        let mut kappa = ComplexMatrix::zeros(dim, dim);
        for (k, l) in ops.iter().enumerate() {
            if l.shape() != (dim, dim) {
                return Err(LindbladError::Domain(format!(
                    "lindblad operator {k} has shape {:?}, system dimension is {dim}",
                    l.shape()
                )));
            }
            kappa = &kappa + &(&l.dagger() * l);
        }
        let scale = kappa.norm_fro().max(1.0);
        if !kappa.is_hermitian(KAPPA_TOL * scale) {
            return Err(LindbladError::Domain("kappa is not hermitian".into()));
        }
        Ok(Self {
            source,
            ops,
            kappa: kappa.hermitian_part(),
        })
    }

    pub fn dim(&self) -> usize {
        self.kappa.rows()
    }

    pub fn source(&self) -> &HamiltonianSource {
        &self.source
    }

    pub fn lindblad_ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    /// `kappa = sum_k L_k^dagger L_k`.
    pub fn kappa(&self) -> &ComplexMatrix {
        &self.kappa
    }

    /// Duration of the driven protocol, if the Hamiltonian follows a path.
    pub fn total_time(&self) -> Option<f64> {
        match &self.source {
            HamiltonianSource::Fixed(_) => None,
            HamiltonianSource::Path { total_time, .. } => Some(*total_time),
        }
    }

    pub fn hamiltonian_at(&self, t: f64) -> Result<ComplexMatrix, LindbladError> {
        match &self.source {
            HamiltonianSource::Fixed(h) => Ok(h.clone()),
            HamiltonianSource::Path {
                family,
                path,
                total_time,
            } => Ok(family.hamiltonian(&path.point_at(t / total_time))?),
        }
    }

    /// Effective non-hermitian generator `H(t) - (i/2) kappa`.
    pub fn effective_hamiltonian_at(&self, t: f64) -> Result<ComplexMatrix, LindbladError> {
        Ok(&self.hamiltonian_at(t)? - &self.kappa.scale(c64(0.0, 0.5)))
    }
}

fn rhs_with(model: &LindbladModel, h: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    // -i[H, rho] - (1/2){kappa, rho} + sum_k L rho L^dagger
    let mut out = h.commutator(rho).scale(c64(0.0, -1.0));
    out = &out - &model.kappa.anticommutator(rho).scale_real(0.5);
    for l in &model.ops {
        out = &out + &(l * &(rho * &l.dagger()));
    }
    out
}

/// Right-hand side of the master equation at time `t`.
pub fn lindblad_rhs(model: &LindbladModel, rho: &DensityMatrix, t: f64) -> Result<ComplexMatrix, LindbladError> {
    if rho.dim() != model.dim() {
        return Err(LindbladError::Domain(format!(
            "state has dimension {}, model has {}",
            rho.dim(),
            model.dim()
        )));
    }
    let h = model.hamiltonian_at(t)?;
    Ok(rhs_with(model, &h, rho.matrix()))
}

/// Integrates from `t = 0` to `t_final` with RK4 steps no longer than `dt`.
pub fn evolve(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
) -> Result<DensityMatrix, LindbladError> {
    if rho0.dim() != model.dim() {
        return Err(LindbladError::Domain(format!(
            "state has dimension {}, model has {}",
            rho0.dim(),
            model.dim()
        )));
    }
    if !(dt.is_finite() && dt > 0.0) || !(t_final.is_finite() && t_final >= 0.0) {
        return Err(LindbladError::Domain(format!(
            "need dt > 0 and t_final >= 0, got dt = {dt}, t_final = {t_final}"
        )));
    }
    if t_final == 0.0 {
        return Ok(rho0.clone());
    }
    let steps = ((t_final / dt) - 1e-9).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    let mut rho = rho0.matrix().clone();
    for n in 0..steps {
        let t = n as f64 * h;
        let h0 = model.hamiltonian_at(t)?;
        let hm = model.hamiltonian_at(t + 0.5 * h)?;
        let h1 = model.hamiltonian_at(t + h)?;
        let k1 = rhs_with(model, &h0, &rho);
        let k2 = rhs_with(model, &hm, &(&rho + &k1.scale_real(0.5 * h)));
        let k3 = rhs_with(model, &hm, &(&rho + &k2.scale_real(0.5 * h)));
        let k4 = rhs_with(model, &h1, &(&rho + &k3.scale_real(h)));
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(2.0);
        rho = (&rho + &incr.scale_real(h / 6.0)).hermitian_part();
        let min_eigenvalue = DensityMatrix::from_hermitian_part(&rho).min_eigenvalue();
        if min_eigenvalue < -POSITIVITY_TOL {
            return Err(LindbladError::IntegrationFailure {
                time: t + h,
                min_eigenvalue,
            });
        }
    }
    Ok(DensityMatrix::from_hermitian_part(&rho))
}

/// Outcome of [`classify_kappa`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaClass {
    /// `kappa = alpha * 1`.
    Identity { alpha: f64 },
    /// `kappa = alpha * H0`.
    ProportionalToH { alpha: f64 },
    /// Neither. `ladder` is set when some operator is a nonzero nilpotent
    /// (`L^2 = 0`), the raising/lowering case.
    Other { ladder: bool },
}

impl KappaClass {
    /// Whether the degeneracy structure of `H0` is guaranteed to survive.
    pub fn preserves_degeneracy(&self) -> bool {
        !matches!(self, KappaClass::Other { .. })
    }
}

/// Tests `kappa = alpha 1`, then `kappa = alpha H0`, each with the
/// least-squares `alpha`.
pub fn classify_kappa(model: &LindbladModel, h0: &ComplexMatrix) -> KappaClass {
    let kappa = &model.kappa;
    let n = model.dim();
    let scale = kappa.norm_fro().max(1.0);
    let alpha = kappa.trace().re / n as f64;
    if kappa.distance(&ComplexMatrix::identity(n).scale_real(alpha)) <= CLASSIFY_TOL * scale {
        return KappaClass::Identity { alpha };
    }
    if h0.shape() == kappa.shape() {
        let hh = (h0 * h0).trace().re;
        if hh > 0.0 {
            let alpha = (h0 * kappa).trace().re / hh;
            if kappa.distance(&h0.scale_real(alpha)) <= CLASSIFY_TOL * scale {
                return KappaClass::ProportionalToH { alpha };
            }
        }
    }
    let ladder = model.ops.iter().any(|l| {
        let norm = l.norm_fro();
        norm > 0.0 && (l * l).norm_fro() <= CLASSIFY_TOL * norm * norm
    });
    KappaClass::Other { ladder }
}
