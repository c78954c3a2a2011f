//! Quantum-jump unraveling of the master equation.
//!
//! Time is cut into `N` steps of length `dt`. Each step either evolves
//! without a jump or applies one jump channel `W_k = sqrt(dt) L_k`:
//!
//! - [`Propagation::Exact`]: the no-jump step is `S = exp(-i H_eff(t_mid) dt)`;
//!   a jump in step `m` is `S_half W_k S_half`, i.e. it happens between the
//!   two half steps.
//! - [`Propagation::FirstOrder`]: the literal `W_0 = 1 - i H_eff dt` or `W_k`.
//!
//! States are kept non-normalized so that a record's weight is the squared
//! norm of its final state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::holonomy::HolonomyError;
use crate::linalg::{c64, matexp, ComplexMatrix, DensityMatrix, LinalgError, PureState};
use crate::lindblad::{HamiltonianSource, KappaClass, LindbladError, LindbladModel};

/// Default cap on the number of records [`enumerate_trajectories`] may produce.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JumpError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
    #[error(transparent)]
    Lindblad(#[from] LindbladError),
    #[error("jumps: {0}")]
    Domain(String),
    #[error("jumps: enumeration needs {required} records, budget is {budget}")]
    Budget { required: u64, budget: u64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Propagation {
    #[default]
    Exact,
    FirstOrder,
}

#[derive(Debug, Clone)]
pub struct JumpScheme {
    model: LindbladModel,
    dt: f64,
    total_time: f64,
    steps: usize,
    jump_ops: Vec<ComplexMatrix>,
    propagation: Propagation,
}

/// Operators of one time step.
#[derive(Debug, Clone)]
pub struct StepOps {
    propagation: Propagation,
    /// `exp(-i H_eff dt)` or `W_0`.
    pub nojump: ComplexMatrix,
    /// `exp(-i H_eff dt / 2)`; identity in first-order mode.
    pub half: ComplexMatrix,
}

impl StepOps {
    pub fn apply_nojump(&self, psi: &PureState) -> PureState {
        psi.evolve(&self.nojump)
    }

    pub fn apply_jump(&self, w: &ComplexMatrix, psi: &PureState) -> PureState {
        match self.propagation {
            Propagation::Exact => psi.evolve(&self.half).evolve(w).evolve(&self.half),
            Propagation::FirstOrder => psi.evolve(w),
        }
    }
}

/// Builds the unraveling for `model` over `[0, total_time]`. The step is
/// shrunk to `total_time / N` with `N = ceil(total_time / dt)`.
pub fn build_scheme(model: &LindbladModel, dt: f64, total_time: f64) -> Result<JumpScheme, JumpError> {
    build_scheme_with(model, dt, total_time, Propagation::Exact)
}

pub fn build_scheme_with(
    model: &LindbladModel,
    dt: f64,
    total_time: f64,
    propagation: Propagation,
) -> Result<JumpScheme, JumpError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(JumpError::Domain(format!("dt must be positive, got {dt}")));
    }
    if !(total_time.is_finite() && total_time > 0.0) {
        return Err(JumpError::Domain(format!(
            "total time must be positive, got {total_time}"
        )));
    }
    if let Some(t) = model.total_time() {
        if (t - total_time).abs() > 1e-12 * t {
            return Err(JumpError::Domain(format!(
                "model protocol lasts {t}, scheme asked for {total_time}"
            )));
        }
    }
    let steps = ((total_time / dt) - 1e-9).ceil().max(1.0) as usize;
    let dt = total_time / steps as f64;
    let jump_ops = model.lindblad_ops().iter().map(|l| l.scale_real(dt.sqrt())).collect();
    Ok(JumpScheme {
        model: model.clone(),
        dt,
        total_time,
        steps,
        jump_ops,
        propagation,
    })
}

impl JumpScheme {
    pub fn model(&self) -> &LindbladModel {
        &self.model
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn channels(&self) -> usize {
        self.jump_ops.len()
    }

    pub fn propagation(&self) -> Propagation {
        self.propagation
    }

    /// `W_k = sqrt(dt) L_k`.
    pub fn jump_ops(&self) -> &[ComplexMatrix] {
        &self.jump_ops
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// `H_eff = H - (i/2) kappa` at time `t`.
    pub fn h_eff(&self, t: f64) -> Result<ComplexMatrix, JumpError> {
        Ok(self.model.effective_hamiltonian_at(t)?)
    }

    /// `W_0 = 1 - i H_eff(t) dt`.
    pub fn w0(&self, t: f64) -> Result<ComplexMatrix, JumpError> {
        let h = self.h_eff(t)?;
        Ok(&ComplexMatrix::identity(self.dim()) - &h.scale(c64(0.0, self.dt)))
    }

    fn midpoint(&self, m: usize) -> f64 {
        (m as f64 + 0.5) * self.dt
    }

    pub fn step_ops(&self, m: usize) -> Result<StepOps, JumpError> {
        let t = self.midpoint(m);
        match self.propagation {
            Propagation::Exact => {
                let half = matexp(&self.h_eff(t)?.scale(c64(0.0, -0.5 * self.dt)))?;
                let nojump = &half * &half;
                Ok(StepOps {
                    propagation: self.propagation,
                    nojump,
                    half,
                })
            }
            Propagation::FirstOrder => Ok(StepOps {
                propagation: self.propagation,
                nojump: self.w0(t)?,
                half: ComplexMatrix::identity(self.dim()),
            }),
        }
    }

    fn all_step_ops(&self) -> Result<Vec<StepOps>, JumpError> {
        (0..self.steps).into_par_iter().map(|m| self.step_ops(m)).collect()
    }

    /// `|| W_0^dagger W_0 + sum_k W_k^dagger W_k - 1 ||` (spectral norm) at time `t`.
    pub fn completeness_defect(&self, t: f64) -> Result<f64, JumpError> {
        let w0 = self.w0(t)?;
        let mut sum = w0.sandwich(&ComplexMatrix::identity(self.dim()));
        for w in &self.jump_ops {
            sum = &sum + &(&w.dagger() * w);
        }
        Ok((&sum - &ComplexMatrix::identity(self.dim())).norm_spectral())
    }

    /// `2 (||H(t)|| + ||kappa|| / 2)^2 dt^2`.
    pub fn completeness_bound(&self, t: f64) -> Result<f64, JumpError> {
        let h = self.model.hamiltonian_at(t)?.norm_spectral();
        let k = self.model.kappa().norm_spectral();
        Ok(2.0 * (h + 0.5 * k).powi(2) * self.dt * self.dt)
    }

    /// Largest completeness defect over the step midpoints.
    pub fn max_completeness_defect(&self) -> Result<f64, JumpError> {
        let mut worst: f64 = 0.0;
        let stride = (self.steps / 64).max(1);
        for m in (0..self.steps).step_by(stride) {
            worst = worst.max(self.completeness_defect(self.midpoint(m))?);
        }
        Ok(worst)
    }
}

/// One unraveled trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// `(step index, channel)` in time order.
    pub jump_sequence: Vec<(usize, usize)>,
    /// Non-normalized final state; `weight == final_state.norm_sqr()`.
    pub final_state: PureState,
    pub weight: f64,
    /// States at every step boundary, when requested.
    pub states_log: Option<Vec<PureState>>,
}

impl TrajectoryRecord {
    fn new(jump_sequence: Vec<(usize, usize)>, final_state: PureState) -> Self {
        let weight = final_state.norm_sqr();
        Self {
            jump_sequence,
            final_state,
            weight,
            states_log: None,
        }
    }

    pub fn jump_count(&self) -> usize {
        self.jump_sequence.len()
    }
}

fn check_initial(scheme: &JumpScheme, psi0: &PureState) -> Result<(), JumpError> {
    if psi0.dim() != scheme.dim() {
        return Err(JumpError::Domain(format!(
            "initial state has dimension {}, system has {}",
            psi0.dim(),
            scheme.dim()
        )));
    }
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return Err(JumpError::Domain(format!(
            "initial state must be normalized, norm is {}",
            psi0.norm()
        )));
    }
    Ok(())
}

/// Evolves under `H_eff` alone. The squared norm of the result is the
/// no-jump probability.
pub fn nojump_propagate(scheme: &JumpScheme, psi0: &PureState) -> Result<PureState, JumpError> {
    check_initial(scheme, psi0)?;
    let mut psi = psi0.clone();
    for m in 0..scheme.steps {
        psi = scheme.step_ops(m)?.apply_nojump(&psi);
    }
    Ok(psi)
}

/// Ordered product of the no-jump step operators over the whole protocol.
pub fn nojump_propagator(scheme: &JumpScheme) -> Result<ComplexMatrix, JumpError> {
    let mut u = ComplexMatrix::identity(scheme.dim());
    for m in 0..scheme.steps {
        u = &scheme.step_ops(m)?.nojump * &u;
    }
    Ok(u)
}

/// Replays one prescribed jump sequence, optionally logging every
/// intermediate state.
pub fn replay(
    scheme: &JumpScheme,
    psi0: &PureState,
    jumps: &[(usize, usize)],
    log: bool,
) -> Result<TrajectoryRecord, JumpError> {
    check_initial(scheme, psi0)?;
    if jumps.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(JumpError::Domain("jump steps must be strictly increasing".into()));
    }
    if let Some(&(m, k)) = jumps
        .iter()
        .find(|(m, k)| *m >= scheme.steps || *k >= scheme.channels())
    {
        return Err(JumpError::Domain(format!(
            "jump ({m}, {k}) is outside {} steps / {} channels",
            scheme.steps,
            scheme.channels()
        )));
    }
    let mut states = log.then(|| vec![psi0.clone()]);
    let mut psi = psi0.clone();
    let mut next = jumps.iter().peekable();
    for m in 0..scheme.steps {
        let ops = scheme.step_ops(m)?;
        psi = match next.next_if(|(jm, _)| *jm == m) {
            Some(&(_, k)) => ops.apply_jump(&scheme.jump_ops[k], &psi),
            None => ops.apply_nojump(&psi),
        };
        if let Some(s) = states.as_mut() {
            s.push(psi.clone());
        }
    }
    let mut rec = TrajectoryRecord::new(jumps.to_vec(), psi);
    rec.states_log = states;
    Ok(rec)
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Number of records enumeration would produce.
pub fn enumeration_size(steps: usize, channels: usize, max_jumps: usize) -> u64 {
    (0..=max_jumps.min(steps) as u64)
        .map(|j| binomial(steps as u64, j).saturating_mul((channels as u64).saturating_pow(j as u32)))
        .fold(0u64, u64::saturating_add)
}

/// All trajectories with at most `max_jumps` jumps, no-jump record first,
/// then depth-first by first jump step and channel.
pub fn enumerate_trajectories(
    scheme: &JumpScheme,
    psi0: &PureState,
    max_jumps: usize,
) -> Result<Vec<TrajectoryRecord>, JumpError> {
    enumerate_trajectories_with_budget(scheme, psi0, max_jumps, DEFAULT_ENUMERATION_BUDGET)
}

pub fn enumerate_trajectories_with_budget(
    scheme: &JumpScheme,
    psi0: &PureState,
    max_jumps: usize,
    budget: u64,
) -> Result<Vec<TrajectoryRecord>, JumpError> {
    check_initial(scheme, psi0)?;
    let required = enumeration_size(scheme.steps, scheme.channels(), max_jumps);
    if required > budget {
        return Err(JumpError::Budget { required, budget });
    }
    if max_jumps == 0 || scheme.channels() == 0 {
        return Ok(vec![TrajectoryRecord::new(Vec::new(), nojump_propagate(scheme, psi0)?)]);
    }
    let ops = scheme.all_step_ops()?;
    let n = scheme.steps;
    // tails[m] = S_{N-1} ... S_m, tails[N] = 1
    let mut tails = vec![ComplexMatrix::identity(scheme.dim()); n + 1];
    for m in (0..n).rev() {
        tails[m] = &tails[m + 1] * &ops[m].nojump;
    }
    let mut heads = Vec::with_capacity(n + 1);
    heads.push(psi0.clone());
    for m in 0..n {
        let next = ops[m].apply_nojump(&heads[m]);
        heads.push(next);
    }
    let ctx = Enumerator {
        scheme,
        ops: &ops,
        tails: &tails,
        max_jumps,
    };
    let mut out = vec![TrajectoryRecord::new(Vec::new(), heads[n].clone())];
    let branches: Vec<Vec<TrajectoryRecord>> = (0..n)
        .into_par_iter()
        .map(|m| {
            let mut recs = Vec::new();
            for k in 0..scheme.channels() {
                let jumped = ops[m].apply_jump(&scheme.jump_ops[k], &heads[m]);
                ctx.descend(m + 1, jumped, vec![(m, k)], &mut recs);
            }
            recs
        })
        .collect();
    out.extend(branches.into_iter().flatten());
    Ok(out)
}

struct Enumerator<'a> {
    scheme: &'a JumpScheme,
    ops: &'a [StepOps],
    tails: &'a [ComplexMatrix],
    max_jumps: usize,
}

impl Enumerator<'_> {
    /// `psi` is the state at the start of step `start` after `jumps`.
    fn descend(&self, start: usize, psi: PureState, jumps: Vec<(usize, usize)>, out: &mut Vec<TrajectoryRecord>) {
        out.push(TrajectoryRecord::new(jumps.clone(), psi.evolve(&self.tails[start])));
        if jumps.len() == self.max_jumps {
            return;
        }
        let mut s = psi;
        for m in start..self.ops.len() {
            for (k, w) in self.scheme.jump_ops.iter().enumerate() {
                let jumped = self.ops[m].apply_jump(w, &s);
                let mut seq = jumps.clone();
                seq.push((m, k));
                self.descend(m + 1, jumped, seq, out);
            }
            s = self.ops[m].apply_nojump(&s);
        }
    }
}

/// Per-trajectory seed: SplitMix64 of `master + index * golden_gamma`.
pub fn trajectory_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Monte Carlo unraveling. Trajectory `i` draws from
/// `ChaCha8Rng::seed_from_u64(trajectory_seed(seed, i))`; each step picks
/// an outcome with probability proportional to its squared norm.
/// Final states are normalized and scaled by `1/sqrt(n_traj)`.
pub fn sample_trajectories(
    scheme: &JumpScheme,
    psi0: &PureState,
    n_traj: usize,
    seed: u64,
) -> Result<Vec<TrajectoryRecord>, JumpError> {
    check_initial(scheme, psi0)?;
    if n_traj == 0 {
        return Err(JumpError::Domain("n_traj must be at least 1".into()));
    }
    let ops = scheme.all_step_ops()?;
    let scale = (1.0 / n_traj as f64).sqrt();
    let records = (0..n_traj as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(trajectory_seed(seed, i));
            let mut psi = psi0.clone();
            let mut jumps = Vec::new();
            for (m, step) in ops.iter().enumerate() {
                let mut candidates = Vec::with_capacity(1 + scheme.channels());
                candidates.push(step.apply_nojump(&psi));
                for w in &scheme.jump_ops {
                    candidates.push(step.apply_jump(w, &psi));
                }
                let weights: Vec<f64> = candidates.iter().map(PureState::norm_sqr).collect();
                let total: f64 = weights.iter().sum();
                let u: f64 = rng.random::<f64>() * total;
                let mut acc = 0.0;
                let mut pick = candidates.len() - 1;
                for (c, w) in weights.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        pick = c;
                        break;
                    }
                }
                if pick > 0 {
                    jumps.push((m, pick - 1));
                }
                psi = candidates.swap_remove(pick).normalized();
            }
            TrajectoryRecord::new(jumps, psi.scaled(scale))
        })
        .collect();
    Ok(records)
}

/// `rho = sum_i |psi_i><psi_i|`, summed in record order.
pub fn reconstruct_density(records: &[TrajectoryRecord]) -> Result<DensityMatrix, JumpError> {
    let first = records
        .first()
        .ok_or_else(|| JumpError::Domain("no trajectory records".into()))?;
    let n = first.final_state.dim();
    let mut rho = ComplexMatrix::zeros(n, n);
    for r in records {
        if r.final_state.dim() != n {
            return Err(JumpError::Domain("records have inconsistent dimensions".into()));
        }
        rho = &rho + &r.final_state.projector();
    }
    Ok(DensityMatrix::from_hermitian_part(&rho))
}

/// Scalar magnitude multiplying the holonomy on the no-jump trajectory.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VisibilityFactor {
    /// Measured `|det U_sub|^(1/n)` of the no-jump subspace propagator.
    pub magnitude: f64,
    pub model_class: VisibilityClass,
    /// Decay predicted by the effective Hamiltonian: `exp(-alpha T / 2)`
    /// (or `exp(-alpha E T / 2)`).
    pub predicted: f64,
    /// The same expression with a positive exponent, for comparison.
    pub positive_exponent_form: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum VisibilityClass {
    Identity,
    ProportionalToH,
}

/// No-jump propagation restricted to the tracked subspace of a path model.
#[derive(Debug, Clone)]
pub struct NoJumpSubspace {
    /// `F_end^dagger U_nojump E`, with `E` the tracked basis at the start and
    /// `F_end` the frame at the end of the path.
    pub propagator: ComplexMatrix,
    /// `|| (1 - F_end F_end^dagger) U_nojump E ||`, spectral norm.
    pub leakage: f64,
    /// Present when kappa is proportional to the identity or to `H0`.
    pub visibility: Option<VisibilityFactor>,
}

/// Evaluates the no-jump propagator on the tracked subspace. `class` is the
/// kappa classification used to predict the visibility factor.
pub fn nojump_subspace(scheme: &JumpScheme, class: KappaClass) -> Result<NoJumpSubspace, JumpError> {
    let HamiltonianSource::Path { family, path, .. } = scheme.model.source() else {
        return Err(JumpError::Domain(
            "subspace propagator needs a path-driven model".into(),
        ));
    };
    let e = family.reference_basis();
    let end = path.samples().last().expect("paths are non-empty");
    let f_end = &family.frame_unitary(end)? * e;
    let u = nojump_propagator(scheme)?;
    let ue = &u * e;
    let propagator = &f_end.dagger() * &ue;
    let outside = &ue - &(&f_end * &propagator);
    let leakage = outside.norm_spectral();
    let n = e.cols();
    let magnitude = crate::linalg::singular_values(&propagator)
        .iter()
        .map(|s| s.ln())
        .sum::<f64>()
        / n as f64;
    let magnitude = magnitude.exp();
    let t = scheme.total_time;
    let visibility = match class {
        KappaClass::Identity { alpha } => Some((VisibilityClass::Identity, alpha * t / 2.0)),
        KappaClass::ProportionalToH { alpha } => Some((
            VisibilityClass::ProportionalToH,
            alpha * family.subspace_energy() * t / 2.0,
        )),
        KappaClass::Other { .. } => None,
    }
    .map(|(model_class, x)| VisibilityFactor {
        magnitude,
        model_class,
        predicted: (-x).exp(),
        positive_exponent_form: x.exp(),
    });
    Ok(NoJumpSubspace {
        propagator,
        leakage,
        visibility,
    })
}
