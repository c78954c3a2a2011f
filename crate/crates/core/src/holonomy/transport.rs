//! Connection, overlap and path-ordered transport of the tracked subspace.
//!
//! Conventions: for frame vectors `f_b` the connection sample is
//! `a[g][b] = <f_g | d f_b>` (directional derivative along the path tangent)
//! and the overlap is `p[g][b] = <f_g | f_b>`. Coordinates `c` of a
//! parallel-transported state obey `p dc = -a c`, so each segment contributes
//! `exp(-p^+ a)`, with later segments multiplied on the left.

use crate::linalg::{matexp, pinv_hermitian, singular_values, ComplexMatrix, PureState, C64};

use super::{HolonomyError, IsospectralFamily, ParameterPath};

/// Central-difference step for [`Derivative::FiniteDifference`].
pub const FINITE_DIFFERENCE_STEP: f64 = 1e-5;

/// Relative singular-value cutoff for inverting the overlap matrix.
pub const PINV_CUTOFF: f64 = 1e-10;

/// Tolerance on `W^dagger W = alpha 1` for a jump to count as unitary-type.
pub const JUMP_UNITARITY_TOL: f64 = 1e-8;

/// How `d V / d lambda` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Derivative {
    /// Factor-by-factor differentiation of the frame rule.
    #[default]
    Analytic,
    /// Central differences of the frame vectors with step [`FINITE_DIFFERENCE_STEP`].
    FiniteDifference,
}

/// Basis of the tracked subspace at one point of the control manifold.
#[derive(Debug, Clone)]
pub struct LocalFrame {
    pub vectors: Vec<PureState>,
    pub orthonormal: bool,
}

impl LocalFrame {
    pub fn as_matrix(&self) -> ComplexMatrix {
        let cols: Vec<Vec<C64>> = self.vectors.iter().map(|v| v.amplitudes().to_vec()).collect();
        ComplexMatrix::from_columns(&cols)
    }

    pub fn gram(&self) -> ComplexMatrix {
        let f = self.as_matrix();
        f.dagger() * f
    }
}

/// `a` and `p` at one path sample.
#[derive(Debug, Clone)]
pub struct ConnectionSample {
    pub a: ComplexMatrix,
    pub p: ComplexMatrix,
}

/// Transported subspace operator for a path.
#[derive(Debug, Clone)]
pub struct HolonomyResult {
    pub u: ComplexMatrix,
    pub path_label: String,
    pub step_count: usize,
    /// Order of the product integrator (midpoint rule: 2).
    pub scheme_order: usize,
    /// Some segment had an overlap matrix below the pseudo-inverse cutoff.
    pub rank_deficient: bool,
}

/// `V(lambda) E`: the tracked eigenvectors of `H0` carried to `lambda`.
pub fn frame_at(family: &IsospectralFamily, lambda: &[f64]) -> Result<LocalFrame, HolonomyError> {
    let f = &family.frame_unitary(lambda)? * family.reference_basis();
    let vectors = (0..f.cols()).map(|j| PureState::new(f.column(j))).collect();
    Ok(LocalFrame {
        vectors,
        orthonormal: true,
    })
}

/// Connection and overlap of the orthonormal tracked frame.
pub fn connection_at(
    family: &IsospectralFamily,
    lambda: &[f64],
    direction: &[f64],
) -> Result<ConnectionSample, HolonomyError> {
    connection_with(family, lambda, direction, None, Derivative::Analytic)
}

/// Connection and overlap of the frame `V(lambda) E C`, where `C` (n x m)
/// recombines the tracked vectors. `C = None` means the identity.
pub fn connection_with(
    family: &IsospectralFamily,
    lambda: &[f64],
    direction: &[f64],
    coeffs: Option<&ComplexMatrix>,
    method: Derivative,
) -> Result<ConnectionSample, HolonomyError> {
    let basis = match coeffs {
        Some(c) => {
            if c.rows() != family.subspace_dim() {
                return Err(HolonomyError::Domain(format!(
                    "frame coefficients have {} rows, subspace is {}-dimensional",
                    c.rows(),
                    family.subspace_dim()
                )));
            }
            family.reference_basis() * c
        }
        None => family.reference_basis().clone(),
    };
    let (frame, dframe) = match method {
        Derivative::Analytic => {
            let (v, dv) = family.frame_unitary_and_derivative(lambda, direction)?;
            (&v * &basis, &dv * &basis)
        }
        Derivative::FiniteDifference => {
            family.check_point(direction)?;
            let v = family.frame_unitary(lambda)?;
            let len = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
            let d = if len == 0.0 {
                ComplexMatrix::zeros(basis.rows(), basis.cols())
            } else {
                let h = FINITE_DIFFERENCE_STEP;
                let shift = |s: f64| -> Vec<f64> {
                    lambda
                        .iter()
                        .zip(direction)
                        .map(|(x, dx)| x + s * h * dx / len)
                        .collect()
                };
                let plus = family.frame_unitary(&shift(1.0))?;
                let minus = family.frame_unitary(&shift(-1.0))?;
                (&(&plus - &minus) * &basis).scale_real(len / (2.0 * h))
            };
            (&v * &basis, d)
        }
    };
    let fd = frame.dagger();
    Ok(ConnectionSample {
        a: &fd * &dframe,
        p: &fd * &frame,
    })
}

/// Product of `exp(-p^+ a)` over samples `start..end` of `path`, optionally
/// conjugating each generator as `(1/alpha) C^dagger (.) C`.
fn transport_range(
    family: &IsospectralFamily,
    path: &ParameterPath,
    start: usize,
    end: usize,
    coeffs: Option<&ComplexMatrix>,
    conjugation: Option<(&ComplexMatrix, f64)>,
    method: Derivative,
) -> Result<(ComplexMatrix, bool), HolonomyError> {
    let n = coeffs.map_or(family.subspace_dim(), ComplexMatrix::cols);
    let mut u = ComplexMatrix::identity(n);
    let mut deficient = false;
    for k in start..end {
        let (mid, delta) = path.segment(k);
        let sample = connection_with(family, &mid, &delta, coeffs, method)?;
        let pinv = pinv_hermitian(&sample.p, PINV_CUTOFF)?;
        deficient |= pinv.is_deficient();
        let mut generator = &pinv.inverse * &sample.a;
        if let Some((c, alpha)) = conjugation {
            generator = c.sandwich(&generator).scale_real(1.0 / alpha);
        }
        let step = matexp(&-&generator)?;
        u = &step * &u;
    }
    Ok((u, deficient))
}

fn check_path(family: &IsospectralFamily, path: &ParameterPath) -> Result<(), HolonomyError> {
    if path.dim() != family.param_dim() {
        return Err(HolonomyError::Domain(format!(
            "path lives in {} parameters, family {} has {}",
            path.dim(),
            family.name(),
            family.param_dim()
        )));
    }
    Ok(())
}

/// Path-ordered transport of the tracked subspace along `path`.
pub fn holonomy(family: &IsospectralFamily, path: &ParameterPath) -> Result<HolonomyResult, HolonomyError> {
    holonomy_with(family, path, Derivative::Analytic)
}

pub fn holonomy_with(
    family: &IsospectralFamily,
    path: &ParameterPath,
    method: Derivative,
) -> Result<HolonomyResult, HolonomyError> {
    check_path(family, path)?;
    let (u, rank_deficient) = transport_range(family, path, 0, path.segment_count(), None, None, method)?;
    Ok(HolonomyResult {
        u,
        path_label: path.label().to_string(),
        step_count: path.segment_count(),
        scheme_order: 2,
        rank_deficient,
    })
}

/// Transport over samples `start..=end` (identity if `start == end`).
pub fn segment_transport(
    family: &IsospectralFamily,
    path: &ParameterPath,
    start: usize,
    end: usize,
) -> Result<ComplexMatrix, HolonomyError> {
    check_path(family, path)?;
    check_range(path, start, end)?;
    Ok(transport_range(family, path, start, end, None, None, Derivative::Analytic)?.0)
}

/// Transport over samples `start..=end` with the connection replaced by
/// `(1/alpha) W^dagger A W`.
pub fn conjugated_segment_transport(
    family: &IsospectralFamily,
    path: &ParameterPath,
    start: usize,
    end: usize,
    w: &ComplexMatrix,
    alpha: f64,
) -> Result<ComplexMatrix, HolonomyError> {
    check_path(family, path)?;
    check_range(path, start, end)?;
    check_jump_shape(family, w)?;
    Ok(transport_range(family, path, start, end, None, Some((w, alpha)), Derivative::Analytic)?.0)
}

fn check_range(path: &ParameterPath, start: usize, end: usize) -> Result<(), HolonomyError> {
    if start > end || end > path.segment_count() {
        return Err(HolonomyError::Range(format!(
            "sample range {start}..={end} outside a path with {} samples",
            path.len()
        )));
    }
    Ok(())
}

fn check_jump_shape(family: &IsospectralFamily, w: &ComplexMatrix) -> Result<(), HolonomyError> {
    let n = family.subspace_dim();
    if w.shape() != (n, n) {
        return Err(HolonomyError::Domain(format!(
            "jump operator has shape {:?}, expected {n}x{n}",
            w.shape()
        )));
    }
    Ok(())
}

/// A jump `W` (acting on code coordinates) applied at a path sample.
#[derive(Debug, Clone)]
pub struct Jump {
    pub sample: usize,
    pub op: ComplexMatrix,
    /// Expected `W^dagger W = alpha 1`.
    pub alpha: f64,
}

impl Jump {
    pub fn new(sample: usize, op: ComplexMatrix, alpha: f64) -> Self {
        Self { sample, op, alpha }
    }

    /// Whether `W^dagger W = alpha 1` within [`JUMP_UNITARITY_TOL`].
    pub fn is_unitary_type(&self) -> bool {
        let n = self.op.rows();
        let wdw = self.op.dagger() * self.op.clone();
        self.alpha > 0.0
            && wdw.distance(&ComplexMatrix::identity(n).scale_real(self.alpha))
                <= JUMP_UNITARITY_TOL * self.alpha.max(1.0)
    }
}

/// Transport conditioned on a jump record.
#[derive(Debug, Clone)]
pub struct JumpHolonomy {
    /// Coordinate transport through all segments, with each post-jump
    /// segment expressed in the jumped frame.
    pub holonomy: HolonomyResult,
    /// `C U`, where `C` is the product of all jump operators: the map the
    /// trajectory applies to code coordinates.
    pub subspace_map: ComplexMatrix,
    /// Distance between the conjugated-connection route and direct
    /// transport of the jumped frame. `None` on the rank-deficient branch,
    /// where only direct transport is defined.
    pub route_discrepancy: Option<f64>,
    /// Unconjugated transport of each inter-jump segment.
    pub segment_holonomies: Vec<ComplexMatrix>,
}

/// Composes segment holonomies across jumps.
///
/// After jumps `W_1 .. W_l`, with `C_l = W_l ... W_1` and `alpha_l` the
/// product of their rates, segment `l` is transported with connection
/// `(1/alpha_l) C_l^dagger A C_l`. Independently, the frame `V E C_l` is
/// transported directly with its own overlap matrix; the two must agree.
pub fn holonomy_with_jumps(
    family: &IsospectralFamily,
    path: &ParameterPath,
    jumps: &[Jump],
) -> Result<JumpHolonomy, HolonomyError> {
    check_path(family, path)?;
    let n = family.subspace_dim();
    let last = path.segment_count();
    let mut prev = 0;
    for j in jumps {
        if j.sample > last {
            return Err(HolonomyError::Range(format!(
                "jump at sample {} beyond path end {last}",
                j.sample
            )));
        }
        if j.sample < prev {
            return Err(HolonomyError::Range("jumps must be ordered along the path".into()));
        }
        prev = j.sample;
        check_jump_shape(family, &j.op)?;
    }
    let unitary_type = jumps.iter().all(Jump::is_unitary_type);

    let mut bounds = vec![0];
    bounds.extend(jumps.iter().map(|j| j.sample));
    bounds.push(last);

    let mut cumulative = ComplexMatrix::identity(n);
    let mut alpha = 1.0;
    let mut direct = ComplexMatrix::identity(n);
    let mut conjugated = ComplexMatrix::identity(n);
    let mut rank_deficient = false;
    let mut segments = Vec::with_capacity(bounds.len() - 1);
    for (l, w) in bounds.windows(2).enumerate() {
        if l > 0 {
            let jump = &jumps[l - 1];
            cumulative = &jump.op * &cumulative;
            alpha *= jump.alpha;
        }
        let (start, end) = (w[0], w[1]);
        let (seg, _) = transport_range(family, path, start, end, None, None, Derivative::Analytic)?;
        let (d, deficient) = transport_range(family, path, start, end, Some(&cumulative), None, Derivative::Analytic)?;
        rank_deficient |= deficient;
        direct = &d * &direct;
        if unitary_type {
            let c = if l == 0 {
                seg.clone()
            } else {
                transport_range(
                    family,
                    path,
                    start,
                    end,
                    None,
                    Some((&cumulative, alpha)),
                    Derivative::Analytic,
                )?
                .0
            };
            conjugated = &c * &conjugated;
        }
        segments.push(seg);
    }
    // A jump at the very end leaves no segment to detect a singular overlap;
    // the jumped frame itself decides.
    let sv = singular_values(&cumulative);
    if sv.last().copied().unwrap_or(0.0) <= PINV_CUTOFF * sv[0] {
        rank_deficient = true;
    }

    let (u, route_discrepancy) = if unitary_type {
        let gap = conjugated.distance(&direct);
        (conjugated, Some(gap))
    } else {
        (direct, None)
    };
    let subspace_map = &cumulative * &u;
    Ok(JumpHolonomy {
        holonomy: HolonomyResult {
            u,
            path_label: path.label().to_string(),
            step_count: last,
            scheme_order: 2,
            rank_deficient,
        },
        subspace_map,
        route_discrepancy,
        segment_holonomies: segments,
    })
}

/// `g u g^dagger` for a unitary `g`.
pub fn gauge_transform(result: &HolonomyResult, g: &ComplexMatrix) -> Result<HolonomyResult, HolonomyError> {
    if g.shape() != result.u.shape() {
        return Err(HolonomyError::Domain(format!(
            "gauge matrix {:?} vs holonomy {:?}",
            g.shape(),
            result.u.shape()
        )));
    }
    if !g.is_unitary(1e-10) {
        return Err(HolonomyError::Domain("gauge transformation must be unitary".into()));
    }
    Ok(HolonomyResult {
        u: &(g * &result.u) * &g.dagger(),
        ..result.clone()
    })
}
