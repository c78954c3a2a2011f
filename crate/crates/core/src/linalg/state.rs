//! Pure states and density matrices.

use num_complex::Complex64 as C64;

use super::{eig_hermitian, ComplexMatrix, LinalgError};

/// A state vector. Trajectory states are kept unnormalized, so nothing here
/// assumes unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    /// Computational basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut a = vec![C64::new(0.0, 0.0); dim];
        a[index] = C64::new(1.0, 0.0);
        Self { amplitudes: a }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Unit-norm copy; the zero vector is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scaled(1.0 / n)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a * s).collect(),
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn evolve(&self, op: &ComplexMatrix) -> Self {
        Self {
            amplitudes: op.apply(&self.amplitudes),
        }
    }

    /// `|psi><psi|`, not normalized.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }
}

/// Tolerance on hermiticity of a density matrix.
pub const DENSITY_HERMITIAN_TOL: f64 = 1e-10;

/// A density operator. Hermiticity is enforced on construction; trace and
/// positivity are left to the caller to check since reconstructed ensembles
/// can carry truncated weight.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, LinalgError> {
        if !matrix.is_square() {
            return Err(LinalgError::Shape {
                op: "DensityMatrix::new",
                detail: format!("{:?}", matrix.shape()),
            });
        }
        if !matrix.is_hermitian(DENSITY_HERMITIAN_TOL * matrix.norm_fro().max(1.0)) {
            return Err(LinalgError::Domain {
                op: "DensityMatrix::new",
                detail: "matrix is not hermitian".into(),
            });
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    /// Symmetrizes without checking; used by integrators after each step.
    pub(crate) fn from_hermitian_part(matrix: &ComplexMatrix) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            matrix: psi.normalized().projector(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eig_hermitian(&self.matrix).map(|e| e.values[0]).unwrap_or(f64::NAN)
    }

    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        (&self.matrix * op).trace()
    }
}

/// `(1/2) |a - b|_1`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64, LinalgError> {
    if a.dim() != b.dim() {
        return Err(LinalgError::Shape {
            op: "trace_distance",
            detail: format!("{} vs {}", a.dim(), b.dim()),
        });
    }
    let diff = a.matrix() - b.matrix();
    let e = eig_hermitian(&diff)?;
    Ok(0.5 * e.values.iter().map(|x| x.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_distance_examples() {
        let zero = DensityMatrix::from_pure(&PureState::basis(2, 0));
        let one = DensityMatrix::from_pure(&PureState::basis(2, 1));
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
        assert!((trace_distance(&zero, &mixed).unwrap() - 0.5).abs() < 1e-15);
        assert!(trace_distance(&zero, &DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn unnormalized_norm_is_exact() {
        let s = PureState::new(vec![C64::new(3.0, 0.0), C64::new(0.0, 4.0)]);
        assert_eq!(s.norm(), 5.0);
        assert!((s.normalized().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        assert!(DensityMatrix::new(crate::linalg::pauli::sigma_plus()).is_err());
    }
}
