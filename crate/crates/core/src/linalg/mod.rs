//! Dense complex linear algebra and quantum-state primitives.
//!
//! All routines are pure functions over small matrices (dimension <= 16 in
//! practice). Nothing here allocates outside the returned values.

mod eigen;
mod expm;
mod matrix;
mod state;

pub use eigen::{eig_hermitian, pinv_hermitian, singular_values, HermitianEigen, HermitianPinv, HERMITIAN_TOL};
pub use expm::matexp;
pub use matrix::{c64, pauli, ComplexMatrix};
pub use num_complex::Complex64 as C64;
pub use state::{trace_distance, DensityMatrix, PureState, DENSITY_HERMITIAN_TOL};

/// Default absolute gap below which eigenvalues count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("{op}: shape mismatch ({detail})")]
    Shape { op: &'static str, detail: String },
    #[error("{op}: {detail}")]
    Domain { op: &'static str, detail: String },
}

/// Kronecker product.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Checked matrix product.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    a.matmul(b)
}

/// Normalized trace overlap `|tr(a^dagger b)| / n`; insensitive to a global phase.
pub fn phase_insensitive_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let n = a.rows() as f64;
    (a.dagger() * b.clone()).trace().norm() / n
}
