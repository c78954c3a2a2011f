//! Simulation and analysis of adiabatic non-abelian holonomies in open
//! Markovian quantum systems.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: dense complex matrices, exponentials, hermitian eigensolver.
//! - [`holonomy`]: isospectral Hamiltonian families, control paths, the
//!   Wilczek-Zee connection and path-ordered transport (with jumps).
//! - [`lindblad`]: a fourth-order master-equation integrator used as oracle.
//! - [`jumps`]: the quantum-jump unraveling (no-jump propagation,
//!   trajectory enumeration and Monte Carlo sampling).
//! - [`robustness`]: the holonomic gate set and its error analysis.

pub mod holonomy;
pub mod jumps;
pub mod linalg;
pub mod lindblad;
pub mod robustness;

pub use linalg::{ComplexMatrix, DensityMatrix, LinalgError, PureState, C64};
