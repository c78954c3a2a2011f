//! Isospectral families, control paths and non-abelian parallel transport.

pub mod catalog;
mod family;
mod path;
mod transport;

pub use family::{ControlManifold, FrameFactor, IsospectralFamily};
pub use path::{ParameterPath, SphereLoop};
pub use transport::{
    conjugated_segment_transport, connection_at, connection_with, frame_at, gauge_transform, holonomy, holonomy_with,
    holonomy_with_jumps, segment_transport, ConnectionSample, Derivative, HolonomyResult, Jump, JumpHolonomy,
    LocalFrame, FINITE_DIFFERENCE_STEP, JUMP_UNITARITY_TOL, PINV_CUTOFF,
};

use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HolonomyError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("holonomy: {0}")]
    Domain(String),
    #[error("holonomy: index out of range: {0}")]
    Range(String),
    #[error("holonomy: family {0} is not on a sphere-type control manifold")]
    UnsupportedManifold(String),
}

#[cfg(test)]
mod tests;
