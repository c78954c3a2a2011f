//! Shared fixtures for the criterion benches.

use openholo_core::holonomy::catalog::{self, DEFAULT_GAP};
use openholo_core::holonomy::{IsospectralFamily, ParameterPath, SphereLoop};
use openholo_core::jumps::{build_scheme, JumpScheme};
use openholo_core::linalg::{c64, pauli};
use openholo_core::lindblad::LindbladModel;
use openholo_core::{ComplexMatrix, PureState};

/// Dense anti-hermitian generator of dimension `n` with entries of order one.
pub fn generator(n: usize) -> ComplexMatrix {
    let rows: Vec<Vec<_>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| c64(((i + 2 * j) as f64).sin(), ((3 * i + j) as f64).cos()))
                .collect()
        })
        .collect();
    let m = ComplexMatrix::from_rows(&rows);
    (&m - &m.dagger()).scale_real(0.5)
}

/// Single-qubit gate family and its loop with `latitude_steps` latitude samples.
pub fn gate_loop(latitude_steps: usize) -> (IsospectralFamily, ParameterPath) {
    let fam = catalog::single_qubit_gate(1, DEFAULT_GAP).expect("valid axis");
    let lp = SphereLoop::new(catalog::latitude_for_solid_angle(0.8), latitude_steps, 16).expect("valid loop");
    (fam, lp.path)
}

/// Dephasing-type scheme on the single-qubit gate loop.
pub fn gate_scheme(total_time: f64, dt: f64) -> (JumpScheme, PureState) {
    let (fam, path) = gate_loop(256);
    let l = catalog::embed_code_operator(&fam, &pauli::sigma_z(), true)
        .expect("code operator")
        .scale_real(0.3);
    let psi0 = PureState::new(fam.reference_basis().column(0));
    let model = LindbladModel::along_path(fam, path, total_time, vec![l]).expect("valid model");
    (build_scheme(&model, dt, total_time).expect("valid scheme"), psi0)
}
