//! Built-in model families.
//!
//! All sphere-type families use `lambda = (theta, phi)` and the sandwich frame
//! rule `V = exp(-i phi G_az) exp(-i theta G_polar) exp(+i phi G_az)`, which is
//! the identity at the north pole and single-valued around every latitude.
//!
//! The gate families embed the code space next to excited levels at energy
//! `gap`. `G_polar` rotates selected code states into the excited levels and
//! `G_az = -K` acts inside the code space, where `K` is the gate generator.
//! A latitude loop at polar angle `theta` then transports the code space by
//! `exp(i Omega K)` with `Omega = 2 pi (1 - cos theta)`.

use std::f64::consts::TAU;

use crate::linalg::{c64, pauli, tensor, ComplexMatrix, C64};

use super::{ControlManifold, FrameFactor, HolonomyError, IsospectralFamily};

/// Default excitation gap of the gate families.
pub const DEFAULT_GAP: f64 = 50.0;

fn sandwich_rule() -> Vec<FrameFactor> {
    // generators: [G_polar, G_az]; params: [theta, phi]
    vec![
        FrameFactor::new(1, 1, 1.0),
        FrameFactor::new(0, 0, 1.0),
        FrameFactor::new(1, 1, -1.0),
    ]
}

/// Spin-1/2 in a field along the sphere direction, tracking the `+1/2` level.
pub fn spin_half() -> IsospectralFamily {
    let h0 = pauli::sigma_z().scale_real(0.5);
    let g_polar = pauli::sigma_y().scale_real(0.5);
    let g_az = pauli::sigma_z().scale_real(0.5);
    IsospectralFamily::new("spin-half", h0, vec![g_polar, g_az], sandwich_rule(), 0.5)
        .expect("spin-half family is well formed")
        .with_manifold(ControlManifold::Sphere)
}

/// Hermitian generator of the real rotation in the `(a, b)` plane:
/// `exp(-i t G) e_a = cos t e_a + sin t e_b`.
fn plane_rotation(dim: usize, a: usize, b: usize) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(dim, dim);
    g[(b, a)] = c64(0.0, 1.0);
    g[(a, b)] = c64(0.0, -1.0);
    g
}

fn embed_top_left(block: &ComplexMatrix, dim: usize) -> ComplexMatrix {
    block.direct_sum(&ComplexMatrix::zeros(dim - block.rows(), dim - block.cols()))
}

/// Generator `K` of the single-qubit gate `exp(i theta sigma_axis)`.
pub fn single_qubit_generator(axis: usize) -> Result<ComplexMatrix, HolonomyError> {
    match axis {
        1..=3 => Ok(pauli::sigma(axis)),
        _ => Err(HolonomyError::Domain(format!(
            "single-qubit axis must be 1, 2 or 3, got {axis}"
        ))),
    }
}

/// Generator `K = sigma_i (x) sigma_j` of the two-qubit gate.
pub fn two_qubit_generator(i: usize, j: usize) -> Result<ComplexMatrix, HolonomyError> {
    if !(1..=3).contains(&i) || !(1..=3).contains(&j) {
        return Err(HolonomyError::Domain(format!(
            "two-qubit axes must be in 1..=3, got ({i}, {j})"
        )));
    }
    Ok(tensor(&pauli::sigma(i), &pauli::sigma(j)))
}

/// Four-level family with `H0 = diag(0, 0, 0, gap)` tracking the code pair
/// `{e0, e1}` of the threefold zero level; `e2` is a spectator.
///
/// Axes 1 and 2 come from the choice of `G_az`; axis 3 reuses the axis-2
/// generators with the tracked basis rotated onto the eigenvectors of
/// `sigma_y`, which turns `sigma_y` into `sigma_z` in code coordinates.
pub fn single_qubit_gate(axis: usize, gap: f64) -> Result<IsospectralFamily, HolonomyError> {
    single_qubit_generator(axis)?;
    let dim = 4;
    let h0 = ComplexMatrix::from_real_diag(&[0.0, 0.0, 0.0, gap]);
    let k = if axis == 3 {
        pauli::sigma_y()
    } else {
        pauli::sigma(axis)
    };
    let g_az = embed_top_left(&k.scale_real(-1.0), dim);
    let g_polar = plane_rotation(dim, 0, 3);
    let fam = IsospectralFamily::new(
        format!("qubit-sigma{axis}"),
        h0,
        vec![g_polar, g_az],
        sandwich_rule(),
        0.0,
    )?
    .with_manifold(ControlManifold::Sphere);
    let mut basis = ComplexMatrix::zeros(dim, 2);
    if axis == 3 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        basis[(0, 0)] = c64(h, 0.0);
        basis[(1, 0)] = c64(0.0, h);
        basis[(0, 1)] = c64(h, 0.0);
        basis[(1, 1)] = c64(0.0, -h);
    } else {
        basis[(0, 0)] = c64(1.0, 0.0);
        basis[(1, 1)] = c64(1.0, 0.0);
    }
    fam.with_reference_basis(basis)
}

/// Six-level family realizing `exp(i phi sigma_i (x) sigma_j)` for
/// `i, j in {1, 2}`. The code states `|00>, |01>, |10>, |11>` are levels 0..3;
/// `|00>` and `|01>` rotate into the excited levels 4 and 5.
pub fn two_qubit_gate(i: usize, j: usize, gap: f64) -> Result<IsospectralFamily, HolonomyError> {
    if !(1..=2).contains(&i) || !(1..=2).contains(&j) {
        return Err(HolonomyError::Domain(format!(
            "two-qubit gate family supports axes in {{1, 2}}, got ({i}, {j})"
        )));
    }
    let dim = 6;
    let k = two_qubit_generator(i, j)?;
    let h0 = ComplexMatrix::from_real_diag(&[0.0, 0.0, 0.0, 0.0, gap, gap]);
    let g_az = embed_top_left(&k.scale_real(-1.0), dim);
    let g_polar = &plane_rotation(dim, 0, 4) + &plane_rotation(dim, 1, 5);
    let mut basis = ComplexMatrix::zeros(dim, 4);
    for c in 0..4 {
        basis[(c, c)] = c64(1.0, 0.0);
    }
    IsospectralFamily::new(
        format!("two-qubit-sigma{i}{j}"),
        h0,
        vec![g_polar, g_az],
        sandwich_rule(),
        0.0,
    )?
    .with_manifold(ControlManifold::Sphere)
    .with_reference_basis(basis)
}

/// Polar angle whose latitude encloses solid angle `omega` (0 <= omega <= 4 pi).
pub fn latitude_for_solid_angle(omega: f64) -> f64 {
    (1.0 - omega / TAU).clamp(-1.0, 1.0).acos()
}

/// Solid angle enclosed by the latitude at `theta`.
pub fn solid_angle(theta: f64) -> f64 {
    TAU * (1.0 - theta.cos())
}

/// Embeds a code-space operator into the full system:
/// `E op E^dagger` plus either the identity or zero on the complement.
pub fn embed_code_operator(
    family: &IsospectralFamily,
    op: &ComplexMatrix,
    identity_on_complement: bool,
) -> Result<ComplexMatrix, HolonomyError> {
    let e = family.reference_basis();
    if op.shape() != (e.cols(), e.cols()) {
        return Err(HolonomyError::Domain(format!(
            "code operator has shape {:?}, code space is {}-dimensional",
            op.shape(),
            e.cols()
        )));
    }
    let inside = e * &(op * &e.dagger());
    if identity_on_complement {
        let complement = &ComplexMatrix::identity(family.dim()) - &(e * &e.dagger());
        Ok(&inside + &complement)
    } else {
        Ok(inside)
    }
}

/// Every built-in family with default parameters.
pub fn all_families() -> Vec<IsospectralFamily> {
    let mut v = vec![spin_half()];
    for axis in 1..=3 {
        v.push(single_qubit_gate(axis, DEFAULT_GAP).expect("valid axis"));
    }
    v.push(two_qubit_gate(1, 1, DEFAULT_GAP).expect("valid axes"));
    v
}

/// `exp(i angle K)` for an involutory generator (`K^2 = 1`).
pub fn involutory_exp(k: &ComplexMatrix, angle: f64) -> ComplexMatrix {
    &ComplexMatrix::identity(k.rows()).scale_real(angle.cos()) + &k.scale(C64::new(0.0, angle.sin()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_involutions() {
        for axis in 1..=3 {
            let k = single_qubit_generator(axis).unwrap();
            assert!((&k * &k).distance(&ComplexMatrix::identity(2)) < 1e-15);
        }
        let k = two_qubit_generator(1, 1).unwrap();
        assert!((&k * &k).distance(&ComplexMatrix::identity(4)) < 1e-15);
        assert!(single_qubit_generator(0).is_err());
    }

    #[test]
    fn embedding_preserves_kappa_identity() {
        let fam = single_qubit_gate(1, DEFAULT_GAP).unwrap();
        let l = embed_code_operator(&fam, &pauli::sigma_z(), true).unwrap();
        assert!(l.is_unitary(1e-14));
        let fam3 = single_qubit_gate(3, DEFAULT_GAP).unwrap();
        let l = embed_code_operator(&fam3, &pauli::sigma_x(), true).unwrap();
        assert!(l.is_unitary(1e-14));
    }

    #[test]
    fn solid_angle_inverse() {
        for omega in [0.1, 0.7, 3.0, 6.0] {
            assert!((solid_angle(latitude_for_solid_angle(omega)) - omega).abs() < 1e-12);
        }
    }

    #[test]
    fn unsupported_two_qubit_axes() {
        assert!(two_qubit_gate(1, 3, 10.0).is_err());
    }
}
