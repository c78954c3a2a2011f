use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};

use super::catalog::{self, involutory_exp, DEFAULT_GAP};
use super::*;
use crate::linalg::{c64, pauli, phase_insensitive_fidelity, ComplexMatrix};

/// Independent oracle: central differences of `frame_at`, contracted with
/// the frame at the same point.
fn fd_connection(family: &IsospectralFamily, lambda: &[f64], direction: &[f64], h: f64) -> ComplexMatrix {
    let at = |s: f64| -> ComplexMatrix {
        let l: Vec<f64> = lambda.iter().zip(direction).map(|(x, d)| x + s * d).collect();
        frame_at(family, &l).unwrap().as_matrix()
    };
    let d = (&at(h) - &at(-h)).scale_real(0.5 / h);
    &at(0.0).dagger() * &d
}

#[test]
fn spin_half_frame_at_south_pole() {
    let fam = catalog::spin_half();
    let frame = frame_at(&fam, &[PI, 0.0]).unwrap();
    let v = frame.vectors[0].amplitudes();
    assert!(v[0].norm() < 1e-15);
    assert!((v[1].norm() - 1.0).abs() < 1e-15);
}

#[test]
fn frame_at_basepoint_is_reference_basis() {
    for fam in catalog::all_families() {
        let frame = frame_at(&fam, &vec![0.0; fam.param_dim()]).unwrap();
        assert!(frame.as_matrix().distance(fam.reference_basis()) < 1e-12);
        assert!(frame.gram().distance(&ComplexMatrix::identity(fam.subspace_dim())) < 1e-9);
    }
}

#[test]
fn spin_half_connection_value() {
    // (i/2)(1 - cos theta) at theta = pi/3, from the finite-difference oracle.
    let fam = catalog::spin_half();
    let oracle = fd_connection(&fam, &[FRAC_PI_3, 0.4], &[0.0, 1.0], 1e-4);
    assert!((oracle[(0, 0)] - c64(0.0, 0.25)).norm() < 1e-8);
    let s = connection_at(&fam, &[FRAC_PI_3, 0.4], &[0.0, 1.0]).unwrap();
    assert!((s.a[(0, 0)] - c64(0.0, 0.25)).norm() < 1e-12);
    assert!((s.p[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn zero_direction_gives_zero_connection() {
    let fam = catalog::single_qubit_gate(1, DEFAULT_GAP).unwrap();
    for method in [Derivative::Analytic, Derivative::FiniteDifference] {
        let s = connection_with(&fam, &[0.3, 0.2], &[0.0, 0.0], None, method).unwrap();
        assert_eq!(s.a.max_abs(), 0.0);
    }
}

#[test]
fn analytic_and_finite_difference_agree() {
    for fam in catalog::all_families() {
        for k in 0..20 {
            let t = k as f64;
            let lambda = vec![0.1 + 0.13 * t, 0.7 * t - 2.0];
            let dir = vec![(0.3 * t).cos(), (0.5 * t).sin() + 0.2];
            let a = connection_with(&fam, &lambda, &dir, None, Derivative::Analytic).unwrap();
            let f = connection_with(&fam, &lambda, &dir, None, Derivative::FiniteDifference).unwrap();
            assert!(a.a.distance(&f.a) < 1e-6, "{} at {lambda:?}", fam.name());
            assert!(a.a.is_anti_hermitian(1e-8));
            assert!(a.p.is_hermitian(1e-10));
            assert!(a.p.distance(&ComplexMatrix::identity(fam.subspace_dim())) < 1e-9);
        }
    }
}

#[test]
fn constant_path_is_identity() {
    let fam = catalog::single_qubit_gate(2, DEFAULT_GAP).unwrap();
    let path = ParameterPath::new(vec![vec![0.4, 1.0]; 5], true).unwrap();
    let u = holonomy(&fam, &path).unwrap().u;
    assert_eq!(u, ComplexMatrix::identity(2));
}

#[test]
fn spin_half_equator_berry_phase() {
    // Solid-angle formula: exp(-i Omega / 2) with Omega = 2 pi at the equator.
    let fam = catalog::spin_half();
    let path = ParameterPath::latitude(FRAC_PI_2, 0.0, TAU, 10_000).unwrap();
    let u = holonomy(&fam, &path).unwrap().u;
    assert!((u[(0, 0)] - c64(-1.0, 0.0)).norm() < 1e-10);
}

#[test]
fn forward_then_backward_is_identity() {
    let fam = catalog::single_qubit_gate(1, DEFAULT_GAP).unwrap();
    let lp = SphereLoop::new(0.6, 300, 20).unwrap();
    let there_and_back = lp.path.concat(&lp.path.reversed()).unwrap();
    let u = holonomy(&fam, &there_and_back).unwrap().u;
    assert!(u.distance(&ComplexMatrix::identity(2)) < 1e-8);
}

#[test]
fn gate_loops_realize_their_gates() {
    let angle = 0.7;
    let theta = catalog::latitude_for_solid_angle(angle);
    let lp = SphereLoop::new(theta, 512, 16).unwrap();
    for axis in 1..=3 {
        let fam = catalog::single_qubit_gate(axis, DEFAULT_GAP).unwrap();
        let u = holonomy(&fam, &lp.path).unwrap().u;
        let ideal = involutory_exp(&pauli::sigma(axis), angle);
        assert!(u.distance(&ideal) < 1e-6, "axis {axis}: {u:?}");
    }
    let fam = catalog::two_qubit_gate(1, 1, DEFAULT_GAP).unwrap();
    let u = holonomy(&fam, &lp.path).unwrap().u;
    let ideal = involutory_exp(&catalog::two_qubit_generator(1, 1).unwrap(), angle);
    assert!(u.distance(&ideal) < 1e-6);
}

fn wobbly_curve(u: f64) -> Vec<f64> {
    vec![0.8 + 0.3 * (TAU * u).sin(), TAU * u + 0.2 * (2.0 * TAU * u).sin()]
}

#[test]
fn reparameterization_invariance() {
    let fam = catalog::single_qubit_gate(1, DEFAULT_GAP).unwrap();
    let a = ParameterPath::from_curve(wobbly_curve, |u| u, 4096, false).unwrap();
    let b = ParameterPath::from_curve(wobbly_curve, |u| u + 0.1 * (TAU * u).sin() / TAU, 4096, false).unwrap();
    let ua = holonomy(&fam, &a).unwrap().u;
    let ub = holonomy(&fam, &b).unwrap().u;
    assert!(ua.distance(&ub) < 1e-6);
}

#[test]
fn second_order_convergence() {
    let fam = catalog::single_qubit_gate(2, DEFAULT_GAP).unwrap();
    let run = |steps| {
        holonomy(
            &fam,
            &ParameterPath::from_curve(wobbly_curve, |u| u, steps, false).unwrap(),
        )
        .unwrap()
        .u
    };
    let reference = run(100_000);
    let mut prev = None;
    for steps in [64, 128, 256, 512] {
        let err = run(steps).distance(&reference);
        if let Some(p) = prev {
            let ratio: f64 = p / err;
            assert!(ratio >= 3.5, "ratio {ratio} at {steps} steps");
        }
        prev = Some(err);
    }
}

#[test]
fn concatenation_composes_in_reverse_order() {
    let fam = catalog::two_qubit_gate(1, 1, DEFAULT_GAP).unwrap();
    let p1 = ParameterPath::from_curve(|u| vec![0.9 * u, 1.3 * u], |u| u, 200, false).unwrap();
    let p2 = ParameterPath::from_curve(|u| vec![0.9 + 0.4 * u, 1.3 - 2.0 * u], |u| u, 300, false).unwrap();
    let joined = p1.concat(&p2).unwrap();
    let u = holonomy(&fam, &joined).unwrap().u;
    let expected = &holonomy(&fam, &p2).unwrap().u * &holonomy(&fam, &p1).unwrap().u;
    assert!(u.distance(&expected) < 1e-8);
}

#[test]
fn gauge_covariance_of_basepoint_basis() {
    // Rotating the tracked basis by g maps u to g^dagger u g, i.e. the gauge
    // transform by g^dagger.
    let fam = catalog::single_qubit_gate(1, DEFAULT_GAP).unwrap();
    let path = ParameterPath::from_curve(wobbly_curve, |u| u, 1000, false).unwrap();
    let g = crate::linalg::matexp(
        &(&pauli::sigma_y().scale_real(0.4) + &pauli::sigma_z().scale_real(0.9)).scale(c64(0.0, 1.0)),
    )
    .unwrap();
    let rotated = fam.clone().with_reference_basis(fam.reference_basis() * &g).unwrap();
    let u = holonomy(&fam, &path).unwrap();
    let u_rot = holonomy(&rotated, &path).unwrap().u;
    let expected = gauge_transform(&u, &g.dagger()).unwrap().u;
    assert!(u_rot.distance(&expected) < 1e-8);
}

#[test]
fn gauge_transform_examples() {
    let theta = 0.3;
    let u = HolonomyResult {
        u: involutory_exp(&pauli::sigma_z(), theta),
        path_label: String::new(),
        step_count: 1,
        scheme_order: 2,
        rank_deficient: false,
    };
    assert_eq!(gauge_transform(&u, &ComplexMatrix::identity(2)).unwrap().u, u.u);
    assert!(gauge_transform(&u, &u.u).unwrap().u.distance(&u.u) < 1e-15);
    let flipped = gauge_transform(&u, &pauli::sigma_x()).unwrap().u;
    assert!(flipped.distance(&involutory_exp(&pauli::sigma_z(), -theta)) < 1e-15);
    assert!(gauge_transform(&u, &pauli::sigma_plus()).is_err());
}

#[test]
fn zero_jumps_match_plain_holonomy() {
    let fam = catalog::single_qubit_gate(1, DEFAULT_GAP).unwrap();
    let lp = SphereLoop::new(0.5, 200, 10).unwrap();
    let plain = holonomy(&fam, &lp.path).unwrap().u;
    let jumped = holonomy_with_jumps(&fam, &lp.path, &[]).unwrap();
    assert_eq!(jumped.holonomy.u, plain);
}

#[test]
fn midpoint_sigma_z_jump_cancels_sigma_x_gate() {
    let angle = 0.9;
    let fam = catalog::single_qubit_gate(1, DEFAULT_GAP).unwrap();
    let lp = SphereLoop::new(catalog::latitude_for_solid_angle(angle), 400, 10).unwrap();
    let alpha: f64 = 0.3;
    let jump = Jump::new(lp.latitude_index(0.5), pauli::sigma_z().scale_real(alpha.sqrt()), alpha);
    let r = holonomy_with_jumps(&fam, &lp.path, &[jump]).unwrap();
    assert!(r.holonomy.u.distance(&ComplexMatrix::identity(2)) < 1e-8);
    assert!(r.route_discrepancy.unwrap() < 1e-8);
}

#[test]
fn same_axis_jump_is_harmless() {
    let angle = 0.9;
    let fam = catalog::single_qubit_gate(1, DEFAULT_GAP).unwrap();
    let lp = SphereLoop::new(catalog::latitude_for_solid_angle(angle), 400, 10).unwrap();
    let ideal = involutory_exp(&pauli::sigma_x(), angle);
    for f in [0.0, 0.2, 0.77, 1.0] {
        let jump = Jump::new(lp.latitude_index(f), pauli::sigma_x(), 1.0);
        let r = holonomy_with_jumps(&fam, &lp.path, &[jump]).unwrap();
        assert!(r.holonomy.u.distance(&ideal) < 1e-8);
    }
}

#[test]
fn ladder_jump_takes_rank_deficient_branch() {
    let fam = catalog::single_qubit_gate(1, DEFAULT_GAP).unwrap();
    let lp = SphereLoop::new(0.8, 200, 10).unwrap();
    let jump = Jump::new(lp.latitude_index(0.4), pauli::sigma_plus(), 1.0);
    let r = holonomy_with_jumps(&fam, &lp.path, &[jump]).unwrap();
    assert!(r.holonomy.rank_deficient);
    assert!(r.route_discrepancy.is_none());
    let sv = crate::linalg::singular_values(&r.subspace_map);
    assert!(sv[1] <= 1e-8);
}

#[test]
fn jump_errors() {
    let fam = catalog::single_qubit_gate(1, DEFAULT_GAP).unwrap();
    let lp = SphereLoop::new(0.8, 20, 4).unwrap();
    let beyond = Jump::new(lp.path.len(), pauli::sigma_x(), 1.0);
    assert!(matches!(
        holonomy_with_jumps(&fam, &lp.path, &[beyond]),
        Err(HolonomyError::Range(_))
    ));
    let wrong_shape = Jump::new(3, ComplexMatrix::identity(3), 1.0);
    assert!(matches!(
        holonomy_with_jumps(&fam, &lp.path, &[wrong_shape]),
        Err(HolonomyError::Domain(_))
    ));
}

#[test]
fn conjugated_segment_identity() {
    let fam = catalog::single_qubit_gate(2, DEFAULT_GAP).unwrap();
    let path = ParameterPath::from_curve(wobbly_curve, |u| u, 500, false).unwrap();
    let alpha: f64 = 0.25;
    for w in [pauli::sigma_x(), pauli::sigma_y(), pauli::sigma_z()] {
        let w = w.scale_real(alpha.sqrt());
        let lhs = conjugated_segment_transport(&fam, &path, 100, 400, &w, alpha).unwrap();
        let seg = segment_transport(&fam, &path, 100, 400).unwrap();
        let rhs = w.sandwich(&seg).scale_real(1.0 / alpha);
        assert!(lhs.distance(&rhs) < 1e-8);
    }
}

#[test]
fn sign_flip_fidelity() {
    let angle = 0.7;
    let fam = catalog::single_qubit_gate(2, DEFAULT_GAP).unwrap();
    let lp = SphereLoop::new(catalog::latitude_for_solid_angle(angle), 600, 10).unwrap();
    let jump = Jump::new(lp.latitude_index(1.0 / 3.0), pauli::sigma_x(), 1.0);
    let u = holonomy_with_jumps(&fam, &lp.path, &[jump]).unwrap().holonomy.u;
    let expected = involutory_exp(&pauli::sigma_y(), -angle / 3.0);
    assert!(phase_insensitive_fidelity(&expected, &u) > 1.0 - 1e-9);
}
