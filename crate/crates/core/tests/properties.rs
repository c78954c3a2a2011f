use openholo_core::holonomy::{catalog, holonomy, ParameterPath};
use openholo_core::jumps::{build_scheme, sample_trajectories};
use openholo_core::linalg::{c64, pauli, ComplexMatrix, DensityMatrix, PureState};
use openholo_core::lindblad::{evolve, LindbladModel};
use openholo_core::robustness::{analyze_gate, ErrorChannel, GateKind, GateSpec, JumpSpec, Verdict};
use proptest::prelude::*;

fn gate(axis: usize, angle: f64, steps: usize) -> GateSpec {
    GateSpec::build(GateKind::SingleQubit { axis, angle }, catalog::DEFAULT_GAP, steps).unwrap()
}

fn pauli_channel(rate: f64) -> ErrorChannel {
    ErrorChannel::new(vec![pauli::sigma_x(), pauli::sigma_y(), pauli::sigma_z()], rate).unwrap()
}

fn arb_pattern() -> impl Strategy<Value = Vec<JumpSpec>> {
    prop::collection::vec(
        (0.0f64..=1.0, 0usize..3).prop_map(|(fraction, op)| JumpSpec { fraction, op }),
        0..=3,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prediction_matches_transport(axis in 1usize..=3, angle in 0.1f64..3.0, pattern in arb_pattern()) {
        let g = gate(axis, angle, 256);
        let r = analyze_gate(&g, &pauli_channel(0.1), &pattern).unwrap();
        prop_assert!(r.prediction_error.unwrap() <= 1e-6);
        prop_assert!(r.route_discrepancy.unwrap_or(0.0) <= 1e-8);
        prop_assert!((0.0..=1.0).contains(&r.fidelity));
        prop_assert_eq!(r.verdict == Verdict::Robust, r.fidelity >= 1.0 - 1e-6);
    }

    #[test]
    fn coincident_flips_cancel_in_pairs(axis in 1usize..=3, angle in 0.1f64..3.0, f in 0.0f64..=1.0, n in 1usize..=2) {
        let g = gate(axis, angle, 256);
        let flip = if axis == 1 { 2 } else { 0 };
        let pattern = vec![JumpSpec { fraction: f, op: flip }; 2 * n];
        let r = analyze_gate(&g, &pauli_channel(0.3), &pattern).unwrap();
        prop_assert_eq!(r.verdict, Verdict::Robust);
    }

    #[test]
    fn verdict_ignores_rate_and_sampling(axis in 1usize..=3, pattern in arb_pattern(), rate in 1e-3f64..2.0) {
        let a = analyze_gate(&gate(axis, 0.9, 256), &pauli_channel(rate), &pattern).unwrap();
        let b = analyze_gate(&gate(axis, 0.9, 512), &pauli_channel(1.0), &pattern).unwrap();
        prop_assert_eq!(std::mem::discriminant(&a.verdict), std::mem::discriminant(&b.verdict));
        // Quantized jump positions differ slightly between the two samplings.
        prop_assert!((a.effective_angle.unwrap() - b.effective_angle.unwrap()).abs() < 0.9 * 4.0 / 256.0);
    }

    #[test]
    fn holonomy_is_unitary(steps in 8usize..200, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        for fam in catalog::all_families() {
            let path = ParameterPath::from_curve(|u| vec![1.0 + a * u, 3.0 * b * u], |u| u, steps, false).unwrap();
            prop_assert!(holonomy(&fam, &path).unwrap().u.is_unitary(1e-10));
        }
    }

    #[test]
    fn master_equation_preserves_trace(h in prop::array::uniform4(-1.0f64..1.0), g in 0.0f64..2.0) {
        let hm = ComplexMatrix::from_rows(&[
            vec![c64(h[0], 0.0), c64(h[1], h[2])],
            vec![c64(h[1], -h[2]), c64(h[3], 0.0)],
        ]);
        let m = LindbladModel::fixed(hm, vec![pauli::sigma_minus().scale_real(g.sqrt()), pauli::sigma_z().scale_real(0.3)]).unwrap();
        let rho = evolve(&m, &DensityMatrix::maximally_mixed(2), 1.0, 1e-2).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() <= 1e-8);
        prop_assert!(rho.min_eigenvalue() >= -1e-10);
    }

    #[test]
    fn sampled_weights_are_uniform(seed in any::<u64>()) {
        let m = LindbladModel::fixed(pauli::sigma_x(), vec![pauli::sigma_z().scale_real(0.8)]).unwrap();
        let s = build_scheme(&m, 0.05, 1.0).unwrap();
        let recs = sample_trajectories(&s, &PureState::basis(2, 0), 10, seed).unwrap();
        for r in recs {
            prop_assert!((r.weight - 0.1).abs() < 1e-12);
        }
    }
}
