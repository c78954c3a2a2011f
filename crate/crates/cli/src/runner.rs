//! Dispatches a validated configuration to the engines.

use std::time::Instant;

use openholo_core::holonomy::{catalog, holonomy, IsospectralFamily, ParameterPath, SphereLoop};
use openholo_core::jumps::{
    build_scheme, enumerate_trajectories, nojump_propagate, nojump_subspace, reconstruct_density, sample_trajectories,
    TrajectoryRecord,
};
use openholo_core::linalg::{c64, pauli, phase_insensitive_fidelity, singular_values, tensor, trace_distance};
use openholo_core::lindblad::{classify_kappa, evolve, KappaClass, LindbladModel};
use openholo_core::robustness::{
    analyze_gate, two_qubit_table, ConjugationSign, ErrorChannel, GateKind, GateSpec, JumpSpec, Verdict,
};
use openholo_core::{ComplexMatrix, DensityMatrix, PureState};

use crate::config::{code_dim, system_dim, Mode, ModelId, PathKind, RunConfig};
use crate::error::CliError;
use crate::report::{
    DensitySummary, Diagnostics, GateSummary, MatrixParts, ReportedJump, RobustnessEntry, RunReport, TableRow,
    TrajectoryRow,
};

/// The master-equation oracle steps this many times finer than the trajectories.
pub const ORACLE_REFINEMENT: f64 = 10.0;

fn single_site(c: char) -> Option<ComplexMatrix> {
    Some(match c {
        'I' => pauli::id2(),
        'X' => pauli::sigma_x(),
        'Y' => pauli::sigma_y(),
        'Z' => pauli::sigma_z(),
        '+' => pauli::sigma_plus(),
        '-' => pauli::sigma_minus(),
        _ => return None,
    })
}

/// Noise operator named by `op`: one site symbol (`I X Y Z + -`) per qubit.
/// For spin_half it acts on the system, for gate models on the code space.
pub fn noise_operator(model: ModelId, op: &str) -> Result<ComplexMatrix, String> {
    let sites = code_dim(model).trailing_zeros() as usize;
    let chars: Vec<char> = op.chars().collect();
    if chars.len() != sites {
        return Err(format!("`{op}` should have {sites} site symbol(s) for this model"));
    }
    chars
        .iter()
        .map(|&c| single_site(c).ok_or_else(|| format!("unknown site symbol `{c}` in `{op}` (expected I X Y Z + -)")))
        .reduce(|a, b| Ok(tensor(&a?, &b?)))
        .expect("at least one site")
}

pub fn build_family(config: &RunConfig) -> Result<IsospectralFamily, CliError> {
    let m = &config.model;
    Ok(match m.id {
        ModelId::SpinHalf => catalog::spin_half(),
        ModelId::QubitGate => catalog::single_qubit_gate(m.axis.unwrap_or(1), m.gap)?,
        ModelId::TwoQubitGate => {
            let [i, j] = m.axes.unwrap_or([1, 1]);
            catalog::two_qubit_gate(i, j, m.gap)?
        }
    })
}

fn polar_angle(config: &RunConfig) -> f64 {
    config
        .path
        .theta
        .unwrap_or_else(|| catalog::latitude_for_solid_angle(config.model.angle.unwrap_or(0.0)))
}

pub fn build_path(config: &RunConfig) -> Result<ParameterPath, CliError> {
    let p = &config.path;
    Ok(match p.kind {
        PathKind::SphereLoop => SphereLoop::new(polar_angle(config), p.latitude_steps, p.meridian_steps)?.path,
        PathKind::Latitude => ParameterPath::latitude(polar_angle(config), p.phi_start, p.phi_end, p.latitude_steps)?,
        PathKind::Waypoints => {
            let mut samples = vec![p.waypoints[0].to_vec()];
            for w in p.waypoints.windows(2) {
                for k in 1..=p.steps_per_leg {
                    let s = k as f64 / p.steps_per_leg as f64;
                    samples.push(vec![
                        w[0][0] + s * (w[1][0] - w[0][0]),
                        w[0][1] + s * (w[1][1] - w[0][1]),
                    ]);
                }
            }
            let closed = samples.first() == samples.last();
            ParameterPath::new(samples, closed)?.with_label("waypoints")
        }
    })
}

fn system_noise_ops(config: &RunConfig, family: &IsospectralFamily) -> Result<Vec<ComplexMatrix>, CliError> {
    config
        .noise
        .iter()
        .map(|n| {
            let op = noise_operator(config.model.id, &n.op).map_err(CliError::Validation)?;
            let op = if config.model.id == ModelId::SpinHalf {
                op
            } else {
                catalog::embed_code_operator(family, &op, op.is_unitary(1e-12))?
            };
            Ok(op.scale_real(n.rate.sqrt()))
        })
        .collect()
}

fn initial_state(config: &RunConfig, family: &IsospectralFamily) -> PureState {
    match &config.initial_state {
        Some(amps) => PureState::new(amps.iter().map(|[re, im]| c64(*re, *im)).collect()).normalized(),
        None => PureState::new(family.reference_basis().column(0)),
    }
}

pub fn kappa_label(class: KappaClass) -> String {
    match class {
        KappaClass::Identity { alpha } => format!("identity(alpha={alpha})"),
        KappaClass::ProportionalToH { alpha } => format!("proportional_to_h(alpha={alpha})"),
        KappaClass::Other { ladder: true } => "other(ladder)".into(),
        KappaClass::Other { ladder: false } => "other".into(),
    }
}

fn sign_label(s: ConjugationSign) -> String {
    match s {
        ConjugationSign::Plus => "+1".into(),
        ConjugationSign::Minus => "-1".into(),
        ConjugationSign::Destroyed => "destroyed".into(),
    }
}

fn gate_kind(config: &RunConfig) -> Option<GateKind> {
    let m = &config.model;
    let angle = m.angle?;
    match m.id {
        ModelId::SpinHalf => None,
        ModelId::QubitGate => Some(GateKind::SingleQubit { axis: m.axis?, angle }),
        ModelId::TwoQubitGate => {
            let [i, j] = m.axes?;
            Some(GateKind::TwoQubit { axes: (i, j), angle })
        }
    }
}

fn state_fidelity(ideal: &PureState, psi: &PureState) -> f64 {
    let n = psi.norm_sqr();
    if n == 0.0 {
        0.0
    } else {
        (ideal.inner(psi).norm_sqr() / n).min(1.0)
    }
}

fn rows(records: &[TrajectoryRecord], ideal: &PureState) -> Vec<TrajectoryRow> {
    records
        .iter()
        .enumerate()
        .map(|(index, r)| TrajectoryRow {
            index,
            jumps: r.jump_sequence.clone(),
            weight: r.weight,
            fidelity: state_fidelity(ideal, &r.final_state),
        })
        .collect()
}

/// Executes the configured mode.
pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    config.validate()?;
    let start = Instant::now();
    let family = build_family(config)?;
    let path = build_path(config)?;
    let closed = holonomy(&family, &path)?.u;
    let gate = gate_kind(config).map(|kind| {
        let ideal = catalog::involutory_exp(&kind.generator(), kind.angle());
        GateSummary {
            label: kind.label(),
            fidelity: phase_insensitive_fidelity(&ideal, &closed).min(1.0),
            ideal: MatrixParts::from(&ideal),
        }
    });
    let mut report = RunReport {
        config: config.clone(),
        model: family.name().to_string(),
        path_label: path.label().to_string(),
        holonomy: MatrixParts::from(&closed),
        gate,
        diagnostics: Diagnostics::default(),
        trajectories: Vec::new(),
        density: None,
        robustness: Vec::new(),
        table: Vec::new(),
        wall_clock_seconds: None,
    };
    if config.mode == Mode::Robustness {
        run_robustness(config, &mut report)?;
    } else {
        run_dynamics(config, family, path, &closed, &mut report)?;
    }
    report.wall_clock_seconds = Some(start.elapsed().as_secs_f64());
    Ok(report)
}

fn run_dynamics(
    config: &RunConfig,
    family: IsospectralFamily,
    path: ParameterPath,
    closed: &ComplexMatrix,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let t = config.total_time.expect("validated");
    let ops = system_noise_ops(config, &family)?;
    let psi0 = initial_state(config, &family);
    if psi0.dim() != system_dim(config.model.id) {
        return Err(CliError::Validation("initial_state: wrong dimension".into()));
    }
    let h0 = family.h0().clone();
    let noiseless = LindbladModel::along_path(family.clone(), path.clone(), t, Vec::new())?;
    let model = LindbladModel::along_path(family, path, t, ops)?;
    let class = classify_kappa(&model, &h0);
    let scheme = build_scheme(&model, config.dt, t)?;
    let ideal = nojump_propagate(&build_scheme(&noiseless, config.dt, t)?, &psi0)?;

    let d = &mut report.diagnostics;
    d.kappa_class = Some(kappa_label(class));
    d.steps = Some(scheme.steps());
    d.step_dt = Some(scheme.dt());
    d.completeness_defect = Some(scheme.max_completeness_defect()?);
    d.completeness_bound = Some(scheme.completeness_bound(0.0)?);

    let rho0 = DensityMatrix::from_pure(&psi0);
    let oracle = || evolve(&model, &rho0, t, config.dt / ORACLE_REFINEMENT);
    let summarize = |rho: DensityMatrix, reference: Option<&DensityMatrix>| -> Result<DensitySummary, CliError> {
        Ok(DensitySummary {
            matrix: MatrixParts::from(rho.matrix()),
            trace: rho.trace(),
            oracle_trace_distance: reference.map(|r| trace_distance(&rho, r)).transpose()?,
        })
    };

    match config.mode {
        Mode::Nojump => {
            let sub = nojump_subspace(&scheme, class)?;
            let n = sub.propagator.rows();
            let sv = singular_values(&sub.propagator);
            let magnitude = (sv.iter().map(|s| s.ln()).sum::<f64>() / n as f64).exp();
            let overlap = (closed.dagger() * sub.propagator.clone()).trace().norm() / n as f64;
            d.leakage = Some(sub.leakage);
            d.nojump_fidelity = Some(if magnitude > 0.0 {
                (overlap / magnitude).min(1.0)
            } else {
                0.0
            });
            d.subspace_propagator = Some(MatrixParts::from(&sub.propagator));
            d.visibility = sub.visibility;
            let psi = nojump_propagate(&scheme, &psi0)?;
            let rec = TrajectoryRecord {
                jump_sequence: Vec::new(),
                weight: psi.norm_sqr(),
                final_state: psi,
                states_log: None,
            };
            report.trajectories = rows(&[rec], &ideal);
        }
        Mode::Enumerate => {
            let records = enumerate_trajectories(&scheme, &psi0, config.max_jumps)?;
            report.trajectories = rows(&records, &ideal);
            report.density = Some(summarize(reconstruct_density(&records)?, Some(&oracle()?))?);
        }
        Mode::Montecarlo => {
            let records = sample_trajectories(&scheme, &psi0, config.n_traj, config.seed)?;
            report.trajectories = rows(&records, &ideal);
            report.density = Some(summarize(reconstruct_density(&records)?, Some(&oracle()?))?);
        }
        Mode::Master => {
            report.density = Some(summarize(oracle()?, None)?);
        }
        Mode::Robustness => unreachable!("handled by run_robustness"),
    }
    Ok(())
}

fn verdict_label(v: &Verdict) -> String {
    match v {
        Verdict::Robust => "robust",
        Verdict::SignFlipLaw { .. } => "sign_flip",
        Verdict::GateDestroyed { .. } => "destroyed",
    }
    .into()
}

fn run_robustness(config: &RunConfig, report: &mut RunReport) -> Result<(), CliError> {
    let kind = gate_kind(config).expect("validated gate model with angle");
    let gate = GateSpec::build(kind, config.model.gap, config.path.latitude_steps)?;
    let ops = config
        .noise
        .iter()
        .map(|n| noise_operator(config.model.id, &n.op).map_err(CliError::Validation))
        .collect::<Result<Vec<_>, _>>()?;
    let rate = config.noise.first().map_or(0.0, |n| n.rate);
    let channel = ErrorChannel::new(ops, rate)?;
    report.diagnostics.kappa_class = Some(kappa_label(channel.classify(&gate)?));

    let mut patterns: Vec<Vec<JumpSpec>> = vec![Vec::new()];
    for op in 0..config.noise.len() {
        for &fraction in &config.robustness.fractions {
            patterns.push(vec![JumpSpec { fraction, op }]);
        }
    }
    for p in &config.robustness.patterns {
        patterns.push(
            p.iter()
                .map(|j| JumpSpec {
                    fraction: j.fraction,
                    op: j.op,
                })
                .collect(),
        );
    }
    for pattern in patterns {
        let r = analyze_gate(&gate, &channel, &pattern)?;
        report.robustness.push(RobustnessEntry {
            jumps: r
                .jump_pattern
                .iter()
                .zip(&r.jump_points)
                .map(|(j, point)| ReportedJump {
                    fraction: j.fraction,
                    op: config.noise[j.op].op.clone(),
                    point: point.clone(),
                })
                .collect(),
            verdict: verdict_label(&r.verdict),
            effective_angle: r.effective_angle,
            fidelity: r.fidelity,
            kappa_class: kappa_label(r.kappa_class),
            prediction_error: r.prediction_error,
            route_discrepancy: r.route_discrepancy,
            singular_values: r.singular_values.clone(),
            holonomy: MatrixParts::from(&r.holonomy),
            subspace_map: MatrixParts::from(&r.subspace_map),
        });
    }
    if config.robustness.table && matches!(kind, GateKind::TwoQubit { .. }) {
        report.table = two_qubit_table(&gate)?
            .into_iter()
            .map(|e| TableRow {
                jump: e.label,
                algebraic: sign_label(e.algebraic),
                transported: sign_label(e.transported),
                fidelity: e.fidelity,
            })
            .collect();
    }
    Ok(())
}
