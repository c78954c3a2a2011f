use openholo_cli::config::{ModelId, PathKind, DEFAULT_DT, DEFAULT_MAX_JUMPS, DEFAULT_N_TRAJ};
use openholo_cli::{parse_config, CliError, Mode, RunConfig};
use proptest::prelude::*;

const BASE: &str = r#"
mode = "enumerate"
total_time = 0.1

[model]
id = "qubit_gate"
axis = 1
angle = 0.8

[[noise]]
op = "Z"
rate = 0.5
"#;

fn validation_message(text: &str) -> String {
    match parse_config(text) {
        Err(CliError::Validation(msg)) => msg,
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn defaults_are_filled_in() {
    let c = parse_config(BASE).unwrap();
    assert_eq!(c.mode, Mode::Enumerate);
    assert_eq!(c.dt, DEFAULT_DT);
    assert_eq!(c.seed, 0);
    assert_eq!(c.max_jumps, DEFAULT_MAX_JUMPS);
    assert_eq!(c.n_traj, DEFAULT_N_TRAJ);
    assert_eq!(c.model.id, ModelId::QubitGate);
    assert_eq!(c.model.gap, 50.0);
    assert_eq!(c.path.kind, PathKind::SphereLoop);
    assert_eq!(c.path.latitude_steps, 1024);
    assert_eq!(c.robustness.fractions, vec![0.25, 0.5, 0.75]);
    assert!(c.robustness.table);
    assert_eq!(c.output.dir.to_str(), Some("out"));
    assert!(c.output.structured && c.output.tabular);
}

#[test]
fn misspelled_key_gets_a_suggestion() {
    let msg = validation_message(&BASE.replace("[model]", "[modle]"));
    assert!(msg.contains("did you mean") && msg.contains("`model`?"), "{msg}");
    let msg = validation_message(&BASE.replace("total_time", "total_tme"));
    assert!(msg.contains("did you mean `total_time`"), "{msg}");
}

#[test]
fn unrelated_unknown_key_has_no_suggestion() {
    let msg = validation_message(&format!("banana = 1\n{BASE}"));
    assert!(msg.contains("banana") && !msg.contains("did you mean"), "{msg}");
}

#[test]
fn negative_rate_names_its_field() {
    let msg = validation_message(&BASE.replace("rate = 0.5", "rate = -0.5"));
    assert!(msg.starts_with("noise[0].rate"), "{msg}");
}

#[test]
fn each_field_is_checked() {
    let cases: &[(&str, &str, &str)] = &[
        ("total_time = 0.1", "total_time = 0.1\ndt = 0.0", "dt"),
        ("total_time = 0.1", "total_time = -1.0", "total_time"),
        ("total_time = 0.1", "", "total_time"),
        ("total_time = 0.1", "total_time = 0.1\ndt = 0.5", "dt"),
        ("mode = \"enumerate\"", "mode = \"montecarlo\"\nn_traj = 0", "n_traj"),
        ("axis = 1", "axis = 4", "model.axis"),
        ("axis = 1", "", "model.axis"),
        ("angle = 0.8", "angle = 20.0", "model.angle"),
        ("angle = 0.8", "angle = 0.8\ngap = 0.0", "model.gap"),
        ("op = \"Z\"", "op = \"Q\"", "noise[0].op"),
        ("op = \"Z\"", "op = \"ZZ\"", "noise[0].op"),
        (
            "total_time = 0.1",
            "total_time = 0.1\ninitial_state = [[1.0, 0.0]]",
            "initial_state",
        ),
    ];
    for (from, to, field) in cases {
        let msg = validation_message(&BASE.replace(from, to));
        assert!(msg.starts_with(field), "expected `{field}` in `{msg}`");
    }
}

#[test]
fn path_and_robustness_fields_are_checked() {
    let cases = [
        ("[path]\ntheta = 4.0\n", "path.theta"),
        ("[path]\nlatitude_steps = 0\n", "path.latitude_steps"),
        (
            "[path]\nkind = \"waypoints\"\nwaypoints = [[0.1, 0.0]]\n",
            "path.waypoints",
        ),
        ("[path]\nkind = \"latitude\"\nphi_end = 0.0\n", "path.phi_end"),
        ("[robustness]\nfractions = [1.5]\n", "robustness.fractions[0]"),
        (
            "[robustness]\npatterns = [[{ fraction = 0.5, op = 3 }]]\n",
            "robustness.patterns[0][0]",
        ),
        ("[output]\ndir = \"\"\n", "output.dir"),
    ];
    for (extra, field) in cases {
        let msg = validation_message(&format!("{BASE}\n{extra}"));
        assert!(msg.starts_with(field), "expected `{field}` in `{msg}`");
    }
}

#[test]
fn robustness_mode_requirements() {
    let robust = BASE.replace("mode = \"enumerate\"", "mode = \"robustness\"");
    assert!(parse_config(&robust).is_ok());
    let msg = validation_message(&format!("{robust}\n[[noise]]\nop = \"X\"\nrate = 0.25\n"));
    assert!(msg.starts_with("noise[1].rate"), "{msg}");
    let msg = validation_message(&robust.replace("angle = 0.8\n", ""));
    assert!(msg.starts_with("model.angle"), "{msg}");
    let msg = validation_message(&format!("{robust}\n[path]\nkind = \"latitude\"\n"));
    assert!(msg.starts_with("path.kind"), "{msg}");
}

#[test]
fn spin_half_and_two_qubit_models() {
    let spin = "mode = \"master\"\ntotal_time = 1.0\n[model]\nid = \"spin_half\"\n[path]\ntheta = 1.0\n\
                [[noise]]\nop = \"-\"\nrate = 0.1\n";
    assert!(parse_config(spin).is_ok());
    let msg = validation_message(&spin.replace("theta = 1.0\n", ""));
    assert!(msg.starts_with("path.theta"), "{msg}");
    let two = BASE
        .replace("axis = 1", "axes = [1, 2]")
        .replace("id = \"qubit_gate\"", "id = \"two_qubit_gate\"");
    assert!(validation_message(&two).starts_with("noise[0].op"));
    assert!(parse_config(&two.replace("op = \"Z\"", "op = \"ZX\"")).is_ok());
    let msg = validation_message(&two.replace("[1, 2]", "[1, 3]"));
    assert!(msg.starts_with("model.axes"), "{msg}");
}

#[test]
fn unknown_mode_lists_choices() {
    let err = "sideways".parse::<Mode>().unwrap_err();
    assert!(err.contains("montecarlo"));
    assert_eq!("master".parse::<Mode>().unwrap(), Mode::Master);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn toml_round_trip(dt in 1e-5f64..1e-2, seed in any::<u64>(), rate in 0.0f64..10.0, n in 1usize..5000) {
        let mut c: RunConfig = parse_config(BASE).unwrap();
        c.dt = dt;
        c.seed = seed;
        c.noise[0].rate = rate;
        c.n_traj = n;
        let text = toml::to_string(&c).unwrap();
        prop_assert_eq!(parse_config(&text).unwrap(), c);
    }
}
