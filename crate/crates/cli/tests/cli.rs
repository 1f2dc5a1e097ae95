use std::path::{Path, PathBuf};
use std::process::Command as Process;

use prepsim::{build_sg, operator_distance, GridGeometry64, Occurrence, PreparatorKind, SgVariant, Tolerances64};
use prepsim_cli::report::Payload;
use prepsim_cli::{parse_scenario, parse_scenario_str, run_command, spec_to_scenario, CliError, Command, RunConfig, Setup};

const BUNDLED: [&str; 7] = [
    "sg-measurement",
    "sg-passthrough",
    "sg-negative",
    "sg-geometrical",
    "hole-negative",
    "hole-geometrical",
    "raio-twin",
];

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.toml"))
}

fn bin() -> Process {
    let mut p = Process::new(env!("CARGO_BIN_EXE_prepsim"));
    p.env_remove("PREPSIM_SEED");
    p
}

#[test]
fn every_bundled_scenario_parses_and_validates() {
    for name in BUNDLED {
        let report = run_command(&RunConfig::new(Command::Validate, scenario(name))).unwrap();
        assert!(report.passed, "{name}: {:?}", report.checks);
        assert_eq!(report.scenario.label, name);
    }
}

#[test]
fn sg_negative_maps_to_dynamical_ideal() {
    let s = parse_scenario(&scenario("sg-negative")).unwrap();
    let Setup::Preparator { spec, .. } = &s.setup else {
        panic!("expected a preparator")
    };
    assert_eq!(spec.kind(), PreparatorKind::Dynamical);
    assert_eq!(spec.occurrence(), Occurrence::Ideal);
    assert_eq!(spec.rho_composite().signature().dims(), &[2, 64]);
}

#[test]
fn unnormalized_amplitudes_are_rejected_with_context() {
    let text = "model = \"sg\"\nvariant = \"negative\"\nalpha_re = 0.6708203932499369\nbeta_re = 0.6708203932499369\n";
    match parse_scenario_str(text, "short.toml", &[]).unwrap_err() {
        CliError::Field { field, line, message, .. } => {
            assert_eq!(field, "alpha_re");
            assert_eq!(line, Some(3));
            assert!(message.contains("not normalized"), "{message}");
            assert!(message.contains("0.9"), "{message}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn serialized_spec_round_trips_exactly() {
    let tol = Tolerances64::default();
    let (a, b) = (prepsim::Complex64::new(0.6, 0.0), prepsim::Complex64::new(0.0, 0.8));
    for variant in [SgVariant::Negative, SgVariant::DetectorPassthrough { seed: 5 }] {
        let spec = build_sg(a, b, &GridGeometry64::default(), variant, &tol).unwrap();
        let text = spec_to_scenario(&spec, &tol).to_toml_string().unwrap();
        let back = parse_scenario_str(&text, "round-trip", &[]).unwrap();
        let Setup::Preparator { spec: again, .. } = &back.setup else {
            panic!("expected a preparator")
        };
        let d = operator_distance(spec.rho_composite(), again.rho_composite()).unwrap();
        assert_eq!(d.max_entry, 0.0);
        assert_eq!(d.trace_norm, 0.0);
        assert_eq!(spec.rho_composite().matrix(), again.rho_composite().matrix());
        assert_eq!(spec.u_preparator().matrix(), again.u_preparator().matrix());
        assert_eq!(spec.trigger(), again.trigger());
        assert_eq!((spec.kind(), spec.occurrence()), (again.kind(), again.occurrence()));
    }
}

#[test]
fn run_on_bundled_sg_reports_closed_form_values() {
    for name in ["sg-measurement", "sg-passthrough", "sg-negative", "sg-geometrical"] {
        let report = run_command(&RunConfig::new(Command::Run, scenario(name))).unwrap();
        assert!(report.passed, "{name}");
        let Payload::Preparation(p) = &report.payload else {
            panic!("expected a preparation payload")
        };
        assert!((p.probability - 0.5).abs() < 1e-12);
        assert!((p.spin_up_fidelity.unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn single_trial_sweep_is_a_seed_zero_raio_check() {
    let sweep = run_command(&RunConfig::new(Command::Sweep, scenario("raio-twin")).with_seed(0)).unwrap();
    let check = run_command(&RunConfig::new(Command::RaioCheck, scenario("raio-twin")).with_seed(0)).unwrap();
    let Payload::Sweep(s) = &sweep.payload else { panic!() };
    assert_eq!(s.records.len(), 1);
    assert_eq!(s.records[0].seed, 0);
    for c in &check.checks {
        assert_eq!(s.records[0].residuals[&c.name].to_bits(), c.residual.to_bits(), "{}", c.name);
    }
    let sweep_checks: Vec<_> = sweep.checks.iter().map(|c| (c.name.clone(), c.residual.to_bits(), c.pass)).collect();
    let single_checks: Vec<_> = check.checks.iter().map(|c| (c.name.clone(), c.residual.to_bits(), c.pass)).collect();
    assert_eq!(sweep_checks, single_checks);
}

#[test]
fn sweeps_are_deterministic_across_reruns_and_worker_counts() {
    let cfg = RunConfig::new(Command::Sweep, scenario("raio-twin")).with_seed(11).with_trials(100);
    let a = run_command(&cfg).unwrap();
    let b = run_command(&cfg).unwrap();
    let c = run_command(&cfg.clone().with_threads(3)).unwrap();
    assert_eq!(a.numeric_payload(), b.numeric_payload());
    assert_eq!(a.numeric_payload(), c.numeric_payload());
    let Payload::Sweep(s) = &a.payload else { panic!() };
    assert_eq!(s.passed_trials, 100);

    let cfg = RunConfig::new(Command::Sweep, scenario("hole-negative")).with_seed(4).with_trials(3);
    let a = run_command(&cfg).unwrap();
    let b = run_command(&cfg.clone().with_threads(2)).unwrap();
    assert_eq!(a.numeric_payload(), b.numeric_payload());
    assert!(a.passed);
}

#[test]
fn decoupled_sweep_lists_failing_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("decoupled.toml");
    std::fs::write(
        &path,
        "model = \"raio-twin\"\nvariant = \"decoupled\"\nalpha_re = 0.7071067811865476\nbeta_re = 0.7071067811865476\nd_preparator = 8\n",
    )
    .unwrap();
    let report = run_command(&RunConfig::new(Command::Sweep, &path).with_seed(100).with_trials(10)).unwrap();
    assert!(!report.passed);
    let Payload::Sweep(s) = &report.payload else { panic!() };
    assert!(!s.failures.is_empty());
    assert!(s.failures.iter().all(|f| (100..110).contains(&f.seed)));
    assert!(s.failures[0].checks.contains(&"raio_condition_ii".to_string()));
}

#[test]
fn binary_exit_codes() {
    let ok = bin()
        .args(["validate", "--scenario"])
        .arg(scenario("sg-negative"))
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report["passed"], true);

    let dir = tempfile::tempdir().unwrap();
    let decoupled = dir.path().join("d.toml");
    std::fs::write(
        &decoupled,
        "model = \"raio-twin\"\nvariant = \"decoupled\"\nalpha_re = 0.6\nbeta_re = 0.8\nd_preparator = 6\nseed = 2\n",
    )
    .unwrap();
    let failed = bin().args(["raio-check", "--scenario"]).arg(&decoupled).output().unwrap();
    assert_eq!(failed.status.code(), Some(1));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "model = \"sg\"\nvariant = \"negative\"\nalpha_re = 0.9\nbeta_re = 0.0\n").unwrap();
    let err = bin().args(["run", "--scenario"]).arg(&bad).output().unwrap();
    assert_eq!(err.status.code(), Some(2));
    let e: serde_json::Value = serde_json::from_slice(&err.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "invalid-field");
    assert_eq!(e["error"]["field"], "alpha_re");
    assert_eq!(e["error"]["line"], 3);

    let missing = bin().args(["run", "--scenario", "/nonexistent.toml"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn binary_seed_fallback_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.tsv");
    let status = bin()
        .env("PREPSIM_SEED", "42")
        .args(["sweep", "--trials", "2", "--format", "table", "--scenario"])
        .arg(scenario("raio-twin"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("root_seed\t42\n"));
    assert!(text.contains("payload.records.1.seed\t43\n"));

    let explicit = bin()
        .env("PREPSIM_SEED", "42")
        .args(["raio-check", "--seed", "7", "--scenario"])
        .arg(scenario("raio-twin"))
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&explicit.stdout).unwrap();
    assert_eq!(v["root_seed"], 7);
    assert_eq!(v["payload"]["instance_seed"], 7);
}

#[test]
fn tolerance_overrides_reach_the_checks() {
    let cfg = RunConfig::new(Command::Run, scenario("sg-negative")).with_tolerance("identity_eps", 1e-6);
    let report = run_command(&cfg).unwrap();
    assert_eq!(report.tolerances.identity_eps, 1e-6);
    assert!(report.checks.iter().any(|c| c.tolerance == 1e-6));
    let bad = RunConfig::new(Command::Run, scenario("sg-negative")).with_tolerance("identity_eps", 2.0);
    assert!(matches!(run_command(&bad), Err(CliError::Usage(_))));
}
