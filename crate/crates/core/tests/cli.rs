mod common;

use std::path::Path;
use std::process::Command;

use valdist::cli::{
    main_with_args, run_scenario, run_selftest_with, scenario_with_defaults, CliError, Scenario, ScenarioKind,
};
use valdist::nevanlinna::QuadratureSettings;

fn run(args: &[&str]) -> i32 {
    let mut v = vec!["valdist"];
    v.extend_from_slice(args);
    main_with_args(v)
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn write_scenario(dir: &Path, text: &str) -> String {
    let p = dir.join("scenario.json");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn documented_scenario_parses() {
    let text = r#"{
      "kind": "defect",
      "curve": { "exponents": ["z", "0.7071067811865476*z"] },
      "divisor": {
        "compactification": "product",
        "multidegree": [1, 1],
        "terms": [
          { "exponent": [0, 0], "coefficient": "1" },
          { "exponent": [1, 1], "coefficient": "2" }
        ]
      },
      "grid": { "rmin": 10, "rmax": 35, "steps": 24, "spacing": "log" },
      "k": [1]
    }"#;
    let s = Scenario::from_json(text).unwrap();
    assert_eq!(s.kind, ScenarioKind::Defect);
    assert_eq!(s.curve().unwrap().p(), 2);
    assert_eq!(s.divisor().unwrap().support().count(), 2);
    let aliased = Scenario::from_json(r#"{"type": "boundary"}"#).unwrap();
    assert_eq!(aliased.kind, ScenarioKind::Boundary);
}

#[test]
fn scenario_fields_overlay_defaults() {
    let s = scenario_with_defaults(ScenarioKind::ExponentialSum, Some(r#"{"c": "0.6", "k": [1, 2, 3]}"#)).unwrap();
    assert_eq!((s.m, s.n), (Some(1), Some(2)));
    assert_eq!(s.c.unwrap().real().unwrap(), 0.6);
    assert_eq!(s.k, Some(vec![1, 2, 3]));
    let err = scenario_with_defaults(ScenarioKind::ExponentialSum, Some(r#"{"kind": "torus"}"#)).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn invalid_grids_are_rejected() {
    for text in [
        r#"{"grid": {"rmin": 0.5, "rmax": 10, "steps": 12}}"#,
        r#"{"grid": {"rmin": 5, "rmax": 40, "steps": 4}}"#,
        r#"{"grid": {"rmin": 20, "rmax": 10, "steps": 12}}"#,
        r#"{"quadrature": {"abs_tol": 0}}"#,
    ] {
        let e = scenario_with_defaults(ScenarioKind::Characteristic, Some(text)).unwrap_err();
        assert!(matches!(e, CliError::InvalidInput(_)), "{text}: {e}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b");
    assert_eq!(run(&["boundary-check", "--out", out.to_str().unwrap()]), 0);
    assert!(read(&out, "report.json").contains("\"boundary_condition\": false"));

    let bad = write_scenario(dir.path(), r#"{"function": "log(z)"}"#);
    assert_eq!(run(&["characteristic", "--scenario", &bad]), 2);
    assert_eq!(run(&["characteristic", "--rmin", "0.5"]), 2);
    assert_eq!(run(&["frobnicate"]), 2);

    let violation = write_scenario(dir.path(), r#"{"c": 1.2}"#);
    assert_eq!(run(&["reproduce", "ex518", "--scenario", &violation]), 2);

    let satisfied = write_scenario(
        dir.path(),
        r#"{"divisor": {"compactification": "product", "multidegree": [1, 1],
            "terms": [{"exponent": [0, 0], "coefficient": 1}, {"exponent": [1, 0], "coefficient": 1},
                      {"exponent": [0, 1], "coefficient": 1}, {"exponent": [1, 1], "coefficient": 3}]}}"#,
    );
    let refused = dir.path().join("refused");
    assert_eq!(run(&["reproduce", "prop513", "--scenario", &satisfied, "--out", refused.to_str().unwrap()]), 2);
    assert!(read(&refused, "report.json").contains("\"boundary_condition_holds\": true"));
}

#[test]
fn numeric_failure_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("coarse");
    assert_eq!(run(&["selftest", "--tol", "1e3", "--out", out.to_str().unwrap()]), 1);
}

#[test]
fn coarse_quadrature_flags_jensen() {
    let q = QuadratureSettings {
        abs_tol: 1.0,
        initial_panels: 1,
        max_panels: 1,
        ..QuadratureSettings::default()
    };
    let report = run_selftest_with(&q);
    assert!(!report.passed);
    let jensen = report.checks.iter().find(|c| c.name.contains("Jensen")).unwrap();
    assert!(!jensen.passed, "{}", jensen.line());
}

#[test]
fn selftest_passes_at_default_settings() {
    let report = valdist::cli::run_selftest();
    let failures: Vec<String> = report.failures().map(|c| c.line()).collect();
    assert!(failures.is_empty(), "{failures:#?}");
    assert!(common::schema_errors(&report.to_json()).is_empty());
}

#[test]
fn reports_follow_the_schema() {
    let small_torus = r#"{"rmax": 12}"#;
    let cases: [(ScenarioKind, Option<&str>); 9] = [
        (ScenarioKind::Characteristic, None),
        (ScenarioKind::Characteristic, Some(r#"{"function": "(exp(z)-2)/(z+3.5)", "grid": {"rmin": 2, "rmax": 12, "steps": 10}}"#)),
        (ScenarioKind::Defect, None),
        (ScenarioKind::Boundary, Some(r#"{"hyperplane": [1, 1, 1]}"#)),
        (ScenarioKind::Stabilizer, None),
        (ScenarioKind::ExponentialSum, None),
        (ScenarioKind::Cartan, None),
        (ScenarioKind::PositiveDefect, None),
        (ScenarioKind::Torus, Some(small_torus)),
    ];
    for (kind, text) in cases {
        let s = scenario_with_defaults(kind, text).unwrap();
        let report = run_scenario(&s).unwrap();
        let errs = common::schema_errors(&report.to_json());
        assert!(errs.is_empty(), "{kind:?}: {errs:#?}");
        assert!(report.passed, "{kind:?}: {:#?}", report.failures().collect::<Vec<_>>());
    }
}

#[test]
fn validator_rejects_malformed_reports() {
    let s = scenario_with_defaults(ScenarioKind::Stabilizer, None).unwrap();
    let good: serde_json::Value = serde_json::from_str(&run_scenario(&s).unwrap().to_json()).unwrap();
    let schema = common::report_schema();
    let mut missing = good.clone();
    missing.as_object_mut().unwrap().remove("settings_hash");
    assert!(!common::validate(&schema, &schema, &missing, "").is_empty());
    let mut extra = good.clone();
    extra["checks"][0]["surprise"] = serde_json::json!(1);
    assert!(!common::validate(&schema, &schema, &extra, "").is_empty());
    let mut kind = good;
    kind["kind"] = serde_json::json!("unknown");
    assert!(!common::validate(&schema, &schema, &kind, "").is_empty());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        assert_eq!(run(&["reproduce", "ex518", "--out", out.to_str().unwrap()]), 0);
    }
    let mut names: Vec<String> = std::fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert!(names.contains(&"characteristic.csv".to_string()) && names.contains(&"sweep.csv".to_string()));
    for name in names {
        assert_eq!(read(&a, &name), read(&b, &name), "{name}");
    }
}

#[test]
fn binary_writes_csv_to_stdout() {
    let exe = env!("CARGO_BIN_EXE_valdist");
    let out = Command::new(exe)
        .args(["characteristic", "--rmin", "10", "--rmax", "30", "--steps", "10", "--log-grid", "--k", "1,2", "--format", "csv"])
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# characteristic"));
    assert_eq!(lines.next(), Some("r,T,m,N,N_1,N_2,residual"));
    assert_eq!(lines.filter(|l| !l.is_empty()).count(), 10);
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS"));
}
