//! End-to-end checks of the run orchestration: determinism of the
//! manifests, artifact structure, and error mapping.

use dnls_core::cli::{
    config_hash, norm_table, run, DatumSpec, GridParams, NormSpecEntry, RunConfig, ScenarioKind,
    TimeParams,
};
use dnls_core::error::Error;
use dnls_core::field::gaussian_packet;
use dnls_core::field::FrequencyGrid;
use dnls_core::snapshot;
use std::path::Path;

fn evolve_config(steps: usize) -> RunConfig {
    RunConfig {
        scenario: ScenarioKind::Evolve,
        grid: GridParams {
            dim: 1,
            points_per_dim: 128,
            half_length: 8.0 * std::f64::consts::PI,
        },
        signature: None,
        time: Some(TimeParams {
            t_end: 1.0,
            steps,
        }),
        nonlinearity: None,
        datum: Some(DatumSpec::Gaussian {
            center: vec![0.0],
            sigma: 2.0,
            carrier: vec![0.0],
        }),
        amplitude: None,
        sobolev_index: None,
        seed: Some(7),
        tol: None,
        max_iter: None,
        dealias: None,
        save_trace: None,
        scatter_samples: None,
        probe_spec: None,
        norms: None,
    }
}

fn manifest_text(dir: &Path) -> String {
    std::fs::read_to_string(dir.join("manifest.json")).unwrap()
}

#[test]
fn rerunning_a_config_reproduces_every_artifact_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let config = evolve_config(8);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let summary_a = run(&config, &a, 1).unwrap();
    let summary_b = run(&config, &b, 1).unwrap();
    assert_eq!(summary_a.config_hash, summary_b.config_hash);
    assert_eq!(manifest_text(&a), manifest_text(&b));
    // free evolution writes steps + 1 snapshots plus record and sidecar
    assert_eq!(summary_a.artifacts.len(), 8 + 1 + 2);
}

#[test]
fn evolve_writes_readable_snapshots_with_the_run_signature() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = evolve_config(4);
    config.signature = Some(vec![-1]);
    let out = tmp.path().join("out");
    run(&config, &out, 1).unwrap();
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("trace_index.json")).unwrap())
            .unwrap();
    let names = sidecar["snapshots"].as_array().unwrap();
    assert_eq!(names.len(), 5);
    let (field, sig) = snapshot::read_field(&out.join(names[0].as_str().unwrap())).unwrap();
    assert_eq!(sig.signs(), &[-1]);
    assert_eq!(field.grid().points_per_dim(), 128);
    let times = sidecar["times"].as_array().unwrap();
    assert_eq!(times.len(), 5);
}

#[test]
fn picard_record_carries_contraction_history_and_residual() {
    let tmp = tempfile::tempdir().unwrap();
    let nl_path = tmp.path().join("quintic.json");
    std::fs::write(
        &nl_path,
        r#"[{ "re": 1.0, "im": 0.0, "kappa": [0, 0], "nu": [[5, 0]] }]"#,
    )
    .unwrap();
    let mut config = evolve_config(32);
    config.scenario = ScenarioKind::Picard;
    config.nonlinearity = Some(nl_path);
    config.amplitude = Some(1e-3);
    config.sobolev_index = Some(1.0);
    let out = tmp.path().join("out");
    let summary = run(&config, &out, 1).unwrap();
    assert!(summary.ok);
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("record.json")).unwrap()).unwrap();
    assert_eq!(record["config_hash"], summary.config_hash);
    assert!(record["residual"].as_f64().unwrap() <= 2e-8);
    assert!(record["geometric_tail"].as_bool().unwrap());
    assert!(!record["contraction_history"].as_array().unwrap().is_empty());
}

#[test]
fn probe_scenario_emits_report_and_ratio_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let spec_path = tmp.path().join("spec.json");
    let spec = serde_json::json!({
        "id": "strichartz",
        "dim": 1,
        "points_per_dim": 128,
        "half_length": 32.0,
        "signature": [1],
        "t_end": 4.0,
        "time_steps": 16,
        "band": 2.0,
        "envelope_sigma": 3.0,
        "ensemble": 16,
        "seed": 11,
        "p": 6.0
    });
    std::fs::write(&spec_path, serde_json::to_string_pretty(&spec).unwrap()).unwrap();
    let mut config = evolve_config(8);
    config.scenario = ScenarioKind::Probe;
    config.time = None;
    config.datum = None;
    config.probe_spec = Some(spec_path);
    let out = tmp.path().join("out");
    let summary = run(&config, &out, 1).unwrap();
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["id"], "strichartz");
    assert!(report["pass"].is_boolean());
    let csv = std::fs::read_to_string(out.join("ratios.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "seed,config,points_per_dim,t_end,band,ratio"
    );
    // 16 seeds x 4 configurations
    assert_eq!(csv.lines().count(), 1 + 16 * 4);
    assert!(summary.ok);
}

#[test]
fn scatter_scenario_produces_state_and_verdict() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = evolve_config(32);
    config.scenario = ScenarioKind::Scatter;
    config.scatter_samples = Some(9);
    let out = tmp.path().join("out");
    let summary = run(&config, &out, 1).unwrap();
    assert!(summary.ok, "free evolution must be scattering-consistent");
    let (u_plus, _) = snapshot::read_field(&out.join("u_plus.dnls")).unwrap();
    assert!(u_plus.l2_norm() > 0.0);
}

#[test]
fn norms_scenario_writes_reports_that_match_direct_calls() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = evolve_config(8);
    config.scenario = ScenarioKind::Norms;
    config.time = None;
    config.norms = Some(vec![
        NormSpecEntry {
            id: "lebesgue".into(),
            s: None,
            p: Some(2.0),
            q: None,
            homogeneous: None,
        },
        NormSpecEntry {
            id: "besov".into(),
            s: Some(0.5),
            p: Some(2.0),
            q: Some(1.0),
            homogeneous: None,
        },
    ]);
    let out = tmp.path().join("out");
    run(&config, &out, 1).unwrap();
    let reports: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("norm_reports.json")).unwrap())
            .unwrap();
    let rows = reports["reports"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert!(row["value"].as_f64().unwrap() > 0.0);
        assert!(row["tail_fraction"].as_f64().unwrap() < 0.01);
        assert!(row["warnings"].as_array().unwrap().is_empty());
    }
    let csv = std::fs::read_to_string(out.join("norms.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn validation_failures_map_to_exit_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = evolve_config(8);
    config.time = None;
    let err = run(&config, &tmp.path().join("out"), 1).unwrap_err();
    assert_eq!(err.exit_code(), 2);

    let missing = RunConfig::from_file(Path::new("/definitely/not/here.json")).unwrap_err();
    assert_eq!(missing.exit_code(), 4);
}

#[test]
fn numerical_failures_map_to_exit_code_three() {
    let tmp = tempfile::tempdir().unwrap();
    let nl_path = tmp.path().join("cubic.json");
    std::fs::write(
        &nl_path,
        r#"[{ "re": 1.0, "im": 0.0, "kappa": [2, 1], "nu": [[0, 0]] }]"#,
    )
    .unwrap();
    let mut config = evolve_config(16);
    config.scenario = ScenarioKind::Picard;
    config.nonlinearity = Some(nl_path);
    config.amplitude = Some(1e4);
    config.sobolev_index = Some(0.0);
    let err = run(&config, &tmp.path().join("out"), 1).unwrap_err();
    assert_eq!(err.exit_code(), 3, "got {err:?}");
}

#[test]
fn norm_table_is_usable_directly_on_fields() {
    let grid = FrequencyGrid::new(1, 64, 8.0).unwrap();
    let f = gaussian_packet(&grid, &[0.0], 1.0, &[0.0]).unwrap();
    let entries = vec![NormSpecEntry {
        id: "modulation".into(),
        s: Some(1.0),
        p: Some(2.0),
        q: Some(1.0),
        homogeneous: None,
    }];
    let (csv, reports) = norm_table(&[("g".into(), f)], &entries).unwrap();
    assert!(csv.contains("modulation"));
    assert_eq!(reports.len(), 1);
}

#[test]
fn config_hash_tracks_the_documented_fields() {
    let a = evolve_config(8);
    let mut b = evolve_config(8);
    b.seed = Some(8);
    assert_ne!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
}

#[test]
fn selfcheck_scenario_reports_all_green() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = evolve_config(8);
    config.scenario = ScenarioKind::Selfcheck;
    config.time = None;
    config.datum = None;
    let summary = run(&config, &tmp.path().join("out"), 1).unwrap();
    assert!(summary.ok);
}

#[test]
fn probe_error_for_unreadable_spec_is_io() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = evolve_config(8);
    config.scenario = ScenarioKind::Probe;
    config.probe_spec = Some(tmp.path().join("missing.json"));
    let err = run(&config, &tmp.path().join("out"), 1).unwrap_err();
    assert!(matches!(err, Error::Io(_)));
}
