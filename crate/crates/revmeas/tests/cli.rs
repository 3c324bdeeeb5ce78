use std::path::Path;
use std::process::{Command, Output};

fn revmeas(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_revmeas"));
    cmd.args(args).env_remove("REVMEAS_THREADS");
    if let Some(t) = threads {
        cmd.env("REVMEAS_THREADS", t);
    }
    cmd.output().unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

const SWEEP: &[&str] = &[
    "theorem1-sweep",
    "--dims",
    "2x2",
    "--a-grid",
    "0.1,0.25,0.4",
    "--states",
    "4",
    "--seed",
    "7",
    "--restarts",
    "4",
];

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for (i, threads) in [None, Some("1"), Some("3")].into_iter().enumerate() {
        let out = dir.path().join(format!("r{i}.csv"));
        let mut args = SWEEP.to_vec();
        let out_str = out.to_string_lossy().into_owned();
        args.extend(["--out", &out_str]);
        let o = revmeas(&args, threads);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        reports.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0], reports[2]);
    assert_eq!(String::from_utf8_lossy(&reports[0]).lines().count(), 13);
}

#[test]
fn different_seeds_give_different_reports() {
    let a = revmeas(SWEEP, None).stdout;
    let mut args = SWEEP.to_vec();
    args[8] = "8";
    assert_ne!(a, revmeas(&args, None).stdout);
}

#[test]
fn injected_violation_flips_the_exit_status() {
    let mut args = SWEEP.to_vec();
    args.push("--inject-violation");
    let o = revmeas(&args, None);
    assert_eq!(o.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("12 of 12 rows violated"), "{stderr}");
    // the report is still complete
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 13);

    for cmd in [
        vec!["entropy-bounds", "--dims", "3", "--states", "5", "--inject-violation"],
        vec!["lemma1", "--dims", "2", "--states", "5", "--inject-violation"],
        vec![
            "reversal-sim",
            "--dims",
            "2",
            "--states",
            "1",
            "--trials",
            "1000",
            "--inject-violation",
        ],
    ] {
        assert_eq!(revmeas(&cmd, None).status.code(), Some(1), "{cmd:?}");
        let honest: Vec<&str> = cmd.iter().copied().filter(|a| *a != "--inject-violation").collect();
        assert_eq!(revmeas(&honest, None).status.code(), Some(0), "{honest:?}");
    }
}

#[test]
fn configuration_errors_exit_with_two() {
    let cases: &[&[&str]] = &[
        &["theorem1-sweep", "--a-grid", "0.1,0.5"],
        &["theorem1-sweep", "--a-grid", "0.6:0.8:0.1"],
        &["theorem1-sweep", "--dims", "2by2"],
        &["theorem1-sweep", "--states", "0"],
        &["lemma1", "--rank", "9", "--dims", "3"],
        &["--states", "3"],
        &["no-such-command"],
        &["discord", "--state", "/nonexistent/state.json"],
        &["entropy-bounds", "--measurement", "x.json"],
    ];
    for args in cases {
        let o = revmeas(args, None);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
        assert!(o.stdout.is_empty(), "{args:?}");
    }
    assert_eq!(
        revmeas(&["lemma1", "--states", "2"], Some("zero")).status.code(),
        Some(2)
    );
}

#[test]
fn a_grid_is_checked_against_the_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("qutrit.json");
    let rho = revmeas_core::state::random_state(6, 6, 1).unwrap();
    std::fs::write(&path, revmeas::io::state_to_json(&rho, Some([3, 2]))).unwrap();
    let p = path.to_string_lossy().into_owned();
    let o = revmeas(&["discord", "--state", &p, "--a-grid", "0.4"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1/3"));
    let o = revmeas(&["discord", "--state", &p, "--a-grid", "0.2", "--restarts", "2"], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn bell_state_discord_from_file() {
    let o = revmeas(
        &[
            "discord",
            "--state",
            &data("bell.json"),
            "--a-grid",
            "0.25",
            "--format",
            "json",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.len(), 1);
    let get = |k: &str| rows[0][k].as_f64().unwrap();
    assert!((get("d_vn") - 1.0).abs() < 1e-4);
    assert!((get("d_u") - 1.8112781).abs() < 1e-4);
    assert!((get("j_u") - 0.1887219).abs() < 1e-4);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"command": "lemma1", "dims": "3", "num_states": 4, "seed": 5, "format": "json"}"#,
    )
    .unwrap();
    let c = cfg.to_string_lossy().into_owned();
    let o = revmeas(&["--config", &c], None);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.len(), 4);
    let o = revmeas(&["--config", &c, "--states", "2", "--format", "csv"], None);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 3);

    std::fs::write(&cfg, "{\"command\": \"lemma1\",\n \"states\": 4}").unwrap();
    let o = revmeas(&["--config", &c], None);
    assert_eq!(o.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("states") && stderr.contains("line 2"), "{stderr}");
}

#[test]
fn reversal_sim_with_measurement_file() {
    let o = revmeas(
        &[
            "reversal-sim",
            "--measurement",
            &data("hadamard_reversible.json"),
            "--states",
            "2",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    for rec in reader.records() {
        let rec = rec.unwrap();
        assert_eq!(&rec[1], "0.1");
        let emp: f64 = rec[5].parse().unwrap();
        assert!((emp - 0.2).abs() <= 0.0038);
    }
}
