use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use trapdyn::output::{read_numeric_csv, STEADY_HEADER, SWEEP_HEADER, TRAJECTORY_HEADER};

fn trapdyn(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trapdyn"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], out: &Path) -> String {
    let o = trapdyn(args, out);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn steady_writes_both_formats() {
    let dir = TempDir::new().unwrap();
    ok(&["steady", "--preset", "figure1"], dir.path());
    let csv = fs::read_to_string(dir.path().join("steady.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some(STEADY_HEADER));
    assert_eq!(csv.lines().count(), 3);
    let v = json(&dir.path().join("steady.json"));
    let states = v.as_array().unwrap();
    assert_eq!(states.len(), 2);
    for key in ["a", "pi", "R", "regime_tag", "residual"] {
        assert!(states[0].get(key).is_some(), "missing {key}");
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let (d1, d2) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for d in [&d1, &d2] {
        ok(&["steady", "--preset", "figure2"], d.path());
        ok(&["portrait", "--preset", "figure2", "--resolution", "4"], d.path());
    }
    for f in ["steady.csv", "steady.json", "portrait.json", "basin.csv"] {
        assert_eq!(
            fs::read(d1.path().join(f)).unwrap(),
            fs::read(d2.path().join(f)).unwrap(),
            "{f} differs"
        );
    }
}

#[test]
fn classify_reports_regime_conditions() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(&["classify", "--preset", "figure1"], dir.path());
    assert!(stdout.contains("dpi*/da*"));
    let v = json(&dir.path().join("classify.json"));
    assert_eq!(v["regime"], "debt_targeting");
    assert!(v["comparative_statics"]["long_run"].as_f64().unwrap() > 0.0);

    let stdout = ok(&["classify", "--preset", "figure3"], dir.path());
    assert!(stdout.contains("predicates agree with spectra: true"));
    let v = json(&dir.path().join("classify.json"));
    assert!(v["conditions"].is_object());
    assert_eq!(v["states"].as_array().unwrap().len(), 2);
}

#[test]
fn classify_raw_matrix() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(&["classify", "--matrix", "-0.3,1,-2,-0.1"], dir.path());
    assert!(stdout.starts_with("matrix: "));
    let v = json(&dir.path().join("classify.json"));
    assert!((v["trace"].as_f64().unwrap() + 0.4).abs() < 1e-15);
    assert!((v["determinant"].as_f64().unwrap() - 2.03).abs() < 1e-12);
    assert!(v["discriminant"].as_f64().unwrap() < 0.0);

    let o = trapdyn(&["classify", "--matrix", "1,2,3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn portrait_json_carries_every_layer() {
    let dir = TempDir::new().unwrap();
    ok(&["portrait", "--preset", "figure2", "--resolution", "5x3"], dir.path());
    let v = json(&dir.path().join("portrait.json"));
    for key in ["regime", "steady_states", "isoclines", "manifolds", "heteroclinic", "basin"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let (header, rows) = header_and_row_count(&dir.path().join("basin.csv"));
    assert_eq!(header, "a0,pi0,label");
    assert_eq!(rows, 15);
}

fn header_and_row_count(path: &Path) -> (String, usize) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    (header, lines.count())
}

#[test]
fn orbit_emits_connection_and_solvency() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(&["orbit", "--preset", "figure2"], dir.path());
    assert!(stdout.starts_with("connected in "));
    let csv = fs::read_to_string(dir.path().join("orbit.csv")).unwrap();
    let (header, rows) = read_numeric_csv(&csv).unwrap();
    assert_eq!(header.join(","), TRAJECTORY_HEADER);
    assert!(rows.len() > 100);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    let meta = json(&dir.path().join("orbit_meta.json"));
    assert_eq!(meta["method"], "backward_stable_arm");
    assert!(meta["trap_residual"].as_f64().unwrap() < 1e-4);
    assert!(meta["solvency"]["discounted_terminal"].as_f64().unwrap().abs() < 1e-6);

    let o = trapdyn(&["orbit", "--preset", "figure1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_and_replication() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(&["sweep", "--resolution", "3"], dir.path());
    assert!(stdout.starts_with("243 points"));
    let (header, rows) = read_numeric_csv(&fs::read_to_string(dir.path().join("sweep.csv")).unwrap()).unwrap();
    assert_eq!(header.join(","), SWEEP_HEADER);
    assert_eq!(rows.len(), 243);
    assert!(rows.iter().all(|r| r[5] < 0.0));

    let stdout = ok(&["replicate-appendix-c"], dir.path());
    assert!(stdout.contains("J22 (eps = 0.6) = -1.9507"));
    assert!(stdout.contains("all negative: true"));
    let v = json(&dir.path().join("appendix_c.json"));
    assert_eq!(v["refined"]["count"], 59049);
    assert_eq!(v["all_negative"], true);
}

#[test]
fn dump_config_round_trips_through_a_file() {
    let dir = TempDir::new().unwrap();
    let dumped = ok(&["dump-config", "--preset", "figure3"], dir.path());
    let path = dir.path().join("cfg.json");
    fs::write(&path, &dumped).unwrap();
    let again = ok(&["dump-config", "--config", path.to_str().unwrap()], dir.path());
    assert_eq!(dumped, again);
    let a = ok(&["steady", "--preset", "figure3"], dir.path());
    let b = ok(&["steady", "--config", path.to_str().unwrap()], dir.path());
    assert_eq!(a, b);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let o = trapdyn(&["steady", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));

    let dumped = ok(&["dump-config", "--preset", "figure1"], dir.path());
    let mut v: serde_json::Value = serde_json::from_str(&dumped).unwrap();
    v["params"]["kappa"] = serde_json::json!(1.0);
    fs::write(&bad, v.to_string()).unwrap();
    let o = trapdyn(&["steady", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kappa"));

    let o = trapdyn(&["steady", "--preset", "figure1", "--seed-eps=-1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = trapdyn(&["steady"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = trapdyn(&["no-such-command"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
