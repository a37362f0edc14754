use trapdyn::calib::{sweep_j22, CalibrationPreset, SweepRanges};
use trapdyn::config::{Numerics, RunConfig};
use trapdyn::flow::{integrate, Direction, IntegrateOptions};
use trapdyn::output::{read_numeric_csv, steady_csv, sweep_csv, trajectory_csv, STEADY_HEADER};
use trapdyn::presets::{figure1, figure2};
use trapdyn::steady::{solve, ScanOptions};
use trapdyn::StateVector;

#[test]
fn trajectory_csv_is_exact() {
    let m = figure2().unwrap();
    let opts = IntegrateOptions {
        sample_interval: Some(0.37),
        ..IntegrateOptions::default()
    };
    let tr = integrate(&m, StateVector::new(0.59, 0.01), 12.0, Direction::Forward, &opts).unwrap();
    let (header, rows) = read_numeric_csv(&trajectory_csv(&tr)).unwrap();
    assert_eq!(header, ["t", "a", "pi", "R", "m", "b", "s"]);
    assert_eq!(rows.len(), tr.len());
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r, &[tr.t[i], tr.a[i], tr.pi[i], tr.nominal_rate[i], tr.m[i], tr.b[i], tr.s[i]]);
    }
}

#[test]
fn sweep_csv_is_exact() {
    let report = sweep_j22(&CalibrationPreset::default(), &SweepRanges::default(), 2).unwrap();
    let (_, rows) = read_numeric_csv(&sweep_csv(&report.points)).unwrap();
    assert_eq!(rows.len(), 32);
    for (p, r) in report.points.iter().zip(&rows) {
        assert_eq!(r, &[p.eps, p.velocity, p.psi_trap, p.psi_prime_trap, p.a_star, p.j22]);
    }
}

#[test]
fn steady_csv_keeps_regime_tag() {
    let m = figure1().unwrap();
    let states = solve(&m, &ScanOptions::default()).unwrap();
    let csv = steady_csv(&states);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(STEADY_HEADER));
    for (line, s) in lines.zip(&states) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[0].parse::<f64>().unwrap(), s.a);
        assert_eq!(cols[1].parse::<f64>().unwrap(), s.pi);
        assert_eq!(cols[4], "debt_targeting");
    }
}

#[test]
fn malformed_csv_is_rejected() {
    assert!(read_numeric_csv("a,b\n1,2\n3,oops\n").is_err());
}

#[test]
fn config_round_trips_and_rebuilds_the_model() {
    for m in [figure1().unwrap(), figure2().unwrap()] {
        let cfg = RunConfig::from_model(&m, Numerics::default());
        let text = cfg.to_json().unwrap();
        let back = RunConfig::from_json(&text).unwrap();
        assert_eq!(back, cfg);
        let rebuilt = back.build().unwrap();
        for x in [StateVector::new(0.6, 0.0), StateVector::new(0.9, -0.01)] {
            assert_eq!(rebuilt.vector_field(x), m.vector_field(x));
        }
    }
}

#[test]
fn config_errors_are_collected() {
    let cfg = RunConfig::from_model(&figure1().unwrap(), Numerics::default());
    let mut v: serde_json::Value = serde_json::from_str(&cfg.to_json().unwrap()).unwrap();
    v["params"]["rho"] = serde_json::json!(-0.1);
    v["numerics"]["seed_eps"] = serde_json::json!(-1.0);
    let err = RunConfig::from_json(&v.to_string()).unwrap().build().unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("rho") && msg.contains("seed_eps"), "{msg}");
}
