//! Deterministic CSV and JSON emission.
//!
//! Floats in CSV are written with 17 significant digits, which round-trips
//! every `f64`; JSON uses the shortest representation that round-trips.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::calib::SweepPoint;
use crate::error::{Error, Result};
use crate::flow::{BasinGrid, Trajectory};
use crate::steady::SteadyState;

pub const TRAJECTORY_HEADER: &str = "t,a,pi,R,m,b,s";
pub const BASIN_HEADER: &str = "a0,pi0,label";
pub const STEADY_HEADER: &str = "a,pi,R,residual,regime";
pub const SWEEP_HEADER: &str = "eps,velocity,psi_trap,psi_prime_trap,a_star,j22";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn row(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&fmt_f64(*v));
    }
}

pub fn trajectory_csv(tr: &Trajectory) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for i in 0..tr.len() {
        row(
            &mut out,
            &[tr.t[i], tr.a[i], tr.pi[i], tr.nominal_rate[i], tr.m[i], tr.b[i], tr.s[i]],
        );
        out.push('\n');
    }
    out
}

pub fn basin_csv(grid: &BasinGrid) -> String {
    let mut out = String::from(BASIN_HEADER);
    out.push('\n');
    for (i, pi) in grid.pi.iter().enumerate() {
        for (j, a) in grid.a.iter().enumerate() {
            row(&mut out, &[*a, *pi]);
            let _ = writeln!(out, ",{}", grid.labels[i][j].as_str());
        }
    }
    out
}

pub fn steady_csv(states: &[SteadyState]) -> String {
    let mut out = String::from(STEADY_HEADER);
    out.push('\n');
    for s in states {
        row(&mut out, &[s.a, s.pi, s.nominal_rate, s.residual]);
        let _ = writeln!(out, ",{}", s.regime_tag);
    }
    out
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for p in points {
        row(&mut out, &[p.eps, p.velocity, p.psi_trap, p.psi_prime_trap, p.a_star, p.j22]);
        out.push('\n');
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

/// Parses a numeric CSV with a header row.
pub fn read_numeric_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Domain("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let vals = line
            .split(',')
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Domain(format!("CSV line {}: {e}", k + 2)))?;
        rows.push(vals);
    }
    Ok((header, rows))
}
