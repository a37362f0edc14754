use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use trapdyn::calib::{replicate, sweep_j22, CalibrationPreset, SweepRanges, SweepSummary};
use trapdyn::config::{Numerics, RunConfig};
use trapdyn::flow::{heteroclinic, phase_portrait, solvency_report, HeteroclinicOptions, PortraitOptions, SolvencyReport};
use trapdyn::localdyn::{
    activist_conditions, comparative_statics, eigen2, jacobian, saddle_arm_slope, ActivistConditions, ComparativeStatics,
    EigenReport, Jacobian2,
};
use trapdyn::output;
use trapdyn::prefs::omega;
use trapdyn::steady::{solve, trap_and_target, ScanOptions, SteadyState};
use trapdyn::{presets, Error, FiscalRegime, Model, Result};

#[derive(Debug, Parser)]
#[command(name = "trapdyn", version, about = "Phase-plane analysis of liquidity traps under fiscal regimes")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Built-in configuration, used when no --config is given.
    #[arg(long, global = true, value_enum)]
    preset: Option<Preset>,

    /// Offset of manifold seeds from their steady state.
    #[arg(long, global = true)]
    seed_eps: Option<f64>,

    /// Integration horizon in years.
    #[arg(long, global = true)]
    horizon: Option<f64>,

    /// Grid resolution: `N` or `NAxNPI`.
    #[arg(long, global = true)]
    resolution: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    #[value(name = "appendix-c")]
    AppendixC,
    Figure1,
    Figure2,
    Figure3,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady states of the configured economy.
    Steady,
    /// Jacobians, spectra and regime conditions at each steady state.
    Classify {
        /// Classify a raw matrix `j11,j12,j21,j22` instead.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        matrix: Option<Vec<f64>>,
    },
    /// Isoclines, invariant manifolds, connecting orbit and basin grid.
    Portrait,
    /// Orbit from the trap to the target under the activist regime.
    Orbit,
    /// Sign sweep of the trap coefficient over the calibration ranges.
    Sweep,
    /// Calibration point check plus both sweep grids.
    ReplicateAppendixC,
    /// Print the resolved configuration as JSON.
    DumpConfig,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidParams(_) | Error::Domain(_) => 2,
        e if e.is_numerical() => 1,
        _ => 1,
    }
}

fn preset_config(p: Preset) -> Result<RunConfig> {
    let model = match p {
        Preset::AppendixC | Preset::Figure1 => presets::figure1()?,
        Preset::Figure2 => presets::figure2()?,
        Preset::Figure3 => presets::figure3()?,
    };
    let mut cfg = RunConfig::from_model(&model, Numerics::default());
    cfg.experiment = Some(
        match p {
            Preset::AppendixC => "appendix-c",
            Preset::Figure1 => "figure1",
            Preset::Figure2 => "figure2",
            Preset::Figure3 => "figure3",
        }
        .to_string(),
    );
    Ok(cfg)
}

fn parse_resolution(s: &str) -> Result<[usize; 2]> {
    let bad = || Error::Config(format!("  - --resolution must be N or NAxNPI (got {s:?})"));
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<Vec<_>>>()?;
    match nums.as_slice() {
        [n] => Ok([*n, *n]),
        [na, np] => Ok([*na, *np]),
        _ => Err(bad()),
    }
}

struct Run {
    cfg: RunConfig,
    model: Model,
    out: PathBuf,
}

fn resolve(cli: &Cli, for_orbit: bool) -> Result<Run> {
    let mut cfg = match (&cli.config, cli.preset) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(p)) => preset_config(p)?,
        (None, None) => return Err(Error::Config("  - give --config <path> or --preset <name>".into())),
    };
    if let Some(e) = cli.seed_eps {
        cfg.numerics.seed_eps = e;
    }
    if let Some(h) = cli.horizon {
        if for_orbit {
            cfg.numerics.orbit_horizon = h;
        } else {
            cfg.numerics.horizon = h;
        }
    }
    if let Some(r) = &cli.resolution {
        cfg.numerics.resolution = parse_resolution(r)?;
    }
    let model = cfg.build()?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("trapdyn-out"));
    Ok(Run { cfg, model, out })
}

fn emit(dir: &Path, name: &str, contents: &str) -> Result<()> {
    output::write(&dir.join(name), contents)
}

fn cmd_steady(run: &Run) -> Result<()> {
    let states = solve(&run.model, &ScanOptions::default())?;
    emit(&run.out, "steady.csv", &output::steady_csv(&states))?;
    emit(&run.out, "steady.json", &output::to_json(&states)?)?;
    for s in &states {
        println!("a = {:.10}  pi = {:.10}  R = {:.10}", s.a, s.pi, s.nominal_rate);
    }
    Ok(())
}

#[derive(Serialize)]
struct StateReport {
    state: SteadyState,
    jacobian: Jacobian2,
    eigen: EigenReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    saddle_arm_slope: Option<f64>,
}

#[derive(Serialize)]
struct ClassifyReport {
    regime: String,
    states: Vec<StateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conditions: Option<ActivistConditions>,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparative_statics: Option<ComparativeStatics>,
}

fn cmd_classify_matrix(m: &[f64], out: &Path) -> Result<()> {
    if m.len() != 4 {
        return Err(Error::Config(format!("  - --matrix needs 4 entries (got {})", m.len())));
    }
    let j = Jacobian2::new(m[0], m[1], m[2], m[3]);
    let e = eigen2(&j);
    emit(out, "classify.json", &output::to_json(&e)?)?;
    println!("matrix: {}", e.classification);
    Ok(())
}

fn cmd_classify(run: &Run) -> Result<()> {
    let model = &run.model;
    let (trap, target) = trap_and_target(model, &ScanOptions::default())?;
    let mut states = Vec::new();
    for (name, ss) in [("trap", &trap), ("target", &target)] {
        let jac = jacobian(model, ss)?;
        let eigen = eigen2(&jac);
        println!("{name}: {}", eigen.classification);
        states.push(StateReport {
            state: ss.clone(),
            jacobian: jac,
            eigen,
            saddle_arm_slope: saddle_arm_slope(model, ss).ok(),
        });
    }
    let (conditions, statics) = match &model.regime {
        FiscalRegime::Activist(_) => {
            let c = activist_conditions(model, &target, &trap)?;
            let side = if c.trap_real_roots.holds { "real" } else { "complex" };
            println!("discriminant: {side}");
            println!("predicates agree with spectra: {}", c.consistent());
            (Some(c), None)
        }
        FiscalRegime::DebtTargeting(d) => {
            // Initial position at the old target: A(0)/M(0) = a* Ω(R*).
            let ratio = d.a_star * omega(target.nominal_rate, &model.params)?;
            let cs = comparative_statics(model, &target, ratio)?;
            println!("dpi*/da* = {:.10e}  dpi(0)/da* = {:.10e}", cs.long_run, cs.impact);
            (None, Some(cs))
        }
    };
    let report = ClassifyReport {
        regime: model.regime.tag().to_string(),
        states,
        conditions,
        comparative_statics: statics,
    };
    emit(&run.out, "classify.json", &output::to_json(&report)?)
}

fn cmd_portrait(run: &Run) -> Result<()> {
    let n = &run.cfg.numerics;
    let mut opts = PortraitOptions {
        pi_range: n.pi_range.map(|[lo, hi]| (lo, hi)),
        basin_box: n.basin_box,
        resolution: Some((n.resolution[0], n.resolution[1])),
        ..PortraitOptions::default()
    };
    opts.isoclines.points = n.isocline_points;
    opts.manifold.seed_eps = n.seed_eps;
    opts.manifold.horizon = n.horizon;
    opts.basin.horizon = n.horizon;
    opts.heteroclinic.seed_eps = n.seed_eps;
    opts.heteroclinic.horizon = n.orbit_horizon;
    opts.heteroclinic.sample_interval = n.sample_interval;
    let portrait = phase_portrait(&run.model, &opts)?;
    emit(&run.out, "portrait.json", &output::to_json(&portrait)?)?;
    if let Some(grid) = &portrait.basin {
        emit(&run.out, "basin.csv", &output::basin_csv(grid))?;
    }
    for s in &portrait.steady_states {
        println!("({:.6}, {:.6}): {}", s.state.a, s.state.pi, s.classification);
    }
    println!("manifold branches: {}", portrait.manifolds.len());
    Ok(())
}

#[derive(Serialize)]
struct OrbitMeta {
    method: trapdyn::flow::ConnectionMethod,
    trap: trapdyn::StateVector,
    target: trapdyn::StateVector,
    trap_residual: f64,
    target_residual: f64,
    transit_time: f64,
    solvency: SolvencySummary,
}

#[derive(Serialize)]
struct SolvencySummary {
    discounted_terminal: f64,
    ibc_residual: f64,
    surplus_pv: f64,
    tail: f64,
    theta_integral: f64,
    truncated: bool,
}

impl From<&SolvencyReport> for SolvencySummary {
    fn from(r: &SolvencyReport) -> Self {
        SolvencySummary {
            discounted_terminal: r.discounted_terminal,
            ibc_residual: r.ibc_residual,
            surplus_pv: r.surplus_pv,
            tail: r.tail,
            theta_integral: r.theta_integral,
            truncated: r.truncated,
        }
    }
}

fn cmd_orbit(run: &Run) -> Result<()> {
    let model = &run.model;
    if !matches!(model.regime, FiscalRegime::Activist(_)) {
        return Err(Error::Config("  - orbit requires the activist regime".into()));
    }
    let n = &run.cfg.numerics;
    let (trap, target) = trap_and_target(model, &ScanOptions::default())?;
    let opts = HeteroclinicOptions {
        seed_eps: n.seed_eps,
        horizon: n.orbit_horizon,
        sample_interval: n.sample_interval,
        ..HeteroclinicOptions::default()
    };
    let h = heteroclinic(model, &trap, &target, &opts)?;
    let solvency = solvency_report(&h.trajectory, model);
    emit(&run.out, "orbit.csv", &output::trajectory_csv(&h.trajectory))?;
    emit(&run.out, "orbit.json", &output::to_json(&h.trajectory)?)?;
    let meta = OrbitMeta {
        method: h.method,
        trap: h.trap,
        target: h.target,
        trap_residual: h.trap_residual,
        target_residual: h.target_residual,
        transit_time: h.transit_time,
        solvency: SolvencySummary::from(&solvency),
    };
    emit(&run.out, "orbit_meta.json", &output::to_json(&meta)?)?;
    println!(
        "connected in {:.3} years; residuals trap {:.3e}, target {:.3e}",
        h.transit_time, h.trap_residual, h.target_residual
    );
    Ok(())
}

fn sweep_points(cli: &Cli) -> Result<usize> {
    match &cli.resolution {
        Some(r) => Ok(parse_resolution(r)?[0]),
        None => Ok(5),
    }
}

fn cmd_sweep(cli: &Cli, out: &Path) -> Result<()> {
    let preset = CalibrationPreset::default();
    let report = sweep_j22(&preset, &SweepRanges::default(), sweep_points(cli)?)?;
    emit(out, "sweep.csv", &output::sweep_csv(&report.points))?;
    let summary = SweepSummary::from(&report);
    emit(out, "sweep.json", &output::to_json(&summary)?)?;
    println!(
        "{} points: J22 in [{:.6}, {:.6}], {} non-negative",
        summary.count, summary.min, summary.max, summary.violations
    );
    Ok(())
}

fn cmd_replicate(out: &Path) -> Result<bool> {
    let report = replicate(&CalibrationPreset::default())?;
    emit(out, "appendix_c.json", &output::to_json(&report)?)?;
    println!("J22 (eps = 0.6) = {:.6}", report.j22_eps_0_6);
    println!("J22 (eps = 0.5) = {:.6}", report.j22_eps_0_5);
    for s in [&report.coarse, &report.refined] {
        println!(
            "sweep {}^5: J22 in [{:.6}, {:.6}], {} non-negative",
            s.points_per_axis, s.min, s.max, s.violations
        );
    }
    println!("all negative: {}", report.all_negative);
    Ok(report.all_negative)
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from("trapdyn-out"))
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Steady => cmd_steady(&resolve(cli, false)?)?,
        Command::Classify { matrix: Some(m) } => cmd_classify_matrix(m, &out_dir(cli))?,
        Command::Classify { matrix: None } => cmd_classify(&resolve(cli, false)?)?,
        Command::Portrait => cmd_portrait(&resolve(cli, false)?)?,
        Command::Orbit => cmd_orbit(&resolve(cli, true)?)?,
        Command::Sweep => cmd_sweep(cli, &out_dir(cli))?,
        Command::ReplicateAppendixC => return cmd_replicate(&out_dir(cli)),
        Command::DumpConfig => {
            let r = resolve(cli, false)?;
            print!("{}", output::to_json(&r.cfg)?);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
