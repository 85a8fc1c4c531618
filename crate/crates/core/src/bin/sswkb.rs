//! Command-line front end: single solves, core-strength sweeps, strong-core
//! limit reports, direct-integrator runs, and the invariant check battery.
//! Primary documents go to stdout (JSON by default, CSV on request); `--out`
//! additionally writes the full artifact set into a directory. Identical
//! invocations produce byte-identical output.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sswkb::io::{self, SweepRow};
use sswkb::oracle;
use sswkb::potential::master_radius;
use sswkb::solver::{self, SolveConfig, Verdict};
use sswkb::wkb;
use sswkb::{Channel, EngineError, PotentialSpec};

#[derive(Parser)]
#[command(
    name = "sswkb",
    version,
    about = "Scattering wave functions of strongly singular central potentials"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one spec end to end and print the run summary.
    Solve(SolveArgs),
    /// Sweep the core strength over a grid; one row per value.
    Sweep(SweepArgs),
    /// Strong-core limit report for a spec.
    Asym(AsymArgs),
    /// Run the direct integrator alone and dump its samples.
    Oracle(OracleArgs),
    /// Run the invariant battery; TAP-style, one line per check.
    Check(CheckArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Potential spec: inline JSON or a path to a JSON file.
    #[arg(long)]
    spec: String,
    /// Wavenumber.
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    /// Angular momentum.
    #[arg(long, default_value_t = 0)]
    l: u32,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Directory for the artifact files (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stdout format of the primary document.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    /// Truncation orders N,M of the inner and outer chains.
    #[arg(long, default_value = "4,4")]
    orders: String,
    /// Deepest inner coordinate to tabulate.
    #[arg(long, default_value_t = 1e-4)]
    tmin: f64,
    /// Outer edge override (default: where the wavenumber turns free).
    #[arg(long)]
    tmax: Option<f64>,
    /// Also run the direct integrator and report the checkpoint deviation.
    #[arg(long)]
    oracle: bool,
    /// Exit 2 when convergence is not established.
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated core strengths, at least two.
    #[arg(long = "a-grid")]
    a_grid: String,
    /// Truncation orders N,M of the inner and outer chains.
    #[arg(long, default_value = "4,4")]
    orders: String,
    /// Deepest inner coordinate to tabulate.
    #[arg(long, default_value_t = 1e-4)]
    tmin: f64,
    /// Outer edge override.
    #[arg(long)]
    tmax: Option<f64>,
    /// Exit 2 if any completed row fails the convergence rule.
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct AsymArgs {
    #[command(flatten)]
    common: Common,
    /// Outer edge override for the limit weight integral.
    #[arg(long)]
    tmax: Option<f64>,
    /// Exit 2 when convergence is not established.
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Integration end point (default: where the wavenumber turns free).
    #[arg(long)]
    tmax: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
    /// Only report checks whose name contains this substring.
    #[arg(long)]
    filter: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage_only = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return ExitCode::from(if usage_only { 0 } else { 1 });
        }
    };
    let result = match cli.cmd {
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Asym(a) => cmd_asym(a),
        Cmd::Oracle(a) => cmd_oracle(a),
        Cmd::Check(a) => cmd_check(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprint!("{}", io::error_json(&e));
            ExitCode::from(1)
        }
    }
}

fn channel_of(c: &Common) -> Result<Channel, EngineError> {
    Channel::new(c.k, c.l)
}

fn strict_exit(verdict: Verdict, strict: bool) -> u8 {
    if strict && !verdict.is_converged() {
        2
    } else {
        0
    }
}

fn cmd_solve(a: SolveArgs) -> Result<u8, EngineError> {
    let spec = io::load_spec(&a.common.spec)?;
    let ch = channel_of(&a.common)?;
    let (n, m) = io::parse_orders(&a.orders)?;
    let cfg = SolveConfig {
        n_order: n,
        m_order: m,
        t_min: a.tmin,
        t_max: a.tmax,
        ..SolveConfig::default()
    };
    let res = solver::solve(&spec, &ch, &cfg)?;
    let cmp = if a.oracle {
        Some(solver::compare_with_oracle(&res, cfg.rtol)?)
    } else {
        None
    };
    let summary = io::summarize(&res, cmp.as_ref().map(|c| c.max_dev));
    match a.output.format {
        Format::Json => print!("{}", io::to_json(&summary)),
        Format::Csv => print!("{}", io::solution_csv(&res)),
    }
    if let Some(dir) = &a.output.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("summary.json"), io::to_json(&summary))?;
        fs::write(dir.join("basis.csv"), io::basis_csv(&res))?;
        fs::write(dir.join("solution.csv"), io::solution_csv(&res))?;
        if let Some(c) = &cmp {
            fs::write(dir.join("oracle.csv"), io::oracle_csv(&c.solution))?;
            fs::write(dir.join("comparison.csv"), io::comparison_csv(&c.rows))?;
        }
    }
    Ok(strict_exit(res.verdict, a.strict))
}

fn sweep_row(spec: PotentialSpec, ch: Channel, cfg: SolveConfig, a: f64) -> SweepRow {
    let run = || -> Result<SweepRow, EngineError> {
        spec.validate()?;
        let res = solver::solve(&spec, &ch, &cfg)?;
        let cmp = solver::compare_with_oracle(&res, cfg.rtol)?;
        let dev0 = solver::shape_deviation_at_orders(&res, &cmp, 0, 0);
        Ok(SweepRow {
            a,
            big_r: Some(res.big_r),
            r_asym: Some(res.r_asym),
            p_eps: Some(res.p_eps_asym),
            p_tau: Some(res.p_tau_asym),
            zero_order_dev: Some(dev0),
            delta_l: Some(res.delta_l),
            error: None,
        })
    };
    run().unwrap_or_else(|e| SweepRow {
        a,
        big_r: None,
        r_asym: None,
        p_eps: None,
        p_tau: None,
        zero_order_dev: None,
        delta_l: None,
        error: Some(e.to_string()),
    })
}

fn cmd_sweep(a: SweepArgs) -> Result<u8, EngineError> {
    let base = io::load_spec(&a.common.spec)?;
    let ch = channel_of(&a.common)?;
    let grid = io::parse_a_grid(&a.a_grid)?;
    let (n, m) = io::parse_orders(&a.orders)?;
    let cfg = SolveConfig {
        n_order: n,
        m_order: m,
        t_min: a.tmin,
        t_max: a.tmax,
        ..SolveConfig::default()
    };
    // Rows are independent; run them on their own threads and collect in
    // grid order so the output stays deterministic.
    let rows: Vec<SweepRow> = std::thread::scope(|scope| {
        let handles: Vec<_> = grid
            .iter()
            .map(|&av| {
                let spec = PotentialSpec { a: av, ..base };
                scope.spawn(move || sweep_row(spec, ch, cfg, av))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    match a.output.format {
        Format::Json => print!("{}", io::to_json(&rows)),
        Format::Csv => print!("{}", io::sweep_csv(&rows)),
    }
    if let Some(dir) = &a.output.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("sweep.csv"), io::sweep_csv(&rows))?;
        fs::write(dir.join("sweep.json"), io::to_json(&rows))?;
    }
    let any_unconverged = rows
        .iter()
        .filter_map(|r| r.p_tau)
        .any(|p| !solver::verdict_for(p).is_converged());
    Ok(if a.strict && any_unconverged { 2 } else { 0 })
}

fn cmd_asym(a: AsymArgs) -> Result<u8, EngineError> {
    let spec = io::load_spec(&a.common.spec)?;
    let ch = channel_of(&a.common)?;
    let rep = solver::asym_report(&spec, &ch, a.tmax)?;
    match a.output.format {
        Format::Json => print!("{}", io::to_json(&rep)),
        Format::Csv => print!("{}", io::flat_csv(&rep)),
    }
    if let Some(dir) = &a.output.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("asym.json"), io::to_json(&rep))?;
        fs::write(dir.join("asym.csv"), io::flat_csv(&rep))?;
    }
    Ok(strict_exit(rep.verdict, a.strict))
}

/// Stdout document for an oracle run.
#[derive(Serialize)]
struct OracleDoc {
    t_start: f64,
    t_end: f64,
    seed_logderiv: f64,
    steps: usize,
    rejects: usize,
    max_err_rel: f64,
    nodes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    join_logderiv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge_logderiv: Option<f64>,
}

fn cmd_oracle(a: OracleArgs) -> Result<u8, EngineError> {
    let spec = io::load_spec(&a.common.spec)?;
    let ch = channel_of(&a.common)?;
    let big_r = master_radius(&spec, &ch)?;
    let t_end = match a.tmax {
        Some(tm) if tm > 1.0 && tm.is_finite() => tm,
        Some(tm) => {
            return Err(EngineError::InvalidSpec(format!(
                "tmax must exceed 1, got {tm}"
            )))
        }
        None => wkb::far_field_edge(&spec, &ch, big_r)?,
    };
    let t0 = oracle::default_start(&spec, &ch, big_r)?;
    let mut knots: Vec<f64> = (1..=200)
        .map(|i| t0 + (t_end - t0) * i as f64 / 200.0)
        .collect();
    knots.push(1.0);
    let sol = oracle::integrate_radial(&spec, &ch, big_r, t0, t_end, 1e-10, &knots)?;
    let doc = OracleDoc {
        t_start: sol.t_start,
        t_end,
        seed_logderiv: sol.seed_logderiv,
        steps: sol.stats.steps,
        rejects: sol.stats.rejects,
        max_err_rel: sol.stats.max_err_rel,
        nodes: sol.stats.nodes,
        join_logderiv: sol.sample_at(1.0).map(|s| s.log_deriv()),
        edge_logderiv: sol.sample_at(t_end).map(|s| s.log_deriv()),
    };
    match a.output.format {
        Format::Json => print!("{}", io::to_json(&doc)),
        Format::Csv => print!("{}", io::oracle_csv(&sol)),
    }
    if let Some(dir) = &a.output.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("oracle.json"), io::to_json(&doc))?;
        fs::write(dir.join("oracle.csv"), io::oracle_csv(&sol))?;
    }
    Ok(0)
}

fn cmd_check(a: CheckArgs) -> Result<u8, EngineError> {
    // Unvalidated load: inadmissible parameters belong to the battery as its
    // first named check rather than to the generic error stream.
    let spec = io::load_spec_raw(&a.common.spec)?;
    let ch = channel_of(&a.common)?;
    let outcomes = solver::run_checks(&spec, &ch, &SolveConfig::default());
    let filter = a.filter.unwrap_or_default();
    // Pipeline-stage failures always surface, whatever the filter says.
    let selected: Vec<_> = outcomes
        .iter()
        .filter(|c| {
            c.name.contains(filter.as_str())
                || (!c.pass && matches!(c.name, "spec_admissible" | "solve_pipeline"))
        })
        .collect();
    println!("1..{}", selected.len());
    let mut any_fail = false;
    for (i, c) in selected.iter().enumerate() {
        let status = if c.pass {
            "ok"
        } else {
            any_fail = true;
            "not ok"
        };
        println!("{status} {} - {} # {}", i + 1, c.name, c.note);
    }
    Ok(if any_fail { 1 } else { 0 })
}
