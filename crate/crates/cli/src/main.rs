//! `thetawell`: tabulate fields of the theta-function well state onto
//! space-time grids, print Gibbs tables and run the invariant suite.

mod config;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use rayon::prelude::*;

use thetawell::density::{averaged_density, density, period};
use thetawell::field::linspace;
use thetawell::phase_space::{moments, velocity_field, wigner_comb};
use thetawell::thermo::{entropy, mean_energy_gibbs, partition, GibbsParams};
use thetawell::verify::run_suite;
use thetawell::{DerivedScales, FieldSample, QuantumState};

use config::{ConfigError, JobArgs, JobConfig, TOL_ENV};
use output::{sample_row, Cell, Table};

#[derive(Debug, Parser)]
#[command(name = "thetawell", version, about = "Theta-function states of the infinite well")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Probability density f(x, t)
    Density(JobArgs),
    /// Period-averaged density fbar(x)
    AveragedDensity(JobArgs),
    /// Mean velocity of probability flow <v>(x, t)
    Velocity(JobArgs),
    /// Wigner comb atoms at each grid point
    Wigner(JobArgs),
    /// Local kinetic energy <E>(x, t)
    Energy(JobArgs),
    /// Gibbs mean energy, entropy and partition function
    Thermo(JobArgs),
    /// Invariant suite with measured residuals
    Verify(JobArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Density(_) => "density",
            Command::AveragedDensity(_) => "averaged-density",
            Command::Velocity(_) => "velocity",
            Command::Wigner(_) => "wigner",
            Command::Energy(_) => "energy",
            Command::Thermo(_) => "thermo",
            Command::Verify(_) => "verify",
        }
    }

    fn args(&self) -> &JobArgs {
        match self {
            Command::Density(a)
            | Command::AveragedDensity(a)
            | Command::Velocity(a)
            | Command::Wigner(a)
            | Command::Energy(a)
            | Command::Thermo(a)
            | Command::Verify(a) => a,
        }
    }
}

const EXIT_CONFIG: u8 = 1;
const EXIT_OVERFLOW: u8 = 2;
const EXIT_VERIFY: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(core) = cause.downcast_ref::<thetawell::Error>() {
            return match core {
                thetawell::Error::TruncationOverflow { .. } => EXIT_OVERFLOW,
                _ => EXIT_CONFIG,
            };
        }
    }
    EXIT_CONFIG
}

/// Runs one command; `Ok(false)` means the verification suite failed.
fn run(command: &Command) -> anyhow::Result<bool> {
    let cfg = command.args().resolve(std::env::var(TOL_ENV).ok())?;
    let (table, passed) = match command {
        Command::Density(_) => (field_job(&cfg, "density", Field::Density)?, true),
        Command::AveragedDensity(_) => (averaged_job(&cfg)?, true),
        Command::Velocity(_) => (field_job(&cfg, "velocity", Field::Velocity)?, true),
        Command::Energy(_) => (field_job(&cfg, "energy", Field::Energy)?, true),
        Command::Wigner(_) => (wigner_job(&cfg)?, true),
        Command::Thermo(_) => (thermo_job(&cfg)?, true),
        Command::Verify(_) => verify_job(&cfg)?,
    };
    emit(&cfg, &table).with_context(|| format!("writing {} output", command.name()))?;
    Ok(passed)
}

fn emit(cfg: &JobConfig, table: &Table) -> io::Result<()> {
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(cfg.format, &mut w)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            table.write(cfg.format, &mut w)?;
            w.flush()
        }
    }
}

fn state_of(cfg: &JobConfig) -> Result<QuantumState, anyhow::Error> {
    Ok(QuantumState::new(cfg.single_mu()?, cfg.require_beta()?)?)
}

fn units_line(cfg: &JobConfig) -> String {
    let sys = &cfg.sys;
    if cfg.explicit_units {
        format!("units: explicit m={} l={} hbar={}", sys.m, sys.l, sys.hbar)
    } else {
        "units: natural m=1 l=1 hbar=1".into()
    }
}

fn header(cfg: &JobConfig, command: &str, value: &str) -> Result<Vec<String>, ConfigError> {
    let mut meta = vec![
        format!("thetawell {} {command}", env!("CARGO_PKG_VERSION")),
        format!("mu={} beta={}", cfg.mu, cfg.beta.map_or("none".into(), |b| b.to_string())),
        format!(
            "grid_x={} grid_t={} t_span={} tol={:e} max_index={}",
            cfg.grid_x,
            cfg.grid_t,
            cfg.t_span,
            cfg.trunc.tol(),
            cfg.trunc.max_index()
        ),
        units_line(cfg),
    ];
    if let (Some(mu), Some(_)) = (cfg.mu.single(), cfg.beta) {
        let scales = DerivedScales::new(mu, &cfg.sys);
        meta.push(format!("T_mu={:e} E_mu={:e} p_unit={:e}", scales.t_mu, scales.e_mu, scales.p_unit));
    }
    meta.push(format!("x in units of length, t in units of time, value: {value}"));
    meta.push("tag: finite | pole | node-undefined; tagged rows leave value empty".into());
    Ok(meta)
}

#[derive(Debug, Clone, Copy)]
enum Field {
    Density,
    Velocity,
    Energy,
}

fn field_job(cfg: &JobConfig, command: &str, field: Field) -> anyhow::Result<Table> {
    let st = state_of(cfg)?;
    let (sys, tr) = (cfg.sys, cfg.trunc);
    let value = match field {
        Field::Density => "probability density [1/length], negative round-off clamped to 0",
        Field::Velocity => "mean velocity [length/time]",
        Field::Energy => "local kinetic energy [energy]",
    };
    let xs = linspace(0.0, sys.l, cfg.grid_x);
    let ts = linspace(0.0, cfg.t_span * period(&st, &sys), cfg.grid_t);
    let sample = |x: f64, t: f64| -> thetawell::Result<FieldSample> {
        match field {
            Field::Density => Ok(FieldSample::Finite(density(x, t, &st, &sys, &tr)?.max(0.0))),
            Field::Velocity => velocity_field(x, t, &st, &sys, &tr),
            Field::Energy => Ok(moments(x, t, &st, &sys, &tr)?.energy_density),
        }
    };
    let rows: Vec<Vec<Vec<Cell>>> = ts
        .par_iter()
        .map(|&t| xs.iter().map(|&x| Ok(sample_row(x, Some(t), sample(x, t)?))).collect())
        .collect::<thetawell::Result<_>>()?;
    let mut table = Table::new(header(cfg, command, value)?, vec!["x", "t", "value", "tag"]);
    table.rows = rows.into_iter().flatten().collect();
    Ok(table)
}

fn averaged_job(cfg: &JobConfig) -> anyhow::Result<Table> {
    let st = state_of(cfg)?;
    let (sys, tr) = (cfg.sys, cfg.trunc);
    let xs = linspace(0.0, sys.l, cfg.grid_x);
    let rows = xs
        .par_iter()
        .map(|&x| Ok(sample_row(x, None, FieldSample::Finite(averaged_density(x, &st, &sys, &tr)?.max(0.0)))))
        .collect::<thetawell::Result<Vec<_>>>()?;
    let mut meta = header(cfg, "averaged-density", "period-averaged density [1/length]; t is empty")?;
    meta.retain(|line| !line.starts_with("grid_x"));
    meta.insert(2, format!("grid_x={} tol={:e} max_index={}", cfg.grid_x, tr.tol(), tr.max_index()));
    let mut table = Table::new(meta, vec!["x", "t", "value", "tag"]);
    table.rows = rows;
    Ok(table)
}

fn wigner_job(cfg: &JobConfig) -> anyhow::Result<Table> {
    let st = state_of(cfg)?;
    let (sys, tr) = (cfg.sys, cfg.trunc);
    let xs = linspace(0.0, sys.l, cfg.grid_x);
    let ts = linspace(0.0, cfg.t_span * period(&st, &sys), cfg.grid_t);
    let rows: Vec<Vec<Vec<Cell>>> = ts
        .par_iter()
        .map(|&t| -> thetawell::Result<Vec<Vec<Cell>>> {
            let mut out = Vec::new();
            for &x in &xs {
                for atom in wigner_comb(x, t, &st, &sys, &tr)?.atoms {
                    out.push(vec![
                        Cell::Num(x),
                        Cell::Num(t),
                        Cell::Num(atom.momentum),
                        Cell::Num(atom.weight),
                        Cell::Text("finite".into()),
                    ]);
                }
            }
            Ok(out)
        })
        .collect::<thetawell::Result<_>>()?;
    let value = "atom weight C_s/N [1/length]; W(x,p,t) = (1/hbar) sum weight delta(p - p_s)";
    let mut table = Table::new(header(cfg, "wigner", value)?, vec!["x", "t", "p", "value", "tag"]);
    table.rows = rows.into_iter().flatten().collect();
    Ok(table)
}

fn thermo_job(cfg: &JobConfig) -> anyhow::Result<Table> {
    let betas = cfg.betas()?;
    let (sys, tr) = (cfg.sys, cfg.trunc);
    let jobs: Vec<(u32, f64)> = cfg.mu.iter().flat_map(|mu| betas.iter().map(move |&b| (mu, b))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(mu, beta)| -> thetawell::Result<Vec<Cell>> {
            let gp = GibbsParams::of(&QuantumState::new(mu, beta)?, &sys);
            Ok(vec![
                Cell::Num(beta),
                Cell::Int(mu as i64),
                Cell::Num(mean_energy_gibbs(&gp, &tr)?),
                Cell::Num(entropy(&gp, &tr)?),
                Cell::Num(partition(&gp, &tr)?),
            ])
        })
        .collect::<thetawell::Result<Vec<_>>>()?;
    let sweep = cfg.beta_sweep.map_or("none".into(), |s| s.to_string());
    let meta = vec![
        format!("thetawell {} thermo", env!("CARGO_PKG_VERSION")),
        format!("mu={} beta={} beta_sweep={sweep}", cfg.mu, cfg.beta.map_or("none".into(), |b| b.to_string())),
        format!("tol={:e} max_index={}", tr.tol(), tr.max_index()),
        units_line(cfg),
        "mean_energy [energy], entropy [k_B], partition [dimensionless]".into(),
    ];
    let mut table = Table::new(meta, vec!["beta", "mu", "mean_energy", "entropy", "partition"]);
    table.rows = rows;
    Ok(table)
}

fn verify_job(cfg: &JobConfig) -> anyhow::Result<(Table, bool)> {
    let beta = cfg.require_beta()?;
    let (sys, tr) = (cfg.sys, cfg.trunc);
    let mut all_passed = true;
    let mut rows = Vec::new();
    for mu in cfg.mu.iter() {
        let st = QuantumState::new(mu, beta)?;
        for check in run_suite(&st, &sys, &tr)? {
            let passed = check.passed();
            all_passed &= passed;
            eprintln!(
                "mu={mu} beta={beta} {:<20} residual {:>10.3e}  tolerance {:>8.1e}  {}",
                check.name,
                check.residual,
                check.tolerance,
                if passed { "PASS" } else { "FAIL" }
            );
            rows.push(vec![
                Cell::Int(mu as i64),
                Cell::Num(beta),
                Cell::Text(check.name.into()),
                Cell::Num(check.residual),
                Cell::Num(check.tolerance),
                Cell::Text(if passed { "pass" } else { "fail" }.into()),
            ]);
        }
    }
    let meta = vec![
        format!("thetawell {} verify", env!("CARGO_PKG_VERSION")),
        format!("mu={} beta={beta}", cfg.mu),
        format!("tol={:e} max_index={}", tr.tol(), tr.max_index()),
        units_line(cfg),
    ];
    let mut table = Table::new(meta, vec!["mu", "beta", "check", "residual", "tolerance", "status"]);
    table.rows = rows;
    Ok((table, all_passed))
}
