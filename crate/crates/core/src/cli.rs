//! Batch front end: `run`, `compare`, `sweep` and `check`.
//!
//! Exit codes: 0 on success, 1 on a configuration error, 2 when a requested
//! method fails to converge or a solve aborts.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::baselines::solve_with;
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::least_squares::solve::{LsOutcome, MethodTag, Status};
use crate::nonlinearity::{beta_star, check_growth_h2, holder_seminorm_sample, GrowthCheck};
use crate::report::{self, Summary, SweepPoint};
use crate::wave::geometry::{check_geometric_condition, GeometryReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "wavectl", version, about = "Exact controls for semilinear wave equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "WAVECTL_OUT", default_value = "wavectl-out")]
    pub out: PathBuf,
    /// Worker threads for `sweep` (0 picks the number of cores).
    #[arg(long, global = true, env = "WAVECTL_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// Overrides the configuration's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Run the configured methods and write `iterates.csv` and `summary.json`.
    Run,
    /// Run every method and write `comparison.csv`.
    Compare,
    /// Run the configured one-parameter sweep and write `sweep.csv`.
    Sweep,
    /// Report which hypotheses hold, without solving.
    Check,
}

/// All methods' outcomes on one configuration.
pub struct RunOutput {
    pub outcomes: Vec<LsOutcome>,
    pub geometry: Option<GeometryReport>,
    pub e_scale: f64,
}

impl RunOutput {
    pub fn outcome(&self, method: MethodTag) -> Option<&LsOutcome> {
        self.outcomes.iter().find(|o| o.method == method)
    }

    pub fn all_converged(&self) -> bool {
        self.outcomes.iter().all(|o| o.status == Status::Converged)
    }
}

/// Geometry check for the configured scenario; `None` when `x0` is inside `Ω̄`.
pub fn geometry_of(config: &ExperimentConfig) -> Result<Option<GeometryReport>> {
    let grid = config.grid()?;
    let region = config.region(&grid)?;
    let s = &config.scenario;
    match check_geometric_condition(s.domain, &region, s.t_final, s.x0) {
        Ok(g) => Ok(Some(g)),
        Err(Error::Precondition(msg)) => {
            log::warn!("geometry check skipped: {msg}");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Solves `methods` in order on one configuration.
pub fn run_methods(config: &ExperimentConfig, methods: &[MethodTag]) -> Result<RunOutput> {
    let problem = config.problem()?;
    let geometry = geometry_of(config)?;
    let gap = problem.initial.sub(&problem.target).v_norm();
    let e_scale = 0.5 * config.scenario.t_final * gap * gap;
    let mut outcomes = Vec::with_capacity(methods.len());
    for &method in methods {
        log::info!("{}: {}", config.scenario.id, method.as_str());
        outcomes.push(solve_with(method, &problem, &config.ls)?);
    }
    Ok(RunOutput { outcomes, geometry, e_scale })
}

fn write_run_files(out: &Path, config: &ExperimentConfig, run: &RunOutput) -> Result<()> {
    let hash = config.hash();
    report::write_iterates(&out.join("iterates.csv"), &hash, &config.scenario.id, &run.outcomes)?;
    Summary::new(config, run.e_scale, run.geometry.as_ref(), &run.outcomes).write(&out.join("summary.json"))
}

/// Verdict on one hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Sample sizes and ranges for `check`.
const GROWTH_RANGE: f64 = 1e6;
const GROWTH_SAMPLES: usize = 100_001;
const HOLDER_RANGE: f64 = 100.0;
const HOLDER_SAMPLES: usize = 20_001;

#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub scenario_id: String,
    pub domain: crate::wave::grid::Domain,
    pub geometry: Option<GeometryReport>,
    pub h0: Verdict,
    pub growth: Option<(f64, f64)>,
    pub growth_check: Option<GrowthCheck>,
    pub h2: Verdict,
    pub s: f64,
    pub seminorm_declared: Option<f64>,
    pub seminorm_sampled: f64,
    pub hs: Verdict,
    pub diag_c: f64,
    pub beta_star: f64,
    /// `β < β*(s)` for the configured diagnostic `C`.
    pub beta_below_threshold: Option<bool>,
}

pub fn hypothesis_report(config: &ExperimentConfig) -> Result<HypothesisReport> {
    let g = config.nonlinearity()?;
    let geometry = geometry_of(config)?;
    let h0 = match &geometry {
        Some(r) if r.holds => Verdict::Holds,
        Some(_) => Verdict::Fails,
        None => Verdict::Unknown,
    };
    let growth = g.growth();
    let growth_check = growth.map(|(a, b)| check_growth_h2(&g, a, b, GROWTH_RANGE, GROWTH_SAMPLES)).transpose()?;
    let h2 = match growth_check {
        Some(c) if c.holds => Verdict::Holds,
        Some(_) => Verdict::Fails,
        None => Verdict::Unknown,
    };
    let s = g.holder_exponent();
    let sampled = holder_seminorm_sample(&g, s, HOLDER_RANGE, HOLDER_SAMPLES)?;
    let seminorm_declared = g.seminorm();
    let hs = match seminorm_declared {
        Some(d) if sampled <= d * (1.0 + 1e-9) + 1e-12 => Verdict::Holds,
        Some(_) => Verdict::Fails,
        None => Verdict::Unknown,
    };
    let bs = beta_star(s, config.ls.diag_c)?;
    Ok(HypothesisReport {
        scenario_id: config.scenario.id.clone(),
        domain: config.scenario.domain,
        geometry,
        h0,
        growth,
        growth_check,
        h2,
        s,
        seminorm_declared,
        seminorm_sampled: sampled,
        hs,
        diag_c: config.ls.diag_c,
        beta_star: bs,
        beta_below_threshold: growth.map(|(_, beta)| beta < bs),
    })
}

impl fmt::Display for HypothesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {}", self.scenario_id)?;
        match &self.geometry {
            Some(g) => writeln!(
                f,
                "(H0) {}: T_min = {}, time condition {}, Gamma0 = {}, uncovered sides: {}",
                self.h0,
                g.t_min,
                if g.time_ok { "met" } else { "not met" },
                g.gamma0_description(self.domain),
                if g.uncovered.is_empty() { "none".to_string() } else { format!("{:?}", g.uncovered) },
            )?,
            None => writeln!(f, "(H0) unknown: x0 lies inside the closed domain")?,
        }
        match (self.growth, self.growth_check) {
            (Some((a, b)), Some(c)) => {
                write!(f, "(H2) {}: |g'(r)| <= {a} + {b} ln^(1/2)(1+|r|) sampled on [-{GROWTH_RANGE}, {GROWTH_RANGE}]", self.h2)?;
                match c.witness {
                    Some(r) => writeln!(f, ", violated at r = {r}")?,
                    None => writeln!(f)?,
                }
            }
            _ => writeln!(f, "(H2) unknown: no growth bound declared")?,
        }
        match self.seminorm_declared {
            Some(d) => writeln!(
                f,
                "(Hs) {}: s = {}, declared [g']_s = {d}, sampled lower bound {}",
                self.hs, self.s, self.seminorm_sampled
            )?,
            None => writeln!(
                f,
                "(Hs) unknown: s = {}, no seminorm declared, sampled lower bound {}",
                self.s, self.seminorm_sampled
            )?,
        }
        writeln!(f, "beta*(s) = {} for C = {}", self.beta_star, self.diag_c)?;
        if let (Some((_, beta)), Some(false)) = (self.growth, self.beta_below_threshold) {
            writeln!(
                f,
                "warning: beta = {beta} >= beta*(s) = {}; the (H2) comparison beta < beta*(s) fails for C = {}",
                self.beta_star, self.diag_c
            )?;
        }
        Ok(())
    }
}

fn load(global: &GlobalArgs) -> Result<ExperimentConfig> {
    let path = global.config.as_ref().ok_or_else(|| Error::Config("--config <path> is required".into()))?;
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn failure_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Cfl { .. } | Error::UnknownNonlinearity(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

/// Runs one subcommand and returns the process exit code.
pub fn execute(command: Command, global: &GlobalArgs) -> i32 {
    let config = match load(global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let result = match command {
        Command::Run => cmd_run(&config, &global.out),
        Command::Compare => cmd_compare(&config, &global.out),
        Command::Sweep => cmd_sweep(&config, &global.out, global.threads),
        Command::Check => cmd_check(&config),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        failure_code(&e)
    })
}

/// Parses `args` (program name first) and executes.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command, &cli.global),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_OK
            }
        }
    }
}

fn cmd_run(config: &ExperimentConfig, out: &Path) -> Result<i32> {
    let run = run_methods(config, &config.methods)?;
    std::fs::create_dir_all(out)?;
    write_run_files(out, config, &run)?;
    print!("{}", report::table(&run.outcomes));
    Ok(if run.all_converged() { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_compare(config: &ExperimentConfig, out: &Path) -> Result<i32> {
    let run = run_methods(config, &MethodTag::ALL)?;
    std::fs::create_dir_all(out)?;
    write_run_files(out, config, &run)?;
    report::write_comparison(&out.join("comparison.csv"), &config.hash(), &config.scenario.id, &run.outcomes)?;
    print!("{}", report::table(&run.outcomes));
    let ls_ok = run.outcome(MethodTag::LeastSquares).is_some_and(|o| o.status == Status::Converged);
    Ok(if ls_ok { EXIT_OK } else { EXIT_FAILURE })
}

/// Runs every sweep point (in parallel) and returns them in configuration order.
pub fn run_sweep(config: &ExperimentConfig, threads: usize) -> Result<Vec<SweepPoint>> {
    let sweep = config.sweep.as_ref().ok_or_else(|| Error::Config("sweep: no sweep section in the configuration".into()))?;
    if sweep.values.is_empty() {
        return Err(Error::Config("sweep.values must not be empty".into()));
    }
    let points: Vec<ExperimentConfig> =
        sweep.values.iter().map(|&v| config.with_parameter(&sweep.parameter, v)).collect::<Result<_>>()?;
    for p in &points {
        p.validate()?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<Vec<LsOutcome>>> =
        pool.install(|| points.par_iter().map(|p| run_methods(p, &p.methods).map(|r| r.outcomes)).collect());
    sweep
        .values
        .iter()
        .zip(results)
        .map(|(&value, r)| r.map(|outcomes| SweepPoint { value, outcomes }))
        .collect()
}

fn cmd_sweep(config: &ExperimentConfig, out: &Path, threads: usize) -> Result<i32> {
    let points = run_sweep(config, threads)?;
    let parameter = &config.sweep.as_ref().expect("checked by run_sweep").parameter;
    std::fs::create_dir_all(out)?;
    report::write_sweep(&out.join("sweep.csv"), &config.hash(), parameter, &points)?;
    let mut ok = true;
    for p in &points {
        for o in &p.outcomes {
            ok &= o.status == Status::Converged;
            println!(
                "{parameter} = {:<12} {:<15} {:>10} {:>4} iterations",
                p.value,
                o.method.as_str(),
                o.status.as_str(),
                o.iterations()
            );
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_check(config: &ExperimentConfig) -> Result<i32> {
    let report = hypothesis_report(config)?;
    print!("{report}");
    Ok(EXIT_OK)
}
