//! `rankwalk`: generate graphs, run solvers, compare against oracles.
//!
//! Exit codes: `0` success, `1` usage or I/O error, `2` the solver stopped
//! without converging (the report is still written).

use clap::{Args, Parser, Subcommand, ValueEnum};
use rankwalk_core::baseline::{dense_solve, power_iteration};
use rankwalk_core::generate::{generate, GraphModel};
use rankwalk_core::gk::{gk_run_stream, GkConfig, GkResult, IterationRule};
use rankwalk_core::io::{read_edge_list, write_edge_list};
use rankwalk_core::mcmc::{self, McmcConfig, McmcMode};
use rankwalk_core::metrics::{distance, residuals, topk_overlap, Norm};
use rankwalk_core::report::{ranked, OracleComparison, Params, RunReport, Status};
use rankwalk_core::{Dangling, DampingMode, DampingSpec, StochasticMatrix};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_NOT_CONVERGED: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "rankwalk", version, about = "Randomized PageRank solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic graph as an edge list.
    Gen(GenArgs),
    /// Run a solver and write a JSON report.
    Solve(SolveArgs),
    /// Run a solver and an oracle, and report their distance.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Cycle,
    Star,
    UniformSparse,
    Preferential,
}

impl From<ModelArg> for GraphModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Cycle => GraphModel::Cycle,
            ModelArg::Star => GraphModel::Star,
            ModelArg::UniformSparse => GraphModel::UniformSparse,
            ModelArg::Preferential => GraphModel::Preferential,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long)]
    pub n: usize,
    /// Out-degree for the sparse models.
    #[arg(long, default_value_t = 4)]
    pub s: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Power,
    Mcmc,
    Gk,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DampingModeArg {
    Lazy,
    Teleport,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DanglingArg {
    Uniform,
    SelfLoop,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Single,
    Parallel,
    Adaptive,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RuleArg {
    Theorem,
    Potential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Against {
    Dense,
    Power,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[arg(long)]
    pub graph: PathBuf,
    /// Damping factor δ ∈ (0, 1]; omitted means no damping.
    #[arg(long)]
    pub damping: Option<f64>,
    #[arg(long, value_enum, default_value = "teleport")]
    pub damping_mode: DampingModeArg,
    #[arg(long, value_enum, default_value = "uniform")]
    pub dangling: DanglingArg,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    /// Spectral gap; defaults to the bound known from teleport damping.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value = "single")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1.0)]
    pub c_burn: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c_total: f64,
    /// Lag of the adaptive stopping rule.
    #[arg(long, default_value_t = 100)]
    pub tau: u64,
    #[arg(long, default_value_t = 0.01)]
    pub tol_adapt: f64,
    /// Power-iteration tolerance on the ℓ₁ step.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Iteration cap (power), exact iteration count (gk), or step cap (adaptive mcmc).
    #[arg(long)]
    pub max_iter: Option<u64>,
    /// Independent GK runs; the one with the smallest f(p) is reported.
    #[arg(long, default_value_t = 1)]
    pub restarts: u64,
    #[arg(long, value_enum, default_value = "theorem")]
    pub iteration_rule: RuleArg,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub topk: usize,
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub trace_every: u64,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long, value_enum, default_value = "dense")]
    pub against: Against,
}

#[derive(Debug)]
pub struct CliError(String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<rankwalk_core::Error> for CliError {
    fn from(e: rankwalk_core::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rankwalk: {e}");
            EXIT_ERROR
        }
    }
}

pub fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Gen(args) => {
            let g = generate(args.model.into(), args.n, args.s, args.seed)?;
            let file = File::create(&args.output)
                .map_err(|e| CliError(format!("{}: {e}", args.output.display())))?;
            write_edge_list(&g, BufWriter::new(file))?;
            Ok(EXIT_OK)
        }
        Command::Solve(args) => solve(&args, None),
        Command::Compare(args) => solve(&args.solve, Some(args.against)),
    }
}

fn load_matrix(args: &SolveArgs) -> CliResult<StochasticMatrix> {
    let file = File::open(&args.graph).map_err(|e| CliError(format!("{}: {e}", args.graph.display())))?;
    let graph = read_edge_list(BufReader::new(file))?;
    let dangling = match args.dangling {
        DanglingArg::Uniform => Dangling::Uniform,
        DanglingArg::SelfLoop => Dangling::SelfLoop,
    };
    let base = StochasticMatrix::from_edge_list(&graph, dangling)?;
    Ok(match args.damping {
        Some(delta) => {
            let mode = match args.damping_mode {
                DampingModeArg::Lazy => DampingMode::Lazy,
                DampingModeArg::Teleport => DampingMode::Teleport,
            };
            base.apply_damping(DampingSpec::new(delta, mode)?)?
        }
        None => base,
    })
}

/// What a solver returns before metrics are attached.
struct Solution {
    rank: Vec<f64>,
    iterations: u64,
    trajectories: Option<u64>,
    mass: Option<f64>,
    counters: BTreeMap<String, f64>,
    converged: bool,
    flags: Vec<String>,
    trace: Option<(&'static str, Vec<String>)>,
}

fn base_params(args: &SolveArgs, matrix: &StochasticMatrix) -> Params {
    Params {
        delta: matrix.damping().map(|d| d.delta()),
        damping_mode: matrix.damping().map(|d| match d.mode() {
            DampingMode::Lazy => "lazy".to_string(),
            DampingMode::Teleport => "teleport".to_string(),
        }),
        dangling: Some(
            match args.dangling {
                DanglingArg::Uniform => "uniform",
                DanglingArg::SelfLoop => "self_loop",
            }
            .to_string(),
        ),
        ..Params::default()
    }
}

fn solve(args: &SolveArgs, against: Option<Against>) -> CliResult<u8> {
    let matrix = load_matrix(args)?;
    let mut params = base_params(args, &matrix);
    let began = Instant::now();
    let solution = match args.algo {
        Algo::Power => solve_power(args, &matrix, &mut params)?,
        Algo::Mcmc => solve_mcmc(args, &matrix, &mut params)?,
        Algo::Gk => solve_gk(args, &matrix, &mut params)?,
    };
    let wall_ms = began.elapsed().as_secs_f64() * 1e3;

    let oracle = match against {
        Some(which) => Some(compare_with(which, &matrix, &solution.rank, args.topk)?),
        None => None,
    };
    let report = RunReport {
        algorithm: match args.algo {
            Algo::Power => "power",
            Algo::Mcmc => "mcmc",
            Algo::Gk => "gk",
        }
        .to_string(),
        n: matrix.n(),
        nnz: matrix.nnz(),
        params,
        seed: args.seed,
        iterations: solution.iterations,
        trajectories: solution.trajectories,
        wall_ms,
        counters: solution.counters,
        residuals: residuals(&matrix, &solution.rank)?,
        mass: solution.mass,
        topk: ranked(&solution.rank, args.topk),
        oracle,
        status: Status { converged: solution.converged, flags: solution.flags },
    };

    if let (Some(path), Some((header, rows))) = (&args.trace, &solution.trace) {
        write_trace(path, header, rows)?;
    }
    let json = serde_json::to_string_pretty(&report)?;
    match &args.report {
        Some(path) => std::fs::write(path, json + "\n").map_err(|e| CliError(format!("{}: {e}", path.display())))?,
        None => println!("{json}"),
    }
    Ok(if report.status.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn solve_power(args: &SolveArgs, matrix: &StochasticMatrix, params: &mut Params) -> CliResult<Solution> {
    let max_iter = args.max_iter.unwrap_or(10_000);
    params.tol = Some(args.tol);
    params.max_iter = Some(max_iter);
    let r = power_iteration(matrix, args.tol, max_iter as usize)?;
    let rows = r.step_diffs.iter().enumerate().map(|(i, d)| format!("{},{d:e}", i + 1)).collect();
    Ok(Solution {
        rank: r.rank.into_inner(),
        iterations: r.iterations as u64,
        trajectories: None,
        mass: None,
        counters: BTreeMap::from([("final_step_l1".to_string(), r.step_diffs.last().copied().unwrap_or(0.0))]),
        converged: r.converged,
        flags: if r.converged { vec![] } else { vec!["not_converged".into()] },
        trace: Some(("iter,l1_step", rows)),
    })
}

fn solve_mcmc(args: &SolveArgs, matrix: &StochasticMatrix, params: &mut Params) -> CliResult<Solution> {
    let alpha = args
        .alpha
        .or(matrix.gap_lower_bound().filter(|&a| a > 0.0))
        .ok_or_else(|| CliError("--alpha is required unless teleport damping supplies a spectral-gap bound".into()))?;
    let mode = match args.mode {
        ModeArg::Single => McmcMode::Single,
        ModeArg::Parallel => McmcMode::Parallel,
        ModeArg::Adaptive => McmcMode::Adaptive,
    };
    let mut cfg = McmcConfig::new(args.eps, args.sigma, alpha, mode);
    cfg.c_burn = args.c_burn;
    cfg.c_total = args.c_total;
    cfg.tau = args.tau;
    cfg.tol_adapt = args.tol_adapt;
    cfg.max_steps = args.max_iter;
    params.eps = Some(cfg.eps);
    params.sigma = Some(cfg.sigma);
    params.alpha = Some(alpha);
    params.mode = Some(format!("{mode:?}").to_lowercase());
    params.c_burn = Some(cfg.c_burn);
    params.c_total = Some(cfg.c_total);
    if mode == McmcMode::Adaptive {
        params.tau = Some(cfg.tau);
        params.tol_adapt = Some(cfg.tol_adapt);
        params.max_iter = args.max_iter;
    }
    let r = mcmc::run(matrix, &cfg, args.seed)?;
    let trace = (mode == McmcMode::Adaptive)
        .then(|| ("step,l2_lag_diff", r.lag_trace.iter().map(|(t, d)| format!("{t},{d:e}")).collect()));
    Ok(Solution {
        rank: r.estimate.into_inner(),
        iterations: r.steps_total,
        trajectories: Some(r.trajectories),
        mass: None,
        counters: BTreeMap::from([
            ("steps_burn".to_string(), r.steps_burn as f64),
            ("steps_total".to_string(), r.steps_total as f64),
        ]),
        converged: r.converged,
        flags: if r.converged { vec![] } else { vec!["max_steps_exceeded".into()] },
        trace,
    })
}

fn solve_gk(args: &SolveArgs, matrix: &StochasticMatrix, params: &mut Params) -> CliResult<Solution> {
    if args.restarts == 0 {
        return Err(CliError("--restarts must be at least 1".into()));
    }
    let mut cfg = GkConfig::new(args.eps, args.sigma);
    cfg.max_iter = args.max_iter;
    cfg.trace_every = args.trace.as_ref().map(|_| args.trace_every);
    cfg.rule = match args.iteration_rule {
        RuleArg::Theorem => IterationRule::Theorem,
        RuleArg::Potential => IterationRule::Potential,
    };
    params.eps = Some(cfg.eps);
    params.sigma = Some(cfg.sigma);
    params.max_iter = args.max_iter;
    params.restarts = Some(args.restarts);
    params.iteration_rule = Some(format!("{:?}", cfg.rule).to_lowercase());
    let runs: Vec<GkResult> = (0..args.restarts)
        .into_par_iter()
        .map(|stream| gk_run_stream(matrix, &cfg, args.seed, stream))
        .collect::<Result<_, _>>()?;
    // first minimum in stream order
    let (best_idx, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.objective < a.1.objective { b } else { a })
        .expect("at least one restart");
    let c = &best.counters;
    let counters = BTreeMap::from([
        ("border_iterations".to_string(), c.border_iterations as f64),
        ("border_max_writes".to_string(), c.border_max_writes as f64),
        ("border_writes".to_string(), c.border_writes as f64),
        ("ln_potential".to_string(), best.ln_potential),
        ("mean_sparse_writes".to_string(), c.mean_sparse_writes()),
        ("rescales".to_string(), c.rescales as f64),
        ("sparse_iterations".to_string(), c.sparse_iterations as f64),
        ("sparse_max_writes".to_string(), c.sparse_max_writes as f64),
        ("sparse_writes".to_string(), c.sparse_writes as f64),
    ]);
    let rows = best
        .trace
        .iter()
        .map(|r| match r.f_checkpoint {
            Some(f) => format!("{},{:e},{f:e}", r.iter, r.ln_phi),
            None => format!("{},{:e},", r.iter, r.ln_phi),
        })
        .collect();
    let flags = if args.restarts > 1 { vec![format!("best_restart={best_idx}")] } else { vec![] };
    Ok(Solution {
        rank: best.rank.into_inner(),
        iterations: best.iterations,
        trajectories: None,
        mass: Some(best.mass),
        counters,
        converged: true,
        flags,
        trace: Some(("iter,ln_phi,f_checkpoint", rows)),
    })
}

fn compare_with(which: Against, matrix: &StochasticMatrix, rank: &[f64], k: usize) -> CliResult<OracleComparison> {
    let oracle = match which {
        Against::Dense => dense_solve(matrix)?,
        Against::Power => {
            let r = power_iteration(matrix, 1e-13, 1_000_000)?;
            if !r.converged {
                return Err(CliError("power-iteration oracle did not converge".into()));
            }
            r.rank
        }
    };
    let k = k.clamp(1, matrix.n());
    Ok(OracleComparison {
        against: match which {
            Against::Dense => "dense",
            Against::Power => "power",
        }
        .to_string(),
        l1: distance(rank, &oracle, Norm::L1)?,
        l2: distance(rank, &oracle, Norm::L2)?,
        linf: distance(rank, &oracle, Norm::Linf)?,
        topk_overlap: topk_overlap(rank, &oracle, k)?,
    })
}

fn write_trace(path: &Path, header: &str, rows: &[String]) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    out.flush()?;
    Ok(())
}
