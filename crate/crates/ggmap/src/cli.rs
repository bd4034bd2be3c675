//! Command-line front end: simulate, estimate, cross-validate, benchmark.
//!
//! Every command is deterministic given its full argument set (seed
//! included). Exit codes: 0 success, 2 input/parse problems, 3 estimate hit
//! the iteration cap (files still written), 4 numerical degeneracy.

use crate::bench::{run_benchmark, BenchmarkConfig, FrobeniusReference, Method};
use crate::error::{Error, Result};
use crate::io::{read_dataset_csv, write_dataset_csv, write_matrix_csv};
use crate::linalg::sample_scatter;
use crate::penalty::{HorseshoeBackend, PenaltyConfig};
use crate::simulate::{generate_precision, sample_gaussian, StructureKind, StructureSpec};
use crate::solver::{multistart_estimate, SolverConfig, StartPolicy};
use crate::tuning::{cv_select, CvConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "ggmap",
    about = "Sparse precision matrix estimation in Gaussian graphical models \
             via local linear approximation"
)]
pub struct Cli {
    /// Worker threads for multi-start, CV and benchmark cells (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a ground-truth precision matrix and Gaussian samples.
    Simulate(SimulateArgs),
    /// Fit the penalized MAP estimate to a dataset.
    Estimate(EstimateArgs),
    /// Select the penalty scale by k-fold cross-validation.
    Cv(CvArgs),
    /// Replicated simulate/tune/fit/evaluate benchmark.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Hubs,
    Random,
}

impl From<KindArg> for StructureKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Hubs => StructureKind::Hubs,
            KindArg::Random => StructureKind::Random,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PenaltyArg {
    Horseshoe,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Cauchy,
    Laplace,
    Expint,
}

impl From<BackendArg> for HorseshoeBackend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Cauchy => HorseshoeBackend::CauchyMixtureQuadrature,
            BackendArg::Laplace => HorseshoeBackend::LaplaceMixtureQuadrature,
            BackendArg::Expint => HorseshoeBackend::ExpintClosedForm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StartArg {
    Identity,
    ScaledDiagonalRandom,
    RidgeInverse,
    RandomizedRidge,
}

impl From<StartArg> for StartPolicy {
    fn from(s: StartArg) -> Self {
        match s {
            StartArg::Identity => StartPolicy::Identity,
            StartArg::ScaledDiagonalRandom => StartPolicy::ScaledDiagonalRandom,
            StartArg::RidgeInverse => StartPolicy::RidgeInverse,
            StartArg::RandomizedRidge => StartPolicy::RandomizedRidge,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct StructureArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub q: usize,
    /// Hubs: nodes per hub group.
    #[arg(long, default_value_t = 10)]
    pub hub_group_size: usize,
    /// Hubs: off-diagonal weight between the hub and its group.
    #[arg(long, default_value_t = 0.25)]
    pub edge_value: f64,
    /// Random: probability of each off-diagonal pair being an edge.
    #[arg(long, default_value_t = 0.01)]
    pub edge_prob: f64,
    /// Random: smallest edge magnitude.
    #[arg(long, default_value_t = 0.2)]
    pub value_lo: f64,
    /// Random: largest edge magnitude.
    #[arg(long, default_value_t = 1.0)]
    pub value_hi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub diagonal_target: f64,
}

impl StructureArgs {
    fn spec(&self, seed: u64) -> StructureSpec {
        StructureSpec {
            kind: self.kind.into(),
            q: self.q,
            hub_group_size: self.hub_group_size,
            edge_value: self.edge_value,
            edge_prob: self.edge_prob,
            value_range: (self.value_lo, self.value_hi),
            diagonal_target: self.diagonal_target,
            seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub structure: StructureArgs,
    /// Number of samples to draw.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value_t = PenaltyArg::Horseshoe)]
    pub penalty: PenaltyArg,
    /// Horseshoe global scale.
    #[arg(long, default_value_t = 0.1)]
    pub tau: f64,
    /// Constant (lasso) weight.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, value_enum, default_value_t = BackendArg::Expint)]
    pub backend: BackendArg,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
}

impl SolverArgs {
    fn penalty_config(&self) -> Result<PenaltyConfig> {
        let cfg = match self.penalty {
            PenaltyArg::Horseshoe => {
                PenaltyConfig::horseshoe(self.tau)?.with_backend(self.backend.into())
            }
            PenaltyArg::Constant => PenaltyConfig::constant(self.rho)?,
        };
        Ok(cfg)
    }

    fn solver_config(&self) -> Result<SolverConfig> {
        let mut cfg = SolverConfig::new(self.penalty_config()?);
        cfg.tol = self.tol;
        cfg.max_outer_iters = self.max_iters;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Input dataset CSV (one sample per row).
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 1)]
    pub starts: usize,
    #[arg(long, value_enum, default_value_t = StartArg::RidgeInverse)]
    pub start: StartArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Explicit scale grid (comma separated); defaults to 10 log-spaced
    /// values on [1e-3, 1] for horseshoe or [0.5, 200] for constant.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[command(flatten)]
    pub structure: StructureArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    /// Methods to compare (comma separated):
    /// lla_horseshoe_cauchy, lla_horseshoe_laplace, lla_constant.
    #[arg(long, value_delimiter = ',', default_values_t =
        [String::from("lla_horseshoe_cauchy"), String::from("lla_constant")])]
    pub methods: Vec<String>,
    /// Tau grid for horseshoe methods (single value = no tuning).
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
    /// Rho grid for the constant baseline (single value = no tuning).
    #[arg(long, value_delimiter = ',')]
    pub rho_grid: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 8)]
    pub starts: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Compare the Frobenius error against the inverse of the truth
    /// (the covariance) instead of the truth itself.
    #[arg(long, default_value_t = false)]
    pub fnorm_inverse_truth: bool,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

/// Outcome the binary turns into an exit code.
pub struct CommandOutcome {
    pub converged: bool,
}

pub fn run(cli: &Cli) -> Result<CommandOutcome> {
    match &cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Cv(args) => cmd_cv(args),
        Command::Benchmark(args) => cmd_benchmark(args),
    }
}

#[derive(Serialize)]
struct SimulateMeta {
    schema_version: u32,
    kind: StructureKind,
    q: usize,
    n: usize,
    seed: u64,
    hub_group_size: usize,
    edge_value: f64,
    edge_prob: f64,
    value_range: (f64, f64),
    diagonal_target: f64,
    /// Nonzero off-diagonal elements of the truth (both triangles).
    s_offdiag: usize,
    edges: usize,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<CommandOutcome> {
    let spec = args.structure.spec(args.seed);
    let truth = generate_precision(&spec)?;
    let data = sample_gaussian(&truth.matrix, args.n, spec.seed ^ 0x5A5A_5A5A)?;
    std::fs::create_dir_all(&args.out_dir)?;
    write_matrix_csv(&args.out_dir.join("omega0.csv"), &truth.matrix)?;
    write_dataset_csv(&args.out_dir.join("data.csv"), &data)?;
    let meta = SimulateMeta {
        schema_version: SCHEMA_VERSION,
        kind: spec.kind,
        q: spec.q,
        n: args.n,
        seed: args.seed,
        hub_group_size: spec.hub_group_size,
        edge_value: spec.edge_value,
        edge_prob: spec.edge_prob,
        value_range: spec.value_range,
        diagonal_target: spec.diagonal_target,
        s_offdiag: truth.nonzero_offdiag,
        edges: truth.nonzero_offdiag / 2,
    };
    write_json(&args.out_dir.join("meta.json"), &meta)?;
    match args.format {
        FormatArg::Json => println!("{}", serde_json::to_string(&meta).expect("serializable")),
        FormatArg::Csv => println!(
            "simulated {} structure: q={}, n={}, edges={}",
            spec.kind,
            spec.q,
            args.n,
            truth.nonzero_offdiag / 2
        ),
    }
    Ok(CommandOutcome { converged: true })
}

#[derive(Serialize)]
struct EstimateRun {
    schema_version: u32,
    penalty: PenaltyConfig,
    start: &'static str,
    n_starts: usize,
    seed: u64,
    tol: f64,
    max_iters: usize,
    converged: bool,
    n_failed_starts: usize,
    best_objective: f64,
    best_outer_iters: usize,
    wall_time_s: f64,
    support: Vec<(usize, usize)>,
    objective_trace: Vec<f64>,
    per_start: Vec<crate::solver::StartRun>,
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<CommandOutcome> {
    let data = read_dataset_csv(&args.data)?;
    let scatter = sample_scatter(&data)?;
    let mut cfg = args.solver.solver_config()?;
    cfg.n_starts = args.starts;
    cfg.start = args.start.into();
    cfg.seed = args.seed;

    let started = std::time::Instant::now();
    let multi = multistart_estimate(&scatter, data.n(), &cfg)?;
    let wall = started.elapsed().as_secs_f64();

    std::fs::create_dir_all(&args.out_dir)?;
    write_matrix_csv(&args.out_dir.join("omega_hat.csv"), &multi.average)?;
    let run = EstimateRun {
        schema_version: SCHEMA_VERSION,
        penalty: cfg.penalty,
        start: cfg.start.name(),
        n_starts: cfg.n_starts,
        seed: cfg.seed,
        tol: cfg.tol,
        max_iters: cfg.max_outer_iters,
        converged: multi.all_converged,
        n_failed_starts: multi.n_failed,
        best_objective: multi.best_objective,
        best_outer_iters: multi.best.outer_iters,
        wall_time_s: wall,
        support: multi.support.clone(),
        objective_trace: multi.best.objective_trace.clone(),
        per_start: multi.runs.clone(),
    };
    write_json(&args.out_dir.join("run.json"), &run)?;
    match args.format {
        FormatArg::Json => println!(
            "{}",
            serde_json::json!({
                "converged": multi.all_converged,
                "best_objective": multi.best_objective,
                "support_size": multi.support.len(),
                "wall_time_s": wall,
            })
        ),
        FormatArg::Csv => println!(
            "estimate written: converged={}, support edges={}, {:.3}s",
            multi.all_converged,
            multi.support.len(),
            wall
        ),
    }
    Ok(CommandOutcome {
        converged: multi.all_converged,
    })
}

#[derive(Serialize)]
struct CvSelected {
    schema_version: u32,
    selected_scale: f64,
    folds: usize,
    seed: u64,
    mean_scores: Vec<MeanScore>,
}

#[derive(Serialize)]
struct MeanScore {
    scale: f64,
    mean_heldout_nll: Option<f64>,
}

pub fn cmd_cv(args: &CvArgs) -> Result<CommandOutcome> {
    let data = read_dataset_csv(&args.data)?;
    let grid = if args.grid.is_empty() {
        match args.solver.penalty {
            PenaltyArg::Horseshoe => crate::tuning::default_tau_grid(),
            PenaltyArg::Constant => crate::tuning::log_spaced(0.5, 200.0, 10),
        }
    } else {
        args.grid.clone()
    };
    let cv = CvConfig {
        folds: args.folds,
        grid,
        seed: args.seed,
        solver: args.solver.solver_config()?,
    };
    let outcome = cv_select(&data, &cv)?;
    std::fs::create_dir_all(&args.out_dir)?;
    std::fs::write(args.out_dir.join("cv_table.csv"), outcome.table_csv())?;
    let selected = CvSelected {
        schema_version: SCHEMA_VERSION,
        selected_scale: outcome.selected,
        folds: args.folds,
        seed: args.seed,
        mean_scores: outcome
            .mean_scores
            .iter()
            .map(|&(scale, mean)| MeanScore {
                scale,
                mean_heldout_nll: mean,
            })
            .collect(),
    };
    write_json(&args.out_dir.join("selected.json"), &selected)?;
    match args.format {
        FormatArg::Json => {
            println!(
                "{}",
                serde_json::json!({ "selected_scale": outcome.selected })
            )
        }
        FormatArg::Csv => println!("selected scale: {}", outcome.selected),
    }
    Ok(CommandOutcome { converged: true })
}

#[derive(Serialize)]
struct BenchmarkSummaryFile {
    schema_version: u32,
    kind: StructureKind,
    q: usize,
    n: usize,
    reps: usize,
    folds: usize,
    n_starts: usize,
    seed: u64,
    fnorm_ref: FrobeniusReference,
    methods: Vec<crate::bench::MethodSummary>,
}

pub fn cmd_benchmark(args: &BenchmarkArgs) -> Result<CommandOutcome> {
    let methods: Vec<Method> = args
        .methods
        .iter()
        .map(|m| Method::parse(m))
        .collect::<Result<_>>()?;
    let spec = args.structure.spec(args.seed);
    let mut cfg = BenchmarkConfig::new(spec, args.n, args.reps);
    cfg.methods = methods;
    if !args.grid.is_empty() {
        cfg.tau_grid = args.grid.clone();
    }
    if !args.rho_grid.is_empty() {
        cfg.rho_grid = args.rho_grid.clone();
    }
    cfg.folds = args.folds;
    cfg.n_starts = args.starts;
    cfg.tol = args.tol;
    cfg.max_outer_iters = args.max_iters;
    cfg.seed = args.seed;
    cfg.fnorm_ref = if args.fnorm_inverse_truth {
        FrobeniusReference::InverseTruth
    } else {
        FrobeniusReference::Truth
    };

    let report = run_benchmark(&cfg)?;
    std::fs::create_dir_all(&args.out_dir)?;
    std::fs::write(args.out_dir.join("report.csv"), report.rows_csv())?;
    let summary = BenchmarkSummaryFile {
        schema_version: SCHEMA_VERSION,
        kind: spec.kind,
        q: spec.q,
        n: args.n,
        reps: args.reps,
        folds: cfg.folds,
        n_starts: cfg.n_starts,
        seed: cfg.seed,
        fnorm_ref: cfg.fnorm_ref,
        methods: report.summaries.clone(),
    };
    write_json(&args.out_dir.join("summary.json"), &summary)?;
    match args.format {
        FormatArg::Json => {
            println!("{}", serde_json::to_string(&summary).expect("serializable"))
        }
        FormatArg::Csv => {
            println!(
                "{:<24} {:>10} {:>10} {:>7} {:>7} {:>7} {:>9}",
                "method", "stein", "fnorm", "tpr", "fpr", "mcc", "time(s)"
            );
            for s in &report.summaries {
                println!(
                    "{:<24} {:>10.3} {:>10.3} {:>7.3} {:>7.3} {:>7.3} {:>9.2}",
                    s.method.name(),
                    s.steins_loss.mean,
                    s.frobenius_error.mean,
                    s.tpr.mean,
                    s.fpr.mean,
                    s.mcc.mean,
                    s.fit_time_s.mean,
                );
            }
        }
    }
    let any_failed = report.rows.iter().any(|r| r.fit.is_none());
    Ok(CommandOutcome {
        converged: !any_failed,
    })
}

fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Input(format!("serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
