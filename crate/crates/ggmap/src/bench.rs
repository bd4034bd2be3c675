//! Replicated simulation benchmark: generate, tune, fit, evaluate.
//!
//! Per replicate and method the harness draws a fresh dataset from the
//! structure template, selects the scale by cross-validation (skipped for a
//! single-value grid), runs the multi-start estimator, and scores it against
//! the truth. Stein's loss and the Frobenius error are computed on the
//! elementwise average of the start estimates; support rates come from the
//! majority-vote support pattern, which preserves exact zeros that averaging
//! would destroy.

use crate::error::{Error, Result};
use crate::linalg::{sample_scatter, SymmetricMatrix};
use crate::metrics::{
    frobenius_error, metrics_from_confusion, steins_loss, support_confusion, EvaluationReport,
};
use crate::penalty::{HorseshoeBackend, PenaltyConfig};
use crate::simulate::{generate_precision, sample_gaussian, StructureSpec};
use crate::solver::{multistart_estimate, SolverConfig, StartPolicy};
use crate::tuning::{cv_select, CvConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Estimation method column of the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LlaHorseshoeCauchy,
    LlaHorseshoeLaplace,
    LlaConstant,
}

impl Method {
    pub const ALL: [Method; 3] = [
        Method::LlaHorseshoeCauchy,
        Method::LlaHorseshoeLaplace,
        Method::LlaConstant,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::LlaHorseshoeCauchy => "lla_horseshoe_cauchy",
            Method::LlaHorseshoeLaplace => "lla_horseshoe_laplace",
            Method::LlaConstant => "lla_constant",
        }
    }

    pub fn parse(s: &str) -> Result<Method> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown method {s:?}")))
    }

    pub fn is_horseshoe(&self) -> bool {
        !matches!(self, Method::LlaConstant)
    }

    /// Penalty for this method at the given scale (tau or rho).
    pub fn penalty(&self, scale: f64) -> Result<PenaltyConfig> {
        match self {
            Method::LlaHorseshoeCauchy => Ok(PenaltyConfig::horseshoe(scale)?
                .with_backend(HorseshoeBackend::CauchyMixtureQuadrature)),
            Method::LlaHorseshoeLaplace => Ok(PenaltyConfig::horseshoe(scale)?
                .with_backend(HorseshoeBackend::LaplaceMixtureQuadrature)),
            Method::LlaConstant => PenaltyConfig::constant(scale),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which reference the Frobenius error is taken against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrobeniusReference {
    /// `||est - Omega0||_F` (the default).
    Truth,
    /// `||est - Omega0^{-1}||_F`: compares against the covariance instead.
    InverseTruth,
}

#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    /// Structure template; its seed is re-derived per replicate.
    pub structure: StructureSpec,
    pub n: usize,
    pub reps: usize,
    pub methods: Vec<Method>,
    /// Scale grid for horseshoe methods; a single value skips tuning.
    pub tau_grid: Vec<f64>,
    /// Scale grid for the constant baseline.
    pub rho_grid: Vec<f64>,
    pub folds: usize,
    pub n_starts: usize,
    pub tol: f64,
    pub max_outer_iters: usize,
    pub seed: u64,
    pub fnorm_ref: FrobeniusReference,
    /// Zero tolerance for support metrics (0 = exact zeros).
    pub zero_tol: f64,
}

impl BenchmarkConfig {
    pub fn new(structure: StructureSpec, n: usize, reps: usize) -> Self {
        Self {
            structure,
            n,
            reps,
            methods: vec![Method::LlaHorseshoeCauchy, Method::LlaConstant],
            tau_grid: crate::tuning::default_tau_grid(),
            rho_grid: crate::tuning::log_spaced(0.5, 200.0, 8),
            folds: 5,
            n_starts: 8,
            tol: 1e-3,
            max_outer_iters: 200,
            seed: 0,
            fnorm_ref: FrobeniusReference::Truth,
            zero_tol: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Input("reps must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Input("method list must be nonempty".into()));
        }
        if self.n_starts == 0 {
            return Err(Error::Input("n_starts must be >= 1".into()));
        }
        self.structure.validate()
    }
}

/// Successful fit of one (replicate, method) cell.
#[derive(Debug, Clone, Serialize)]
pub struct BenchFit {
    pub selected_scale: f64,
    #[serde(flatten)]
    pub report: EvaluationReport,
    pub cv_time_s: f64,
    pub converged: bool,
}

/// One row of the report; failures carry the error text instead of metrics.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub rep: usize,
    pub method: Method,
    pub fit: Option<BenchFit>,
    pub error: Option<String>,
}

/// Mean and sample standard deviation over the successful replicates.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub sd: f64,
    pub count: usize,
}

pub fn summarize(values: &[f64]) -> MetricSummary {
    let count = values.len();
    if count == 0 {
        return MetricSummary {
            mean: f64::NAN,
            sd: f64::NAN,
            count,
        };
    }
    let mean = values.iter().sum::<f64>() / count as f64;
    let sd = if count > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1) as f64).sqrt()
    } else {
        0.0
    };
    MetricSummary { mean, sd, count }
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodSummary {
    pub method: Method,
    pub n_success: usize,
    pub n_failed: usize,
    pub steins_loss: MetricSummary,
    pub frobenius_error: MetricSummary,
    pub tpr: MetricSummary,
    pub fpr: MetricSummary,
    pub mcc: MetricSummary,
    pub fit_time_s: MetricSummary,
    pub selected_scale: MetricSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchRow>,
    pub summaries: Vec<MethodSummary>,
}

impl BenchmarkReport {
    pub const CSV_HEADER: &'static str = "rep,method,selected_scale,steins_loss,\
        frobenius_error,tpr,fpr,mcc,fit_time_s,cv_time_s,converged,error";

    pub fn rows_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            match &row.fit {
                Some(fit) => {
                    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{},{},\n",
                        row.rep,
                        row.method,
                        fit.selected_scale,
                        fit.report.steins_loss,
                        fit.report.frobenius_error,
                        opt(fit.report.tpr),
                        opt(fit.report.fpr),
                        fit.report.mcc,
                        fit.report.wall_time_s,
                        fit.cv_time_s,
                        fit.converged,
                    ));
                }
                None => {
                    out.push_str(&format!(
                        "{},{},,,,,,,,,,{}\n",
                        row.rep,
                        row.method,
                        row.error.clone().unwrap_or_default().replace(',', ";")
                    ));
                }
            }
        }
        out
    }
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn run_cell(cfg: &BenchmarkConfig, rep: usize, method: Method) -> Result<BenchFit> {
    let rep_seed = splitmix64(cfg.seed ^ (rep as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut structure = cfg.structure;
    structure.seed = rep_seed;
    let truth = generate_precision(&structure)?;
    let data = sample_gaussian(&truth.matrix, cfg.n, splitmix64(rep_seed ^ 1))?;

    let grid = if method.is_horseshoe() {
        &cfg.tau_grid
    } else {
        &cfg.rho_grid
    };
    let template = {
        let mut s = SolverConfig::new(method.penalty(grid[0])?);
        s.tol = cfg.tol;
        s.max_outer_iters = cfg.max_outer_iters;
        s.record_objective = false;
        s
    };

    let cv_started = Instant::now();
    let selected_scale = if grid.len() == 1 {
        grid[0]
    } else {
        let cv = CvConfig {
            folds: cfg.folds,
            grid: grid.clone(),
            seed: splitmix64(rep_seed ^ 2),
            solver: template.clone(),
        };
        cv_select(&data, &cv)?.selected
    };
    let cv_time_s = cv_started.elapsed().as_secs_f64();

    let mut solver = template;
    solver.penalty = solver.penalty.with_scale(selected_scale)?;
    solver.n_starts = cfg.n_starts;
    solver.start = if cfg.n_starts > 1 {
        StartPolicy::RandomizedRidge
    } else {
        StartPolicy::RidgeInverse
    };
    solver.seed = splitmix64(rep_seed ^ 3);

    let scatter = sample_scatter(&data)?;
    let fit_started = Instant::now();
    let multi = multistart_estimate(&scatter, cfg.n, &solver)?;
    let fit_time_s = fit_started.elapsed().as_secs_f64();

    let stein = steins_loss(&multi.average, &truth.matrix)?;
    let fro = match cfg.fnorm_ref {
        FrobeniusReference::Truth => frobenius_error(&multi.average, &truth.matrix),
        FrobeniusReference::InverseTruth => {
            let cov = truth.matrix.cholesky()?.inverse();
            frobenius_error(&multi.average, &cov)
        }
    };

    // Majority-vote support as a 0/1 indicator matrix against the truth.
    let q = truth.matrix.dim();
    let mut indicator = SymmetricMatrix::zeros(q)?;
    for &(i, j) in &multi.support {
        indicator.set(i, j, 1.0);
    }
    let support =
        metrics_from_confusion(&support_confusion(&indicator, &truth.matrix, cfg.zero_tol)?);

    Ok(BenchFit {
        selected_scale,
        report: EvaluationReport {
            steins_loss: stein,
            frobenius_error: fro,
            tpr: support.tpr,
            fpr: support.fpr,
            mcc: support.mcc,
            wall_time_s: fit_time_s,
        },
        cv_time_s,
        converged: multi.all_converged,
    })
}

/// Runs the full grid of `reps x methods` cells (in parallel, deterministic
/// output order) and aggregates per-method summaries over the successes.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let cells: Vec<(usize, Method)> = (0..cfg.reps)
        .flat_map(|rep| cfg.methods.iter().map(move |&m| (rep, m)))
        .collect();

    let rows: Vec<BenchRow> = cells
        .par_iter()
        .map(|&(rep, method)| match run_cell(cfg, rep, method) {
            Ok(fit) => BenchRow {
                rep,
                method,
                fit: Some(fit),
                error: None,
            },
            Err(e) => BenchRow {
                rep,
                method,
                fit: None,
                error: Some(e.to_string()),
            },
        })
        .collect();

    let mut summaries = Vec::new();
    for &method in &cfg.methods {
        let fits: Vec<&BenchFit> = rows
            .iter()
            .filter(|r| r.method == method)
            .filter_map(|r| r.fit.as_ref())
            .collect();
        let n_success = fits.len();
        let n_failed = cfg.reps - n_success;
        let collect = |f: &dyn Fn(&BenchFit) -> Option<f64>| -> Vec<f64> {
            fits.iter().filter_map(|fit| f(fit)).collect()
        };
        summaries.push(MethodSummary {
            method,
            n_success,
            n_failed,
            steins_loss: summarize(&collect(&|f| Some(f.report.steins_loss))),
            frobenius_error: summarize(&collect(&|f| Some(f.report.frobenius_error))),
            tpr: summarize(&collect(&|f| f.report.tpr)),
            fpr: summarize(&collect(&|f| f.report.fpr)),
            mcc: summarize(&collect(&|f| Some(f.report.mcc))),
            fit_time_s: summarize(&collect(&|f| Some(f.report.wall_time_s))),
            selected_scale: summarize(&collect(&|f| Some(f.selected_scale))),
        });
    }

    Ok(BenchmarkReport { rows, summaries })
}
