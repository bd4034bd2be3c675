//! MAP estimation of the precision matrix by local linear approximation.
//!
//! The outer loop repeatedly majorizes the concave penalty by its tangent at
//! the current iterate, which turns each step into a weighted-lasso problem;
//! the inner loop solves that problem one column at a time by blockwise
//! coordinate descent. With the column permuted into last position, partition
//!
//! ```text
//! Omega = [ O11  beta ]        nS = [ s11  s12 ]
//!         [ b^T  o22  ]             [ s12' s22 ]
//! ```
//!
//! and write `gamma = o22 - beta' O11^{-1} beta` for the Schur complement.
//! Each off-diagonal coordinate takes a soft-threshold step built from the
//! relevant entries of `O11^{-1}`, then `gamma = n / s22` and the column is
//! written back, which preserves positive definiteness exactly.
//!
//! `O11^{-1}` is never formed from scratch per column: the solver maintains
//! the full running inverse `W = Omega^{-1}`, derives `O11^{-1}` from it by
//! the rank-one Schur identity, and rebuilds `W` from the updated column in
//! O(q^2). A full Cholesky refresh of `W` once per sweep kills drift.
//!
//! Starts: with a completely monotone penalty, the tangent weight at an exact
//! zero is effectively infinite, so any matrix with zero off-diagonals (the
//! identity, any diagonal matrix) is a fixed point of the iteration. Useful
//! estimation therefore starts from a dense matrix; the default is a
//! ridge-regularized inverse of the sample covariance, and the multi-start
//! policy draws randomized versions of it.

use crate::error::{Error, Result};
use crate::linalg::{gaussian_nll, ScatterMatrix, SymmetricMatrix};
use crate::penalty::{pen_deriv, pen_value, PenaltyConfig};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use std::time::Instant;

/// Initial point policy for the solver.
#[derive(Debug, Clone)]
pub enum StartPolicy {
    /// The identity matrix. A fixed point under the horseshoe penalty (all
    /// off-diagonals stay exactly zero); useful for the constant family and
    /// for diagnostics.
    Identity,
    /// Random diagonal matrix with entries uniform on [0.5, 2]. Shares the
    /// fixed-point caveat of `Identity` under the horseshoe penalty.
    ScaledDiagonalRandom,
    /// `n (nS + 0.25 (tr nS / q) I)^{-1}`: a dense, always-PD,
    /// data-driven start. The default.
    RidgeInverse,
    /// Ridge inverse with a random ridge level and a small symmetric jitter,
    /// still PD by construction; the multi-start workhorse.
    RandomizedRidge,
    UserSupplied(SymmetricMatrix),
}

impl StartPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            StartPolicy::Identity => "identity",
            StartPolicy::ScaledDiagonalRandom => "scaled_diagonal_random",
            StartPolicy::RidgeInverse => "ridge_inverse",
            StartPolicy::RandomizedRidge => "randomized_ridge",
            StartPolicy::UserSupplied(_) => "user_supplied",
        }
    }
}

/// Solver configuration.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Outer-loop threshold on the Frobenius norm of the sweep-to-sweep change.
    pub tol: f64,
    pub max_outer_iters: usize,
    pub penalty: PenaltyConfig,
    pub start: StartPolicy,
    pub n_starts: usize,
    pub seed: u64,
    /// Record the penalized objective after every sweep (and before the first).
    pub record_objective: bool,
    /// Also run a Cholesky check after every column write-back (debug aid;
    /// the per-sweep check is always on).
    pub check_pd_every_column: bool,
}

impl SolverConfig {
    pub fn new(penalty: PenaltyConfig) -> Self {
        Self {
            tol: 1e-3,
            max_outer_iters: 200,
            penalty,
            start: StartPolicy::RidgeInverse,
            n_starts: 1,
            seed: 0,
            record_objective: true,
            check_pd_every_column: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::Input(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_outer_iters == 0 {
            return Err(Error::Input("max_outer_iters must be >= 1".into()));
        }
        if self.n_starts == 0 {
            return Err(Error::Input("n_starts must be >= 1".into()));
        }
        self.penalty.validate()
    }
}

/// Result of a single solver run.
#[derive(Debug, Clone)]
pub struct SolverResult {
    pub estimate: SymmetricMatrix,
    pub outer_iters: usize,
    pub converged: bool,
    /// Penalized objective per outer iteration (initial value first) when
    /// `record_objective` is set; empty otherwise.
    pub objective_trace: Vec<f64>,
    pub wall_time_s: f64,
}

/// Scratch space for one column update; reusable across columns and sweeps.
///
/// `omega11_inv` holds the `(q-1) x (q-1)` inverse of the leading block; the
/// `C11/C12/C22` sub-blocks needed by each coordinate are read from it
/// directly, with the running product `inv_beta = omega11_inv * beta`
/// caching the `C12' beta` terms.
#[derive(Debug, Clone)]
pub struct ColumnWorkspace {
    q: usize,
    pub omega11_inv: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: f64,
    pub s12: Vec<f64>,
    pub s22: f64,
    pub g_weights: Vec<f64>,
    pub inv_beta: Vec<f64>,
}

impl ColumnWorkspace {
    pub fn new(q: usize) -> Self {
        let m = q - 1;
        Self {
            q,
            omega11_inv: vec![0.0; m * m],
            beta: vec![0.0; m],
            gamma: 0.0,
            s12: vec![0.0; m],
            s22: 0.0,
            g_weights: vec![0.0; m],
            inv_beta: vec![0.0; m],
        }
    }
}

/// The three-case scalar update: `-eta - w` if `w < -eta`, `eta - w` if
/// `w > eta`, else 0; equivalently `sign(-w) max(|w| - eta, 0)`.
/// The boundary `|w| == eta` maps to 0.
pub fn soft_threshold_coord(omega_hat: f64, eta: f64) -> Result<f64> {
    if !omega_hat.is_finite() || !eta.is_finite() || eta < 0.0 {
        return Err(Error::Input(format!(
            "soft_threshold_coord requires finite omega_hat and eta >= 0, got ({omega_hat}, {eta})"
        )));
    }
    Ok(if omega_hat < -eta {
        -eta - omega_hat
    } else if omega_hat > eta {
        eta - omega_hat
    } else {
        0.0
    })
}

/// One pass over the last column of a permuted `(omega, w, scatter)` triple.
///
/// `w` must hold `omega^{-1}`; it is updated in place to the inverse of the
/// modified matrix. `orig_col` only labels errors.
fn update_last_column(
    omega: &mut SymmetricMatrix,
    w: &mut SymmetricMatrix,
    scatter: &SymmetricMatrix,
    n: usize,
    penalty: &PenaltyConfig,
    ws: &mut ColumnWorkspace,
    orig_col: usize,
) -> Result<()> {
    let q = omega.dim();
    let m = q - 1;
    debug_assert_eq!(ws.q, q);

    ws.s22 = scatter.get(m, m);
    if !(ws.s22 > 0.0) {
        return Err(Error::DegenerateColumn {
            col: orig_col,
            what: format!("s22 = {} (constant-zero data column?)", ws.s22),
        });
    }
    let w22 = w.get(m, m);
    if !(w22 > 0.0) {
        return Err(Error::DegenerateColumn {
            col: orig_col,
            what: format!("inverse diagonal {w22} not positive"),
        });
    }

    // O11^{-1} = W11 - W12 W12^T / W22 (Schur identity on the running inverse).
    for i in 0..m {
        let wi = w.get(i, m);
        let wrow = w.row(i);
        let orow = &mut ws.omega11_inv[i * m..(i + 1) * m];
        for j in 0..m {
            orow[j] = wrow[j] - wi * w.get(j, m) / w22;
        }
    }

    // Freeze the weights at the current iterate for this column pass.
    for k in 0..m {
        let cur = omega.get(k, m);
        ws.beta[k] = cur;
        ws.s12[k] = scatter.get(k, m);
        ws.g_weights[k] = pen_deriv(penalty, cur)?;
    }

    // inv_beta = O11^{-1} beta, maintained incrementally below.
    for i in 0..m {
        let row = &ws.omega11_inv[i * m..(i + 1) * m];
        ws.inv_beta[i] = row.iter().zip(&ws.beta).map(|(a, b)| a * b).sum();
    }

    for k in 0..m {
        let c22 = ws.omega11_inv[k * m + k];
        if !(c22 > 0.0) {
            return Err(Error::DegenerateColumn {
                col: orig_col,
                what: format!("C22 = {c22} at coordinate {k}"),
            });
        }
        let a = ws.s22 * c22;
        let b = ws.s12[k] + ws.s22 * (ws.inv_beta[k] - c22 * ws.beta[k]);
        let omega_hat = b / a;
        let eta = 2.0 * ws.g_weights[k] / a;
        let new = soft_threshold_coord(omega_hat, eta)?;
        let delta = new - ws.beta[k];
        if delta != 0.0 {
            for i in 0..m {
                ws.inv_beta[i] += delta * ws.omega11_inv[i * m + k];
            }
            ws.beta[k] = new;
        }
    }

    ws.gamma = n as f64 / ws.s22;
    let quad: f64 = ws.beta.iter().zip(&ws.inv_beta).map(|(a, b)| a * b).sum();
    for k in 0..m {
        omega.set(k, m, ws.beta[k]);
    }
    omega.set(m, m, ws.gamma + quad);

    // Rebuild the running inverse from the block formulas:
    // W22 = 1/gamma, W12 = -u/gamma, W11 = O11^{-1} + u u'/gamma, u = inv_beta.
    let g = ws.gamma;
    for i in 0..m {
        for j in i..m {
            w.set(
                i,
                j,
                ws.omega11_inv[i * m + j] + ws.inv_beta[i] * ws.inv_beta[j] / g,
            );
        }
        w.set(i, m, -ws.inv_beta[i] / g);
    }
    w.set(m, m, 1.0 / g);
    Ok(())
}

/// Single LLA column update on column `col` of an unpermuted matrix: swap the
/// column into last position, update, swap back. Computes the inverse fresh,
/// so it is the granular (test-friendly) entry point; `lla_solve` keeps the
/// inverse running instead.
pub fn update_column(
    omega: &mut SymmetricMatrix,
    scatter: &ScatterMatrix,
    col: usize,
    penalty: &PenaltyConfig,
    ws: &mut ColumnWorkspace,
    n: usize,
) -> Result<()> {
    let q = omega.dim();
    if col >= q {
        return Err(Error::Input(format!(
            "column {col} out of range for dim {q}"
        )));
    }
    if scatter.dim() != q {
        return Err(Error::Dimension {
            expected: format!("{q}"),
            got: format!("{}", scatter.dim()),
        });
    }
    if ws.q != q {
        return Err(Error::Dimension {
            expected: format!("workspace for {q}"),
            got: format!("{}", ws.q),
        });
    }
    let last = q - 1;
    omega.swap_rowcol_in_place(col, last);
    let mut s = scatter.matrix().clone();
    s.swap_rowcol_in_place(col, last);
    let mut w = match omega.cholesky() {
        Ok(c) => c.inverse(),
        Err(e) => {
            omega.swap_rowcol_in_place(col, last);
            return Err(e);
        }
    };
    let out = update_last_column(omega, &mut w, &s, n, penalty, ws, col);
    omega.swap_rowcol_in_place(col, last);
    out
}

/// Penalized negative log-posterior `gaussian_nll + sum_{i<j} 2 pen(|w_ij|)`
/// (diagonals unpenalized), up to the family's additive constant.
pub fn objective_eval(
    omega: &SymmetricMatrix,
    scatter: &ScatterMatrix,
    n: usize,
    penalty: &PenaltyConfig,
) -> Result<f64> {
    let nll = gaussian_nll(omega, scatter, n)?;
    let q = omega.dim();
    // Exact zeros share one penalty value; cache it (sparse iterates have many).
    let pen_zero = pen_value(penalty, 0.0)?;
    let mut pen_sum = 0.0;
    for i in 0..q {
        for j in (i + 1)..q {
            let v = omega.get(i, j);
            pen_sum += 2.0
                * if v == 0.0 {
                    pen_zero
                } else {
                    pen_value(penalty, v)?
                };
        }
    }
    Ok(nll + pen_sum)
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn ridge_inverse(scatter: &ScatterMatrix, n: usize, alpha: f64) -> Result<SymmetricMatrix> {
    let q = scatter.dim();
    let mean_diag = scatter.matrix().trace() / q as f64;
    let ridge = alpha * mean_diag.max(1e-12);
    let mut shifted = scatter.matrix().clone();
    for i in 0..q {
        shifted.set(i, i, shifted.get(i, i) + ridge);
    }
    let inv = shifted.cholesky()?.inverse();
    let mut out = inv;
    let nf = n as f64;
    for i in 0..q {
        for j in i..q {
            out.set(i, j, out.get(i, j) * nf);
        }
    }
    Ok(out)
}

fn build_start(
    policy: &StartPolicy,
    scatter: &ScatterMatrix,
    n: usize,
    seed: u64,
) -> Result<SymmetricMatrix> {
    let q = scatter.dim();
    match policy {
        StartPolicy::Identity => SymmetricMatrix::identity(q),
        StartPolicy::ScaledDiagonalRandom => {
            let mut rng = StdRng::seed_from_u64(seed);
            let diag: Vec<f64> = (0..q).map(|_| rng.random_range(0.5..2.0)).collect();
            SymmetricMatrix::from_diagonal(&diag)
        }
        StartPolicy::RidgeInverse => ridge_inverse(scatter, n, 0.25),
        StartPolicy::RandomizedRidge => {
            let mut rng = StdRng::seed_from_u64(seed);
            let alpha = (rng.random_range(0.08f64.ln()..1.2f64.ln())).exp();
            let mut base = ridge_inverse(scatter, n, alpha)?;
            // Small symmetric jitter plus a diagonal shift that dominates it
            // (Gershgorin), so the perturbed start stays PD.
            let mean_diag = base.trace() / q as f64;
            let delta = 0.02 * mean_diag / (q as f64).sqrt();
            for i in 0..q {
                for j in (i + 1)..q {
                    let e = rng.random_range(-delta..delta);
                    base.set(i, j, base.get(i, j) + e);
                }
            }
            for i in 0..q {
                base.set(i, i, base.get(i, i) + delta * q as f64);
            }
            Ok(base)
        }
        StartPolicy::UserSupplied(m) => {
            if m.dim() != q {
                return Err(Error::Dimension {
                    expected: format!("{q}"),
                    got: format!("{}", m.dim()),
                });
            }
            Ok(m.clone())
        }
    }
}

/// Runs the LLA outer loop to convergence (`||change||_F < tol`) or the
/// iteration cap, visiting columns from last to first each sweep and
/// recomputing the tangent weights from the current iterate at the start of
/// every column visit.
pub fn lla_solve(scatter: &ScatterMatrix, n: usize, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let started = Instant::now();
    let q = scatter.dim();

    let omega0 = build_start(&cfg.start, scatter, n, cfg.seed)?;
    if omega0.cholesky().is_err() {
        return Err(Error::Input("start matrix is not positive definite".into()));
    }

    let mut omega = omega0;
    let mut scatter_work = scatter.matrix().clone();
    let mut ws = ColumnWorkspace::new(q);
    let mut trace = Vec::new();
    if cfg.record_objective {
        trace.push(objective_eval(&omega, scatter, n, &cfg.penalty)?);
    }

    let mut converged = false;
    let mut iters = 0;
    let last = q - 1;
    for _sweep in 0..cfg.max_outer_iters {
        iters += 1;
        let snapshot = omega.clone();
        // Refresh the running inverse once per sweep to kill drift.
        let mut w = omega.cholesky()?.inverse();
        for col in (0..q).rev() {
            if col != last {
                omega.swap_rowcol_in_place(col, last);
                scatter_work.swap_rowcol_in_place(col, last);
                w.swap_rowcol_in_place(col, last);
            }
            update_last_column(
                &mut omega,
                &mut w,
                &scatter_work,
                n,
                &cfg.penalty,
                &mut ws,
                col,
            )?;
            if col != last {
                omega.swap_rowcol_in_place(col, last);
                scatter_work.swap_rowcol_in_place(col, last);
                w.swap_rowcol_in_place(col, last);
            }
            if cfg.check_pd_every_column {
                omega.cholesky().map_err(|_| Error::NotPositiveDefinite {
                    context: format!("iterate after column {col} write-back"),
                })?;
            }
        }
        // The invariant every other module relies on: each sweep's iterate
        // passes a complete Cholesky factorization.
        omega.cholesky().map_err(|_| Error::NotPositiveDefinite {
            context: format!("iterate after sweep {iters}"),
        })?;
        if cfg.record_objective {
            trace.push(objective_eval(&omega, scatter, n, &cfg.penalty)?);
        }
        let delta = omega.frobenius_distance(&snapshot);
        if delta < cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(SolverResult {
        estimate: omega,
        outer_iters: iters,
        converged,
        objective_trace: trace,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// Per-start summary inside a multi-start estimate.
#[derive(Debug, Clone, serde::Serialize)]
pub struct StartRun {
    pub start_index: usize,
    pub converged: bool,
    pub outer_iters: usize,
    pub objective: f64,
    pub wall_time_s: f64,
}

/// Aggregate of `n_starts` independently seeded solver runs.
#[derive(Debug, Clone)]
pub struct MultistartResult {
    /// Elementwise average of the successful estimates.
    pub average: SymmetricMatrix,
    /// The single run with the best (lowest) penalized objective.
    pub best: SolverResult,
    pub best_objective: f64,
    /// Off-diagonal pairs `(i, j)`, `i < j`, nonzero in strictly more than
    /// half of the successful runs.
    pub support: Vec<(usize, usize)>,
    pub runs: Vec<StartRun>,
    pub n_failed: usize,
    /// True when every start succeeded and converged within the cap.
    pub all_converged: bool,
}

/// Runs `cfg.n_starts` independently seeded solves (in parallel) and reports
/// the elementwise average estimate, the best single run by objective, and
/// the majority-vote support pattern.
pub fn multistart_estimate(
    scatter: &ScatterMatrix,
    n: usize,
    cfg: &SolverConfig,
) -> Result<MultistartResult> {
    cfg.validate()?;
    let outcomes: Vec<Result<(SolverResult, f64)>> = (0..cfg.n_starts)
        .into_par_iter()
        .map(|k| {
            let mut run_cfg = cfg.clone();
            run_cfg.n_starts = 1;
            run_cfg.seed = splitmix64(cfg.seed ^ (k as u64).wrapping_mul(0xA076_1D64_78BD_642F));
            let result = lla_solve(scatter, n, &run_cfg)?;
            let objective = match result.objective_trace.last() {
                Some(&v) => v,
                None => objective_eval(&result.estimate, scatter, n, &cfg.penalty)?,
            };
            Ok((result, objective))
        })
        .collect();

    let mut successes: Vec<(usize, SolverResult, f64)> = Vec::new();
    let mut n_failed = 0;
    let mut first_err: Option<Error> = None;
    for (k, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok((res, obj)) => successes.push((k, res, obj)),
            Err(e) => {
                n_failed += 1;
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    if successes.is_empty() {
        return Err(Error::AllStartsFailed {
            n_starts: cfg.n_starts,
            first: Box::new(first_err.unwrap_or_else(|| Error::Input("no runs".into()))),
        });
    }

    let q = scatter.dim();
    let mut average = SymmetricMatrix::zeros(q)?;
    let inv = 1.0 / successes.len() as f64;
    for (_, res, _) in &successes {
        for i in 0..q {
            for j in i..q {
                average.set(i, j, average.get(i, j) + res.estimate.get(i, j) * inv);
            }
        }
    }

    let mut support = Vec::new();
    for i in 0..q {
        for j in (i + 1)..q {
            let nonzero = successes
                .iter()
                .filter(|(_, res, _)| res.estimate.get(i, j) != 0.0)
                .count();
            if 2 * nonzero > successes.len() {
                support.push((i, j));
            }
        }
    }

    let runs: Vec<StartRun> = successes
        .iter()
        .map(|(k, res, obj)| StartRun {
            start_index: *k,
            converged: res.converged,
            outer_iters: res.outer_iters,
            objective: *obj,
            wall_time_s: res.wall_time_s,
        })
        .collect();
    let all_converged = n_failed == 0 && successes.iter().all(|(_, r, _)| r.converged);

    let best_idx = successes
        .iter()
        .enumerate()
        .min_by(|(_, (_, _, a)), (_, (_, _, b))| a.partial_cmp(b).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let (_, best, best_objective) = successes.swap_remove(best_idx);

    Ok(MultistartResult {
        average,
        best,
        best_objective,
        support,
        runs,
        n_failed,
        all_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sample_scatter;
    use crate::penalty::{HorseshoeBackend, PenaltyFamily};
    use crate::simulate::{generate_precision, sample_gaussian, StructureSpec};

    fn scatter_from(entries: &[f64], q: usize, n: usize) -> ScatterMatrix {
        let m = SymmetricMatrix::from_rows(q, entries, 1e-12).unwrap();
        ScatterMatrix::from_parts(m, n).unwrap()
    }

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold_coord(0.5, 1.0).unwrap(), 0.0);
        assert_eq!(soft_threshold_coord(-3.0, 1.0).unwrap(), 2.0);
        assert_eq!(soft_threshold_coord(3.0, 1.0).unwrap(), -2.0);
        // boundary maps to zero
        assert_eq!(soft_threshold_coord(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(soft_threshold_coord(-1.0, 1.0).unwrap(), 0.0);
        assert!(soft_threshold_coord(f64::NAN, 1.0).is_err());
        assert!(soft_threshold_coord(1.0, -0.5).is_err());
    }

    #[test]
    fn update_column_thresholds_everything_under_huge_weight() {
        // q = 2, nS = diag(2, 2), n = 2, constant rho huge: the off-diagonal
        // stays 0 and the diagonal becomes gamma = n/s22 = 1.
        let scatter = scatter_from(&[2.0, 0.0, 0.0, 2.0], 2, 2);
        let penalty = PenaltyConfig::constant(1e6).unwrap();
        let mut omega = SymmetricMatrix::identity(2).unwrap();
        let mut ws = ColumnWorkspace::new(2);
        update_column(&mut omega, &scatter, 1, &penalty, &mut ws, 2).unwrap();
        assert_eq!(omega.get(0, 1), 0.0);
        assert!((omega.get(1, 1) - 1.0).abs() < 1e-14);
        assert_eq!(ws.gamma, 1.0);
    }

    #[test]
    fn update_column_matches_mle_column_after_convergence() {
        // Unpenalized: iterating the column updates converges to the MLE
        // n (nS)^{-1}, checked against the dense-inverse oracle on the
        // same scatter.
        let data = sample_gaussian(&SymmetricMatrix::identity(3).unwrap(), 60, 5).unwrap();
        let scatter = sample_scatter(&data).unwrap();
        let penalty = PenaltyConfig::constant(0.0).unwrap();
        let cfg = SolverConfig {
            tol: 1e-10,
            max_outer_iters: 500,
            ..SolverConfig::new(penalty)
        };
        let result = lla_solve(&scatter, 60, &cfg).unwrap();
        let mle = {
            let inv = scatter.matrix().cholesky().unwrap().inverse();
            let mut m = inv.clone();
            for i in 0..3 {
                for j in i..3 {
                    m.set(i, j, inv.get(i, j) * 60.0);
                }
            }
            m
        };
        assert!(
            result.estimate.max_abs_distance(&mle) < 1e-6,
            "distance {}",
            result.estimate.max_abs_distance(&mle)
        );
    }

    #[test]
    fn update_column_permutation_coherence() {
        // Updating column i directly equals swap -> update last -> swap back.
        let data = sample_gaussian(&SymmetricMatrix::identity(4).unwrap(), 40, 9).unwrap();
        let scatter = sample_scatter(&data).unwrap();
        let penalty = PenaltyConfig::horseshoe(1.0).unwrap();
        let start = ridge_inverse(&scatter, 40, 0.25).unwrap();

        let mut direct = start.clone();
        let mut ws = ColumnWorkspace::new(4);
        update_column(&mut direct, &scatter, 1, &penalty, &mut ws, 40).unwrap();

        let mut manual = start.swap_rowcol(1, 3).unwrap();
        let swapped_scatter = scatter.swap_rowcol(1, 3).unwrap();
        update_column(&mut manual, &swapped_scatter, 3, &penalty, &mut ws, 40).unwrap();
        let manual = manual.swap_rowcol(1, 3).unwrap();

        assert!(direct.max_abs_distance(&manual) < 1e-12);
    }

    #[test]
    fn degenerate_zero_column_is_reported() {
        // A constant-zero data column makes s22 = 0 for that column.
        let rows = vec![
            1.0, 0.0, 2.0, //
            -1.0, 0.0, 0.5, //
            0.3, 0.0, -0.2,
        ];
        let data = crate::linalg::Dataset::new(3, 3, rows).unwrap();
        let scatter = sample_scatter(&data).unwrap();
        let cfg = SolverConfig::new(PenaltyConfig::constant(0.1).unwrap());
        let err = lla_solve(&scatter, 3, &cfg).unwrap_err();
        match err {
            Error::DegenerateColumn { col, .. } => assert_eq!(col, 1),
            other => panic!("expected DegenerateColumn, got {other}"),
        }
    }

    #[test]
    fn non_pd_user_start_is_input_error() {
        let scatter = scatter_from(&[2.0, 0.0, 0.0, 2.0], 2, 2);
        let mut bad = SymmetricMatrix::identity(2).unwrap();
        bad.set(0, 1, 5.0);
        let cfg = SolverConfig {
            start: StartPolicy::UserSupplied(bad),
            ..SolverConfig::new(PenaltyConfig::horseshoe(1.0).unwrap())
        };
        assert!(lla_solve(&scatter, 2, &cfg).is_err());
    }

    #[test]
    fn mle_recovery_constant_zero() {
        let truth = generate_precision(&StructureSpec::hubs(10, 0))
            .unwrap()
            .matrix;
        let data = sample_gaussian(&truth, 500, 123).unwrap();
        let scatter = sample_scatter(&data).unwrap();
        let cfg = SolverConfig {
            tol: 1e-9,
            max_outer_iters: 500,
            ..SolverConfig::new(PenaltyConfig::constant(0.0).unwrap())
        };
        let result = lla_solve(&scatter, 500, &cfg).unwrap();
        let inv = scatter.matrix().cholesky().unwrap().inverse();
        let mut mle = inv.clone();
        for i in 0..10 {
            for j in i..10 {
                mle.set(i, j, inv.get(i, j) * 500.0);
            }
        }
        let dist = result.estimate.max_abs_distance(&mle);
        assert!(dist < 1e-5, "max-norm distance to MLE: {dist}");
    }

    #[test]
    fn objective_equals_nll_when_unpenalized() {
        let truth = generate_precision(&StructureSpec::hubs(10, 0))
            .unwrap()
            .matrix;
        let data = sample_gaussian(&truth, 50, 3).unwrap();
        let scatter = sample_scatter(&data).unwrap();
        let omega = ridge_inverse(&scatter, 50, 0.3).unwrap();
        let rho0 = PenaltyConfig::constant(0.0).unwrap();
        let obj = objective_eval(&omega, &scatter, 50, &rho0).unwrap();
        let nll = gaussian_nll(&omega, &scatter, 50).unwrap();
        assert_eq!(obj, nll);
    }

    #[test]
    fn objective_constant_penalty_arithmetic() {
        // Raising |w01| by 1 under constant rho = 2 adds exactly 4 to the
        // penalty term (factor 2 for symmetry, weight 2).
        let scatter = scatter_from(&[3.0, 0.0, 0.0, 3.0], 2, 3);
        let rho2 = PenaltyConfig::constant(2.0).unwrap();
        let mut a = SymmetricMatrix::identity(2).unwrap();
        a.set(0, 0, 4.0);
        a.set(1, 1, 4.0);
        a.set(0, 1, 0.5);
        let mut b = a.clone();
        b.set(0, 1, 1.5);
        let oa = objective_eval(&a, &scatter, 3, &rho2).unwrap();
        let ob = objective_eval(&b, &scatter, 3, &rho2).unwrap();
        let nll_a = gaussian_nll(&a, &scatter, 3).unwrap();
        let nll_b = gaussian_nll(&b, &scatter, 3).unwrap();
        assert!(((ob - oa) - (nll_b - nll_a) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn descent_and_pd_on_random_instances() {
        for seed in 0..12u64 {
            let spec = if seed % 2 == 0 {
                StructureSpec::hubs(12, seed)
            } else {
                StructureSpec::random(12, seed)
            };
            let truth = generate_precision(&spec).unwrap().matrix;
            let data = sample_gaussian(&truth, 40, seed ^ 0xF00D).unwrap();
            let scatter = sample_scatter(&data).unwrap();
            let penalty = if seed % 3 == 0 {
                PenaltyConfig::constant(2.0).unwrap()
            } else {
                PenaltyConfig::horseshoe(0.5).unwrap()
            };
            let cfg = SolverConfig {
                check_pd_every_column: true,
                ..SolverConfig::new(penalty)
            };
            let result = lla_solve(&scatter, 40, &cfg).unwrap();
            assert!(result.converged, "seed {seed} did not converge");
            let trace = &result.objective_trace;
            for w in trace.windows(2) {
                assert!(
                    w[1] <= w[0] + 1e-8 * w[0].abs().max(1.0),
                    "objective increased: {} -> {} (seed {seed})",
                    w[0],
                    w[1]
                );
            }
        }
    }

    #[test]
    fn horseshoe_produces_exact_zeros_on_hubs() {
        for seed in 0..5u64 {
            let truth = generate_precision(&StructureSpec::hubs(12, seed))
                .unwrap()
                .matrix;
            let data = sample_gaussian(&truth, 60, seed).unwrap();
            let scatter = sample_scatter(&data).unwrap();
            for tau in [0.1, 1.0] {
                let cfg = SolverConfig::new(PenaltyConfig::horseshoe(tau).unwrap());
                let result = lla_solve(&scatter, 60, &cfg).unwrap();
                let zeros = (0..12)
                    .flat_map(|i| ((i + 1)..12).map(move |j| (i, j)))
                    .filter(|&(i, j)| result.estimate.get(i, j) == 0.0)
                    .count();
                assert!(zeros >= 1, "no exact zeros at tau={tau}, seed={seed}");
            }
        }
    }

    #[test]
    fn converged_estimate_is_a_fixed_point() {
        let truth = generate_precision(&StructureSpec::hubs(10, 2))
            .unwrap()
            .matrix;
        let data = sample_gaussian(&truth, 80, 17).unwrap();
        let scatter = sample_scatter(&data).unwrap();
        let cfg = SolverConfig::new(PenaltyConfig::horseshoe(0.5).unwrap());
        let first = lla_solve(&scatter, 80, &cfg).unwrap();
        assert!(first.converged);
        let restart = SolverConfig {
            start: StartPolicy::UserSupplied(first.estimate.clone()),
            ..cfg
        };
        let second = lla_solve(&scatter, 80, &restart).unwrap();
        assert!(second.converged);
        assert!(
            second.outer_iters <= 2,
            "restart took {} sweeps",
            second.outer_iters
        );
        assert!(second.estimate.frobenius_distance(&first.estimate) < restart.tol);
    }

    #[test]
    fn permutation_equivariance() {
        let truth = generate_precision(&StructureSpec::hubs(10, 4))
            .unwrap()
            .matrix;
        let data = sample_gaussian(&truth, 200, 31).unwrap();
        let scatter = sample_scatter(&data).unwrap();
        let cfg = SolverConfig {
            tol: 1e-8,
            max_outer_iters: 500,
            ..SolverConfig::new(PenaltyConfig::horseshoe(0.3).unwrap())
        };
        let base = lla_solve(&scatter, 200, &cfg).unwrap();
        let (i, j) = (1usize, 7usize);
        let permuted_scatter = scatter.swap_rowcol(i, j).unwrap();
        let permuted = lla_solve(&permuted_scatter, 200, &cfg).unwrap();
        let back = permuted.estimate.swap_rowcol(i, j).unwrap();
        let dist = base.estimate.max_abs_distance(&back);
        assert!(dist < 1e-6, "permutation equivariance violated: {dist}");
    }

    #[test]
    fn multistart_single_start_matches_lla_solve() {
        let truth = generate_precision(&StructureSpec::hubs(10, 6))
            .unwrap()
            .matrix;
        let data = sample_gaussian(&truth, 50, 8).unwrap();
        let scatter = sample_scatter(&data).unwrap();
        let cfg = SolverConfig::new(PenaltyConfig::horseshoe(0.5).unwrap());
        let multi = multistart_estimate(&scatter, 50, &cfg).unwrap();
        let mut single_cfg = cfg.clone();
        single_cfg.seed = splitmix64(cfg.seed ^ 0u64.wrapping_mul(0xA076_1D64_78BD_642F));
        let single = lla_solve(&scatter, 50, &single_cfg).unwrap();
        assert_eq!(multi.average.max_abs_distance(&single.estimate), 0.0);
        assert_eq!(multi.best.estimate.max_abs_distance(&single.estimate), 0.0);
    }

    #[test]
    fn multistart_identical_starts_average_and_support() {
        // A deterministic start policy makes every run identical: the average
        // equals that point and the support is its exact-zero pattern.
        let truth = generate_precision(&StructureSpec::hubs(10, 3))
            .unwrap()
            .matrix;
        let data = sample_gaussian(&truth, 60, 4).unwrap();
        let scatter = sample_scatter(&data).unwrap();
        let cfg = SolverConfig {
            n_starts: 4,
            start: StartPolicy::RidgeInverse,
            ..SolverConfig::new(PenaltyConfig::horseshoe(0.5).unwrap())
        };
        let multi = multistart_estimate(&scatter, 60, &cfg).unwrap();
        let one = lla_solve(
            &scatter,
            60,
            &SolverConfig {
                n_starts: 1,
                ..cfg.clone()
            },
        )
        .unwrap();
        assert!(multi.average.max_abs_distance(&one.estimate) < 1e-12);
        let expected_support: Vec<(usize, usize)> = (0..10)
            .flat_map(|i| ((i + 1)..10).map(move |j| (i, j)))
            .filter(|&(i, j)| one.estimate.get(i, j) != 0.0)
            .collect();
        assert_eq!(multi.support, expected_support);
        assert_eq!(multi.n_failed, 0);
        assert!(multi.all_converged);
    }
}
