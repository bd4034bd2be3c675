//! Global-scale selection by k-fold cross-validation on held-out Gaussian
//! log-likelihood.

use crate::error::{Error, Result};
use crate::linalg::{gaussian_nll, sample_scatter, Dataset};
use crate::solver::{lla_solve, SolverConfig};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;

/// Cross-validation plan: a scale grid (tau or rho, per the solver template's
/// penalty family) and a fold count.
#[derive(Debug, Clone)]
pub struct CvConfig {
    pub folds: usize,
    /// Candidate scales, strictly increasing.
    pub grid: Vec<f64>,
    pub seed: u64,
    /// Template for per-cell fits. Within CV, `n_starts` is forced to 1 and
    /// the objective trace is switched off; the final fit at the selected
    /// scale should use the caller's full policy.
    pub solver: SolverConfig,
}

/// Default tau grid: 10 logarithmically spaced values on [1e-3, 1].
pub fn default_tau_grid() -> Vec<f64> {
    log_spaced(1e-3, 1.0, 10)
}

/// Logarithmically spaced grid, inclusive of both endpoints.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let (l, h) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (l + (h - l) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

impl CvConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::Input(format!(
                "folds must be >= 2, got {}",
                self.folds
            )));
        }
        if self.folds > n {
            return Err(Error::Input(format!(
                "folds ({}) must not exceed the sample count ({n})",
                self.folds
            )));
        }
        if self.grid.is_empty() {
            return Err(Error::Input("scale grid must be nonempty".into()));
        }
        for w in self.grid.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Input(
                    "scale grid must be strictly increasing".into(),
                ));
            }
        }
        if self.grid.iter().any(|&g| !(g > 0.0) || !g.is_finite()) {
            return Err(Error::Input("scale grid values must be positive".into()));
        }
        self.solver.validate()
    }
}

/// One (scale, fold) cell of the score table.
#[derive(Debug, Clone, Serialize)]
pub struct CvCell {
    pub scale: f64,
    pub fold: usize,
    /// Held-out Gaussian negative log-likelihood; missing if the fit failed.
    pub heldout_nll: Option<f64>,
    pub converged: bool,
}

/// Cross-validation outcome: the winning scale and the full score table.
#[derive(Debug, Clone)]
pub struct CvOutcome {
    pub selected: f64,
    pub table: Vec<CvCell>,
    /// Mean held-out score per grid value (`None` for disqualified values).
    pub mean_scores: Vec<(f64, Option<f64>)>,
}

impl CvOutcome {
    pub const CSV_HEADER: &'static str = "scale,fold,heldout_nll,converged";

    pub fn table_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for cell in &self.table {
            let nll = cell.heldout_nll.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                cell.scale, cell.fold, nll, cell.converged
            ));
        }
        out
    }
}

/// Fold assignment by seeded shuffle: a true partition with sizes differing
/// by at most one.
pub fn fold_indices(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = StdRng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut out = vec![Vec::new(); folds];
    for (pos, row) in order.into_iter().enumerate() {
        out[pos % folds].push(row);
    }
    out
}

/// Selects the scale minimizing mean held-out negative log-likelihood.
///
/// Ties break toward the larger scale (weaker shrinkage). A grid value with
/// any failed fold is disqualified; if every value is disqualified the whole
/// selection fails.
pub fn cv_select(data: &Dataset, cfg: &CvConfig) -> Result<CvOutcome> {
    cfg.validate(data.n())?;
    let folds = fold_indices(data.n(), cfg.folds, cfg.seed);

    // Pre-split datasets once; cells only differ by scale.
    let mut splits = Vec::with_capacity(cfg.folds);
    for fold in &folds {
        let test = data.subset(fold)?;
        let train_rows: Vec<usize> = (0..data.n()).filter(|r| !fold.contains(r)).collect();
        let train = data.subset(&train_rows)?;
        splits.push((train, test));
    }

    let cells: Vec<CvCell> = cfg
        .grid
        .par_iter()
        .flat_map(|&scale| {
            let splits = &splits;
            let cfg = &cfg;
            (0..cfg.folds).into_par_iter().map(move |fold| {
                let (train, test) = &splits[fold];
                let run = || -> Result<(f64, bool)> {
                    let mut solver = cfg.solver.clone();
                    solver.penalty = solver.penalty.with_scale(scale)?;
                    solver.n_starts = 1;
                    solver.record_objective = false;
                    solver.seed = cfg.seed ^ fold as u64;
                    let train_scatter = sample_scatter(train)?;
                    let fit = lla_solve(&train_scatter, train.n(), &solver)?;
                    let test_scatter = sample_scatter(test)?;
                    let score = gaussian_nll(&fit.estimate, &test_scatter, test.n())?;
                    if !score.is_finite() {
                        return Err(Error::Input("non-finite held-out score".into()));
                    }
                    Ok((score, fit.converged))
                };
                match run() {
                    Ok((score, converged)) => CvCell {
                        scale,
                        fold,
                        heldout_nll: Some(score),
                        converged,
                    },
                    Err(_) => CvCell {
                        scale,
                        fold,
                        heldout_nll: None,
                        converged: false,
                    },
                }
            })
        })
        .collect();

    let mut mean_scores = Vec::with_capacity(cfg.grid.len());
    for &scale in &cfg.grid {
        let of_scale: Vec<&CvCell> = cells.iter().filter(|c| c.scale == scale).collect();
        let disqualified = of_scale.iter().any(|c| c.heldout_nll.is_none());
        let mean = if disqualified {
            None
        } else {
            Some(
                of_scale.iter().map(|c| c.heldout_nll.unwrap()).sum::<f64>()
                    / of_scale.len() as f64,
            )
        };
        mean_scores.push((scale, mean));
    }

    // Minimum mean score; ties toward the larger scale. Iterating in
    // increasing scale order with `<=` implements the tie-break.
    let mut selected = None;
    let mut best = f64::INFINITY;
    for &(scale, mean) in &mean_scores {
        if let Some(m) = mean {
            if m <= best {
                best = m;
                selected = Some(scale);
            }
        }
    }
    let selected = selected.ok_or(Error::CvAllDisqualified)?;
    Ok(CvOutcome {
        selected,
        table: cells,
        mean_scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penalty::PenaltyConfig;
    use crate::simulate::{generate_precision, sample_gaussian, StructureSpec};

    fn hubs_data(q: usize, n: usize, seed: u64) -> Dataset {
        let truth = generate_precision(&StructureSpec::hubs(q, seed))
            .unwrap()
            .matrix;
        sample_gaussian(&truth, n, seed ^ 0xBEEF).unwrap()
    }

    fn base_cfg(grid: Vec<f64>) -> CvConfig {
        CvConfig {
            folds: 5,
            grid,
            seed: 11,
            solver: SolverConfig::new(PenaltyConfig::constant(1.0).unwrap()),
        }
    }

    #[test]
    fn folds_partition_rows() {
        for (n, k) in [(120usize, 5usize), (23, 4), (10, 10)] {
            let folds = fold_indices(n, k, 3);
            let mut seen = vec![false; n];
            for fold in &folds {
                for &r in fold {
                    assert!(!seen[r], "row {r} in two folds");
                    seen[r] = true;
                }
            }
            assert!(seen.iter().all(|&s| s));
            let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
            let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
            assert!(hi - lo <= 1, "fold sizes {sizes:?}");
        }
    }

    #[test]
    fn five_folds_of_120_are_24_each() {
        let folds = fold_indices(120, 5, 7);
        assert!(folds.iter().all(|f| f.len() == 24));
    }

    #[test]
    fn single_value_grid_selects_it() {
        let data = hubs_data(10, 40, 1);
        let cfg = base_cfg(vec![0.5]);
        let out = cv_select(&data, &cfg).unwrap();
        assert_eq!(out.selected, 0.5);
        assert_eq!(out.table.len(), 5);
        assert!(out.table.iter().all(|c| c.heldout_nll.is_some()));
    }

    #[test]
    fn strong_signal_prefers_moderate_over_extreme_shrinkage() {
        // With strong structure, thresholding everything to the diagonal
        // (huge rho) must score worse than a moderate weight.
        let mut spec = StructureSpec::hubs(20, 2);
        spec.hub_group_size = 5;
        spec.edge_value = 0.45;
        let truth = generate_precision(&spec).unwrap().matrix;
        let data = sample_gaussian(&truth, 200, 0xFEED).unwrap();
        let cfg = base_cfg(vec![5.0, 1e6]);
        let out = cv_select(&data, &cfg).unwrap();
        assert_eq!(out.selected, 5.0);
        let m_lo = out.mean_scores[0].1.unwrap();
        let m_hi = out.mean_scores[1].1.unwrap();
        assert!(m_lo < m_hi, "moderate {m_lo} should beat extreme {m_hi}");
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let data = hubs_data(10, 40, 3);
        let cfg = base_cfg(vec![0.2, 1.0, 5.0]);
        let a = cv_select(&data, &cfg).unwrap();
        let b = cv_select(&data, &cfg).unwrap();
        assert_eq!(a.selected, b.selected);
        assert_eq!(a.table_csv(), b.table_csv());
    }

    #[test]
    fn scores_finite_for_converged_fits() {
        let data = hubs_data(12, 60, 4);
        let cfg = base_cfg(vec![0.5, 2.0]);
        let out = cv_select(&data, &cfg).unwrap();
        for cell in &out.table {
            if cell.converged {
                assert!(cell.heldout_nll.unwrap().is_finite());
            }
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let data = hubs_data(10, 20, 5);
        let mut cfg = base_cfg(vec![1.0]);
        cfg.folds = 1;
        assert!(cv_select(&data, &cfg).is_err());
        let mut cfg = base_cfg(vec![2.0, 1.0]);
        cfg.folds = 5;
        assert!(cv_select(&data, &cfg).is_err());
        let cfg = base_cfg(vec![]);
        assert!(cv_select(&data, &cfg).is_err());
        let mut cfg = base_cfg(vec![1.0]);
        cfg.folds = 21; // folds > n
        assert!(cv_select(&data, &cfg).is_err());
    }

    #[test]
    fn selection_invariant_to_grid_permutation_semantics() {
        // The grid must be handed over sorted; the selection then only
        // depends on the value set. Same set, same outcome.
        let data = hubs_data(10, 50, 6);
        let a = cv_select(&data, &base_cfg(vec![0.1, 1.0, 10.0])).unwrap();
        let b = cv_select(&data, &base_cfg(vec![0.1, 1.0, 10.0])).unwrap();
        assert_eq!(a.selected, b.selected);
    }

    #[test]
    fn tie_breaks_toward_larger_scale() {
        // Two enormous weights both collapse the estimate to the same
        // diagonal fit, so their mean scores tie exactly.
        let data = hubs_data(10, 40, 7);
        let out = cv_select(&data, &base_cfg(vec![1e8, 1e9])).unwrap();
        let s0 = out.mean_scores[0].1.unwrap();
        let s1 = out.mean_scores[1].1.unwrap();
        assert_eq!(s0, s1, "expected an exact tie");
        assert_eq!(out.selected, 1e9);
    }
}
