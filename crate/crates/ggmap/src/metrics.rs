//! Evaluation metrics comparing an estimated precision matrix to the truth:
//! Stein's loss, Frobenius error, and support-recovery rates.

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use serde::Serialize;

/// Per-fit evaluation record; serializes to a flat JSON object and a CSV row.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport {
    pub steins_loss: f64,
    pub frobenius_error: f64,
    /// Missing when the truth has no nonzero off-diagonals.
    pub tpr: Option<f64>,
    /// Missing when the truth has no zero off-diagonals.
    pub fpr: Option<f64>,
    pub mcc: f64,
    pub wall_time_s: f64,
}

impl EvaluationReport {
    pub const CSV_HEADER: &'static str = "steins_loss,frobenius_error,tpr,fpr,mcc,wall_time_s";

    pub fn csv_row(&self) -> String {
        fn opt(v: Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{}",
            self.steins_loss,
            self.frobenius_error,
            opt(self.tpr),
            opt(self.fpr),
            self.mcc,
            self.wall_time_s
        )
    }
}

/// Stein's loss `tr(est truth^{-1}) - log det(est truth^{-1}) - q`, an
/// empirical Kullback-Leibler divergence between the two Gaussians.
/// Computed via Cholesky solves; no explicit inverse is formed.
pub fn steins_loss(est: &SymmetricMatrix, truth: &SymmetricMatrix) -> Result<f64> {
    if est.dim() != truth.dim() {
        return Err(Error::Dimension {
            expected: format!("{}", truth.dim()),
            got: format!("{}", est.dim()),
        });
    }
    let q = est.dim();
    let chol_truth = truth.cholesky()?;
    let chol_est = est.cholesky()?;
    // tr(est truth^{-1}) = sum_j [truth^{-1} est e_j]_j via one solve per column.
    let mut trace = 0.0;
    let mut col = vec![0.0; q];
    for j in 0..q {
        for (i, c) in col.iter_mut().enumerate() {
            *c = est.get(i, j);
        }
        trace += chol_truth.solve_vec(&col)[j];
    }
    let log_det = chol_est.log_det() - chol_truth.log_det();
    Ok(trace - log_det - q as f64)
}

/// Frobenius norm of the difference `est - truth`.
pub fn frobenius_error(est: &SymmetricMatrix, truth: &SymmetricMatrix) -> f64 {
    est.frobenius_distance(truth)
}

/// Off-diagonal confusion counts over the upper triangle, comparing
/// `|est| > zero_tol` against an exact-zero truth pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

pub fn support_confusion(
    est: &SymmetricMatrix,
    truth: &SymmetricMatrix,
    zero_tol: f64,
) -> Result<ConfusionCounts> {
    if est.dim() != truth.dim() {
        return Err(Error::Dimension {
            expected: format!("{}", truth.dim()),
            got: format!("{}", est.dim()),
        });
    }
    if !(zero_tol >= 0.0) {
        return Err(Error::Input(format!(
            "zero_tol must be >= 0, got {zero_tol}"
        )));
    }
    let q = est.dim();
    let mut c = ConfusionCounts {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
    };
    for i in 0..q {
        for j in (i + 1)..q {
            let predicted = est.get(i, j).abs() > zero_tol;
            let actual = truth.get(i, j) != 0.0;
            match (predicted, actual) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
    }
    Ok(c)
}

/// Support metrics with the zero-denominator conventions: an undefined rate
/// is reported as missing, and any zero factor in the MCC denominator makes
/// the MCC 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportMetrics {
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
    pub mcc: f64,
}

pub fn support_metrics(
    est: &SymmetricMatrix,
    truth: &SymmetricMatrix,
    zero_tol: f64,
) -> Result<SupportMetrics> {
    let c = support_confusion(est, truth, zero_tol)?;
    Ok(metrics_from_confusion(&c))
}

pub fn metrics_from_confusion(c: &ConfusionCounts) -> SupportMetrics {
    let (tp, fp, tn, fn_) = (c.tp as f64, c.fp as f64, c.tn as f64, c.fn_ as f64);
    let tpr = if c.tp + c.fn_ > 0 {
        Some(tp / (tp + fn_))
    } else {
        None
    };
    let fpr = if c.fp + c.tn > 0 {
        Some(fp / (fp + tn))
    } else {
        None
    };
    let denom = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
    let mcc = if denom > 0.0 {
        (tp * tn - fp * fn_) / denom.sqrt()
    } else {
        0.0
    };
    SupportMetrics { tpr, fpr, mcc }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{generate_precision, StructureSpec};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_spd(rng: &mut StdRng, q: usize) -> SymmetricMatrix {
        let a: Vec<f64> = (0..q * q).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut m = SymmetricMatrix::zeros(q).unwrap();
        for i in 0..q {
            for j in i..q {
                let mut acc = if i == j { q as f64 * 0.5 } else { 0.0 };
                for k in 0..q {
                    acc += a[k * q + i] * a[k * q + j];
                }
                m.set(i, j, acc);
            }
        }
        m
    }

    #[test]
    fn steins_loss_zero_at_equality() {
        let m = generate_precision(&StructureSpec::hubs(10, 0))
            .unwrap()
            .matrix;
        let v = steins_loss(&m, &m).unwrap();
        assert!(v.abs() < 1e-10, "{v}");
    }

    #[test]
    fn steins_loss_scaled_identity() {
        // est = 2 I_2, truth = I_2: 4 - 2 ln 2 - 2, cross-checked against the
        // dense-determinant route det(2I) = 4.
        let est = SymmetricMatrix::from_diagonal(&[2.0, 2.0]).unwrap();
        let truth = SymmetricMatrix::identity(2).unwrap();
        let v = steins_loss(&est, &truth).unwrap();
        let det_route = 4.0 - 4.0f64.ln() - 2.0;
        assert!((v - det_route).abs() < 1e-12);
        assert!((v - 0.6137).abs() < 1e-4);
    }

    #[test]
    fn steins_loss_nonnegative_on_random_pairs() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..40 {
            let a = random_spd(&mut rng, 6);
            let b = random_spd(&mut rng, 6);
            let v = steins_loss(&a, &b).unwrap();
            assert!(v >= -1e-10, "negative Stein loss {v}");
        }
    }

    #[test]
    fn steins_loss_congruence_invariance() {
        // tr((A E A')(A T A')^{-1}) and the log-det difference are invariant
        // under a joint congruence by any invertible A.
        let mut rng = StdRng::seed_from_u64(9);
        let est = random_spd(&mut rng, 4);
        let truth = random_spd(&mut rng, 4);
        let base = steins_loss(&est, &truth).unwrap();
        let a: Vec<f64> = (0..16).map(|_| rng.random_range(-1.0..1.0)).collect();
        let congruent = |m: &SymmetricMatrix| {
            let mut out = SymmetricMatrix::zeros(4).unwrap();
            for i in 0..4 {
                for j in i..4 {
                    let mut acc = 0.0;
                    for k in 0..4 {
                        for l in 0..4 {
                            acc += a[i * 4 + k] * m.get(k, l) * a[j * 4 + l];
                        }
                    }
                    out.set(i, j, acc + if i == j { 1e-9 } else { 0.0 });
                }
            }
            out
        };
        let v = steins_loss(&congruent(&est), &congruent(&truth)).unwrap();
        assert!(
            (v - base).abs() < 1e-6 * base.abs().max(1.0),
            "{v} vs {base}"
        );
    }

    #[test]
    fn steins_loss_rejects_non_pd() {
        let mut bad = SymmetricMatrix::identity(2).unwrap();
        bad.set(0, 1, 5.0);
        let good = SymmetricMatrix::identity(2).unwrap();
        assert!(steins_loss(&bad, &good).is_err());
        assert!(steins_loss(&good, &bad).is_err());
    }

    #[test]
    fn frobenius_basics() {
        let truth = SymmetricMatrix::identity(3).unwrap();
        assert_eq!(frobenius_error(&truth, &truth), 0.0);
        let mut est = truth.clone();
        est.set(0, 1, 0.3);
        // one symmetric pair of +-0.3 entries
        assert!((frobenius_error(&est, &truth) - (2.0f64 * 0.09).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn frobenius_triangle_inequality() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..30 {
            let a = random_spd(&mut rng, 5);
            let b = random_spd(&mut rng, 5);
            let c = random_spd(&mut rng, 5);
            let ab = frobenius_error(&a, &b);
            let bc = frobenius_error(&b, &c);
            let ac = frobenius_error(&a, &c);
            assert!(ac <= ab + bc + 1e-12);
        }
    }

    #[test]
    fn frobenius_matches_trace_route() {
        // ||D||_F^2 = tr(D' D), computed here through an explicit product.
        let mut rng = StdRng::seed_from_u64(23);
        let a = random_spd(&mut rng, 5);
        let b = random_spd(&mut rng, 5);
        let mut tr = 0.0;
        for i in 0..5 {
            for k in 0..5 {
                let d_ik = a.get(i, k) - b.get(i, k);
                tr += d_ik * d_ik;
            }
        }
        assert!((frobenius_error(&a, &b) - tr.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn support_exact_match() {
        let truth = generate_precision(&StructureSpec::hubs(10, 0))
            .unwrap()
            .matrix;
        let m = support_metrics(&truth, &truth, 0.0).unwrap();
        assert_eq!(m.tpr, Some(1.0));
        assert_eq!(m.fpr, Some(0.0));
        assert_eq!(m.mcc, 1.0);
    }

    #[test]
    fn support_dense_estimate_degenerate_mcc() {
        // Fully dense estimate vs half-dense truth: tpr = 1, fpr = 1, and the
        // TN = FN = 0 column makes the MCC denominator zero -> mcc = 0.
        let q = 6;
        let mut truth = SymmetricMatrix::identity(q).unwrap();
        for i in 0..q {
            for j in (i + 1)..q {
                if (i + j) % 2 == 0 {
                    truth.set(i, j, 0.1);
                }
            }
        }
        let mut est = SymmetricMatrix::identity(q).unwrap();
        for i in 0..q {
            for j in (i + 1)..q {
                est.set(i, j, 0.5);
            }
        }
        let m = support_metrics(&est, &truth, 0.0).unwrap();
        assert_eq!(m.tpr, Some(1.0));
        assert_eq!(m.fpr, Some(1.0));
        assert_eq!(m.mcc, 0.0);
    }

    #[test]
    fn support_frozen_confusion_arithmetic() {
        // TP=9, FN=1, FP=3, TN=87: tpr 0.9, fpr 1/30, mcc 780/sqrt(950400).
        let c = ConfusionCounts {
            tp: 9,
            fp: 3,
            tn: 87,
            fn_: 1,
        };
        let m = metrics_from_confusion(&c);
        assert!((m.tpr.unwrap() - 0.9).abs() < 1e-15);
        assert!((m.fpr.unwrap() - 3.0 / 90.0).abs() < 1e-15);
        let mcc_direct = (9.0 * 87.0 - 3.0 * 1.0) / (12.0f64 * 10.0 * 90.0 * 88.0).sqrt();
        assert!((m.mcc - mcc_direct).abs() < 1e-15);
        assert!((m.mcc - 0.800094).abs() < 1e-6);
    }

    #[test]
    fn support_empty_truth_reports_missing_tpr() {
        let truth = SymmetricMatrix::identity(5).unwrap();
        let mut est = truth.clone();
        est.set(0, 1, 0.2);
        let m = support_metrics(&est, &truth, 0.0).unwrap();
        assert_eq!(m.tpr, None);
        assert!(m.fpr.is_some());
    }

    #[test]
    fn support_permutation_invariance() {
        let truth = generate_precision(&StructureSpec::random(12, 4))
            .unwrap()
            .matrix;
        let est = generate_precision(&StructureSpec::random(12, 5))
            .unwrap()
            .matrix;
        let base = support_metrics(&est, &truth, 0.0).unwrap();
        let pe = est.swap_rowcol(2, 9).unwrap();
        let pt = truth.swap_rowcol(2, 9).unwrap();
        let permuted = support_metrics(&pe, &pt, 0.0).unwrap();
        assert_eq!(base, permuted);
    }

    #[test]
    fn report_csv_row_shape() {
        let r = EvaluationReport {
            steins_loss: 1.5,
            frobenius_error: 2.0,
            tpr: None,
            fpr: Some(0.25),
            mcc: 0.5,
            wall_time_s: 0.1,
        };
        assert_eq!(r.csv_row(), "1.5,2,,0.25,0.5,0.1");
        let json = serde_json::to_value(&r).unwrap();
        assert!(json.get("tpr").unwrap().is_null());
    }
}
