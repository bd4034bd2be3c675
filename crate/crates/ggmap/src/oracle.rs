//! Independent brute-force oracles used by the test suite.
//!
//! These deliberately share no linear-algebra helpers with the solver beyond
//! primitive arithmetic, so agreement between an oracle and the production
//! path is evidence rather than tautology. They ship in the library so users
//! can re-run the verification themselves.

use crate::error::{Error, Result};
use crate::linalg::{ScatterMatrix, SymmetricMatrix};
use crate::penalty::{pen_value, PenaltyConfig};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Search box and resolution for the exhaustive 2x2 MAP search.
///
/// Parameters are ordered `(omega_11, omega_22, omega_12)`.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub w11: (f64, f64),
    pub w22: (f64, f64),
    pub w12: (f64, f64),
    pub step: f64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::Input(format!(
                "grid step must be positive, got {}",
                self.step
            )));
        }
        for (lo, hi) in [self.w11, self.w22, self.w12] {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::Input(format!("invalid grid interval ({lo}, {hi})")));
            }
        }
        Ok(())
    }
}

/// Grid points are integer multiples of `step` inside `[lo, hi]`. Anchoring
/// at zero matters: an interval spanning the origin then contains exactly
/// 0.0, where the horseshoe objective has its (decisive) sparse notch; a
/// free-phase grid would step over it.
fn grid_points(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let k_lo = (lo / step - 1e-9).ceil() as i64;
    let k_hi = (hi / step + 1e-9).floor() as i64;
    (k_lo..=k_hi).map(|k| k as f64 * step).collect()
}

/// Exhaustive minimization of the penalized objective over a 2x2 grid.
///
/// Every positive definite grid point is scored with the same objective the
/// solver minimizes (Gaussian negative log-likelihood plus twice the
/// penalty on the single off-diagonal); the arithmetic here is spelled out
/// on scalars rather than routed through the solver's matrix code.
pub fn grid_map_2x2(
    scatter: &ScatterMatrix,
    n: usize,
    penalty: &PenaltyConfig,
    grid: &GridSpec,
) -> Result<SymmetricMatrix> {
    if scatter.dim() != 2 {
        return Err(Error::Input(format!(
            "grid_map_2x2 requires q = 2, got {}",
            scatter.dim()
        )));
    }
    grid.validate()?;
    penalty.validate()?;

    let s11 = scatter.matrix().get(0, 0);
    let s12 = scatter.matrix().get(0, 1);
    let s22 = scatter.matrix().get(1, 1);
    let half_n = n as f64 / 2.0;

    let w12s = grid_points(grid.w12.0, grid.w12.1, grid.step);
    let w11s = grid_points(grid.w11.0, grid.w11.1, grid.step);
    let w22s = grid_points(grid.w22.0, grid.w22.1, grid.step);

    let mut best = f64::INFINITY;
    let mut arg = None;
    for &c in &w12s {
        let pen_term = 2.0 * pen_value(penalty, c)?;
        let c2 = c * c;
        let lin12 = s12 * c; // tr contribution of both symmetric off-diagonals / 2
        for &a in &w11s {
            if a <= 0.0 {
                continue;
            }
            let lin = 0.5 * s11 * a + lin12 + pen_term;
            for &b in &w22s {
                let det = a * b - c2;
                if det <= 0.0 {
                    continue;
                }
                let obj = -half_n * det.ln() + lin + 0.5 * s22 * b;
                if obj < best {
                    best = obj;
                    arg = Some((a, b, c));
                }
            }
        }
    }

    let (a, b, c) =
        arg.ok_or_else(|| Error::Input("grid contains no positive definite point".into()))?;
    let mut m = SymmetricMatrix::zeros(2)?;
    m.set(0, 0, a);
    m.set(1, 1, b);
    m.set(0, 1, c);
    Ok(m)
}

/// Monte Carlo estimate of the horseshoe penalty derivative with its
/// standard error.
#[derive(Debug, Clone, Copy)]
pub struct McDerivEstimate {
    pub value: f64,
    pub std_error: f64,
    /// Effective sample size of the self-normalized importance weights.
    pub ess: f64,
}

/// Self-normalized importance-sampling estimate of
/// `pen'(|x|) = |x| E[(l tau)^{-2} w]/E[w]`, `w(l) = N(x; 0, (l tau)^2)`,
/// over half-Cauchy draws of `l`.
pub fn mc_penalty_deriv(x: f64, tau: f64, draws: usize, seed: u64) -> Result<McDerivEstimate> {
    if !(x.abs() > 0.0) || !x.is_finite() {
        return Err(Error::Input(format!(
            "mc_penalty_deriv requires |x| > 0, got {x}"
        )));
    }
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::Input(format!("tau must be positive, got {tau}")));
    }
    if draws < 100_000 {
        return Err(Error::Input(format!("draws must be >= 1e5, got {draws}")));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let lambdas: Vec<f64> = (0..draws)
        .map(|_| (std::f64::consts::FRAC_PI_2 * rng.random::<f64>()).tan())
        .collect();
    mc_penalty_deriv_for_draws(x, tau, &lambdas)
}

/// Same estimator on caller-provided half-Cauchy draws, so one set of draws
/// can be reused across many `x` values.
pub fn mc_penalty_deriv_for_draws(x: f64, tau: f64, lambdas: &[f64]) -> Result<McDerivEstimate> {
    let ax = x.abs();
    let half_x2 = 0.5 * ax * ax;
    let m = lambdas.len() as f64;

    let mut sum_w = 0.0;
    let mut sum_w2 = 0.0;
    let mut sum_a = 0.0;
    for &l in lambdas {
        let sigma = l * tau;
        if !(sigma > 0.0) || !sigma.is_finite() {
            continue;
        }
        let w = (-half_x2 / (sigma * sigma)).exp() / sigma;
        sum_w += w;
        sum_w2 += w * w;
        sum_a += w / (sigma * sigma);
    }
    if !(sum_w > 0.0) {
        return Err(Error::UnreliableEstimate {
            ess: 0.0,
            min_ess: 100.0,
        });
    }
    let ess = sum_w * sum_w / sum_w2;
    if ess < 100.0 {
        return Err(Error::UnreliableEstimate {
            ess,
            min_ess: 100.0,
        });
    }
    let ratio = sum_a / sum_w;
    // Delta-method standard error of the ratio estimator.
    let mut sum_resid2 = 0.0;
    for &l in lambdas {
        let sigma = l * tau;
        if !(sigma > 0.0) || !sigma.is_finite() {
            continue;
        }
        let w = (-half_x2 / (sigma * sigma)).exp() / sigma;
        let a = w / (sigma * sigma);
        let r = a - ratio * w;
        sum_resid2 += r * r;
    }
    let mean_w = sum_w / m;
    let s2 = sum_resid2 / (m - 1.0);
    let se_ratio = (s2 / m).sqrt() / mean_w;
    Ok(McDerivEstimate {
        value: ax * ratio,
        std_error: ax * se_ratio,
        ess,
    })
}

/// Centered finite difference `(f(x+h) - f(x-h)) / (2h)`.
pub fn finite_diff<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Input(format!("finite_diff requires h > 0, got {h}")));
    }
    let up = f(x + h)?;
    let down = f(x - h)?;
    if !up.is_finite() || !down.is_finite() {
        return Err(Error::Input(format!(
            "finite_diff evaluations must be finite: f({}) = {up}, f({}) = {down}",
            x + h,
            x - h
        )));
    }
    Ok((up - down) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penalty::{pen_deriv, HorseshoeBackend};

    fn hs(tau: f64) -> PenaltyConfig {
        PenaltyConfig::horseshoe(tau).unwrap()
    }

    #[test]
    fn finite_diff_of_square_is_exact() {
        let sq = |x: f64| Ok(x * x);
        for &h in &[0.5, 0.1, 1e-3] {
            let d = finite_diff(sq, 3.0, h).unwrap();
            assert!((d - 6.0).abs() < 1e-10, "h={h}: {d}");
        }
    }

    #[test]
    fn finite_diff_rejects_bad_input() {
        let sq = |x: f64| Ok(x * x);
        assert!(finite_diff(sq, 1.0, 0.0).is_err());
        assert!(finite_diff(|_| Ok(f64::NAN), 1.0, 0.1).is_err());
    }

    #[test]
    fn finite_diff_matches_pen_deriv_with_richardson() {
        let cfg = hs(1.0);
        let f = |x: f64| pen_value(&cfg, x);
        for &x in &[0.3, 1.0, 3.0] {
            let expect = pen_deriv(&cfg, x).unwrap();
            let h = 1e-4 * x;
            let d1 = finite_diff(f, x, h).unwrap();
            let d2 = finite_diff(f, x, h / 2.0).unwrap();
            // Truncation is O(h^2): halving h shrinks the error ~4x, so the
            // Richardson combination should be much closer than either.
            let rich = (4.0 * d2 - d1) / 3.0;
            assert!((d1 - expect).abs() < 1e-5 * expect.abs().max(1e-3));
            assert!((rich - expect).abs() < (d1 - expect).abs().max(1e-12));
        }
    }

    #[test]
    fn mc_agrees_with_expint_backend() {
        let est = mc_penalty_deriv(1.0, 1.0, 200_000, 7).unwrap();
        let exact = pen_deriv(&hs(1.0), 1.0).unwrap();
        assert!(
            (est.value - exact).abs() <= 3.0 * est.std_error,
            "MC {} +- {} vs exact {exact}",
            est.value,
            est.std_error
        );
        assert!(est.ess >= 100.0);
    }

    #[test]
    fn mc_sees_monotone_decrease() {
        let lo = mc_penalty_deriv(0.5, 1.0, 200_000, 11).unwrap();
        let hi = mc_penalty_deriv(2.0, 1.0, 200_000, 13).unwrap();
        let gap = lo.value - hi.value;
        let joint = 3.0 * (lo.std_error + hi.std_error);
        assert!(
            gap > joint,
            "pen'(0.5)={} vs pen'(2)={} gap {gap} <= {joint}",
            lo.value,
            hi.value
        );
    }

    #[test]
    fn mc_tau_scaling_relation() {
        // pen'_tau(x) = (1/tau) pen'_1(x/tau) within joint SE bands.
        let tau = 0.5;
        let a = mc_penalty_deriv(0.8, tau, 400_000, 5).unwrap();
        let b = mc_penalty_deriv(0.8 / tau, 1.0, 400_000, 6).unwrap();
        let scaled = b.value / tau;
        let joint = 3.0 * (a.std_error + b.std_error / tau);
        assert!((a.value - scaled).abs() <= joint);
    }

    #[test]
    fn mc_standard_error_shrinks_with_draws() {
        let small = mc_penalty_deriv(1.0, 1.0, 100_000, 21).unwrap();
        let large = mc_penalty_deriv(1.0, 1.0, 400_000, 21).unwrap();
        let ratio = small.std_error / large.std_error;
        assert!(
            ratio > 1.4 && ratio < 2.9,
            "se ratio for 4x draws should be ~2, got {ratio}"
        );
    }

    #[test]
    fn mc_is_deterministic_per_seed() {
        let a = mc_penalty_deriv(1.0, 1.0, 100_000, 3).unwrap();
        let b = mc_penalty_deriv(1.0, 1.0, 100_000, 3).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.std_error, b.std_error);
    }

    #[test]
    fn mc_rejects_bad_input() {
        assert!(mc_penalty_deriv(0.0, 1.0, 100_000, 0).is_err());
        assert!(mc_penalty_deriv(1.0, 1.0, 10_000, 0).is_err());
        assert!(mc_penalty_deriv(1.0, -1.0, 100_000, 0).is_err());
    }

    #[test]
    fn mc_reports_unreliable_when_weights_degenerate() {
        // At |x|/tau ~ 1e8 essentially no half-Cauchy draw reaches the scale
        // that carries the importance weight.
        let err = mc_penalty_deriv(1e8, 1.0, 100_000, 1).unwrap_err();
        assert!(matches!(err, crate::error::Error::UnreliableEstimate { .. }), "{err}");
    }

    fn scatter_2x2(s11: f64, s12: f64, s22: f64, n: usize) -> ScatterMatrix {
        let mut m = SymmetricMatrix::zeros(2).unwrap();
        m.set(0, 0, s11);
        m.set(1, 1, s22);
        m.set(0, 1, s12);
        ScatterMatrix::from_parts(m, n).unwrap()
    }

    #[test]
    fn grid_recovers_mle_when_unpenalized() {
        // n (nS)^{-1} by the 2x2 closed form.
        let (s11, s12, s22, n) = (50.0, 20.0, 60.0, 50usize);
        let det = s11 * s22 - s12 * s12;
        let mle = (
            n as f64 * s22 / det,
            n as f64 * s11 / det,
            -(n as f64) * s12 / det,
        );
        let scatter = scatter_2x2(s11, s12, s22, n);
        let rho0 = PenaltyConfig::constant(0.0).unwrap();
        let step = 2e-3;
        let grid = GridSpec {
            w11: (mle.0 - 0.05, mle.0 + 0.05),
            w22: (mle.1 - 0.05, mle.1 + 0.05),
            w12: (mle.2 - 0.05, mle.2 + 0.05),
            step,
        };
        let arg = grid_map_2x2(&scatter, n, &rho0, &grid).unwrap();
        assert!((arg.get(0, 0) - mle.0).abs() <= step + 1e-12);
        assert!((arg.get(1, 1) - mle.1).abs() <= step + 1e-12);
        assert!((arg.get(0, 1) - mle.2).abs() <= step + 1e-12);
    }

    #[test]
    fn grid_prefers_diagonal_for_diagonal_scatter() {
        let scatter = scatter_2x2(40.0, 0.0, 40.0, 40);
        let cfg = hs(1.0);
        let step = 5e-3;
        let grid = GridSpec {
            w11: (0.5, 1.5),
            w22: (0.5, 1.5),
            w12: (-0.2, 0.2),
            step,
        };
        let arg = grid_map_2x2(&scatter, 40, &cfg, &grid).unwrap();
        assert!(
            arg.get(0, 1).abs() <= step + 1e-12,
            "off-diagonal {}",
            arg.get(0, 1)
        );
    }

    #[test]
    fn grid_with_no_pd_point_errors() {
        let scatter = scatter_2x2(10.0, 0.0, 10.0, 10);
        let cfg = PenaltyConfig::constant(1.0).unwrap();
        let grid = GridSpec {
            w11: (0.1, 0.2),
            w22: (0.1, 0.2),
            w12: (5.0, 6.0), // det always negative here
            step: 0.05,
        };
        assert!(grid_map_2x2(&scatter, 10, &cfg, &grid).is_err());
    }
}
