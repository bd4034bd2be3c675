//! Shrinkage penalties: `pen(|x|)` and its derivative `pen'(|x|)`.
//!
//! The graphical horseshoe penalty is the negative log of the marginal prior
//! density `p(x | tau) = \int N(x; 0, l^2 tau^2) (2/pi)(1+l^2)^{-1} dl`. The
//! marginal has no elementary closed form, so this module ships three
//! independent evaluations that must mutually agree:
//!
//! * `CauchyMixtureQuadrature`: adaptive quadrature over the half-Cauchy
//!   scale mixture after the substitution `l = tan(theta)`;
//! * `LaplaceMixtureQuadrature`: the same density written as a Laplace scale
//!   mixture, integrated over its mixing variable (the mixing weight involves
//!   Dawson's integral);
//! * `ExpintClosedForm`: `p(x | 1) = (2 pi^3)^{-1/2} e^z E1(z)` with
//!   `z = x^2/2`, evaluated through the exponentially scaled `E1`.
//!
//! Mutual agreement of the backends (plus a Monte Carlo oracle in
//! [`crate::oracle`]) is the correctness argument for all of them.
//!
//! A constant-weight family (`pen(x) = rho |x|`, the lasso) is provided as a
//! baseline; its derivative is `rho` everywhere.
//!
//! The horseshoe derivative diverges at the origin. `pen_deriv` therefore
//! returns a configurable cap (`deriv_cap`, default `1e12`) whenever the true
//! derivative reaches it, and `pen_value` continues linearly with that slope
//! below the matching cutoff, keeping every objective value finite while
//! preserving "an exact zero stays zero unless forced" behavior in the solver.

pub mod quad;
pub mod special;

use crate::error::{Error, Result};
use special::{dawson, e1_scaled};
use std::f64::consts::PI;

/// Penalty family: graphical horseshoe with global scale `tau`, or a
/// constant-weight (lasso) penalty with weight `rho`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum PenaltyFamily {
    Horseshoe { tau: f64 },
    Constant { rho: f64 },
}

/// Numerical route for horseshoe evaluations. Ignored by the constant family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum HorseshoeBackend {
    CauchyMixtureQuadrature,
    LaplaceMixtureQuadrature,
    ExpintClosedForm,
}

impl std::fmt::Display for HorseshoeBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            HorseshoeBackend::CauchyMixtureQuadrature => "cauchy",
            HorseshoeBackend::LaplaceMixtureQuadrature => "laplace",
            HorseshoeBackend::ExpintClosedForm => "expint",
        };
        f.write_str(s)
    }
}

/// Evaluator configuration for one penalty.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PenaltyConfig {
    pub family: PenaltyFamily,
    pub backend: HorseshoeBackend,
    /// Relative tolerance of the adaptive quadrature backends, in (0, 1e-4].
    pub quadrature_rel_tol: f64,
    /// Cap returned by `pen_deriv` where the horseshoe derivative diverges.
    pub deriv_cap: f64,
}

pub const DEFAULT_QUAD_REL_TOL: f64 = 1e-9;
pub const DEFAULT_DERIV_CAP: f64 = 1e12;

impl PenaltyConfig {
    /// Horseshoe penalty with the closed-form backend.
    pub fn horseshoe(tau: f64) -> Result<Self> {
        let cfg = Self {
            family: PenaltyFamily::Horseshoe { tau },
            backend: HorseshoeBackend::ExpintClosedForm,
            quadrature_rel_tol: DEFAULT_QUAD_REL_TOL,
            deriv_cap: DEFAULT_DERIV_CAP,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Constant-weight (lasso) penalty; `rho = 0` disables shrinkage entirely.
    pub fn constant(rho: f64) -> Result<Self> {
        let cfg = Self {
            family: PenaltyFamily::Constant { rho },
            backend: HorseshoeBackend::ExpintClosedForm,
            quadrature_rel_tol: DEFAULT_QUAD_REL_TOL,
            deriv_cap: DEFAULT_DERIV_CAP,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_backend(mut self, backend: HorseshoeBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_quadrature_rel_tol(mut self, tol: f64) -> Result<Self> {
        self.quadrature_rel_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            PenaltyFamily::Horseshoe { tau } => {
                if !(tau > 0.0) || !tau.is_finite() {
                    return Err(Error::Input(format!(
                        "horseshoe scale tau must be > 0, got {tau}"
                    )));
                }
            }
            PenaltyFamily::Constant { rho } => {
                if !(rho >= 0.0) || !rho.is_finite() {
                    return Err(Error::Input(format!(
                        "constant weight rho must be >= 0, got {rho}"
                    )));
                }
            }
        }
        if !(self.quadrature_rel_tol > 0.0 && self.quadrature_rel_tol <= 1e-4) {
            return Err(Error::Input(format!(
                "quadrature_rel_tol must be in (0, 1e-4], got {}",
                self.quadrature_rel_tol
            )));
        }
        if !(self.deriv_cap > 0.0) || !self.deriv_cap.is_finite() {
            return Err(Error::Input(format!(
                "deriv_cap must be positive, got {}",
                self.deriv_cap
            )));
        }
        Ok(())
    }

    /// Scale parameter of the family (`tau` or `rho`); used by tuning grids.
    pub fn scale(&self) -> f64 {
        match self.family {
            PenaltyFamily::Horseshoe { tau } => tau,
            PenaltyFamily::Constant { rho } => rho,
        }
    }

    /// Same family and backend with a different scale.
    pub fn with_scale(&self, scale: f64) -> Result<Self> {
        let mut cfg = *self;
        cfg.family = match self.family {
            PenaltyFamily::Horseshoe { .. } => PenaltyFamily::Horseshoe { tau: scale },
            PenaltyFamily::Constant { .. } => PenaltyFamily::Constant { rho: scale },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Lower/upper bounds on the horseshoe `pen'(|x|)` at unit global scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyBounds {
    pub x: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Bounds on the unit-scale horseshoe penalty derivative:
/// `2/(x ln(1 + 2/x^2)) - x < pen'(x) < 4/(x ln(1 + 4/x^2)) - x`,
/// with the upper expression itself below `4/x`.
pub fn pen_deriv_bounds(x: f64) -> Result<PenaltyBounds> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Input(format!(
            "pen_deriv_bounds requires x > 0, got {x}"
        )));
    }
    Ok(PenaltyBounds {
        x,
        lower: deriv_lower_bound_tau1(x),
        upper: deriv_upper_bound_tau1(x),
    })
}

fn deriv_lower_bound_tau1(x: f64) -> f64 {
    if x < 1e-30 {
        // ln(1 + 2/x^2) = ln 2 - 2 ln x to within 1e-60; the literal form
        // overflows 2/x^2 once x drops below ~1.4e-154.
        return 2.0 / (x * (std::f64::consts::LN_2 - 2.0 * x.ln())) - x;
    }
    2.0 / (x * (2.0 / (x * x)).ln_1p()) - x
}

fn deriv_upper_bound_tau1(x: f64) -> f64 {
    if x < 1e-30 {
        return 4.0 / (x * (2.0 * std::f64::consts::LN_2 - 2.0 * x.ln())) - x;
    }
    4.0 / (x * (4.0 / (x * x)).ln_1p()) - x
}

/// `pen'(|x|)`: the shrinkage weight at the current iterate value.
///
/// For the horseshoe this is `|x| E[(l tau)^{-2} w] / E[w]` with
/// `w = N(x; 0, (l tau)^2)` over the half-Cauchy mixing density, equivalently
/// `(|x|/tau^2)(e^{-z}/(z E1(z)) - 1)` with `z = x^2/(2 tau^2)`. The returned
/// value is capped at `deriv_cap` (reached only below `|x| ~ 2e-14 tau` at
/// the default cap).
pub fn pen_deriv(cfg: &PenaltyConfig, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Input(format!(
            "pen_deriv requires finite x, got {x}"
        )));
    }
    match cfg.family {
        PenaltyFamily::Constant { rho } => Ok(rho),
        PenaltyFamily::Horseshoe { tau } => {
            let ax = x.abs();
            if ax == 0.0 {
                return Ok(cfg.deriv_cap);
            }
            // If even the lower bound clears the cap, skip the evaluation.
            let y = ax / tau;
            if deriv_lower_bound_tau1(y) / tau >= cfg.deriv_cap {
                return Ok(cfg.deriv_cap);
            }
            let raw = match cfg.backend {
                HorseshoeBackend::ExpintClosedForm => expint_deriv(tau, ax),
                HorseshoeBackend::CauchyMixtureQuadrature => {
                    cauchy_deriv(tau, ax, cfg.quadrature_rel_tol)?
                }
                HorseshoeBackend::LaplaceMixtureQuadrature => {
                    laplace_deriv(tau, ax, cfg.quadrature_rel_tol)?
                }
            };
            Ok(raw.min(cfg.deriv_cap))
        }
    }
}

/// `pen(|x|) = -log p(|x|)` up to the family's additive constant.
///
/// Horseshoe values are the honest negative log marginal density (constants
/// included, so backends agree on the value itself, not just differences).
/// Below the cap cutoff the penalty continues linearly with slope
/// `deriv_cap`, which keeps objectives finite at exact zeros.
pub fn pen_value(cfg: &PenaltyConfig, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Input(format!(
            "pen_value requires finite x, got {x}"
        )));
    }
    match cfg.family {
        PenaltyFamily::Constant { rho } => Ok(rho * x.abs()),
        PenaltyFamily::Horseshoe { tau } => {
            let ax = x.abs();
            let floor = cap_cutoff(tau, cfg.deriv_cap);
            if ax < floor {
                let at_floor = horseshoe_neg_log_density(cfg, tau, floor)?;
                return Ok(at_floor - cfg.deriv_cap * (floor - ax));
            }
            horseshoe_neg_log_density(cfg, tau, ax)
        }
    }
}

/// Point below which `pen_deriv`'s lower bound reaches the cap; solves
/// `lower_bound(y)/tau = cap` on the unit scale.
fn cap_cutoff(tau: f64, cap: f64) -> f64 {
    let target = tau * cap;
    // lower bound ~ 2/(y ln(1 + 2/y^2)) for small y; bisect on log10 y.
    let f = |ly: f64| deriv_lower_bound_tau1(10f64.powf(ly)) - target;
    let (mut lo, mut hi) = (-280.0, 1.0);
    if f(hi) >= 0.0 {
        // Cap never binds above y = 10 for any sane configuration.
        return tau * 10.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    tau * 10f64.powf(0.5 * (lo + hi))
}

fn horseshoe_neg_log_density(cfg: &PenaltyConfig, tau: f64, ax: f64) -> Result<f64> {
    debug_assert!(ax > 0.0);
    match cfg.backend {
        HorseshoeBackend::ExpintClosedForm => {
            // p(x | tau) = (1/tau) K e^z E1(z), K = (2 pi^3)^{-1/2}
            let z = ax * ax / (2.0 * tau * tau);
            let q = e1_scaled(z);
            Ok(0.5 * (2.0 * PI * PI * PI).ln() + tau.ln() - q.ln())
        }
        HorseshoeBackend::CauchyMixtureQuadrature => {
            let [d, _] = cauchy_mixture_integrals(tau, ax, cfg.quadrature_rel_tol)?;
            // p = (2/pi) (2 pi)^{-1/2} * integral
            Ok(-d.ln() - (2.0 / (PI * (2.0 * PI).sqrt())).ln())
        }
        HorseshoeBackend::LaplaceMixtureQuadrature => {
            let [d, _] = laplace_mixture_integrals(tau, ax, cfg.quadrature_rel_tol)?;
            // p = (pi tau)^{-1} * integral
            Ok(-d.ln() + (PI * tau).ln())
        }
    }
}

// ---------------------------------------------------------------------------
// Exponential-integral closed form
// ---------------------------------------------------------------------------

fn expint_deriv(tau: f64, ax: f64) -> f64 {
    let z = ax * ax / (2.0 * tau * tau);
    // ratio - 1 with ratio = e^{-z}/(z E1(z)); computed without cancellation
    // for large z, where 1 - z e^z E1(z) = sum (-1)^{k+1} k!/z^k.
    let ratio_minus_one = if z >= 50.0 {
        let mut w = 0.0;
        let mut term = 1.0;
        for k in 1..=12u32 {
            term *= k as f64 / z;
            w += if k % 2 == 1 { term } else { -term };
        }
        w / (1.0 - w)
    } else {
        let zq = z * e1_scaled(z);
        (1.0 - zq) / zq
    };
    ax / (tau * tau) * ratio_minus_one
}

// ---------------------------------------------------------------------------
// Half-Cauchy mixture quadrature
// ---------------------------------------------------------------------------

/// Returns `[D, N]` with `D = int_0^{pi/2} e(theta) dtheta`,
/// `N = int e(theta)/sigma^2 dtheta`, `e = exp(-x^2/(2 sigma^2))/sigma`,
/// `sigma = tau tan(theta)`. Normalizing constants cancel in the ratio and
/// are reinstated by the caller where needed.
fn cauchy_mixture_integrals(tau: f64, ax: f64, rel_tol: f64) -> Result<[f64; 2]> {
    let half_x2 = 0.5 * ax * ax;
    let integrand = move |theta: f64| {
        let sigma = tau * theta.tan();
        if sigma <= 0.0 || !sigma.is_finite() {
            return (0.0, 0.0);
        }
        let e = (-half_x2 / (sigma * sigma)).exp() / sigma;
        (e, e / (sigma * sigma))
    };
    // The integrand peaks where sigma ~ x; pre-split around that scale so the
    // first panels cannot step over a narrow peak.
    let y = ax / tau;
    let breaks = [
        (y / 30.0).atan(),
        (y / 3.0).atan(),
        y.atan(),
        (3.0 * y).atan(),
        (30.0 * y).atan(),
        1.0,
    ];
    quad::integrate_pair(&integrand, 0.0, PI / 2.0, &breaks, rel_tol)
}

fn cauchy_deriv(tau: f64, ax: f64, rel_tol: f64) -> Result<f64> {
    let [d, n] = cauchy_mixture_integrals(tau, ax, rel_tol)?;
    Ok(ax * n / d)
}

// ---------------------------------------------------------------------------
// Laplace mixture quadrature
// ---------------------------------------------------------------------------

/// Returns `[D, N]` with `D = int_0^inf e^{-a y} w(a) da`,
/// `N = int a e^{-a y} w(a) da`, `y = |x|/tau`, and mixing weight
/// `w(a) = e^{-a^2/2} erfi(a/sqrt 2) = (2/sqrt pi) dawson(a/sqrt 2)`.
///
/// Integrated in log space (`a = e^u`): `a w(a)` is a plateau between the
/// `a^2` ramp at the origin and the exponential knee at `a ~ 1/y`, so in `u`
/// the integrand is one smooth bump of width `~log(1/y)` however small `y`
/// gets; the tangent substitution would squeeze all of that against `pi/2`.
fn laplace_mixture_integrals(tau: f64, ax: f64, rel_tol: f64) -> Result<[f64; 2]> {
    let y = ax / tau;
    let two_over_sqrt_pi = 2.0 / PI.sqrt();
    let ln_knee = -y.ln();
    let u_lo = ln_knee.min(0.0) - 25.0;
    let u_hi = ln_knee + 5.0;
    let integrand = move |u: f64| {
        let a = u.exp();
        let w = two_over_sqrt_pi * dawson(a / std::f64::consts::SQRT_2);
        let base = (-a * y).exp() * w * a; // trailing `a` is the jacobian
        (base, a * base)
    };
    let breaks = [
        ln_knee - 10.0,
        ln_knee - 3.0,
        ln_knee,
        ln_knee + 2.0,
        -5.0,
        0.0,
    ];
    quad::integrate_pair(&integrand, u_lo, u_hi, &breaks, rel_tol)
}

fn laplace_deriv(tau: f64, ax: f64, rel_tol: f64) -> Result<f64> {
    let [d, n] = laplace_mixture_integrals(tau, ax, rel_tol)?;
    Ok(n / (tau * d))
}
