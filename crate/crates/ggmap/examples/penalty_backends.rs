//! The horseshoe penalty derivative computed three independent ways, checked
//! against its analytic bounds and a Monte Carlo oracle.
//!
//! ```bash
//! cargo run --release --example penalty_backends
//! ```

use ggmap::oracle::mc_penalty_deriv;
use ggmap::penalty::{pen_deriv, pen_deriv_bounds, HorseshoeBackend, PenaltyConfig};

fn main() {
    let tau = 1.0;
    println!("pen'(x) at tau = {tau}: three backends, bounds, Monte Carlo\n");
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>12} {:>12} {:>16}",
        "x", "lower", "expint", "cauchy", "laplace", "upper", "mc (3 se)"
    );
    for x in [0.001, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let bounds = pen_deriv_bounds(x).expect("x > 0");
        let mut vals = Vec::new();
        for backend in [
            HorseshoeBackend::ExpintClosedForm,
            HorseshoeBackend::CauchyMixtureQuadrature,
            HorseshoeBackend::LaplaceMixtureQuadrature,
        ] {
            let cfg = PenaltyConfig::horseshoe(tau).unwrap().with_backend(backend);
            vals.push(pen_deriv(&cfg, x).expect("finite x"));
        }
        let mc = mc_penalty_deriv(x, tau, 200_000, 42).expect("enough draws");
        println!(
            "{x:>8.3} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>9.4}+-{:.4}",
            bounds.lower,
            vals[0],
            vals[1],
            vals[2],
            bounds.upper,
            mc.value,
            3.0 * mc.std_error
        );
        assert!(bounds.lower < vals[0] && vals[0] < bounds.upper);
        assert!((vals[1] - vals[0]).abs() < 1e-6 * vals[0]);
        assert!((vals[2] - vals[0]).abs() < 1e-6 * vals[0]);
    }
    println!("\nall backends agree to 1e-6 relative and sit inside the bounds");
}
