//! Verify the solver against the exhaustive 2x2 grid oracle: the brute-force
//! argmin of the penalized objective must match the solver's estimate to
//! within the grid resolution.
//!
//! ```bash
//! cargo run --release --example oracle_2x2
//! ```

use ggmap::linalg::{sample_scatter, SymmetricMatrix};
use ggmap::oracle::{grid_map_2x2, GridSpec};
use ggmap::penalty::PenaltyConfig;
use ggmap::simulate::sample_gaussian;
use ggmap::solver::{lla_solve, objective_eval, SolverConfig, StartPolicy};

fn main() {
    // True 2x2 precision with correlation 0.75.
    let r: f64 = 0.75;
    let d = 1.0 / (1.0 - r * r);
    let mut omega = SymmetricMatrix::identity(2).unwrap();
    omega.set(0, 0, d);
    omega.set(1, 1, d);
    omega.set(0, 1, -r * d);
    let n = 50;
    let data = sample_gaussian(&omega, n, 4).expect("sampling");
    let scatter = sample_scatter(&data).expect("scatter");

    let penalty = PenaltyConfig::horseshoe(1.0).expect("valid penalty");

    // Best LLA run over the two candidate basins: dense (interior optimum)
    // and identity (exact-zero branch).
    let mut best: Option<(f64, SymmetricMatrix)> = None;
    for start in [StartPolicy::RidgeInverse, StartPolicy::Identity] {
        let name = start.name();
        let cfg = SolverConfig {
            tol: 1e-9,
            max_outer_iters: 2000,
            start,
            ..SolverConfig::new(penalty)
        };
        let fit = lla_solve(&scatter, n, &cfg).expect("solve");
        let obj = objective_eval(&fit.estimate, &scatter, n, &penalty).expect("objective");
        println!(
            "start {name:<14} -> omega12 = {:+.4}, objective {:.4}",
            fit.estimate.get(0, 1),
            obj
        );
        if best.as_ref().map(|(b, _)| obj < *b).unwrap_or(true) {
            best = Some((obj, fit.estimate));
        }
    }
    let (_, est) = best.unwrap();

    // Coarse localization then the fine exhaustive grid at 1e-3.
    let coarse = GridSpec {
        w11: (0.05, 8.0),
        w22: (0.05, 8.0),
        w12: (-4.0, 4.0),
        step: 0.05,
    };
    let rough = grid_map_2x2(&scatter, n, &penalty, &coarse).expect("coarse grid");
    let m = 0.1;
    let fine = GridSpec {
        w11: ((rough.get(0, 0) - m).max(1e-3), rough.get(0, 0) + m),
        w22: ((rough.get(1, 1) - m).max(1e-3), rough.get(1, 1) + m),
        w12: (rough.get(0, 1) - m, rough.get(0, 1) + m),
        step: 1e-3,
    };
    let grid = grid_map_2x2(&scatter, n, &penalty, &fine).expect("fine grid");

    println!(
        "solver estimate  ({:.4}, {:.4}, {:+.4})",
        est.get(0, 0),
        est.get(1, 1),
        est.get(0, 1)
    );
    println!(
        "grid argmin      ({:.4}, {:.4}, {:+.4})",
        grid.get(0, 0),
        grid.get(1, 1),
        grid.get(0, 1)
    );
    let dist = est.max_abs_distance(&grid);
    println!("max-norm distance {dist:.2e} (grid resolution 1e-3)");
    assert!(dist <= 2e-3);
}
