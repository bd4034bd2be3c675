//! Multi-start stability: different dense starts land on overlapping
//! supports with nearly identical objectives, and the majority-vote support
//! is reported alongside the averaged estimate.
//!
//! ```bash
//! cargo run --release --example multistart_stability
//! ```

use ggmap::linalg::sample_scatter;
use ggmap::penalty::PenaltyConfig;
use ggmap::simulate::{generate_precision, sample_gaussian, StructureSpec};
use ggmap::solver::{lla_solve, multistart_estimate, objective_eval, SolverConfig, StartPolicy};
use std::collections::BTreeSet;

fn support(est: &ggmap::linalg::SymmetricMatrix) -> BTreeSet<(usize, usize)> {
    let q = est.dim();
    (0..q)
        .flat_map(|i| ((i + 1)..q).map(move |j| (i, j)))
        .filter(|&(i, j)| est.get(i, j) != 0.0)
        .collect()
}

fn main() {
    let truth = generate_precision(&StructureSpec::hubs(30, 5)).expect("valid spec");
    let n = 120;
    let data = sample_gaussian(&truth.matrix, n, 5).expect("sampling");
    let scatter = sample_scatter(&data).expect("scatter");
    let penalty = PenaltyConfig::horseshoe(0.1).expect("valid penalty");

    // Two different dense start policies on the same instance.
    let mut fits = Vec::new();
    for start in [StartPolicy::RidgeInverse, StartPolicy::RandomizedRidge] {
        let cfg = SolverConfig {
            start,
            seed: 9,
            ..SolverConfig::new(penalty)
        };
        let fit = lla_solve(&scatter, n, &cfg).expect("solve");
        let obj = objective_eval(&fit.estimate, &scatter, n, &penalty).expect("objective");
        fits.push((fit, obj));
    }
    let (a, b) = (&fits[0], &fits[1]);
    let (sa, sb) = (support(&a.0.estimate), support(&b.0.estimate));
    let intersection = sa.intersection(&sb).count();
    let union = sa.union(&sb).count();
    let jaccard = if union == 0 {
        1.0
    } else {
        intersection as f64 / union as f64
    };
    println!(
        "support sizes {} vs {}, Jaccard overlap {jaccard:.3}",
        sa.len(),
        sb.len()
    );
    println!(
        "objectives {:.4} vs {:.4} ({:.3}% apart)",
        a.1,
        b.1,
        100.0 * (a.1 - b.1).abs() / a.1.abs()
    );
    assert!(jaccard >= 0.8);
    assert!((a.1 - b.1).abs() <= 0.01 * a.1.abs());

    // The full multi-start aggregate.
    let cfg = SolverConfig {
        n_starts: 8,
        start: StartPolicy::RandomizedRidge,
        seed: 9,
        ..SolverConfig::new(penalty)
    };
    let multi = multistart_estimate(&scatter, n, &cfg).expect("multistart");
    println!(
        "8 starts: majority-vote support {} edges, best objective {:.4}, all converged: {}",
        multi.support.len(),
        multi.best_objective,
        multi.all_converged
    );
}
