//! Select the horseshoe global scale by 5-fold cross-validation on held-out
//! Gaussian log-likelihood, then fit at the winning scale.
//!
//! ```bash
//! cargo run --release --example cross_validate
//! ```

use ggmap::linalg::sample_scatter;
use ggmap::metrics::support_metrics;
use ggmap::penalty::PenaltyConfig;
use ggmap::simulate::{generate_precision, sample_gaussian, StructureSpec};
use ggmap::solver::{lla_solve, SolverConfig};
use ggmap::tuning::{cv_select, default_tau_grid, CvConfig};

fn main() {
    let truth = generate_precision(&StructureSpec::hubs(40, 11)).expect("valid spec");
    let n = 120;
    let data = sample_gaussian(&truth.matrix, n, 11).expect("sampling");

    let cv = CvConfig {
        folds: 5,
        grid: default_tau_grid(),
        seed: 0,
        solver: SolverConfig::new(PenaltyConfig::horseshoe(0.1).expect("valid penalty")),
    };
    let outcome = cv_select(&data, &cv).expect("cv");
    println!("{:>12} {:>16}", "tau", "mean heldout nll");
    for (scale, mean) in &outcome.mean_scores {
        match mean {
            Some(m) => println!("{scale:>12.5} {m:>16.3}"),
            None => println!("{scale:>12.5} {:>16}", "failed"),
        }
    }
    println!("\nselected tau = {:.5}", outcome.selected);

    let mut solver = cv.solver.clone();
    solver.penalty = solver.penalty.with_scale(outcome.selected).unwrap();
    let scatter = sample_scatter(&data).expect("scatter");
    let fit = lla_solve(&scatter, n, &solver).expect("solve");
    let support = support_metrics(&fit.estimate, &truth.matrix, 0.0).expect("metrics");
    println!(
        "fit at selected scale: TPR={:.3} FPR={:.3} MCC={:.3}",
        support.tpr.unwrap(),
        support.fpr.unwrap(),
        support.mcc
    );
}
