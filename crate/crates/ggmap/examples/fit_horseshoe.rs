//! End-to-end sparse precision estimation: simulate a hubs graph, fit the
//! horseshoe-penalized MAP estimate, and report support recovery.
//!
//! ```bash
//! cargo run --release --example fit_horseshoe
//! ```

use ggmap::linalg::sample_scatter;
use ggmap::metrics::{frobenius_error, steins_loss, support_metrics};
use ggmap::penalty::PenaltyConfig;
use ggmap::simulate::{generate_precision, sample_gaussian, StructureSpec};
use ggmap::solver::{lla_solve, SolverConfig};

fn main() {
    let truth = generate_precision(&StructureSpec::hubs(50, 3)).expect("valid spec");
    let n = 150;
    let data = sample_gaussian(&truth.matrix, n, 3).expect("sampling");
    let scatter = sample_scatter(&data).expect("scatter");

    let cfg = SolverConfig::new(PenaltyConfig::horseshoe(0.05).expect("valid penalty"));
    let fit = lla_solve(&scatter, n, &cfg).expect("solve");
    println!(
        "converged={} after {} sweeps ({:.3}s)",
        fit.converged, fit.outer_iters, fit.wall_time_s
    );

    let trace = &fit.objective_trace;
    println!(
        "objective: {:.3} -> {:.3} over {} recorded values (monotone descent)",
        trace.first().unwrap(),
        trace.last().unwrap(),
        trace.len()
    );

    let q = truth.matrix.dim();
    let zeros = (0..q)
        .flat_map(|i| ((i + 1)..q).map(move |j| (i, j)))
        .filter(|&(i, j)| fit.estimate.get(i, j) == 0.0)
        .count();
    println!(
        "exact zeros among {} off-diagonal pairs: {zeros}",
        q * (q - 1) / 2
    );

    let support = support_metrics(&fit.estimate, &truth.matrix, 0.0).expect("metrics");
    println!(
        "support recovery: TPR={:.3} FPR={:.3} MCC={:.3}",
        support.tpr.unwrap(),
        support.fpr.unwrap(),
        support.mcc
    );
    println!(
        "Stein's loss {:.3}, Frobenius error {:.3}",
        steins_loss(&fit.estimate, &truth.matrix).expect("loss"),
        frobenius_error(&fit.estimate, &truth.matrix)
    );
}
