//! Generate a hubs-structured precision matrix, draw Gaussian samples from
//! its implied covariance, and check how close the sample covariance gets.
//!
//! ```bash
//! cargo run --release --example simulate_hubs
//! ```

use ggmap::linalg::sample_scatter;
use ggmap::simulate::{generate_precision, sample_gaussian, StructureSpec};

fn main() {
    let spec = StructureSpec::hubs(30, 7);
    let truth = generate_precision(&spec).expect("valid spec");
    println!(
        "hubs structure: q={}, groups of {}, edge weight {}, {} edges",
        spec.q,
        spec.hub_group_size,
        spec.edge_value,
        truth.nonzero_offdiag / 2
    );

    let n = 5_000;
    let data = sample_gaussian(&truth.matrix, n, 1).expect("sampling");
    let scatter = sample_scatter(&data).expect("PSD scatter");

    // Empirical covariance vs the true covariance (inverse precision).
    let cov_truth = truth.matrix.cholesky().unwrap().inverse();
    let mut worst = 0.0f64;
    for i in 0..spec.q {
        for j in 0..spec.q {
            let emp = scatter.matrix().get(i, j) / n as f64;
            worst = worst.max((emp - cov_truth.get(i, j)).abs());
        }
    }
    println!("empirical covariance from n={n}: worst entrywise error {worst:.4}");
    println!(
        "(~4/sqrt(n) = {:.4} is the expected scale)",
        4.0 / (n as f64).sqrt()
    );
}
