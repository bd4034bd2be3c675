//! Desk-scale replicated benchmark: horseshoe (both mixture backends)
//! against the constant-weight lasso baseline on hubs data.
//!
//! ```bash
//! cargo run --release --example benchmark_small
//! ```

use ggmap::bench::{run_benchmark, BenchmarkConfig, Method};
use ggmap::simulate::StructureSpec;

fn main() {
    let mut cfg = BenchmarkConfig::new(StructureSpec::hubs(40, 0), 100, 5);
    cfg.methods = vec![
        Method::LlaHorseshoeCauchy,
        Method::LlaHorseshoeLaplace,
        Method::LlaConstant,
    ];
    cfg.n_starts = 4;
    cfg.seed = 1;

    let report = run_benchmark(&cfg).expect("benchmark");
    println!(
        "{:<24} {:>14} {:>14} {:>7} {:>7} {:>7} {:>9}",
        "method", "stein (sd)", "fnorm (sd)", "tpr", "fpr", "mcc", "time(s)"
    );
    for s in &report.summaries {
        println!(
            "{:<24} {:>7.3} ({:.3}) {:>7.3} ({:.3}) {:>7.3} {:>7.3} {:>7.3} {:>9.2}",
            s.method.name(),
            s.steins_loss.mean,
            s.steins_loss.sd,
            s.frobenius_error.mean,
            s.frobenius_error.sd,
            s.tpr.mean,
            s.fpr.mean,
            s.mcc.mean,
            s.fit_time_s.mean,
        );
    }
    println!("\nrows: {} = replicates x methods", report.rows.len());
}
