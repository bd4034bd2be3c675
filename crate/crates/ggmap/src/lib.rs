//! Sparse precision matrix estimation in Gaussian graphical models.
//!
//! The estimator is the maximum-a-posteriori precision matrix under a
//! completely monotone shrinkage prior, computed by a local linear
//! approximation (LLA) scheme: the concave penalty is majorized by its
//! tangent at the current iterate, and each resulting weighted-lasso problem
//! is solved by blockwise coordinate descent with exact positive
//! definiteness preservation. The graphical horseshoe penalty is the
//! flagship family (with three mutually checking numerical backends); a
//! constant-weight lasso penalty ships as the baseline.
//!
//! ```
//! use ggmap::penalty::PenaltyConfig;
//! use ggmap::simulate::{generate_precision, sample_gaussian, StructureSpec};
//! use ggmap::linalg::sample_scatter;
//! use ggmap::solver::{lla_solve, SolverConfig};
//!
//! let truth = generate_precision(&StructureSpec::hubs(20, 7)).unwrap();
//! let data = sample_gaussian(&truth.matrix, 100, 7).unwrap();
//! let scatter = sample_scatter(&data).unwrap();
//! let cfg = SolverConfig::new(PenaltyConfig::horseshoe(0.1).unwrap());
//! let fit = lla_solve(&scatter, data.n(), &cfg).unwrap();
//! assert!(fit.converged);
//! ```
//!
//! Runnable walkthroughs live in `examples/`; the `ggmap` binary exposes the
//! same functionality as `simulate`, `estimate`, `cv` and `benchmark`
//! subcommands.

pub mod bench;
pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod penalty;
pub mod simulate;
pub mod solver;
pub mod tuning;
