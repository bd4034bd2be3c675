//! Ground-truth precision matrices ("hubs", "random") and Gaussian sampling
//! from the implied covariance.

use crate::error::{Error, Result};
use crate::linalg::{is_positive_definite, Dataset, SymmetricMatrix};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    Hubs,
    Random,
}

impl std::fmt::Display for StructureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StructureKind::Hubs => f.write_str("hubs"),
            StructureKind::Random => f.write_str("random"),
        }
    }
}

/// Recipe for a synthetic true precision matrix.
///
/// Hubs: nodes are split into consecutive groups of `hub_group_size`; the
/// first node of each group connects to every other node of its group with
/// weight `edge_value`; the diagonal is `diagonal_target`.
///
/// Random: each off-diagonal pair is nonzero with probability `edge_prob`,
/// drawn uniformly from `value_range` in magnitude with a random sign, and
/// the diagonal is set to `diagonal_target` plus the absolute row sum so the
/// matrix is diagonally dominant (the drawn off-diagonals are kept exactly
/// as drawn, which keeps the true support crisp for the metrics).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureSpec {
    pub kind: StructureKind,
    pub q: usize,
    pub hub_group_size: usize,
    pub edge_value: f64,
    pub edge_prob: f64,
    /// Magnitude range for random-structure edges; the sign is a coin flip.
    pub value_range: (f64, f64),
    pub diagonal_target: f64,
    pub seed: u64,
}

impl StructureSpec {
    /// Hubs structure with the default parameterization (groups of 10,
    /// edge weight 0.25, unit diagonal).
    pub fn hubs(q: usize, seed: u64) -> Self {
        Self {
            kind: StructureKind::Hubs,
            q,
            hub_group_size: 10,
            edge_value: 0.25,
            edge_prob: 0.01,
            value_range: (0.2, 1.0),
            diagonal_target: 1.0,
            seed,
        }
    }

    /// Random structure with the default parameterization (1% edges,
    /// magnitudes in [0.2, 1]).
    pub fn random(q: usize, seed: u64) -> Self {
        Self {
            kind: StructureKind::Random,
            ..Self::hubs(q, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::Structure(format!("q must be >= 2, got {}", self.q)));
        }
        if !(self.diagonal_target > 0.0) {
            return Err(Error::Structure("diagonal_target must be positive".into()));
        }
        match self.kind {
            StructureKind::Hubs => {
                if self.hub_group_size < 2 {
                    return Err(Error::Structure("hub_group_size must be >= 2".into()));
                }
                if !self.edge_value.is_finite() {
                    return Err(Error::Structure("edge_value must be finite".into()));
                }
            }
            StructureKind::Random => {
                if !(0.0..=1.0).contains(&self.edge_prob) {
                    return Err(Error::Structure(format!(
                        "edge_prob must be in [0, 1], got {}",
                        self.edge_prob
                    )));
                }
                let (lo, hi) = self.value_range;
                if !(0.0 < lo && lo <= hi) || !hi.is_finite() {
                    return Err(Error::Structure(format!(
                        "value_range must satisfy 0 < lo <= hi, got ({lo}, {hi})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A generated ground-truth precision matrix plus its sparsity count.
#[derive(Debug, Clone)]
pub struct TruePrecision {
    pub matrix: SymmetricMatrix,
    /// Number of nonzero off-diagonal elements, counting both triangles.
    pub nonzero_offdiag: usize,
}

/// Builds the ground-truth precision matrix for the given structure;
/// deterministic per seed (hubs ignore the seed entirely, so their support
/// never changes).
pub fn generate_precision(spec: &StructureSpec) -> Result<TruePrecision> {
    spec.validate()?;
    let q = spec.q;
    let mut m = SymmetricMatrix::zeros(q)?;
    let mut nonzero = 0usize;
    match spec.kind {
        StructureKind::Hubs => {
            // A hub group is a star graph; its adjacency spectrum is
            // +-sqrt(group-1), so positive definiteness needs
            // diagonal > |edge| * sqrt(group-1).
            let worst_group = spec.hub_group_size.min(q);
            let margin =
                spec.diagonal_target - spec.edge_value.abs() * ((worst_group - 1) as f64).sqrt();
            if margin <= 0.0 {
                return Err(Error::Structure(format!(
                    "hub edge value {} violates the positive definiteness bound: \
                     diagonal {} must exceed |edge| * sqrt(group_size - 1) = {}",
                    spec.edge_value,
                    spec.diagonal_target,
                    spec.edge_value.abs() * ((worst_group - 1) as f64).sqrt()
                )));
            }
            for i in 0..q {
                m.set(i, i, spec.diagonal_target);
            }
            let mut start = 0;
            while start < q {
                let end = (start + spec.hub_group_size).min(q);
                for j in (start + 1)..end {
                    m.set(start, j, spec.edge_value);
                    if spec.edge_value != 0.0 {
                        nonzero += 2;
                    }
                }
                start = end;
            }
        }
        StructureKind::Random => {
            let mut rng = StdRng::seed_from_u64(spec.seed);
            let (lo, hi) = spec.value_range;
            for i in 0..q {
                for j in (i + 1)..q {
                    if rng.random::<f64>() < spec.edge_prob {
                        let mag = rng.random_range(lo..=hi);
                        let v = if rng.random::<bool>() { mag } else { -mag };
                        m.set(i, j, v);
                        nonzero += 2;
                    }
                }
            }
            for i in 0..q {
                let row_abs: f64 = (0..q).filter(|&j| j != i).map(|j| m.get(i, j).abs()).sum();
                m.set(i, i, spec.diagonal_target + row_abs);
            }
        }
    }
    if !is_positive_definite(&m) {
        return Err(Error::Structure(
            "generated matrix failed the positive definiteness check".into(),
        ));
    }
    Ok(TruePrecision {
        matrix: m,
        nonzero_offdiag: nonzero,
    })
}

/// Draws `n` i.i.d. rows from the zero-mean Gaussian whose precision matrix
/// is `omega0`, by solving `L^T x = z` for standard normal `z` where
/// `omega0 = L L^T`. Deterministic per seed.
pub fn sample_gaussian(omega0: &SymmetricMatrix, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Input("sample count must be positive".into()));
    }
    let chol = omega0.cholesky()?;
    let q = omega0.dim();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n * q);
    let mut z = vec![0.0; q];
    for _ in 0..n {
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        rows.extend_from_slice(&chol.solve_lt_vec(&z));
    }
    Dataset::new(n, q, rows)
}
