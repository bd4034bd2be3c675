//! Dense symmetric-matrix primitives, dataset handling and the Gaussian
//! objective pieces shared by every other module.
//!
//! Matrices are stored dense and row-major. Symmetry is enforced by mirroring
//! the written triangle on every write, so asymmetry can never accumulate
//! during coordinate updates. At the problem sizes this crate targets
//! (a few hundred variables) dense Cholesky factorizations are cheap and
//! column access stays cache friendly.

use crate::error::{Error, Result};

/// Dense symmetric `q x q` matrix.
///
/// `set` writes both `(i, j)` and `(j, i)`, so the symmetry invariant holds
/// by construction at all times.
#[derive(Debug, Clone)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    /// Zero matrix of dimension `dim >= 2`.
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Input(format!(
                "symmetric matrix dimension must be >= 2, got {dim}"
            )));
        }
        Ok(Self {
            dim,
            data: vec![0.0; dim * dim],
        })
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        Ok(m)
    }

    /// Diagonal matrix from the given entries.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * m.dim + i] = d;
        }
        Ok(m)
    }

    /// Builds from row-major entries, requiring symmetry within `sym_tol`
    /// (absolute). The upper triangle is the canonical one: `(i, j)` with
    /// `i <= j` is mirrored onto `(j, i)` so the result is exactly symmetric.
    pub fn from_rows(dim: usize, rows: &[f64], sym_tol: f64) -> Result<Self> {
        if rows.len() != dim * dim {
            return Err(Error::Dimension {
                expected: format!("{dim}x{dim} = {} entries", dim * dim),
                got: format!("{}", rows.len()),
            });
        }
        if rows.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("matrix entries must be finite".into()));
        }
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in i..dim {
                let a = rows[i * dim + j];
                let b = rows[j * dim + i];
                if (a - b).abs() > sym_tol {
                    return Err(Error::Input(format!(
                        "matrix not symmetric at ({i},{j}): {a} vs {b}"
                    )));
                }
                m.data[i * dim + j] = a;
                m.data[j * dim + i] = a;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Writes `(i, j)` and its mirror `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    /// Row `i` as a slice (equals column `i` by symmetry).
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Frobenius norm of the difference.
    pub fn frobenius_distance(&self, other: &SymmetricMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Max-norm of the difference.
    pub fn max_abs_distance(&self, other: &SymmetricMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `P m P^T` for the transposition of `i` and `j`; involutive.
    pub fn swap_rowcol(&self, i: usize, j: usize) -> Result<SymmetricMatrix> {
        if i >= self.dim || j >= self.dim {
            return Err(Error::Input(format!(
                "swap indices ({i},{j}) out of range for dim {}",
                self.dim
            )));
        }
        let mut out = self.clone();
        out.swap_rowcol_in_place(i, j);
        Ok(out)
    }

    /// In-place version of [`SymmetricMatrix::swap_rowcol`] used in solver hot loops.
    pub(crate) fn swap_rowcol_in_place(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let q = self.dim;
        for k in 0..q {
            self.data.swap(i * q + k, j * q + k);
        }
        for k in 0..q {
            self.data.swap(k * q + i, k * q + j);
        }
    }

    /// Cholesky factorization `m = L L^T` with strictly positive pivots.
    pub fn cholesky(&self) -> Result<CholeskyFactor> {
        CholeskyFactor::new(self)
    }
}

/// True iff a complete Cholesky factorization succeeds with all pivots > 0.
pub fn is_positive_definite(m: &SymmetricMatrix) -> bool {
    m.cholesky().is_ok()
}

/// Lower-triangular Cholesky factor of a positive definite matrix.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    dim: usize,
    /// Row-major lower triangle, including the diagonal.
    l: Vec<f64>,
}

impl CholeskyFactor {
    fn new(m: &SymmetricMatrix) -> Result<Self> {
        let q = m.dim;
        let mut l = vec![0.0; q * q];
        for j in 0..q {
            let mut d = m.get(j, j);
            for k in 0..j {
                d -= l[j * q + k] * l[j * q + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite {
                    context: format!("pivot {d:.3e} at index {j}"),
                });
            }
            let dj = d.sqrt();
            l[j * q + j] = dj;
            for i in (j + 1)..q {
                let mut s = m.get(i, j);
                for k in 0..j {
                    s -= l[i * q + k] * l[j * q + k];
                }
                l[i * q + j] = s / dj;
            }
        }
        Ok(Self { dim: q, l })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `log det(m) = 2 sum log L_ii`.
    pub fn log_det(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.l[i * self.dim + i].ln())
            .sum::<f64>()
            * 2.0
    }

    /// Solves `m x = b` via forward and back substitution.
    pub fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.dim, "rhs length mismatch");
        let q = self.dim;
        let mut x = b.to_vec();
        // L y = b
        for i in 0..q {
            let mut s = x[i];
            for k in 0..i {
                s -= self.l[i * q + k] * x[k];
            }
            x[i] = s / self.l[i * q + i];
        }
        // L^T x = y
        for i in (0..q).rev() {
            let mut s = x[i];
            for k in (i + 1)..q {
                s -= self.l[k * q + i] * x[k];
            }
            x[i] = s / self.l[i * q + i];
        }
        x
    }

    /// Solves `L^T x = b` (back substitution only); used for Gaussian sampling.
    pub fn solve_lt_vec(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.dim, "rhs length mismatch");
        let q = self.dim;
        let mut x = b.to_vec();
        for i in (0..q).rev() {
            let mut s = x[i];
            for k in (i + 1)..q {
                s -= self.l[k * q + i] * x[k];
            }
            x[i] = s / self.l[i * q + i];
        }
        x
    }

    /// Full inverse `m^{-1}` as a symmetric matrix.
    pub fn inverse(&self) -> SymmetricMatrix {
        let q = self.dim;
        let mut inv = SymmetricMatrix {
            dim: q,
            data: vec![0.0; q * q],
        };
        let mut e = vec![0.0; q];
        for j in 0..q {
            e[j] = 1.0;
            let col = self.solve_vec(&e);
            e[j] = 0.0;
            for i in j..q {
                // Mirror while writing; the solve of a symmetric system is
                // symmetric up to rounding, so take the computed column as canon.
                inv.data[i * q + j] = col[i];
                inv.data[j * q + i] = col[i];
            }
        }
        inv
    }
}

/// `n` samples of a `q`-dimensional vector, one sample per row.
#[derive(Debug, Clone)]
pub struct Dataset {
    n: usize,
    q: usize,
    rows: Vec<f64>,
}

impl Dataset {
    pub fn new(n: usize, q: usize, rows: Vec<f64>) -> Result<Self> {
        if n == 0 || q == 0 {
            return Err(Error::Input(format!(
                "dataset must be non-empty, got n={n}, q={q}"
            )));
        }
        if rows.len() != n * q {
            return Err(Error::Dimension {
                expected: format!("{n}x{q} = {} entries", n * q),
                got: format!("{}", rows.len()),
            });
        }
        if rows.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("dataset entries must be finite".into()));
        }
        Ok(Self { n, q, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.q..(i + 1) * self.q]
    }

    /// New dataset keeping only the given row indices (used by cross-validation).
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let mut rows = Vec::with_capacity(indices.len() * self.q);
        for &i in indices {
            if i >= self.n {
                return Err(Error::Input(format!("row index {i} out of range")));
            }
            rows.extend_from_slice(self.row(i));
        }
        Dataset::new(indices.len(), self.q, rows)
    }
}

/// Unnormalized scatter matrix `nS = Y^T Y` together with the sample count
/// it was built from.
#[derive(Debug, Clone)]
pub struct ScatterMatrix {
    s: SymmetricMatrix,
    n: usize,
}

impl ScatterMatrix {
    /// Wraps an existing matrix, verifying the PSD acceptance check
    /// (all Cholesky-attempt pivots `>= -1e-10 * trace`) and nonnegative
    /// diagonal entries.
    pub fn from_parts(s: SymmetricMatrix, n: usize) -> Result<Self> {
        let eps = 1e-10 * s.trace().abs().max(1.0);
        for i in 0..s.dim() {
            if s.get(i, i) < -eps {
                return Err(Error::NotPositiveSemidefinite {
                    context: format!("negative diagonal {:.3e} at {i}", s.get(i, i)),
                });
            }
        }
        check_psd(&s, eps)?;
        Ok(Self { s, n })
    }

    pub fn matrix(&self) -> &SymmetricMatrix {
        &self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.s.dim()
    }

    /// `P nS P^T` swap of rows/columns `i` and `j`.
    pub fn swap_rowcol(&self, i: usize, j: usize) -> Result<ScatterMatrix> {
        Ok(ScatterMatrix {
            s: self.s.swap_rowcol(i, j)?,
            n: self.n,
        })
    }
}

/// Semidefinite Cholesky attempt: pivots may touch zero within `eps` but must
/// never go below `-eps`. Columns with a nonpositive pivot are zeroed out,
/// which is exact for rank-deficient PSD input.
fn check_psd(m: &SymmetricMatrix, eps: f64) -> Result<()> {
    let q = m.dim();
    let mut l = vec![0.0; q * q];
    for j in 0..q {
        let mut d = m.get(j, j);
        for k in 0..j {
            d -= l[j * q + k] * l[j * q + k];
        }
        if d < -eps {
            return Err(Error::NotPositiveSemidefinite {
                context: format!("pivot {d:.3e} at index {j} below -{eps:.3e}"),
            });
        }
        if d <= 0.0 {
            continue; // treat as exactly semidefinite in this direction
        }
        let dj = d.sqrt();
        l[j * q + j] = dj;
        for i in (j + 1)..q {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[i * q + k] * l[j * q + k];
            }
            l[i * q + j] = s / dj;
        }
    }
    Ok(())
}

/// `Y^T Y`, exact and symmetric by construction.
pub fn sample_scatter(data: &Dataset) -> Result<ScatterMatrix> {
    let (n, q) = (data.n(), data.q());
    let mut s = SymmetricMatrix::zeros(q)?;
    for i in 0..q {
        for j in i..q {
            let mut acc = 0.0;
            for r in 0..n {
                let row = data.row(r);
                acc += row[i] * row[j];
            }
            s.set(i, j, acc);
        }
    }
    ScatterMatrix::from_parts(s, n)
}

/// Gaussian negative log-likelihood `-(n/2) log det(O) + (1/2) tr(nS O)`.
///
/// The log-determinant is computed via Cholesky; a non-PD `omega` is a
/// domain error.
pub fn gaussian_nll(omega: &SymmetricMatrix, scatter: &ScatterMatrix, n: usize) -> Result<f64> {
    if omega.dim() != scatter.dim() {
        return Err(Error::Dimension {
            expected: format!("{}", scatter.dim()),
            got: format!("{}", omega.dim()),
        });
    }
    let chol = omega.cholesky()?;
    let log_det = chol.log_det();
    let mut tr = 0.0;
    let q = omega.dim();
    let s = scatter.matrix();
    for i in 0..q {
        let or = omega.row(i);
        let sr = s.row(i);
        for j in 0..q {
            tr += or[j] * sr[j];
        }
    }
    Ok(-(n as f64) / 2.0 * log_det + 0.5 * tr)
}

/// `P m P^T` for the transposition permutation of `i` and `j`.
pub fn swap_rowcol(m: &SymmetricMatrix, i: usize, j: usize) -> Result<SymmetricMatrix> {
    m.swap_rowcol(i, j)
}
