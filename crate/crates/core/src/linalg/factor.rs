//! Small factorizations used around the eigensolver: Cholesky, thin QR, and spectra of
//! low-rank products.

use crate::scalar::Real;

use super::{eigvals_sym, LinalgError, Matrix, Spectrum, SymMatrix};

/// Lower Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: Matrix<T>,
}

impl<T: Real> Cholesky<T> {
    /// Fails with [`LinalgError::NotPositiveDefinite`] when a pivot drops to `min_pivot` or below.
    pub fn new(a: &SymMatrix<T>, min_pivot: T) -> Result<Self, LinalgError> {
        let n = a.order();
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut s = a.get(j, j);
            for k in 0..j {
                s = s - l.get(j, k) * l.get(j, k);
            }
            if !(s > min_pivot) {
                return Err(LinalgError::NotPositiveDefinite { pivot: j });
            }
            let d = s.sqrt();
            l.set(j, j, d);
            for i in (j + 1)..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s = s - l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / d);
            }
        }
        Ok(Self { l })
    }

    pub fn factor(&self) -> &Matrix<T> {
        &self.l
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.l.rows();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - self.l.get(i, k) * y[k];
            }
            y[i] = s / self.l.get(i, i);
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s = s - self.l.get(k, i) * y[k];
            }
            y[i] = s / self.l.get(i, i);
        }
        y
    }

    /// Solves `A X = B` column by column.
    pub fn solve_matrix(&self, b: &Matrix<T>) -> Matrix<T> {
        let mut out = Matrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let x = self.solve(&b.column(j));
            for (i, v) in x.into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        out
    }
}

/// Householder thin QR of a tall matrix (`rows >= cols`).
#[derive(Debug, Clone)]
pub struct ThinQr<T> {
    /// Householder vectors, stored column-wise from the diagonal down.
    work: Matrix<T>,
    betas: Vec<T>,
    r: Matrix<T>,
}

impl<T: Real> ThinQr<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self, LinalgError> {
        let (m, n) = (a.rows(), a.cols());
        if m < n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                found: m,
            });
        }
        let mut w = a.clone();
        let mut betas = vec![T::zero(); n];
        let mut r = Matrix::zeros(n, n);
        for k in 0..n {
            let norm = (k..m)
                .fold(T::zero(), |acc, i| acc + w.get(i, k) * w.get(i, k))
                .sqrt();
            if norm == T::zero() {
                continue;
            }
            let x0 = w.get(k, k);
            let alpha = if x0 >= T::zero() { -norm } else { norm };
            // v = x - alpha e1 overwrites the column; beta = 2 / vᵀv
            let v0 = x0 - alpha;
            w.set(k, k, v0);
            let vtv = (k..m).fold(T::zero(), |acc, i| acc + w.get(i, k) * w.get(i, k));
            let beta = T::lit(2.0) / vtv;
            betas[k] = beta;
            for j in (k + 1)..n {
                let dot = (k..m).fold(T::zero(), |acc, i| acc + w.get(i, k) * w.get(i, j));
                let s = beta * dot;
                for i in k..m {
                    let v = w.get(i, j) - s * w.get(i, k);
                    w.set(i, j, v);
                }
            }
            r.set(k, k, alpha);
            for j in (k + 1)..n {
                r.set(k, j, w.get(k, j));
            }
        }
        Ok(Self { work: w, betas, r })
    }

    /// Computes `Qᵀ x` for a vector of length `rows`.
    pub fn apply_qt(&self, x: &[T]) -> Vec<T> {
        let m = self.work.rows();
        let n = self.work.cols();
        let mut y = x.to_vec();
        for k in 0..n {
            let beta = self.betas[k];
            if beta == T::zero() {
                continue;
            }
            let dot = (k..m).fold(T::zero(), |acc, i| acc + self.work.get(i, k) * y[i]);
            let s = beta * dot;
            for i in k..m {
                y[i] = y[i] - s * self.work.get(i, k);
            }
        }
        y
    }

    /// Upper-triangular factor (cols × cols).
    pub fn r(&self) -> &Matrix<T> {
        &self.r
    }
}

/// Spectrum of the n×n matrix `F · diag(w) · Fᵀ` for a tall `F` (n×K, K ≤ n), computed from
/// the K×K matrix `R diag(w) Rᵀ` where `F = QR`. The remaining n-K eigenvalues are zero and
/// are appended.
pub fn low_rank_spectrum<T: Real>(f: &Matrix<T>, w: &[T]) -> Result<Spectrum<T>, LinalgError> {
    let core = low_rank_core(f, w)?;
    let mut vals = eigvals_sym(&core)?.values().to_vec();
    vals.resize(f.rows(), T::zero());
    Ok(Spectrum::from_values(vals))
}

/// The K×K symmetric core `R diag(w) Rᵀ` of `F diag(w) Fᵀ`.
pub fn low_rank_core<T: Real>(f: &Matrix<T>, w: &[T]) -> Result<SymMatrix<T>, LinalgError> {
    if w.len() != f.cols() {
        return Err(LinalgError::DimensionMismatch {
            expected: f.cols(),
            found: w.len(),
        });
    }
    let qr = ThinQr::new(f)?;
    Ok(qr.r().weighted_outer(w))
}
