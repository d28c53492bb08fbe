//! Householder tridiagonalization followed by the implicit-shift QL iteration.

use crate::scalar::Real;

use super::{LinalgError, Matrix, Spectrum, SymMatrix};

const MAX_QL_ITERATIONS: usize = 60;

/// Eigenpairs of a symmetric matrix. Column `j` of `vectors` belongs to `spectrum.values()[j]`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T> {
    pub spectrum: Spectrum<T>,
    pub vectors: Matrix<T>,
}

/// Full eigendecomposition, sorted by decreasing absolute value.
pub fn eig_sym<T: Real>(m: &SymMatrix<T>) -> Result<EigenDecomposition<T>, LinalgError> {
    check_input(m)?;
    let n = m.order();
    let mut z = m.to_dense();
    let (mut d, mut e) = tridiagonalize(&mut z, true);
    tql(&mut d, &mut e, Some(&mut z))?;
    let spectrum = Spectrum::from_values(d);
    let vectors = Matrix::from_fn(n, n, |i, j| z.get(i, spectrum.source_index(j)));
    Ok(EigenDecomposition { spectrum, vectors })
}

/// Eigenvalues only; skips the accumulation of the orthogonal transforms.
pub fn eigvals_sym<T: Real>(m: &SymMatrix<T>) -> Result<Spectrum<T>, LinalgError> {
    check_input(m)?;
    let mut z = m.to_dense();
    let (mut d, mut e) = tridiagonalize(&mut z, false);
    tql(&mut d, &mut e, None)?;
    Ok(Spectrum::from_values(d))
}

/// Operator norm (largest absolute eigenvalue).
pub fn op_norm<T: Real>(m: &SymMatrix<T>) -> Result<T, LinalgError> {
    if m.order() == 0 {
        return Ok(T::zero());
    }
    Ok(eigvals_sym(m)?.values()[0].abs())
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (length n-1). Returns the eigenvalues in the QL output order together
/// with the first component of every normalized eigenvector.
pub fn tridiagonal_eigen_first_components<T: Real>(
    diag: &[T],
    off: &[T],
) -> Result<(Vec<T>, Vec<T>), LinalgError> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if off.len() + 1 != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n - 1,
            found: off.len(),
        });
    }
    let mut d = diag.to_vec();
    // tql expects e[i] to hold the sub-diagonal element (i, i-1) shifted down by one.
    let mut e = vec![T::zero(); n];
    e[1..n].copy_from_slice(off);
    let mut first = Matrix::zeros(1, n);
    first.set(0, 0, T::one());
    tql(&mut d, &mut e, Some(&mut first))?;
    Ok((d, first.row(0).to_vec()))
}

fn check_input<T: Real>(m: &SymMatrix<T>) -> Result<(), LinalgError> {
    if m.order() == 0 {
        return Err(LinalgError::Empty);
    }
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    Ok(())
}

/// Reduces the dense symmetric `z` to tridiagonal form in place. When `vectors` is set, `z`
/// is overwritten with the accumulated orthogonal transform. Returns `(diag, e)` where
/// `e[i]` is the sub-diagonal element (i, i-1) and `e[0] = 0`.
fn tridiagonalize<T: Real>(z: &mut Matrix<T>, vectors: bool) -> (Vec<T>, Vec<T>) {
    let n = z.rows();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];

    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        if l > 0 {
            let scale = z.row(i)[..i].iter().fold(T::zero(), |acc, v| acc + v.abs());
            if scale == T::zero() {
                e[i] = z.get(i, l);
            } else {
                for k in 0..i {
                    let v = z.get(i, k) / scale;
                    z.set(i, k, v);
                    h = h + v * v;
                }
                let mut f = z.get(i, l);
                let mut g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h = h - f * g;
                z.set(i, l, f - g);
                f = T::zero();
                for j in 0..i {
                    if vectors {
                        let v = z.get(i, j) / h;
                        z.set(j, i, v);
                    }
                    g = T::zero();
                    for k in 0..=j {
                        g = g + z.get(j, k) * z.get(i, k);
                    }
                    for k in (j + 1)..i {
                        g = g + z.get(k, j) * z.get(i, k);
                    }
                    e[j] = g / h;
                    f = f + e[j] * z.get(i, j);
                }
                let hh = f / (h + h);
                for j in 0..i {
                    let f = z.get(i, j);
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let v = z.get(j, k) - (f * e[k] + g * z.get(i, k));
                        z.set(j, k, v);
                    }
                }
            }
        } else {
            e[i] = z.get(i, l);
        }
        d[i] = h;
    }
    d[0] = T::zero();
    e[0] = T::zero();

    for i in 0..n {
        if vectors {
            if d[i] != T::zero() {
                for j in 0..i {
                    let mut g = T::zero();
                    for k in 0..i {
                        g = g + z.get(i, k) * z.get(k, j);
                    }
                    for k in 0..i {
                        let v = z.get(k, j) - g * z.get(k, i);
                        z.set(k, j, v);
                    }
                }
            }
            d[i] = z.get(i, i);
            z.set(i, i, T::one());
            for j in 0..i {
                z.set(j, i, T::zero());
                z.set(i, j, T::zero());
            }
        } else {
            d[i] = z.get(i, i);
        }
    }
    (d, e)
}

/// Implicit-shift QL on a tridiagonal matrix. `e[i]` holds element (i, i-1) on entry.
/// When `z` is given, its columns are rotated along (any number of rows).
fn tql<T: Real>(d: &mut [T], e: &mut [T], mut z: Option<&mut Matrix<T>>) -> Result<(), LinalgError> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let eps = T::epsilon();
    let two = T::lit(2.0);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(LinalgError::NoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let signed_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + signed_r);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..z.rows() {
                        let f = z.get(k, i + 1);
                        let zi = z.get(k, i);
                        z.set(k, i + 1, s * zi + c * f);
                        z.set(k, i, c * zi - s * f);
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}
