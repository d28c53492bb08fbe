//! Deterministic perturbation checkers: Weyl (additive) and Ostrowski (multiplicative).

use serde::Serialize;

use crate::scalar::Real;

use super::spectrum::value_sorted_desc;
use super::{eigvals_sym, op_norm, LinalgError, Matrix, Spectrum, SymMatrix};

/// Outcome of comparing λ(A) and λ(B) against ‖A − B‖_op.
#[derive(Debug, Clone, Serialize)]
pub struct WeylCheck<T> {
    /// max_i |λ_i(A) − λ_i(B)| with both spectra sorted by signed value.
    pub value_sorted_gap: T,
    /// Same gap when both spectra are sorted by decreasing |λ|; reported, not asserted.
    pub abs_sorted_gap: T,
    pub bound: T,
    pub holds: bool,
}

pub fn weyl_gap<T: Real>(a: &SymMatrix<T>, b: &SymMatrix<T>) -> Result<WeylCheck<T>, LinalgError> {
    let la = eigvals_sym(a)?;
    let lb = eigvals_sym(b)?;
    let bound = op_norm(&a.sub(b)?)?;
    let va = la.value_sorted();
    let vb = lb.value_sorted();
    let value_sorted_gap = max_pair_gap(&va, &vb);
    let abs_sorted_gap = max_pair_gap(la.values(), lb.values());
    let tol = rounding_tolerance(a.order(), la.max_abs() + lb.max_abs());
    Ok(WeylCheck {
        value_sorted_gap,
        abs_sorted_gap,
        bound,
        holds: value_sorted_gap <= bound + tol,
    })
}

/// Per-index record of the multiplicative perturbation check.
#[derive(Debug, Clone, Serialize)]
pub struct OstrowskiCheck<T> {
    /// |λ_i(SΛSᵀ) − λ_i(Λ)| for every index of the zero-padded Λ, in decreasing-|λ| order of Λ.
    pub lhs: Vec<T>,
    /// |λ_i(Λ)| · ‖SᵀS − Id‖_op
    pub rhs: Vec<T>,
    pub gram_deviation: T,
    /// max_i (lhs_i − rhs_i); non-positive when the inequality holds exactly.
    pub max_slack: T,
    /// Largest violation when both spectra are naively paired by decreasing |λ|.
    pub abs_order_naive_excess: T,
    pub holds: bool,
}

/// Checks |λ_i(SΛSᵀ) − λ_i(Λ)| ≤ |λ_i(Λ)|·‖SᵀS − Id‖ for an n×R matrix `s` (R ≤ n).
///
/// Λ is padded with n − R zeros. Indices follow the decreasing-|λ| order of Λ; each λ_i(Λ)
/// is matched with the eigenvalue of SΛSᵀ holding the same rank in signed-value order, i.e.
/// the value-ordered inequality transported to the |λ| indexing.
pub fn ostrowski_gap<T: Real>(
    s: &Matrix<T>,
    lambda: &Spectrum<T>,
) -> Result<OstrowskiCheck<T>, LinalgError> {
    let (n, r) = (s.rows(), s.cols());
    if lambda.len() != r {
        return Err(LinalgError::DimensionMismatch {
            expected: r,
            found: lambda.len(),
        });
    }
    if r > n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: r,
        });
    }
    let product = s.weighted_outer(lambda.values());
    let mu = eigvals_sym(&product)?;
    let gram = s.gram().sub(&SymMatrix::identity(r))?;
    let gram_deviation = if r == 0 { T::zero() } else { op_norm(&gram)? };

    let mut padded = lambda.values().to_vec();
    padded.resize(n, T::zero());
    let padded = Spectrum::from_values(padded);

    // signed-value rank of each |λ|-ordered entry of the padded Λ
    let mut by_value: Vec<usize> = (0..n).collect();
    by_value.sort_by(|&a, &b| {
        padded.values()[b]
            .partial_cmp(&padded.values()[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut rank = vec![0; n];
    for (k, &i) in by_value.iter().enumerate() {
        rank[i] = k;
    }
    let mu_sorted = value_sorted_desc(mu.values());

    let mut lhs = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    let mut max_slack = T::neg_infinity();
    let mut naive = T::neg_infinity();
    for i in 0..n {
        let li = padded.values()[i];
        let l = (mu_sorted[rank[i]] - li).abs();
        let b = li.abs() * gram_deviation;
        max_slack = max_slack.max(l - b);
        naive = naive.max((mu.get(i) - li).abs() - b);
        lhs.push(l);
        rhs.push(b);
    }
    if n == 0 {
        max_slack = T::zero();
        naive = T::zero();
    }
    let tol = rounding_tolerance(n, padded.max_abs() * (T::one() + gram_deviation));
    Ok(OstrowskiCheck {
        lhs,
        rhs,
        gram_deviation,
        max_slack,
        abs_order_naive_excess: naive,
        holds: max_slack <= tol,
    })
}

fn max_pair_gap<T: Real>(a: &[T], b: &[T]) -> T {
    let len = a.len().max(b.len());
    (0..len).fold(T::zero(), |acc, i| {
        let x = a.get(i).copied().unwrap_or_else(T::zero);
        let y = b.get(i).copied().unwrap_or_else(T::zero);
        acc.max((x - y).abs())
    })
}

fn rounding_tolerance<T: Real>(n: usize, scale: T) -> T {
    T::lit(64.0) * T::epsilon() * T::from_usize_lossy(n.max(1)) * (scale + T::min_positive_value())
}
