use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Physicists' Hermite polynomial H_k(x).
pub fn hermite_eval<T: Real>(k: usize, x: T) -> T {
    let two = T::lit(2.0);
    let mut prev = T::one();
    if k == 0 {
        return prev;
    }
    let mut cur = two * x;
    for j in 1..k {
        let next = two * x * cur - two * T::from_usize_lossy(j) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Exponent choice for the Hermite eigenfunctions of the Gaussian kernel on the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussianVariant {
    /// exp(−x²/√2)
    Narrow,
    /// exp(−(√2 − 1)x²/2)
    Wide,
}

impl GaussianVariant {
    fn exponent<T: Real>(self, x: T) -> T {
        let x2 = x * x;
        match self {
            GaussianVariant::Narrow => -x2 / T::lit(std::f64::consts::SQRT_2),
            GaussianVariant::Wide => -(T::lit(std::f64::consts::SQRT_2) - T::one()) * x2 / T::lit(2.0),
        }
    }
}

/// φ_k(x) = 2^{1/8}/√(2^k k!) · e^{…} · H_k(2^{1/4} x).
///
/// The recurrence runs on h_k = H_k(y)/√(2^k k!) with the exponential and 2^{1/8} folded into
/// h_0, so nothing grows like 2^k k!.
pub fn gaussian_eigenfunction<T: Real>(k: usize, x: T, variant: GaussianVariant) -> T {
    gaussian_eigenfunctions(k, x, variant)[k]
}

/// φ_0(x), …, φ_K(x).
pub fn gaussian_eigenfunctions<T: Real>(big_k: usize, x: T, variant: GaussianVariant) -> Vec<T> {
    let y = T::lit(2f64.powf(0.25)) * x;
    let mut out = Vec::with_capacity(big_k + 1);
    out.push(T::lit(2f64.powf(0.125)) * variant.exponent(x).exp());
    if big_k >= 1 {
        out.push(y * T::lit(2.0).sqrt() * out[0]);
    }
    for k in 1..big_k {
        let kk = T::from_usize_lossy(k);
        let k1 = kk + T::one();
        let next = y * (T::lit(2.0) / k1).sqrt() * out[k] - (kk / k1).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite_eval(0, 1.7f64), 1.0);
        assert_eq!(hermite_eval(1, 0.5f64), 1.0);
        assert_eq!(hermite_eval(3, 1.0f64), -4.0);
        let x = 0.8f64;
        assert_relative_eq!(hermite_eval(4, x), 16.0 * x.powi(4) - 48.0 * x * x + 12.0, max_relative = 1e-14);
    }

    #[test]
    fn eigenfunction_examples() {
        let root8 = 2f64.powf(0.125);
        assert_relative_eq!(gaussian_eigenfunction(0, 0.0f64, GaussianVariant::Narrow), root8, max_relative = 1e-15);
        for v in [GaussianVariant::Narrow, GaussianVariant::Wide] {
            assert_eq!(gaussian_eigenfunction(1, 0.0f64, v), 0.0);
        }
    }

    #[test]
    fn matches_direct_formula_small_k() {
        for k in 0..12 {
            let fact: f64 = (1..=k).map(|j| j as f64).product();
            for &x in &[-1.3f64, -0.2, 0.0, 0.7, 2.1] {
                let direct = 2f64.powf(0.125) / (2f64.powi(k as i32) * fact).sqrt()
                    * (-x * x / 2f64.sqrt()).exp()
                    * hermite_eval(k, 2f64.powf(0.25) * x);
                let rec = gaussian_eigenfunction(k, x, GaussianVariant::Narrow);
                assert!((direct - rec).abs() <= 1e-12 * (1.0 + direct.abs()));
            }
        }
    }

    #[test]
    fn narrow_sup_bound() {
        let bound = 2f64.powf(0.125);
        for i in 0..=4000 {
            let x = -10.0 + 20.0 * i as f64 / 4000.0;
            for v in gaussian_eigenfunctions(30, x, GaussianVariant::Narrow) {
                assert!(v.abs() <= bound * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn high_order_is_finite() {
        for x in [-30.0f64, -5.0, 0.3, 12.0] {
            for v in gaussian_eigenfunctions(60, x, GaussianVariant::Wide) {
                assert!(v.is_finite());
            }
        }
    }
}
