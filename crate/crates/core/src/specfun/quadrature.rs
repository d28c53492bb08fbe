use serde::Serialize;

use crate::linalg::tridiagonal_eigen_first_components;
use crate::scalar::Real;

use super::gegenbauer::GegenbauerParam;
use super::SpecfunError;

/// Gauss rule for the weight (1 − t²)^{γ−1/2} on [−1, 1].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
    order: usize,
}

impl<T: Real> QuadratureRule<T> {
    /// Strictly increasing nodes in (−1, 1).
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Σ w_i f(t_i), approximating ∫ f(t) (1 − t²)^{γ−1/2} dt.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&t, &w)| acc + w * f(t))
    }
}

/// Golub–Welsch: nodes are the eigenvalues of the Jacobi matrix of the monic Gegenbauer
/// recurrence, weights are μ₀ times the squared first eigenvector components. Exact for
/// polynomials of degree ≤ 2·order − 1.
pub fn gauss_jacobi_rule<T: Real>(param: GegenbauerParam<T>, order: usize) -> Result<QuadratureRule<T>, SpecfunError> {
    if order == 0 {
        return Err(SpecfunError::QuadratureOrder);
    }
    let g = param.gamma();
    let diag = vec![T::zero(); order];
    let off: Vec<T> = (1..order)
        .map(|k| {
            let k = T::from_usize_lossy(k);
            let num = k * (k + T::lit(2.0) * g - T::one());
            let den = T::lit(4.0) * (k + g) * (k + g - T::one());
            (num / den).sqrt()
        })
        .collect();
    let (values, first) = tridiagonal_eigen_first_components(&diag, &off)?;
    let mass = param.weight_mass();
    let mut pairs: Vec<(T, T)> = values
        .into_iter()
        .zip(first)
        .map(|(x, v)| (x, mass * v * v))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

    // the weight is even; symmetrize to remove rounding asymmetry
    let n = order;
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    for i in 0..n {
        let j = n - 1 - i;
        let half = T::lit(0.5);
        nodes[i] = half * (pairs[i].0 - pairs[j].0);
        weights[i] = half * (pairs[i].1 + pairs[j].1);
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    Ok(QuadratureRule { nodes, weights, order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(g: f64) -> GegenbauerParam<f64> {
        GegenbauerParam::new(g).unwrap()
    }

    #[test]
    fn legendre_degree_three() {
        let r = gauss_jacobi_rule(p(0.5), 2).unwrap();
        assert_relative_eq!(r.integrate(|t| t * t), 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(r.integrate(|t| t * t * t + 1.0), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn chebyshev_second_kind_mass() {
        let r = gauss_jacobi_rule(p(1.0), 8).unwrap();
        assert_relative_eq!(r.integrate(|_| 1.0), std::f64::consts::FRAC_PI_2, max_relative = 1e-12);
    }

    #[test]
    fn mass_and_structure() {
        for g in [0.5, 1.0, 1.5, 2.5, 10.0] {
            for order in [1, 2, 5, 33, 200, 1024] {
                let r = gauss_jacobi_rule(p(g), order).unwrap();
                let mass: f64 = r.weights().iter().sum();
                assert_relative_eq!(mass, p(g).weight_mass(), max_relative = 1e-12);
                assert!(r.weights().iter().all(|w| *w > 0.0));
                assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
                assert!(r.nodes().iter().all(|t| t.abs() < 1.0));
            }
        }
    }

    #[test]
    fn polynomial_exactness() {
        // ∫ t^{2m} (1−t²)^{γ−1/2} dt = B(m + 1/2, γ + 1/2)
        for g in [0.5, 1.0, 1.5, 3.0] {
            let r = gauss_jacobi_rule(p(g), 10).unwrap();
            for m in 0..10 {
                let exact = crate::specfun::beta(m as f64 + 0.5, g + 0.5);
                assert_relative_eq!(r.integrate(|t| t.powi(2 * m)), exact, max_relative = 1e-12);
                assert!(r.integrate(|t| t.powi(2 * m as i32 + 1)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gegenbauer_orthogonality_high_order() {
        use crate::specfun::gegenbauer_eval;
        let r = gauss_jacobi_rule(p(1.5), 20).unwrap();
        let q = r.integrate(|t| gegenbauer_eval(p(1.5), 3, t) * gegenbauer_eval(p(1.5), 5, t));
        assert!(q.abs() <= 1e-12);
    }

    #[test]
    fn zero_order_rejected() {
        assert_eq!(gauss_jacobi_rule(p(1.0), 0), Err(SpecfunError::QuadratureOrder));
    }
}
