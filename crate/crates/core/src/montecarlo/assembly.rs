use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::kernelmodel::SpectralKernel;
use crate::linalg::{eigvals_sym, low_rank_spectrum, Matrix, Spectrum, SymMatrix};

use super::{MonteCarloError, SampleSet};

/// Φ_K: the n×K matrix with entries φ_k(X_i)/√n, columns in flat order.
pub fn feature_matrix(kernel: &SpectralKernel, sample: &SampleSet, count: usize) -> Result<Matrix<f64>, MonteCarloError> {
    let n = sample.len();
    let scale = 1.0 / (n as f64).sqrt();
    let rows: Vec<Vec<f64>> = sample
        .points()
        .par_iter()
        .map(|x| kernel.eigenfunctions(x, count))
        .collect::<Result<_, _>>()?;
    Ok(Matrix::from_fn(n, count, |i, k| rows[i][k] * scale))
}

/// True when T_n is exactly F Λ Fᵀ for the materialized listing and that listing is short
/// enough for the factored path.
pub(crate) fn factored(kernel: &SpectralKernel, n: usize) -> bool {
    (kernel.is_finite_rank() || kernel.evaluates_by_expansion()) && kernel.has_basis() && kernel.flat().len() <= n
}

/// T_n with entries W(X_i, X_j)/n, diagonal included.
pub fn kernel_matrix(kernel: &SpectralKernel, sample: &SampleSet) -> Result<SymMatrix<f64>, MonteCarloError> {
    let n = sample.len();
    if kernel.evaluates_by_expansion() {
        let f = feature_matrix(kernel, sample, kernel.flat().len())?;
        let m = f.weighted_outer(&kernel.eigenvalues());
        return check_finite(m);
    }
    let inv = 1.0 / n as f64;
    let pts = sample.points();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..=i).map(|j| kernel.eval(&pts[i], &pts[j]).map(|w| w * inv)).collect())
        .collect::<Result<_, _>>()?;
    check_finite(SymMatrix::from_fn(n, |i, j| rows[i][j]))
}

fn check_finite(m: SymMatrix<f64>) -> Result<SymMatrix<f64>, MonteCarloError> {
    for i in 0..m.order() {
        for j in 0..=i {
            let v = m.get(i, j);
            if !v.is_finite() {
                return Err(MonteCarloError::NonFinite { i, j, value: v });
            }
        }
    }
    Ok(m)
}

/// Eigenvalues of T_n in decreasing |λ| order (n values). Finite-rank and expansion kernels go
/// through the K×K core of F Λ Fᵀ; everything else through the dense matrix.
pub fn empirical_spectrum(kernel: &SpectralKernel, sample: &SampleSet) -> Result<Spectrum<f64>, MonteCarloError> {
    if factored(kernel, sample.len()) {
        let f = feature_matrix(kernel, sample, kernel.flat().len())?;
        return Ok(low_rank_spectrum(&f, &kernel.eigenvalues())?);
    }
    Ok(eigvals_sym(&kernel_matrix(kernel, sample)?)?)
}

/// Deviation of the empirical Gram matrix Φ_KᵀΦ_K from the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthonormalityReport {
    pub k: usize,
    pub max_off_diagonal: f64,
    pub max_diagonal_deviation: f64,
}

pub fn orthonormality_diagnostic(
    kernel: &SpectralKernel,
    sample: &SampleSet,
    k: usize,
) -> Result<OrthonormalityReport, MonteCarloError> {
    let gram = feature_matrix(kernel, sample, k)?.gram();
    let mut off = 0.0f64;
    let mut diag = 0.0f64;
    for a in 0..k {
        diag = diag.max((gram.get(a, a) - 1.0).abs());
        for b in 0..a {
            off = off.max(gram.get(a, b).abs());
        }
    }
    Ok(OrthonormalityReport {
        k,
        max_off_diagonal: off,
        max_diagonal_deviation: diag,
    })
}

/// Symmetric 0/1 adjacency with independent Bernoulli(W(X_i, X_j)) entries above the diagonal
/// and a zero diagonal.
pub fn sample_adjacency(kernel: &SpectralKernel, sample: &SampleSet, seed: u64) -> Result<SymMatrix<f64>, MonteCarloError> {
    let n = sample.len();
    let pts = sample.points();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..i {
            let p = kernel.eval(&pts[i], &pts[j])?;
            if !(0.0..=1.0).contains(&p) {
                return Err(MonteCarloError::Probability { i, j, value: p });
            }
            // draw even for p ∈ {0, 1} so the stream does not depend on W
            let u: f64 = rng.gen();
            if u < p {
                adj.set(i, j, 1.0);
            }
        }
    }
    Ok(adj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernelmodel::{compose_power, named_kernel, KernelConfig, KernelSpec};
    use crate::montecarlo::sample_points;

    fn kernel(spec: KernelSpec) -> SpectralKernel {
        named_kernel(&spec, &KernelConfig::default()).unwrap()
    }

    #[test]
    fn constant_matrix_is_rank_one() {
        let k = kernel(KernelSpec::Constant { p0: 0.3, d: 3 });
        let s = sample_points(k.domain(), 40, 1).unwrap();
        let m = kernel_matrix(&k, &s).unwrap();
        assert!((0..40).all(|i| (0..=i).all(|j| m.get(i, j) == 0.3 / 40.0)));
        let spec = empirical_spectrum(&k, &s).unwrap();
        assert!((spec.get(0) - 0.3).abs() < 1e-15);
        assert!(spec.get(1).abs() < 1e-15);
    }

    #[test]
    fn linear_matrix_matches_definition() {
        let k = kernel(KernelSpec::Linear { p0: 0.5, p1: 0.1, d: 4 });
        let s = sample_points(k.domain(), 50, 2).unwrap();
        let m = kernel_matrix(&k, &s).unwrap();
        let pts = s.points();
        for i in 0..50 {
            for j in 0..=i {
                let ip: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| a * b).sum();
                let expected = (0.5 + 0.1 * 2.0 * ip) / 50.0;
                assert!((m.get(i, j) - expected).abs() < 1e-14);
            }
        }
        // factored and dense spectra agree
        let dense = eigvals_sym(&m).unwrap();
        let fact = empirical_spectrum(&k, &s).unwrap();
        for i in 0..8 {
            assert!((dense.get(i) - fact.get(i)).abs() < 1e-13);
        }
    }

    #[test]
    fn threshold_entries_are_indicators() {
        let k = kernel(KernelSpec::Threshold { d: 3 });
        let s = sample_points(k.domain(), 30, 3).unwrap();
        let m = kernel_matrix(&k, &s).unwrap();
        for i in 0..30 {
            for j in 0..=i {
                let v = m.get(i, j);
                assert!(v == 0.0 || v == 1.0 / 30.0);
            }
        }
    }

    #[test]
    fn orthonormality() {
        let k = compose_power(&kernel(KernelSpec::Threshold { d: 3 }), 2).unwrap();
        let s = sample_points(k.domain(), 2000, 4).unwrap();
        let r = orthonormality_diagnostic(&k, &s, 10).unwrap();
        assert!(r.max_off_diagonal <= 0.15, "{r:?}");
        let c = kernel(KernelSpec::Constant { p0: 0.4, d: 3 });
        let r = orthonormality_diagnostic(&c, &s, 1).unwrap();
        assert!(r.max_diagonal_deviation < 1e-12 && r.max_off_diagonal == 0.0);
    }

    /// φ_jφ_k has heavy tails for the Gaussian-line functions (E φ_5⁴ ≈ 180), so each Gram
    /// entry is compared with its own standard error.
    #[test]
    fn hermite_gram_entries_within_standard_errors() {
        let g = kernel(KernelSpec::GaussianWide);
        let (n, k) = (5000, 6);
        let s = sample_points(g.domain(), n, 5).unwrap();
        let f = feature_matrix(&g, &s, k).unwrap();
        let nf = n as f64;
        for a in 0..k {
            for b in 0..a {
                let prods: Vec<f64> = (0..n).map(|i| f.get(i, a) * f.get(i, b) * nf).collect();
                let mean = prods.iter().sum::<f64>() / nf;
                let sd = (prods.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
                assert!(mean.abs() <= 4.5 * sd / nf.sqrt(), "({a},{b}): {mean} vs sd {sd}");
            }
        }
        let s = sample_points(g.domain(), 50_000, 5).unwrap();
        let r = orthonormality_diagnostic(&g, &s, k).unwrap();
        assert!(r.max_off_diagonal <= 0.1, "{r:?}");
    }

    #[test]
    fn adjacency() {
        let s = sample_points(crate::kernelmodel::Domain::Sphere { d: 3 }, 400, 6).unwrap();
        let full = sample_adjacency(&kernel(KernelSpec::Constant { p0: 1.0, d: 3 }), &s, 1).unwrap();
        let empty = sample_adjacency(&kernel(KernelSpec::Constant { p0: 0.0, d: 3 }), &s, 1).unwrap();
        let half = sample_adjacency(&kernel(KernelSpec::Constant { p0: 0.3, d: 3 }), &s, 1).unwrap();
        let pairs = 400.0 * 399.0 / 2.0;
        let count = |m: &SymMatrix<f64>| (0..400).map(|i| (0..i).map(|j| m.get(i, j)).sum::<f64>()).sum::<f64>();
        assert_eq!(count(&full), pairs);
        assert_eq!(count(&empty), 0.0);
        assert!((0..400).all(|i| full.get(i, i) == 0.0));
        let density = count(&half) / pairs;
        let sigma = (0.3f64 * 0.7 / pairs).sqrt();
        assert!((density - 0.3).abs() < 3.0 * sigma);
    }

    #[test]
    fn adjacency_is_reproducible() {
        let k = kernel(KernelSpec::Threshold { d: 3 });
        let s = sample_points(k.domain(), 60, 9).unwrap();
        assert_eq!(sample_adjacency(&k, &s, 5).unwrap(), sample_adjacency(&k, &s, 5).unwrap());
    }
}
