//! Dense symmetric linear algebra: eigensolver, operator norm, spectrum ordering, the δ₂
//! metric and deterministic perturbation checkers.

mod eigen;
mod factor;
mod matrix;
mod perturbation;
mod spectrum;

pub use eigen::{eig_sym, eigvals_sym, op_norm, tridiagonal_eigen_first_components, EigenDecomposition};
pub use factor::{low_rank_core, low_rank_spectrum, Cholesky, ThinQr};
pub use matrix::{Matrix, SymMatrix};
pub use perturbation::{ostrowski_gap, weyl_gap, OstrowskiCheck, WeylCheck};
pub use spectrum::{delta2, delta2_spectra, Spectrum};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("QL iteration did not converge for eigenvalue {index}")]
    NoConvergence { index: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("empty matrix")]
    Empty,
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(n: usize, rng: &mut ChaCha8Rng) -> SymMatrix<f64> {
        SymMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
    }

    /// Cyclic Jacobi rotations; independent of the Householder/QL path.
    fn jacobi_eigenvalues(m: &SymMatrix<f64>) -> Vec<f64> {
        let n = m.order();
        let mut a = m.to_dense();
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a.get(i, j).powi(2))
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                }
            }
        }
        let mut v: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    }

    fn power_iteration_norm(m: &SymMatrix<f64>) -> f64 {
        // iterate on M² so that ± dominant eigenvalues do not oscillate
        let n = m.order();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 * 0.37).collect();
        let mut est = 0.0;
        for _ in 0..5000 {
            let y = m.mul_vec(&m.mul_vec(&x));
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            est = (norm / xn).sqrt();
            x = y.iter().map(|v| v / norm).collect();
        }
        est
    }

    #[test]
    fn two_by_two() {
        let m = SymMatrix::<f64>::from_dense(2, &[2.0, 1.0, 1.0, 2.0], 0.0).unwrap();
        let e = eig_sym(&m).unwrap();
        assert!((e.spectrum.values()[0] - 3.0).abs() < 1e-14);
        assert!((e.spectrum.values()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_spectrum() {
        let s = eigvals_sym(&SymMatrix::<f64>::identity(5)).unwrap();
        assert_eq!(s.values(), &[1.0; 5]);
    }

    #[test]
    fn matches_jacobi_oracle_50() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_sym(50, &mut rng);
        let ours = eigvals_sym(&m).unwrap().value_sorted();
        let oracle = jacobi_eigenvalues(&m);
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn residuals_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &n in &[1, 2, 3, 17, 60] {
            let m = random_sym(n, &mut rng);
            let e = eig_sym(&m).unwrap();
            let norm = e.spectrum.max_abs();
            for j in 0..n {
                let v = e.vectors.column(j);
                let mv = m.mul_vec(&v);
                let lam = e.spectrum.values()[j];
                let res: f64 = mv.iter().zip(&v).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt();
                assert!(res <= 1e-10 * norm * (n as f64).sqrt() + 1e-14);
            }
            let g = e.vectors.gram();
            for i in 0..n {
                for j in 0..=i {
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((g.get(i, j) - target).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn reconstruction_and_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &n in &[4, 40, 200] {
            let m = random_sym(n, &mut rng);
            let e = eig_sym(&m).unwrap();
            let rec = e.vectors.weighted_outer(e.spectrum.values());
            let diff = op_norm(&rec.sub(&m).unwrap()).unwrap();
            let mnorm = e.spectrum.max_abs();
            assert!(diff <= 1e-9 * (1.0 + mnorm), "n={n} diff={diff}");
            let tr: f64 = e.spectrum.values().iter().sum();
            assert!((tr - m.trace()).abs() <= 1e-10 * m.trace().abs().max(1.0));
        }
    }

    #[test]
    fn op_norm_cases() {
        let d = SymMatrix::from_diagonal(&[3.0, -5.0, 1.0]);
        assert_eq!(op_norm(&d).unwrap(), 5.0);
        assert_eq!(op_norm(&SymMatrix::<f64>::zeros(4)).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_sym(20, &mut rng);
        let a = op_norm(&m).unwrap();
        let b = power_iteration_norm(&m);
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn spectrum_tie_order() {
        let s = Spectrum::from_values(vec![-2.0, 1.0, 2.0, -1.0, 2.0]);
        assert_eq!(s.values(), &[2.0, 2.0, -2.0, 1.0, -1.0]);
        assert_eq!(s.source_index(0), 2);
        assert_eq!(s.source_index(1), 4);
        assert_eq!(s.position_of(0), 2);
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = SymMatrix::<f64>::identity(3);
        m.set(1, 0, f64::NAN);
        assert_eq!(eigvals_sym(&m).unwrap_err(), LinalgError::NonFinite);
    }

    #[test]
    fn delta2_examples() {
        assert_eq!(delta2(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(delta2(&[3.0, -1.0], &[-1.0, 3.0]), 0.0);
        let d = delta2(&[2.0, 1.0, -1.0], &[1.5, 0.0, 0.0]);
        // best matching: 2↔1.5, 1↔0, -1↔0
        assert!((d - (0.25f64 + 1.0 + 1.0).sqrt()).abs() < 1e-15);
        assert!((d - brute_delta2(&[2.0, 1.0, -1.0], &[1.5, 0.0, 0.0])).abs() < 1e-15);
        // opposite signs are cheaper to send to padding zeros than to each other
        assert!((delta2(&[1.0], &[-1.0]) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn weyl_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_sym(8, &mut rng);
        let eps = 1e-3;
        let b = a.add(&SymMatrix::identity(8).scaled(eps)).unwrap();
        let w = weyl_gap(&a, &b).unwrap();
        assert!((w.value_sorted_gap - eps).abs() < 1e-12);
        assert!((w.bound - eps).abs() < 1e-12);
        assert!(w.holds);
        let same = weyl_gap(&a, &a).unwrap();
        assert_eq!(same.bound, 0.0);
        assert!(same.holds);
    }

    #[test]
    fn ostrowski_orthonormal_columns_exact() {
        // S = first 3 columns of an orthogonal matrix
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let q = eig_sym(&random_sym(7, &mut rng)).unwrap().vectors;
        let s = q.leading_columns(3);
        let lam = Spectrum::from_values(vec![2.0, -0.5, 0.25]);
        let c = ostrowski_gap(&s, &lam).unwrap();
        assert!(c.gram_deviation < 1e-12);
        assert!(c.lhs.iter().all(|v| *v < 1e-12));
        assert!(c.holds);
        let zero = Spectrum::from_values(vec![0.0; 3]);
        let c = ostrowski_gap(&s, &zero).unwrap();
        assert!(c.lhs.iter().chain(&c.rhs).all(|v| *v == 0.0));
    }

    #[test]
    fn low_rank_spectrum_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = Matrix::from_fn(30, 5, |_, _| rng.gen_range(-1.0..1.0));
        let w = [1.5f64, -0.7, 0.2, 0.0, -2.0];
        let dense = eigvals_sym(&f.weighted_outer(&w)).unwrap();
        let fast = low_rank_spectrum(&f, &w).unwrap();
        for i in 0..30 {
            assert!((dense.get(i) - fast.get(i)).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_solves() {
        let a = SymMatrix::<f64>::from_dense(3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0], 0.0).unwrap();
        let ch = Cholesky::new(&a, 0.0).unwrap();
        let x = ch.solve(&[1.0, 2.0, 3.0]);
        let back = a.mul_vec(&x);
        for (b, t) in back.iter().zip([1.0, 2.0, 3.0]) {
            assert!((b - t).abs() < 1e-14);
        }
        let singular = SymMatrix::from_dense(2, &[1.0, 1.0, 1.0, 1.0], 0.0).unwrap();
        assert!(Cholesky::new(&singular, 1e-12).is_err());
    }

    #[test]
    fn tridiagonal_first_components_normalized() {
        let (vals, first) = tridiagonal_eigen_first_components(&[0.0; 4], &[0.5, 0.5, 0.5]).unwrap();
        let s: f64 = first.iter().map(|v| v * v).sum();
        assert!((s - 1.0).abs() < 1e-14);
        assert_eq!(vals.len(), 4);
    }

    #[test]
    fn generic_over_f32() {
        let m = SymMatrix::<f32>::from_dense(2, &[2.0, 1.0, 1.0, 2.0], 0.0).unwrap();
        let s = eigvals_sym(&m).unwrap();
        assert!((s.values()[0] - 3.0).abs() < 1e-5);
    }

    /// Exhaustive minimum over partial matchings: every entry of `a` is paired with a distinct
    /// entry of `b` or with a padding zero; leftover entries of `b` meet zeros.
    pub(crate) fn brute_delta2(a: &[f64], b: &[f64]) -> f64 {
        fn rec(a: &[f64], b: &[f64], used: &mut Vec<bool>, acc: f64, best: &mut f64) {
            match a.split_first() {
                None => {
                    let rest: f64 = b.iter().zip(used.iter()).filter(|(_, u)| !**u).map(|(y, _)| y * y).sum();
                    *best = best.min(acc + rest);
                }
                Some((&x, tail)) => {
                    rec(tail, b, used, acc + x * x, best);
                    for j in 0..b.len() {
                        if !used[j] {
                            used[j] = true;
                            rec(tail, b, used, acc + (x - b[j]).powi(2), best);
                            used[j] = false;
                        }
                    }
                }
            }
        }
        let mut best = f64::INFINITY;
        rec(a, b, &mut vec![false; b.len()], 0.0, &mut best);
        best.sqrt()
    }

    mod props {
        use super::*;
        use proptest::collection::vec;
        use proptest::prelude::*;

        fn sym_from(n: usize, entries: &[f64]) -> SymMatrix<f64> {
            let mut it = entries.iter().copied();
            SymMatrix::from_fn(n, |_, _| it.next().unwrap_or(0.0))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(500))]

            #[test]
            fn weyl_holds(n in 1usize..=12, a in vec(-1.0f64..1.0, 78), b in vec(-1.0f64..1.0, 78), scale in 0.0f64..2.0) {
                let a = sym_from(n, &a);
                let pert = sym_from(n, &b).scaled(scale);
                let b = a.add(&pert).unwrap();
                let w = weyl_gap(&a, &b).unwrap();
                prop_assert!(w.holds, "gap {} bound {}", w.value_sorted_gap, w.bound);
            }

            #[test]
            fn ostrowski_holds(n in 1usize..=12, r in 1usize..=6, s in vec(-1.5f64..1.5, 72), l in vec(-2.0f64..2.0, 6)) {
                let r = r.min(n);
                let s = Matrix::from_fn(n, r, |i, j| s[i * 6 + j]);
                let lam = Spectrum::from_values(l[..r].to_vec());
                let c = ostrowski_gap(&s, &lam).unwrap();
                prop_assert!(c.holds, "slack {}", c.max_slack);
            }

            #[test]
            fn delta2_is_permutation_minimum(a in vec(-3.0f64..3.0, 0..=5), b in vec(-3.0f64..3.0, 0..=5)) {
                let fast = delta2(&a, &b);
                let slow = brute_delta2(&a, &b);
                prop_assert!((fast - slow).abs() <= 1e-12);
            }

            #[test]
            fn delta2_triangle(a in vec(-3.0f64..3.0, 0..=8), b in vec(-3.0f64..3.0, 0..=8), c in vec(-3.0f64..3.0, 0..=8)) {
                prop_assert!(delta2(&a, &c) <= delta2(&a, &b) + delta2(&b, &c) + 1e-12);
            }

            #[test]
            fn delta2_dominates_value_sorted_gap(n in 1usize..=8, a in vec(-1.0f64..1.0, 36), b in vec(-1.0f64..1.0, 36)) {
                let la = eigvals_sym(&sym_from(n, &a)).unwrap();
                let lb = eigvals_sym(&sym_from(n, &b)).unwrap();
                let d = delta2_spectra(&la, &lb);
                // both spectra as zero-padded sequences, positives first, negatives last
                let pad = |v: Vec<f64>| {
                    let mut p = v;
                    p.resize(2 * n, 0.0);
                    p.sort_by(|x, y| y.partial_cmp(x).unwrap());
                    p
                };
                for (x, y) in pad(la.values().to_vec()).iter().zip(pad(lb.values().to_vec())) {
                    prop_assert!((x - y).abs() <= d + 1e-12);
                }
            }

            #[test]
            fn trace_preserved(n in 1usize..=30, a in vec(-1.0f64..1.0, 465)) {
                let m = sym_from(n, &a);
                let s: f64 = eigvals_sym(&m).unwrap().values().iter().sum();
                prop_assert!((s - m.trace()).abs() <= 1e-10 * m.trace().abs().max(1.0));
            }
        }
    }
}
