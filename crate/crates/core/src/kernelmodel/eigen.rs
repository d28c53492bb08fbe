use std::f64::consts::PI;

use serde::Serialize;

use crate::scalar::Real;
use crate::specfun::{
    gamma_ratio, gauss_jacobi_rule, gegenbauer_all, gegenbauer_at_one, GegenbauerParam, QuadratureRule,
};

use super::{KernelError, Profile};

/// Smallest order tried by the adaptive quadrature.
pub const DEFAULT_START_ORDER: usize = 16;
/// Largest order (per piece) before the quadrature gives up.
pub const MAX_QUADRATURE_ORDER: usize = 4096;
/// Doubling stops once every level changes by less than this.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// A dot-product kernel f(⟨x, y⟩) on S^{d−1}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DotProductKernel {
    d: u32,
    profile: Profile,
    l_max: usize,
}

impl DotProductKernel {
    /// Validates d ≥ 3 and 0 ≤ f ≤ 1 on a `grid`-point grid.
    pub fn new(d: u32, profile: Profile, l_max: usize, grid: usize) -> Result<Self, KernelError> {
        GegenbauerParam::<f64>::from_dimension(d)?;
        profile.validate(grid)?;
        Ok(Self { d, profile, l_max })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// λ*_0, …, λ*_{L_max} by adaptive quadrature.
    pub fn level_eigenvalues(&self) -> Result<Vec<f64>, KernelError> {
        level_eigenvalues(self.d, &self.profile, self.l_max, DEFAULT_START_ORDER)
    }
}

/// Γ(d/2) / (√π Γ((d−1)/2)), the density constant of ⟨x, e⟩ under the uniform measure.
pub fn sphere_projection_constant(d: u32) -> f64 {
    let d = f64::from(d);
    gamma_ratio(d / 2.0, (d - 1.0) / 2.0) / PI.sqrt()
}

/// λ*_l = b_d · l!/(d−2)^{(l)} · ∫ f(t) G_l^γ(t) (1 − t²)^{γ−1/2} dt, with the order doubled
/// from `order` until the value moves by less than [`QUADRATURE_TOL`].
pub fn eigenvalue_quadrature(kernel: &DotProductKernel, l: usize, order: usize) -> Result<f64, KernelError> {
    Ok(level_eigenvalues(kernel.d, &kernel.profile, l, order)?[l])
}

/// All levels 0..=l_max at once; the rules and node evaluations are shared.
pub(crate) fn level_eigenvalues(
    d: u32,
    profile: &Profile,
    l_max: usize,
    start_order: usize,
) -> Result<Vec<f64>, KernelError> {
    let param = GegenbauerParam::<f64>::from_dimension(d)?;
    let b_d = sphere_projection_constant(d);
    let scale: Vec<f64> = (0..=l_max).map(|l| b_d / gegenbauer_at_one(param, l)).collect();

    let mut order = start_order.max(1);
    if let Some(deg) = profile.polynomial_degree() {
        // exact once 2·order − 1 ≥ deg + l_max
        order = order.max((deg + l_max) / 2 + 1);
    }
    let mut prev = integrate_levels(d, profile, l_max, order)?;
    loop {
        let next_order = order * 2;
        if next_order > MAX_QUADRATURE_ORDER {
            return Err(KernelError::Quadrature {
                order: MAX_QUADRATURE_ORDER,
                tol: QUADRATURE_TOL,
            });
        }
        let next = integrate_levels(d, profile, l_max, next_order)?;
        let change = prev
            .iter()
            .zip(&next)
            .zip(&scale)
            .fold(0.0f64, |m, ((a, b), s)| m.max(((a - b) * s).abs()));
        if change < QUADRATURE_TOL {
            let values: Vec<f64> = next.iter().zip(&scale).map(|(v, s)| v * s).collect();
            return Ok(snap_zeros(values));
        }
        prev = next;
        order = next_order;
    }
}

/// Levels whose magnitude is below 1e-14 of the largest are set to exactly zero.
pub(crate) fn snap_zeros(mut values: Vec<f64>) -> Vec<f64> {
    let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for v in &mut values {
        if v.abs() <= 1e-14 * top {
            *v = 0.0;
        }
    }
    values
}

/// ∫ f G_l ϱ_γ for l = 0..=l_max at a fixed order.
fn integrate_levels(d: u32, profile: &Profile, l_max: usize, order: usize) -> Result<Vec<f64>, KernelError> {
    let param = GegenbauerParam::<f64>::from_dimension(d)?;
    let mut acc = vec![0.0; l_max + 1];
    let mut add = |t: f64, w: f64| {
        let fw = profile.eval(t) * w;
        if fw != 0.0 {
            for (a, g) in acc.iter_mut().zip(gegenbauer_all(param, l_max, t)) {
                *a += fw * g;
            }
        }
    };
    if profile.needs_splitting() {
        // t = sin θ turns (1 − t²)^{γ−1/2} dt into cos^{d−2} θ dθ, analytic since d is an
        // integer; composite Gauss–Legendre over the pieces between breakpoints.
        let legendre: QuadratureRule<f64> = gauss_jacobi_rule(GegenbauerParam::new(0.5)?, order)?;
        let mut cuts = vec![-1.0];
        cuts.extend(profile.breakpoints());
        cuts.push(1.0);
        let power = (d - 2) as i32;
        for piece in cuts.windows(2) {
            let (a, b) = (piece[0].asin(), piece[1].asin());
            let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
            for (x, w) in legendre.nodes().iter().zip(legendre.weights()) {
                let theta = mid + half * x;
                add(theta.sin(), half * w * theta.cos().powi(power));
            }
        }
    } else {
        let rule = gauss_jacobi_rule(param, order)?;
        for (t, w) in rule.nodes().iter().zip(rule.weights()) {
            add(*t, *w);
        }
    }
    Ok(acc)
}

/// Closed form for the threshold profile 1_{t ≥ 0}: 1/2 at l = 0, 0 at even l > 0, and
/// (−1)^{l+⌈l/2⌉} B(d/2, l/2)/(2π) at odd l.
pub fn threshold_eigenvalue<T: Real>(d: u32, l: usize) -> T {
    if l == 0 {
        return T::lit(0.5);
    }
    if l % 2 == 0 {
        return T::zero();
    }
    let sign = if (l + l.div_ceil(2)) % 2 == 0 { T::one() } else { -T::one() };
    let half = T::lit(0.5);
    let dd = T::from_u32(d).expect("small integer");
    sign * crate::specfun::beta(dd * half, T::from_usize_lossy(l) * half) / T::lit(2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gegenbauer_eval;

    fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
        fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = (a + b) / 2.0;
            let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f((a + b) / 2.0));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    #[test]
    fn constant_profile() {
        let k = DotProductKernel::new(4, Profile::Constant { p0: 0.37 }, 10, 101).unwrap();
        let v = k.level_eigenvalues().unwrap();
        assert!((v[0] - 0.37).abs() < 1e-14);
        assert!(v[1..].iter().all(|x| *x == 0.0));
        assert!((eigenvalue_quadrature(&k, 0, 4).unwrap() - 0.37).abs() < 1e-14);
    }

    #[test]
    fn linear_profile() {
        let k = DotProductKernel::new(4, Profile::Linear { p0: 0.5, p1: 0.1, gamma: 1.0 }, 6, 101).unwrap();
        let v = k.level_eigenvalues().unwrap();
        assert!((v[0] - 0.5).abs() < 1e-14);
        assert!((v[1] - 0.05).abs() < 1e-14);
        assert!(v[2..].iter().all(|x| *x == 0.0));
    }

    #[test]
    fn threshold_closed_form_examples() {
        assert_eq!(threshold_eigenvalue::<f64>(5, 0), 0.5);
        assert_eq!(threshold_eigenvalue::<f64>(4, 2), 0.0);
        assert!((threshold_eigenvalue::<f64>(3, 1) - 0.25).abs() < 1e-15);
        assert!(threshold_eigenvalue::<f64>(3, 3) < 0.0);
        assert!(threshold_eigenvalue::<f64>(3, 5) > 0.0);
        assert!((threshold_eigenvalue::<f32>(3, 1) - 0.25).abs() < 1e-6);
    }

    #[test]
    fn threshold_quadrature_matches_closed_form() {
        for d in [3, 4, 5] {
            let k = DotProductKernel::new(d, Profile::Threshold, 20, 101).unwrap();
            let v = k.level_eigenvalues().unwrap();
            for (l, x) in v.iter().enumerate() {
                let exact = threshold_eigenvalue::<f64>(d, l);
                assert!((x - exact).abs() < 1e-8, "d={d} l={l}: {x} vs {exact}");
            }
        }
    }

    #[test]
    fn hemisphere_overlap_is_threshold_squared() {
        for d in [3, 4, 6] {
            let k = DotProductKernel::new(d, Profile::HemisphereOverlap, 15, 101).unwrap();
            let v = k.level_eigenvalues().unwrap();
            for (l, x) in v.iter().enumerate() {
                let t: f64 = threshold_eigenvalue(d, l);
                assert!((x - t * t).abs() < 1e-9, "d={d} l={l}: {x} vs {}", t * t);
            }
        }
    }

    #[test]
    fn logistic_matches_simpson_oracle() {
        let (d, r) = (3u32, 2.0);
        let k = DotProductKernel::new(d, Profile::Logistic { r }, 4, 101).unwrap();
        let v = k.level_eigenvalues().unwrap();
        let param = GegenbauerParam::<f64>::from_dimension(d).unwrap();
        for l in 0..=4 {
            let integrand = |t: f64| {
                let f = 1.0 / (1.0 + (-r * t).exp());
                f * gegenbauer_eval(param, l, t) * (1.0 - t * t).powf(param.gamma() - 0.5)
            };
            let oracle = adaptive_simpson(&integrand, -1.0, 1.0, 1e-13) * sphere_projection_constant(d)
                / gegenbauer_at_one(param, l);
            assert!((v[l] - oracle).abs() < 1e-8, "l={l}: {} vs {oracle}", v[l]);
        }
    }

    #[test]
    fn logistic_limits() {
        let k = DotProductKernel::new(5, Profile::Logistic { r: 0.0 }, 8, 101).unwrap();
        let v = k.level_eigenvalues().unwrap();
        assert!((v[0] - 0.5).abs() <= 1e-10);
        assert!(v[1..].iter().all(|x| x.abs() <= 1e-10));
        for d in [3, 5] {
            let k = DotProductKernel::new(d, Profile::Logistic { r: 1000.0 }, 5, 101).unwrap();
            let v = k.level_eigenvalues().unwrap();
            for l in [0usize, 1, 3, 5] {
                let t: f64 = threshold_eigenvalue(d, l);
                assert!((v[l] - t).abs() <= 0.02 * t.abs(), "d={d} l={l}: {} vs {t}", v[l]);
            }
        }
    }

    #[test]
    fn rejects_invalid_kernels() {
        assert!(DotProductKernel::new(2, Profile::Threshold, 5, 11).is_err());
        assert!(DotProductKernel::new(3, Profile::Constant { p0: 1.2 }, 5, 11).is_err());
    }
}
