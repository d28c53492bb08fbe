use serde::Serialize;

use crate::scalar::Real;

use super::gamma::gamma_ratio;
use super::SpecfunError;

/// Gegenbauer index γ > 0. Built from a dimension it is γ = (d − 2)/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GegenbauerParam<T> {
    gamma: T,
}

impl<T: Real> GegenbauerParam<T> {
    pub fn new(gamma: T) -> Result<Self, SpecfunError> {
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return Err(SpecfunError::GegenbauerIndex {
                gamma: gamma.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { gamma })
    }

    pub fn from_dimension(d: u32) -> Result<Self, SpecfunError> {
        if d < 3 {
            return Err(SpecfunError::Dimension { d });
        }
        Self::new(T::from_u32(d - 2).expect("small integer") / T::lit(2.0))
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// c_γ = 2^{−2γ} Γ(2γ+1) / Γ(γ+1/2)²
    pub fn normalizer(&self) -> T {
        let g = self.gamma;
        let two = T::lit(2.0);
        let half = T::lit(0.5);
        // Γ(2γ+1)/Γ(γ+1/2)² split into two ratios to keep both factors moderate
        gamma_ratio(two * g + T::one(), g + half) / gamma_ratio(g + half, T::one()) * two.powf(-two * g)
    }

    /// ∫₋₁¹ (1 − t²)^{γ−1/2} dt = √π Γ(γ+1/2) / Γ(γ+1)
    pub fn weight_mass(&self) -> T {
        let g = self.gamma;
        let sqrt_pi = T::lit(std::f64::consts::PI.sqrt());
        sqrt_pi * gamma_ratio(g + T::lit(0.5), g + T::one())
    }
}

/// G_l^γ(t) by the three-term recurrence.
pub fn gegenbauer_eval<T: Real>(param: GegenbauerParam<T>, l: usize, t: T) -> T {
    let g = param.gamma;
    let mut prev = T::one();
    if l == 0 {
        return prev;
    }
    let two = T::lit(2.0);
    let mut cur = two * g * t;
    for k in 2..=l {
        let kk = T::from_usize_lossy(k);
        let next = (two * t * (kk + g - T::one()) * cur - (kk + two * g - two) * prev) / kk;
        prev = cur;
        cur = next;
    }
    cur
}

/// G_0^γ(t), …, G_L^γ(t).
pub fn gegenbauer_all<T: Real>(param: GegenbauerParam<T>, big_l: usize, t: T) -> Vec<T> {
    let g = param.gamma;
    let two = T::lit(2.0);
    let mut out = Vec::with_capacity(big_l + 1);
    out.push(T::one());
    if big_l >= 1 {
        out.push(two * g * t);
    }
    for k in 2..=big_l {
        let kk = T::from_usize_lossy(k);
        let next = (two * t * (kk + g - T::one()) * out[k - 1] - (kk + two * g - two) * out[k - 2]) / kk;
        out.push(next);
    }
    out
}

/// G_l^γ(1) = (2γ)^{(l)} / l!
pub fn gegenbauer_at_one<T: Real>(param: GegenbauerParam<T>, l: usize) -> T {
    let two_g = T::lit(2.0) * param.gamma;
    (0..l).fold(T::one(), |acc, k| {
        let kk = T::from_usize_lossy(k);
        acc * (two_g + kk) / (kk + T::one())
    })
}

/// ‖G_l^γ‖ in L²((1−t²)^{γ−1/2} dt), from the closed orthogonality relation.
pub fn gegenbauer_l2_norm<T: Real>(param: GegenbauerParam<T>, l: usize) -> T {
    let g = param.gamma;
    let ratio = g / (T::from_usize_lossy(l) + g);
    (ratio * gegenbauer_at_one(param, l) / param.normalizer()).sqrt()
}

/// Z_l(s) = c_l G_l^γ(s) with c_l = (2l + d − 2)/(d − 2), the zonal harmonic of level l on
/// S^{d−1} as a function of the inner product. Z_l(1) = d_l.
pub fn zonal_eval<T: Real>(d: u32, l: usize, s: T) -> Result<T, SpecfunError> {
    let param = GegenbauerParam::<T>::from_dimension(d)?;
    Ok(zonal_factor::<T>(d, l) * gegenbauer_eval(param, l, s))
}

/// c_l = (2l + d − 2)/(d − 2) for d ≥ 3.
pub fn zonal_factor<T: Real>(d: u32, l: usize) -> T {
    let dd = T::from_u32(d).expect("small integer");
    let two = T::lit(2.0);
    (two * T::from_usize_lossy(l) + dd - two) / (dd - two)
}
