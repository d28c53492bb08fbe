use serde::Serialize;

use crate::kernelmodel::{KernelSummary, RegularityClass, SpectralKernel};

use super::{noise_terms, r_of_i, theorem1_bound, theorem2_rate, BoundsError, NoiseTerms, Theorem1Outcome, Theorem2Rate};

/// Every bound quantity for one (kernel, i, n, R, α), with the inputs echoed.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub kernel: KernelSummary,
    pub i: usize,
    pub n: usize,
    pub alpha: f64,
    pub lambda_i: f64,
    /// Truncation level of the noise terms; R(i) unless given explicitly.
    pub r: usize,
    pub noise: NoiseTerms,
    pub ri: usize,
    pub theorem1: Theorem1Outcome,
    pub regularity: Option<RegularityClass>,
    pub theorem2: Option<Theorem2Rate>,
}

impl BoundReport {
    pub fn b_r(&self) -> f64 {
        self.noise.b_r
    }

    pub fn b2_r(&self) -> f64 {
        self.noise.b2_r
    }

    pub fn gamma1(&self) -> f64 {
        self.noise.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.noise.gamma2
    }

    pub fn tau(&self) -> f64 {
        self.noise.tau
    }
}

pub fn bound_report(
    kernel: &SpectralKernel,
    i: usize,
    n: usize,
    r: Option<usize>,
    alpha: f64,
    regularity: Option<RegularityClass>,
) -> Result<BoundReport, BoundsError> {
    let ri = r_of_i(kernel, i)?;
    let r = r.unwrap_or(ri);
    let noise = noise_terms(kernel, n, r, alpha)?;
    let theorem1 = theorem1_bound(kernel, i, n, alpha)?;
    let theorem2 = regularity.map(|c| theorem2_rate(c, i, n)).transpose()?;
    Ok(BoundReport {
        kernel: kernel.summary(),
        i,
        n,
        alpha,
        lambda_i: kernel.eigenvalue(i).unwrap_or(0.0),
        r,
        noise,
        ri,
        theorem1,
        regularity,
        theorem2,
    })
}
