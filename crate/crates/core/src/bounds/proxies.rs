use serde::Serialize;

use crate::kernelmodel::{SpectralKernel, TailParts};

use super::{check_alpha, check_r_below_n, BoundsError};

/// Variance proxies of a kernel as functions of the truncation level R.
#[derive(Debug, Clone, Copy)]
pub struct VarianceProxies<'a> {
    kernel: &'a SpectralKernel,
}

/// All proxies at one R.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProxyValues {
    pub r: usize,
    pub v1: f64,
    pub v1p: f64,
    pub v2: f64,
    /// ‖Σ_{k>R}|λ_k|φ_k²‖_∞ bound, the first factor of V2.
    pub v2_diagonal: f64,
    pub v3: f64,
}

impl<'a> VarianceProxies<'a> {
    pub fn kernel(&self) -> &'a SpectralKernel {
        self.kernel
    }

    /// ‖Σ_{k≤R} φ_k²‖_∞.
    pub fn v1(&self, r: usize) -> Result<f64, BoundsError> {
        Ok(self.kernel.diagonal_sup(r)?)
    }

    /// Σ_{k≤R} ‖φ_k‖²_∞.
    pub fn v1p(&self, r: usize) -> Result<f64, BoundsError> {
        Ok(self.kernel.sup_sq_prefix(r)?)
    }

    /// Σ_{k>R}|λ_k|‖φ_k‖²_∞ bound alone.
    pub fn v2_diagonal(&self, r: usize) -> Result<f64, BoundsError> {
        Ok(self.kernel.residual_diagonal(r)?)
    }

    /// V2(R) = ‖Σ_{k>R}|λ_k|φ_k²‖_∞ · b_R.
    pub fn v2(&self, r: usize) -> Result<f64, BoundsError> {
        let b = self.kernel.tail_parts(r)?.total().abs;
        Ok(self.v2_diagonal(r)? * b)
    }

    /// Σ_{k>R}|λ_k|‖φ_k‖_∞.
    pub fn v3(&self, r: usize) -> Result<f64, BoundsError> {
        Ok(self.kernel.tail_parts(r)?.total().sup)
    }

    pub fn at(&self, r: usize) -> Result<ProxyValues, BoundsError> {
        let total = self.kernel.tail_parts(r)?.total();
        let v2_diagonal = self.v2_diagonal(r)?;
        Ok(ProxyValues {
            r,
            v1: self.v1(r)?,
            v1p: self.v1p(r)?,
            v2: v2_diagonal * total.abs,
            v2_diagonal,
            v3: total.sup,
        })
    }
}

impl SpectralKernel {
    /// Variance proxies backed by this kernel's sup-norm data.
    pub fn variance_proxies(&self) -> VarianceProxies<'_> {
        VarianceProxies { kernel: self }
    }
}

/// b_R and b_{2,R} with the contribution of each part of the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailSumReport {
    pub r: usize,
    /// Σ_{k>R} |λ_k|
    pub b_r: f64,
    /// Σ_{k>R} λ_k²
    pub b2_r: f64,
    pub parts: TailParts,
}

pub fn tail_sums(kernel: &SpectralKernel, r: usize) -> Result<TailSumReport, BoundsError> {
    let parts = kernel.tail_parts(r)?;
    let total = parts.total();
    Ok(TailSumReport {
        r,
        b_r: total.abs,
        b2_r: total.sq,
        parts,
    })
}

/// γ₁, γ₂ and τ together with their inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseTerms {
    pub n: usize,
    pub r: usize,
    pub alpha: f64,
    pub b_r: f64,
    pub b2_r: f64,
    pub proxies: ProxyValues,
    /// √(b_{2,R} V1′(R)/n)
    pub gamma1: f64,
    /// b_R + max(√(V2(R) b_R/n), V2(R)/n)
    pub gamma2: f64,
    /// √(V1(R) log(R/α)/n)
    pub tau: f64,
}

pub fn noise_terms(kernel: &SpectralKernel, n: usize, r: usize, alpha: f64) -> Result<NoiseTerms, BoundsError> {
    check_r_below_n(r, n)?;
    check_alpha(alpha)?;
    let tails = tail_sums(kernel, r)?;
    let proxies = kernel.variance_proxies().at(r)?;
    let nf = n as f64;
    let gamma1 = (tails.b2_r * proxies.v1p / nf).sqrt();
    let gamma2 = tails.b_r + (proxies.v2 * tails.b_r / nf).sqrt().max(proxies.v2 / nf);
    let tau = (proxies.v1 * (r as f64 / alpha).ln() / nf).sqrt();
    Ok(NoiseTerms {
        n,
        r,
        alpha,
        b_r: tails.b_r,
        b2_r: tails.b2_r,
        proxies,
        gamma1,
        gamma2,
        tau,
    })
}

/// √(3 V1(R) log(2R/α)/n), holding for ‖Φ_RᵀΦ_R − Id_R‖_op with probability at least 1 − α.
pub fn gram_bernstein_bound(v1r: f64, r: usize, n: usize, alpha: f64) -> Result<f64, BoundsError> {
    check_r_below_n(r, n)?;
    check_alpha(alpha)?;
    if !(v1r >= 0.0 && v1r.is_finite()) {
        return Err(BoundsError::Constraint(format!("V1(R) must be finite and nonnegative: {v1r}")));
    }
    Ok((3.0 * v1r * (2.0 * r as f64 / alpha).ln() / n as f64).sqrt())
}
