//! Theoretical quantities of the concentration argument: variance proxies, tail sums, the noise
//! terms γ₁, γ₂ and τ, the truncation level R(i), the per-index rate table B(i, n) and the
//! rate exponents tabulated for polynomially decaying spectra.

mod proxies;
mod rates;
mod report;
mod theorem;

pub use proxies::{gram_bernstein_bound, noise_terms, tail_sums, NoiseTerms, ProxyValues, TailSumReport, VarianceProxies};
pub use rates::{rate_exponent, rate_exponent_exact, rate_table, RateCell, TABLE_BETAS, TABLE_DELTAS};
pub use report::{bound_report, BoundReport};
pub use theorem::{n0, r_of_i, theorem1_bound, theorem1_envelope, theorem2_rate, Regime, Theorem1Outcome, Theorem2Rate};

use crate::kernelmodel::KernelError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoundsError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("{0}")]
    Constraint(String),
    #[error("λ_{i} = 0: relative bounds are undefined")]
    ZeroEigenvalue { i: usize },
    #[error("no R ≤ {k_max} satisfies the R(i) inequalities for i = {i}; raise k_max")]
    ScanExhausted { i: usize, k_max: usize },
    #[error("no rate row covers i = {i}, n = {n}: {gap}")]
    NoRow { i: usize, n: usize, gap: String },
}

pub(crate) fn check_alpha(alpha: f64) -> Result<(), BoundsError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(BoundsError::Constraint(format!("0 < α < 1 violated: α = {alpha}")))
    }
}

/// 1 ≤ R < n, needed by the Gram event and the noise terms.
pub(crate) fn check_r_below_n(r: usize, n: usize) -> Result<(), BoundsError> {
    if r >= 1 && r < n {
        Ok(())
    } else {
        Err(BoundsError::Constraint(format!("1 ≤ R < n violated: R = {r}, n = {n}")))
    }
}
