//! Special functions and quadrature: Gamma/Beta, Gegenbauer polynomials, spherical-harmonic
//! dimensions, zonal harmonics, Gauss–Jacobi rules and Hermite functions.

mod gamma;
mod gegenbauer;
mod harmonic;
mod hermite;
mod quadrature;

pub use gamma::{beta, gamma, gamma_ratio, ln_gamma, pochhammer_rising};
pub use gegenbauer::{
    gegenbauer_all, gegenbauer_at_one, gegenbauer_eval, gegenbauer_l2_norm, zonal_eval, zonal_factor,
    GegenbauerParam,
};
pub use harmonic::{cumulative_harmonic_dim, harmonic_dim};
pub use hermite::{gaussian_eigenfunction, gaussian_eigenfunctions, hermite_eval, GaussianVariant};
pub use quadrature::{gauss_jacobi_rule, QuadratureRule};

use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecfunError {
    #[error("ambient dimension must be at least 3, got {d}")]
    Dimension { d: u32 },
    #[error("Gegenbauer index must be positive and finite, got {gamma}")]
    GegenbauerIndex { gamma: f64 },
    #[error("harmonic dimension overflows u64 for d = {d}, l = {l}")]
    Overflow { d: u32, l: u32 },
    #[error("quadrature order must be at least 1")]
    QuadratureOrder,
    #[error("quadrature nodes: {0}")]
    Linalg(#[from] LinalgError),
}
