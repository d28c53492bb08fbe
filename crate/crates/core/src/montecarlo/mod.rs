//! Sampling, kernel-matrix assembly, the truncation decomposition T_n = Φ_RΛ_RΦ_Rᵀ + E_R and
//! W-random graph generation.

mod assembly;
mod decomposition;
mod sample;

pub use assembly::{
    empirical_spectrum, feature_matrix, kernel_matrix, orthonormality_diagnostic, sample_adjacency,
    OrthonormalityReport,
};
pub use decomposition::{decompose, gram_deviation, DecompositionPath, TruncationDecomposition, RANK_TOL};
pub use sample::{sample_points, trial_rng, SampleSet};

use crate::kernelmodel::KernelError;
use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MonteCarloError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{0}")]
    Constraint(String),
    #[error("kernel value {value} at pair ({i}, {j}) is not finite")]
    NonFinite { i: usize, j: usize, value: f64 },
    #[error("edge probability {value} at pair ({i}, {j}) lies outside [0, 1]")]
    Probability { i: usize, j: usize, value: f64 },
    #[error("Φ_R is rank deficient: smallest Gram eigenvalue {smallest:e} at R = {r}")]
    RankDeficient { smallest: f64, r: usize },
}
