//! Kernel representations: dot-product kernels on spheres, Gaussian kernels on the line and
//! eigenvalue sequences, with their eigenvalue computation, tails and m-fold composition.

mod basis;
mod eigen;
mod error;
mod kernel;
mod profile;
mod regularity;
mod tail;

pub use basis::{Basis, ZonalBasis};
pub use eigen::{
    eigenvalue_quadrature, sphere_projection_constant, threshold_eigenvalue, DotProductKernel, DEFAULT_START_ORDER,
    MAX_QUADRATURE_ORDER, QUADRATURE_TOL,
};
pub use error::KernelError;
pub use kernel::{
    compose_power, named_kernel, Domain, FlatEntry, HStatus, KernelConfig, KernelSpec, KernelSummary, Level,
    SpectralKernel, SupSource, TailParts,
};
pub use profile::Profile;
pub use regularity::{classify_regularity, sobolev_to_delta, DecayFamily, RegularityClass, RegularityFit, RegularityTag};
pub use tail::{Growth, TailModel, TailSums};
pub(crate) use basis::unit_vector;
