//! Spectra of kernel integral operators, kernel-matrix sampling and relative eigenvalue
//! concentration checks.
//!
//! The numerical core ([`linalg`], [`specfun`]) is generic over [`scalar::Real`]; kernels and
//! Monte Carlo work in `f64`, and exact rate tables use [`scalar::ExactField`].

pub mod bounds;
pub mod experiments;
pub mod kernelmodel;
pub mod linalg;
pub mod montecarlo;
pub mod scalar;
pub mod specfun;

pub use num_rational::Ratio;

pub type SymMatrixF64 = linalg::SymMatrix<f64>;
pub type MatrixF64 = linalg::Matrix<f64>;
pub type Spectrum64 = linalg::Spectrum<f64>;
pub type QuadratureRuleF64 = specfun::QuadratureRule<f64>;
pub type Rational = Ratio<i64>;
