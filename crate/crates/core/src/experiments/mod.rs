//! Seeded Monte Carlo studies: per-index deviations, bound coverage, relative versus absolute
//! comparisons and rate tables.
//!
//! Trials run on the rayon pool and are merged by trial index, so results depend only on the
//! inputs and the seed.

mod compare;
mod coverage;
mod deviation;
mod stats;
mod table;
mod trial;

pub use compare::{comparison_from_records, relative_vs_absolute, ComparisonRow, ComparisonTable};
pub use coverage::{coverage_study, CoverageLine, CoverageRecord, CoverageResult};
pub use deviation::{
    deviation_study, envelope_check, EnvelopeCheck, IndexSlope, IndexSummary, StudyResult, MIN_TRIALS,
};
pub use stats::{binomial_sigma, log_log_slope, median, quantile, SlopeFit};
pub use table::{emit_rate_table, RateTable};
pub use trial::{operator_truncation, run_trial, trial_id, IndexDeviation, OperatorTruncation, TrialRecord, CALIBRATION_STREAM};

use crate::bounds::BoundsError;
use crate::kernelmodel::KernelError;
use crate::montecarlo::MonteCarloError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    MonteCarlo(#[from] MonteCarloError),
    #[error("{0}")]
    Constraint(String),
    #[error("trial with sample seed {seed}: {source}")]
    Trial {
        seed: u64,
        #[source]
        source: MonteCarloError,
    },
}

pub(crate) fn check_alpha(alpha: f64) -> Result<(), ExperimentError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(ExperimentError::Constraint(format!("0 < α < 1 violated: α = {alpha}")))
    }
}
