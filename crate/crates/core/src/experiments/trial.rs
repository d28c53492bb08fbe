use serde::Serialize;

use crate::kernelmodel::SpectralKernel;
use crate::linalg::delta2;
use crate::montecarlo::{decompose, empirical_spectrum, sample_points};

use super::ExperimentError;

/// High bit of a trial id: trials used to calibrate envelope constants.
pub const CALIBRATION_STREAM: u64 = 1 << 63;

/// Operator eigenvalues kept for δ₂: λ_1, … up to the first with |λ_K| < 1e-3 |λ_1|.
const TRUNCATION_RATIO: f64 = 1e-3;

/// Trial id for grid position `g` and trial `t`; the sample seed is `seed ^ id`.
pub fn trial_id(g: usize, t: usize) -> u64 {
    ((g as u64) << 32) | t as u64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorTruncation {
    pub values: Vec<f64>,
    /// √(Σ_{k>K} λ_k²): the most the dropped eigenvalues can move δ₂; `None` if unbounded.
    pub error_bound: Option<f64>,
}

pub fn operator_truncation(kernel: &SpectralKernel) -> OperatorTruncation {
    let flat = kernel.eigenvalues();
    let top = flat.first().map_or(0.0, |v| v.abs());
    let k = flat.iter().position(|v| v.abs() < TRUNCATION_RATIO * top).unwrap_or(flat.len());
    OperatorTruncation {
        values: flat[..k].to_vec(),
        error_bound: kernel.tail_parts(k).ok().map(|t| t.total().sq.sqrt()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexDeviation {
    pub i: usize,
    pub lambda: f64,
    pub empirical: f64,
    /// |λ_i(T_n) − λ_i|
    pub deviation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionDiagnostics {
    pub r: usize,
    pub gram_dev: f64,
    pub a_norm: f64,
    pub er_norm: f64,
    pub complement_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    /// Seed of the sample, `study seed ^ trial`.
    pub seed: u64,
    pub n: usize,
    pub kernel: String,
    /// Leading empirical eigenvalues in decreasing |λ| order.
    pub spectrum: Vec<f64>,
    pub deviations: Vec<IndexDeviation>,
    pub decomposition: Option<DecompositionDiagnostics>,
    pub delta2: f64,
}

impl TrialRecord {
    /// Builds the record from an empirical spectrum sorted by decreasing |λ|.
    pub fn from_spectrum(
        kernel: &SpectralKernel,
        trial: u64,
        seed: u64,
        n: usize,
        spectrum: &[f64],
        indices: &[usize],
        operator: &OperatorTruncation,
    ) -> Self {
        let deviations = indices
            .iter()
            .map(|&i| {
                let lambda = kernel.eigenvalue(i).unwrap_or(0.0);
                let empirical = spectrum.get(i - 1).copied().unwrap_or(0.0);
                IndexDeviation {
                    i,
                    lambda,
                    empirical,
                    deviation: (empirical - lambda).abs(),
                }
            })
            .collect();
        let keep = indices.iter().copied().max().unwrap_or(0).max(10).min(spectrum.len());
        TrialRecord {
            trial,
            seed,
            n,
            kernel: kernel.id().to_string(),
            spectrum: spectrum[..keep].to_vec(),
            deviations,
            decomposition: None,
            delta2: delta2(spectrum, &operator.values),
        }
    }

    pub fn deviation(&self, i: usize) -> Option<f64> {
        self.deviations.iter().find(|d| d.i == i).map(|d| d.deviation)
    }
}

/// One trial: sample n points with seed `study_seed ^ trial`, compute λ(T_n), the per-index
/// deviations, δ₂ against the truncated operator spectrum, and optionally the decomposition
/// at R.
pub fn run_trial(
    kernel: &SpectralKernel,
    n: usize,
    study_seed: u64,
    trial: u64,
    indices: &[usize],
    operator: &OperatorTruncation,
    r: Option<usize>,
) -> Result<TrialRecord, ExperimentError> {
    let seed = study_seed ^ trial;
    let wrap = |source| ExperimentError::Trial { seed, source };
    let sample = sample_points(kernel.domain(), n, seed).map_err(wrap)?;
    let spectrum = empirical_spectrum(kernel, &sample).map_err(wrap)?;
    let mut rec = TrialRecord::from_spectrum(kernel, trial, seed, n, spectrum.values(), indices, operator);
    if let Some(r) = r {
        let dec = decompose(kernel, &sample, r).map_err(wrap)?;
        rec.decomposition = Some(DecompositionDiagnostics {
            r,
            gram_dev: dec.gram_dev,
            a_norm: dec.a_norm,
            er_norm: dec.er_norm,
            complement_norm: dec.complement_norm,
        });
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernelmodel::{compose_power, named_kernel, KernelConfig, KernelSpec};

    #[test]
    fn truncation_rule() {
        let k = named_kernel(&KernelSpec::Geometric { c: 1.0, q: 0.5, s: 0.0, growth: crate::kernelmodel::Growth::Polynomial }, &KernelConfig::default()).unwrap();
        let t = operator_truncation(&k);
        // 2^{-k} ≥ 1e-3 · 2^{-1} up to k = 10
        assert_eq!(t.values.len(), 10);
        assert!((t.error_bound.unwrap() - (4f64.powi(-10) / 3.0).sqrt()).abs() < 1e-15);
        let th = compose_power(&named_kernel(&KernelSpec::Threshold { d: 3 }, &KernelConfig::default()).unwrap(), 2).unwrap();
        assert!(operator_truncation(&th).error_bound.is_some());
    }

    #[test]
    fn trial_errors_carry_the_seed() {
        let k = named_kernel(&KernelSpec::Linear { p0: 0.5, p1: 0.1, d: 4 }, &KernelConfig::default()).unwrap();
        let op = operator_truncation(&k);
        let err = run_trial(&k, 3, 10, 7, &[1], &op, Some(5)).unwrap_err();
        assert!(matches!(err, ExperimentError::Trial { seed: 13, .. }), "{err}");
    }
}
