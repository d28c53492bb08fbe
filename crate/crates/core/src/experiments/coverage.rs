use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{gram_bernstein_bound, noise_terms, NoiseTerms};
use crate::kernelmodel::{KernelSummary, SpectralKernel};

use super::stats::{binomial_sigma, quantile};
use super::trial::{operator_truncation, run_trial, CALIBRATION_STREAM};
use super::{check_alpha, ExperimentError};

/// Values at or below this count as zero when a bound is exactly zero.
const ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageRecord {
    pub trial: u64,
    pub seed: u64,
    pub calibration: bool,
    pub gram_dev: f64,
    pub a_norm: f64,
    pub er_norm: f64,
}

/// Violations of one bound over the trials it was tested on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageLine {
    /// Threshold compared against: constant · base.
    pub bound: f64,
    pub base: f64,
    /// 1 for explicit bounds, fitted on the calibration trials otherwise.
    pub constant: f64,
    pub trials: usize,
    pub violations: usize,
    pub fraction: f64,
    /// Binomial standard deviation of the fraction at the nominal level α.
    pub sigma: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageResult {
    pub kernel: KernelSummary,
    pub seed: u64,
    pub n: usize,
    pub r: usize,
    pub alpha: f64,
    pub noise: NoiseTerms,
    /// ‖Φ_RᵀΦ_R − Id‖ against √(3 V1(R) log(2R/α)/n), all trials.
    pub gram: CoverageLine,
    /// ‖A‖ against C·γ₁/(1 − τ), held-out trials.
    pub a_norm: CoverageLine,
    /// ‖E_R‖ against C·γ₂, held-out trials.
    pub er_norm: CoverageLine,
    pub records: Vec<CoverageRecord>,
}

impl CoverageResult {
    pub fn write_trials_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "trial,seed,calibration,gram_dev,a_norm,er_norm")?;
        for r in &self.records {
            writeln!(out, "{},{},{},{},{},{}", r.trial, r.seed, r.calibration, r.gram_dev, r.a_norm, r.er_norm)?;
        }
        Ok(())
    }
}

/// Runs `trials` trials of the truncation decomposition at (n, R). The first ⌊trials/2⌋ come
/// from the calibration substream and fit the unknown constants of the γ₁ and γ₂ envelopes as
/// (1 − α)-quantiles of value/base; the rest are held out and tested. The Gram bound is explicit
/// and tested on every trial.
pub fn coverage_study(
    kernel: &SpectralKernel,
    n: usize,
    r: usize,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> Result<CoverageResult, ExperimentError> {
    check_alpha(alpha)?;
    if trials < 2 {
        return Err(ExperimentError::Constraint(format!("at least two trials are needed: {trials}")));
    }
    let noise = noise_terms(kernel, n, r, alpha)?;
    let gram_bound = gram_bernstein_bound(noise.proxies.v1, r, n, alpha)?;
    let cal = trials / 2;
    let ids: Vec<u64> = (0..trials as u64)
        .map(|t| if (t as usize) < cal { CALIBRATION_STREAM | t } else { t })
        .collect();
    let operator = operator_truncation(kernel);
    let records: Vec<CoverageRecord> = ids
        .par_iter()
        .map(|&id| {
            let rec = run_trial(kernel, n, seed, id, &[], &operator, Some(r))?;
            let d = rec.decomposition.expect("decomposition requested");
            Ok(CoverageRecord {
                trial: id,
                seed: rec.seed,
                calibration: id & CALIBRATION_STREAM != 0,
                gram_dev: d.gram_dev,
                a_norm: d.a_norm,
                er_norm: d.er_norm,
            })
        })
        .collect::<Result<_, ExperimentError>>()?;

    let all: Vec<f64> = records.iter().map(|r| r.gram_dev).collect();
    let gram = line(&all, gram_bound, 1.0, alpha);
    let a_base = if noise.tau < 1.0 { noise.gamma1 / (1.0 - noise.tau) } else { noise.gamma1 };
    let a_norm = calibrated(&records, |r| r.a_norm, a_base, alpha);
    let er_norm = calibrated(&records, |r| r.er_norm, noise.gamma2, alpha);
    Ok(CoverageResult {
        kernel: kernel.summary(),
        seed,
        n,
        r,
        alpha,
        noise,
        gram,
        a_norm,
        er_norm,
        records,
    })
}

fn calibrated(records: &[CoverageRecord], value: impl Fn(&CoverageRecord) -> f64, base: f64, alpha: f64) -> CoverageLine {
    let (cal, test): (Vec<&CoverageRecord>, Vec<&CoverageRecord>) = records.iter().partition(|r| r.calibration);
    let constant = if base > 0.0 {
        let ratios: Vec<f64> = cal.iter().map(|r| value(r) / base).collect();
        quantile(&ratios, 1.0 - alpha)
    } else {
        1.0
    };
    let held: Vec<f64> = test.iter().map(|r| value(r)).collect();
    line(&held, base, constant, alpha)
}

fn line(values: &[f64], base: f64, constant: f64, alpha: f64) -> CoverageLine {
    let bound = constant * base;
    let violations = values
        .iter()
        .filter(|&&v| if bound > 0.0 { v > bound } else { v > ZERO_TOL })
        .count();
    CoverageLine {
        bound,
        base,
        constant,
        trials: values.len(),
        violations,
        fraction: violations as f64 / values.len() as f64,
        sigma: binomial_sigma(alpha, values.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernelmodel::{named_kernel, KernelConfig, KernelSpec};

    #[test]
    fn finite_rank_residual_is_zero() {
        let k = named_kernel(&KernelSpec::Linear { p0: 0.5, p1: 0.05, d: 4 }, &KernelConfig::default()).unwrap();
        let c = coverage_study(&k, 200, 5, 0.1, 40, 3).unwrap();
        assert_eq!(c.noise.gamma2, 0.0);
        assert_eq!(c.er_norm.violations, 0);
        assert_eq!(c.a_norm.violations, 0);
        assert_eq!(c.records.iter().filter(|r| r.calibration).count(), 20);
        assert!(c.gram.fraction <= 0.1 + 3.0 * c.gram.sigma);
    }

    #[test]
    fn rejects_r_at_least_n() {
        let k = named_kernel(&KernelSpec::Linear { p0: 0.5, p1: 0.05, d: 4 }, &KernelConfig::default()).unwrap();
        assert!(matches!(coverage_study(&k, 5, 5, 0.1, 10, 1), Err(ExperimentError::Bounds(_))));
    }
}
