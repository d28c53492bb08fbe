use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{n0, theorem1_bound, theorem1_envelope, Theorem1Outcome};
use crate::kernelmodel::{KernelSummary, SpectralKernel};

use super::stats::{log_log_slope, median, quantile, SlopeFit};
use super::trial::{operator_truncation, run_trial, trial_id, OperatorTruncation, TrialRecord};
use super::{check_alpha, ExperimentError};

/// Fewest trials per grid point for which quantiles are reported.
pub const MIN_TRIALS: usize = 30;

/// Statistics of |λ_i(T_n) − λ_i| at one (n, i).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexSummary {
    pub n: usize,
    pub i: usize,
    pub lambda: f64,
    pub median: f64,
    pub mean: f64,
    /// Empirical (1 − α)-quantile.
    pub quantile: f64,
    /// Median of deviation / |λ_i|; `None` when λ_i = 0.
    pub median_relative: Option<f64>,
    pub median_delta2: f64,
    /// Unit-constant relative bound; `None` when λ_i = 0.
    pub bound: Option<f64>,
    /// Failing n₀ condition, when n is pre-asymptotic for this index.
    pub pre_asymptotic: Option<String>,
    /// Fraction of trials with deviation ≤ C_i · bound.
    pub envelope_coverage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexSlope {
    pub i: usize,
    /// Log-log fit of the median deviation against n; `None` if a median is zero.
    pub fit: Option<SlopeFit>,
    pub n0: Option<usize>,
}

/// Fitted envelope constant for one index and the coverage it achieves per n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeCheck {
    pub i: usize,
    /// max over the calibration-n trials of deviation / envelope(i, n).
    pub constant: f64,
    pub calibration_n: usize,
    /// (n, fraction of trials with deviation ≤ constant · envelope(i, n)).
    pub coverage: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyResult {
    pub kernel: KernelSummary,
    pub seed: u64,
    pub alpha: f64,
    pub n_grid: Vec<usize>,
    pub indices: Vec<usize>,
    pub trials_per_n: usize,
    pub operator: OperatorTruncation,
    pub trials: Vec<TrialRecord>,
    pub summaries: Vec<IndexSummary>,
    pub slopes: Vec<IndexSlope>,
    pub envelopes: Vec<EnvelopeCheck>,
}

impl StudyResult {
    /// Deviations of index i at grid point n, in trial order.
    pub fn deviations(&self, n: usize, i: usize) -> Vec<f64> {
        self.trials.iter().filter(|t| t.n == n).filter_map(|t| t.deviation(i)).collect()
    }

    pub fn summary(&self, n: usize, i: usize) -> Option<&IndexSummary> {
        self.summaries.iter().find(|s| s.n == n && s.i == i)
    }

    pub fn slope(&self, i: usize) -> Option<&SlopeFit> {
        self.slopes.iter().find(|s| s.i == i).and_then(|s| s.fit.as_ref())
    }

    /// One row per trial per index.
    pub fn write_trials_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "trial,seed,n,kernel,i,lambda,empirical,deviation,delta2")?;
        for t in &self.trials {
            for d in &t.deviations {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    t.trial, t.seed, t.n, t.kernel, d.i, d.lambda, d.empirical, d.deviation, t.delta2
                )?;
            }
        }
        Ok(())
    }
}

/// Runs `trials` seeded trials at every n of the grid and summarizes the deviations per index.
pub fn deviation_study(
    kernel: &SpectralKernel,
    n_grid: &[usize],
    indices: &[usize],
    trials: usize,
    alpha: f64,
    seed: u64,
) -> Result<StudyResult, ExperimentError> {
    check_alpha(alpha)?;
    if trials < MIN_TRIALS {
        return Err(ExperimentError::Constraint(format!("trials ≥ {MIN_TRIALS} violated: {trials}")));
    }
    let n_min = n_grid.iter().copied().min().ok_or_else(|| ExperimentError::Constraint("empty n grid".into()))?;
    let i_max = indices.iter().copied().max().ok_or_else(|| ExperimentError::Constraint("no indices".into()))?;
    if indices.contains(&0) || i_max > n_min {
        return Err(ExperimentError::Constraint(format!(
            "1 ≤ i ≤ min(n_grid) violated: indices up to {i_max}, min n = {n_min}"
        )));
    }
    for &i in indices {
        if kernel.eigenvalue(i).is_none() {
            return Err(ExperimentError::Constraint(format!("λ_{i} is not materialized; raise k_max")));
        }
    }
    let operator = operator_truncation(kernel);
    let jobs: Vec<(usize, usize)> = (0..n_grid.len()).flat_map(|g| (0..trials).map(move |t| (g, t))).collect();
    let records: Vec<TrialRecord> = jobs
        .par_iter()
        .map(|&(g, t)| run_trial(kernel, n_grid[g], seed, trial_id(g, t), indices, &operator, None))
        .collect::<Result<_, _>>()?;

    let mut result = StudyResult {
        kernel: kernel.summary(),
        seed,
        alpha,
        n_grid: n_grid.to_vec(),
        indices: indices.to_vec(),
        trials_per_n: trials,
        operator,
        trials: records,
        summaries: Vec::new(),
        slopes: Vec::new(),
        envelopes: Vec::new(),
    };

    let bound = |i: usize, n: usize| theorem1_envelope(kernel, i, n, alpha).ok();
    result.envelopes = envelope_check(&result, |i, n| bound(i, n).unwrap_or(f64::NAN));
    for &n in n_grid {
        for &i in indices {
            let devs = result.deviations(n, i);
            let lambda = kernel.eigenvalue(i).unwrap_or(0.0);
            let delta2s: Vec<f64> = result.trials.iter().filter(|t| t.n == n).map(|t| t.delta2).collect();
            let pre_asymptotic = match theorem1_bound(kernel, i, n, alpha) {
                Ok(Theorem1Outcome::PreAsymptotic { blocking, .. }) => Some(blocking),
                _ => None,
            };
            let envelope_coverage = result
                .envelopes
                .iter()
                .find(|e| e.i == i)
                .and_then(|e| e.coverage.iter().find(|c| c.0 == n))
                .map(|c| c.1);
            result.summaries.push(IndexSummary {
                n,
                i,
                lambda,
                median: median(&devs),
                mean: devs.iter().sum::<f64>() / devs.len() as f64,
                quantile: quantile(&devs, 1.0 - alpha),
                median_relative: (lambda != 0.0).then(|| median(&devs) / lambda.abs()),
                median_delta2: median(&delta2s),
                bound: bound(i, n),
                pre_asymptotic,
                envelope_coverage,
            });
        }
    }
    let mut sorted_grid = n_grid.to_vec();
    sorted_grid.sort_unstable();
    for &i in indices {
        let medians: Vec<f64> = sorted_grid.iter().map(|&n| result.summary(n, i).expect("summary").median).collect();
        result.slopes.push(IndexSlope {
            i,
            fit: log_log_slope(&sorted_grid, &medians),
            n0: n0(kernel, i, alpha).ok().flatten(),
        });
    }
    Ok(result)
}

/// Fits C_i at the smallest n of the study as the largest deviation / envelope(i, n) and
/// reports, for every n, the fraction of trials with deviation ≤ C_i · envelope(i, n).
/// Indices whose envelope is not positive and finite at the smallest n are skipped.
pub fn envelope_check(result: &StudyResult, envelope: impl Fn(usize, usize) -> f64) -> Vec<EnvelopeCheck> {
    let Some(&n_cal) = result.n_grid.iter().min() else {
        return Vec::new();
    };
    let mut grid = result.n_grid.clone();
    grid.sort_unstable();
    result
        .indices
        .iter()
        .filter_map(|&i| {
            let base = envelope(i, n_cal);
            if !(base > 0.0 && base.is_finite()) {
                return None;
            }
            let constant = result
                .deviations(n_cal, i)
                .iter()
                .map(|d| d / base)
                .fold(0.0, f64::max);
            let coverage = grid
                .iter()
                .map(|&n| {
                    let cap = constant * envelope(i, n);
                    let devs = result.deviations(n, i);
                    let ok = devs.iter().filter(|&&d| d <= cap).count();
                    (n, ok as f64 / devs.len() as f64)
                })
                .collect();
            Some(EnvelopeCheck {
                i,
                constant,
                calibration_n: n_cal,
                coverage,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernelmodel::{named_kernel, KernelConfig, KernelSpec};

    fn kernel(spec: KernelSpec) -> SpectralKernel {
        named_kernel(&spec, &KernelConfig::default()).unwrap()
    }

    #[test]
    fn rank_one_kernel_has_no_second_deviation() {
        let k = kernel(KernelSpec::Constant { p0: 0.3, d: 3 });
        let r = deviation_study(&k, &[50, 100], &[1, 2], 30, 0.1, 1).unwrap();
        assert!(r.deviations(100, 2).iter().all(|&d| d < 1e-14));
        assert_eq!(r.trials.len(), 60);
        // trial order is the job order, independent of scheduling
        assert!(r.trials.windows(2).all(|w| w[0].trial < w[1].trial));
    }

    #[test]
    fn reproducible() {
        let k = kernel(KernelSpec::GaussianWide);
        let a = deviation_study(&k, &[60, 120], &[1, 3], 30, 0.1, 9).unwrap();
        let b = deviation_study(&k, &[60, 120], &[1, 3], 30, 0.1, 9).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let mut csv_a = Vec::new();
        a.write_trials_csv(&mut csv_a).unwrap();
        assert_eq!(String::from_utf8(csv_a).unwrap().lines().count(), 1 + 2 * 30 * 2);
    }

    #[test]
    fn preconditions() {
        let k = kernel(KernelSpec::GaussianWide);
        assert!(deviation_study(&k, &[100], &[1], 29, 0.1, 1).is_err());
        assert!(deviation_study(&k, &[10], &[11], 30, 0.1, 1).is_err());
        assert!(deviation_study(&k, &[100], &[0], 30, 0.1, 1).is_err());
        assert!(deviation_study(&k, &[100], &[1], 30, 1.5, 1).is_err());
    }
}
