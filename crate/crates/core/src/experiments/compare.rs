use rayon::prelude::*;
use serde::Serialize;

use crate::kernelmodel::SpectralKernel;

use super::stats::median;
use super::trial::{operator_truncation, run_trial, trial_id, TrialRecord};
use super::ExperimentError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub i: usize,
    pub lambda: f64,
    pub median_deviation: f64,
    /// Median of deviation / |λ_i|; `None` when λ_i = 0.
    pub median_relative: Option<f64>,
    /// Median δ₂ between λ(T_n) and the operator spectrum, the uniform benchmark.
    pub median_delta2: f64,
    /// median δ₂ / median deviation; `None` when the median deviation is zero.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub kernel: String,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn row(&self, i: usize) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.i == i)
    }

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "i,lambda,median_deviation,median_relative,median_delta2,ratio")?;
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.i,
                r.lambda,
                r.median_deviation,
                opt(r.median_relative),
                r.median_delta2,
                opt(r.ratio)
            )?;
        }
        Ok(())
    }
}

/// Per-index deviation medians next to the δ₂ distance between the whole spectra.
pub fn relative_vs_absolute(
    kernel: &SpectralKernel,
    n: usize,
    trials: usize,
    indices: &[usize],
    seed: u64,
) -> Result<ComparisonTable, ExperimentError> {
    if trials == 0 || indices.is_empty() || indices.iter().any(|&i| i == 0 || i > n) {
        return Err(ExperimentError::Constraint(format!(
            "need trials ≥ 1 and 1 ≤ i ≤ n: trials = {trials}, indices = {indices:?}, n = {n}"
        )));
    }
    let operator = operator_truncation(kernel);
    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(kernel, n, seed, trial_id(0, t), indices, &operator, None))
        .collect::<Result<_, _>>()?;
    let mut table = comparison_from_records(kernel, &records, indices);
    table.seed = seed;
    Ok(table)
}

/// Builds the comparison from finished trials (all at the same n).
pub fn comparison_from_records(kernel: &SpectralKernel, records: &[TrialRecord], indices: &[usize]) -> ComparisonTable {
    let delta2s: Vec<f64> = records.iter().map(|r| r.delta2).collect();
    let median_delta2 = median(&delta2s);
    let rows = indices
        .iter()
        .map(|&i| {
            let lambda = kernel.eigenvalue(i).unwrap_or(0.0);
            let devs: Vec<f64> = records.iter().filter_map(|r| r.deviation(i)).collect();
            let median_deviation = median(&devs);
            ComparisonRow {
                i,
                lambda,
                median_deviation,
                median_relative: (lambda != 0.0).then(|| median_deviation / lambda.abs()),
                median_delta2,
                ratio: (median_deviation > 0.0).then(|| median_delta2 / median_deviation),
            }
        })
        .collect();
    ComparisonTable {
        kernel: kernel.id().to_string(),
        n: records.first().map_or(0, |r| r.n),
        trials: records.len(),
        seed: 0,
        rows,
    }
}
