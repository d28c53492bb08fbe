use std::path::PathBuf;

use kernspec::kernelmodel::{compose_power, named_kernel, KernelConfig, KernelSpec, RegularityClass, RegularityTag, SpectralKernel};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Which study a configuration is written for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    Eigs,
    Deviation,
    Coverage,
    Compare,
    Bounds,
    Rates,
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::Eigs => "eigs",
            Study::Deviation => "deviation",
            Study::Coverage => "coverage",
            Study::Compare => "compare",
            Study::Bounds => "bounds",
            Study::Rates => "rates",
        }
    }
}

/// A run configuration as read from JSON. Every field but `kernel` has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub kernel: Option<KernelSpec>,
    /// Composition power m of the kernel.
    #[serde(default = "one")]
    pub compose: u32,
    /// Optional check that the config is used with the intended subcommand.
    #[serde(default)]
    pub study: Option<Study>,
    #[serde(default = "default_n_grid")]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_indices")]
    pub indices: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Truncation level for coverage and bounds; R(i) when absent.
    #[serde(default)]
    pub r: Option<usize>,
    #[serde(default)]
    pub k_max: Option<usize>,
    #[serde(default)]
    pub l_max: Option<usize>,
    #[serde(default)]
    pub tail_tolerance: Option<f64>,
    /// Class used for B(i, n) and the β sweep of the bounds report.
    #[serde(default)]
    pub regularity: Option<RegularityClass>,
    /// Classes of the rate table.
    #[serde(default)]
    pub classes: Option<Vec<RegularityClass>>,
    #[serde(default)]
    pub betas: Option<Vec<f64>>,
}

fn one() -> u32 {
    1
}

fn default_n_grid() -> Vec<usize> {
    vec![250, 500, 1000, 2000]
}

fn default_indices() -> Vec<usize> {
    vec![1]
}

fn default_trials() -> usize {
    200
}

fn default_alpha() -> f64 {
    0.1
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn kernel_config(&self) -> KernelConfig {
        let d = KernelConfig::default();
        KernelConfig {
            k_max: self.k_max.unwrap_or(d.k_max),
            l_max: self.l_max.unwrap_or(d.l_max),
            tail_tolerance: self.tail_tolerance.unwrap_or(d.tail_tolerance),
            ..d
        }
    }

    /// Smallest n of the grid, the sample size of single-n studies.
    pub fn n(&self) -> usize {
        self.n_grid.iter().copied().min().unwrap_or(0)
    }

    pub fn table_classes(&self) -> Vec<RegularityClass> {
        self.classes.clone().unwrap_or_else(|| {
            (4..=8)
                .map(|d| RegularityClass { tag: RegularityTag::H1, delta: f64::from(d), s: 0 })
                .collect()
        })
    }

    pub fn table_betas(&self) -> Vec<f64> {
        self.betas.clone().unwrap_or_else(|| (0..10).map(|k| f64::from(k) / 10.0).collect())
    }

    /// Checks everything that can be checked without building the kernel.
    pub fn validate(&self, study: Study) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if let Some(s) = self.study {
            if s != study {
                return bad(format!("config is for `{}` but `{}` was run", s.name(), study.name()));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1): {}", self.alpha));
        }
        if self.compose == 0 {
            return bad("compose must be at least 1".into());
        }
        if study == Study::Rates {
            if self.table_betas().iter().any(|b| !(0.0..1.0).contains(b)) {
                return bad("betas must lie in [0, 1)".into());
            }
            for c in self.table_classes() {
                c.validate().map_err(|e| CliError::Config(e.to_string()))?;
            }
            return Ok(());
        }
        if self.kernel.is_none() {
            return bad(format!("`{}` needs a kernel", study.name()));
        }
        if study == Study::Eigs {
            return Ok(());
        }
        if self.n_grid.is_empty() || self.n_grid.contains(&0) {
            return bad("n_grid must hold positive sample sizes".into());
        }
        if self.indices.is_empty() || self.indices.contains(&0) {
            return bad("indices are 1-based and must not be empty".into());
        }
        let n = self.n();
        if let Some(&i) = self.indices.iter().find(|&&i| i > n) {
            return bad(format!("index {i} exceeds the smallest n = {n}"));
        }
        match study {
            Study::Deviation if self.trials < kernspec::experiments::MIN_TRIALS => {
                bad(format!("deviation studies need trials ≥ {}", kernspec::experiments::MIN_TRIALS))
            }
            Study::Coverage | Study::Compare if self.trials < 2 => bad("at least two trials are needed".into()),
            Study::Coverage if self.r.is_none() => bad("coverage needs r".into()),
            Study::Coverage | Study::Bounds => match self.r {
                Some(r) if r == 0 || r >= n => bad(format!("1 ≤ R < n violated: R = {r}, n = {n}")),
                _ => Ok(()),
            },
            _ => Ok(()),
        }
    }

    pub fn build_kernel(&self) -> Result<SpectralKernel, CliError> {
        let spec = self.kernel.as_ref().ok_or_else(|| CliError::Config("no kernel given".into()))?;
        let base = named_kernel(spec, &self.kernel_config()).map_err(|e| CliError::Config(e.to_string()))?;
        if self.compose == 1 {
            return Ok(base);
        }
        compose_power(&base, self.compose).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_unknown_fields() {
        let c = RunConfig::parse(r#"{"kernel": {"kind": "constant", "p0": 0.3}}"#).unwrap();
        assert_eq!(c.trials, 200);
        assert_eq!(c.n_grid, vec![250, 500, 1000, 2000]);
        assert!(RunConfig::parse(r#"{"kernel": {"kind": "constant", "p0": 0.3}, "trails": 3}"#).is_err());
        assert!(RunConfig::parse(r#"{"kernel": {"kind": "constant", "p0": 0.3, "q": 1}}"#).is_err());
    }

    #[test]
    fn validation() {
        let mut c = RunConfig::parse(r#"{"kernel": {"kind": "constant", "p0": 0.3}, "n_grid": [100]}"#).unwrap();
        assert!(c.validate(Study::Deviation).is_ok());
        c.r = Some(100);
        assert!(c.validate(Study::Bounds).unwrap_err().to_string().contains("R < n"));
        c.r = None;
        assert!(c.validate(Study::Coverage).is_err());
        c.study = Some(Study::Eigs);
        assert!(c.validate(Study::Deviation).is_err());
        assert!(RunConfig::default().validate(Study::Rates).is_ok());
        assert!(RunConfig::default().validate(Study::Eigs).is_err());
    }
}
