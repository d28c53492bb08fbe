use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use kernspec::bounds::{bound_report, rate_exponent, BoundReport};
use kernspec::experiments::{coverage_study, deviation_study, emit_rate_table, relative_vs_absolute};
use kernspec::kernelmodel::{KernelSummary, Level, RegularityTag};
use serde::Serialize;

use crate::config::{RunConfig, Study};
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output directory plus the resolved config embedded in every file.
pub struct Output {
    dir: PathBuf,
    config: RunConfig,
    written: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    kernspec: &'static str,
    config: &'a RunConfig,
    result: &'a T,
}

impl Output {
    pub fn create(config: &RunConfig) -> Result<Self, CliError> {
        let dir = config.out.clone();
        fs::create_dir_all(&dir).map_err(|source| CliError::Output { path: dir.clone(), source })?;
        Ok(Self {
            dir,
            config: config.clone(),
            written: Vec::new(),
        })
    }

    fn open(&mut self, name: &str) -> Result<(PathBuf, BufWriter<fs::File>), CliError> {
        let path = self.dir.join(name);
        let file = fs::File::create(&path).map_err(|source| CliError::Output { path: path.clone(), source })?;
        self.written.push(path.clone());
        Ok((path, BufWriter::new(file)))
    }

    /// CSV preceded by `# kernspec <version>` and `# config <json>` comment lines.
    pub fn csv(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let config = serde_json::to_string(&self.config).expect("config serializes");
        let (path, mut w) = self.open(name)?;
        let res = writeln!(w, "# kernspec {VERSION}")
            .and_then(|_| writeln!(w, "# config {config}"))
            .and_then(|_| body(&mut w))
            .and_then(|_| w.flush());
        res.map_err(|source| CliError::Output { path, source })
    }

    pub fn json<T: Serialize>(&mut self, name: &str, result: &T) -> Result<(), CliError> {
        let (path, mut w) = self.open(name)?;
        let env = Envelope {
            kernspec: VERSION,
            config: &self.config,
            result,
        };
        let res = serde_json::to_writer_pretty(&mut w, &env)
            .map_err(std::io::Error::from)
            .and_then(|_| writeln!(w))
            .and_then(|_| w.flush());
        res.map_err(|source| CliError::Output { path, source })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

pub fn run(study: Study, config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    config.validate(study)?;
    let mut out = Output::create(config)?;
    match study {
        Study::Eigs => cmd_eigs(config, &mut out)?,
        Study::Deviation => cmd_deviation(config, &mut out)?,
        Study::Coverage => cmd_coverage(config, &mut out)?,
        Study::Compare => cmd_compare(config, &mut out)?,
        Study::Bounds => cmd_bounds(config, &mut out)?,
        Study::Rates => cmd_rates(config, &mut out)?,
    }
    Ok(out.written().to_vec())
}

#[derive(Serialize)]
struct EigsReport<'a> {
    kernel: KernelSummary,
    levels: &'a [Level],
    flat: Vec<FlatRow>,
    /// Σ_{k>K}|λ_k| beyond the materialized listing; null when the tail diverges.
    tail_mass: Option<f64>,
    rank: Option<usize>,
}

#[derive(Serialize)]
struct FlatRow {
    k: usize,
    value: f64,
    level: usize,
}

fn cmd_eigs(config: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let kernel = config.build_kernel()?;
    let flat: Vec<FlatRow> = kernel
        .flat()
        .iter()
        .enumerate()
        .map(|(k, e)| FlatRow { k: k + 1, value: e.value, level: e.level })
        .collect();
    let tail_mass = kernel
        .tail_parts(kernel.flat().len())
        .ok()
        .map(|t| t.total().abs);
    out.csv("levels.csv", |w| {
        writeln!(w, "level,value,multiplicity")?;
        for l in kernel.levels() {
            writeln!(w, "{},{},{}", l.index, l.value, l.multiplicity)?;
        }
        Ok(())
    })?;
    out.csv("flat.csv", |w| {
        writeln!(w, "k,value,level")?;
        for r in &flat {
            writeln!(w, "{},{},{}", r.k, r.value, r.level)?;
        }
        Ok(())
    })?;
    let report = EigsReport {
        kernel: kernel.summary(),
        levels: kernel.levels(),
        flat,
        tail_mass,
        rank: kernel.rank(),
    };
    out.json("eigs.json", &report)
}

fn cmd_deviation(config: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let kernel = config.build_kernel()?;
    let result = deviation_study(&kernel, &config.n_grid, &config.indices, config.trials, config.alpha, config.seed)?;
    out.csv("deviation_trials.csv", |w| result.write_trials_csv(w))?;
    out.csv("deviation_summary.csv", |w| {
        writeln!(w, "n,i,lambda,median,mean,quantile,bound,envelope_coverage,pre_asymptotic")?;
        for s in &result.summaries {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                s.n,
                s.i,
                s.lambda,
                s.median,
                s.mean,
                s.quantile,
                opt(s.bound),
                opt(s.envelope_coverage),
                s.pre_asymptotic.is_some()
            )?;
        }
        Ok(())
    })?;
    out.json("deviation_summary.json", &result)
}

fn cmd_coverage(config: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let kernel = config.build_kernel()?;
    let r = config.r.expect("validated");
    let result = coverage_study(&kernel, config.n(), r, config.alpha, config.trials, config.seed)?;
    out.csv("coverage_trials.csv", |w| result.write_trials_csv(w))?;
    out.json("coverage_summary.json", &result)
}

fn cmd_compare(config: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let kernel = config.build_kernel()?;
    let table = relative_vs_absolute(&kernel, config.n(), config.trials, &config.indices, config.seed)?;
    out.csv("compare.csv", |w| table.write_csv(w))?;
    out.json("compare.json", &table)
}

#[derive(Serialize)]
struct BoundsOutput {
    reports: Vec<BoundReport>,
    /// (β, h) for the configured class, when one is given.
    rates: Vec<(f64, f64)>,
}

fn cmd_bounds(config: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let kernel = config.build_kernel()?;
    let n = config.n();
    let reports = config
        .indices
        .iter()
        .map(|&i| bound_report(&kernel, i, n, config.r, config.alpha, config.regularity))
        .collect::<Result<Vec<_>, _>>()?;
    let rates = match config.regularity {
        Some(reg) if reg.tag == RegularityTag::H1 => config
            .table_betas()
            .into_iter()
            .map(|b| rate_exponent(reg, b).map(|h| (b, h)))
            .collect::<Result<Vec<_>, _>>()?,
        _ => Vec::new(),
    };
    if !rates.is_empty() {
        out.csv("bounds_rates.csv", |w| {
            writeln!(w, "beta,h")?;
            for (b, h) in &rates {
                writeln!(w, "{b},{h}")?;
            }
            Ok(())
        })?;
    }
    out.json("bounds.json", &BoundsOutput { reports, rates })
}

fn cmd_rates(config: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let table = emit_rate_table(&config.table_classes(), &config.table_betas())?;
    out.csv("rates.csv", |w| table.write_csv(w))?;
    out.json("rates.json", &table)
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

/// Reads and parses a config file; unreadable files are config errors.
pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::parse(&text)
}
