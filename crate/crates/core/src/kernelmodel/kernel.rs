use std::cmp::Ordering;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::specfun::{
    gamma, gaussian_eigenfunctions, gegenbauer_all, harmonic_dim, zonal_factor, GaussianVariant, GegenbauerParam,
};

use super::basis::{dot, Basis, ZonalBasis};
use super::eigen::{level_eigenvalues, threshold_eigenvalue, DEFAULT_START_ORDER};
use super::tail::{Growth, TailModel, TailSums};
use super::{KernelError, Profile};

/// Gaussian levels are materialized until λ_k drops below this fraction of λ_0.
const GAUSSIAN_CUTOFF: f64 = 1e-20;
/// Half-width and resolution of the grid used for Gaussian sup norms.
const GAUSSIAN_GRID_HALF_WIDTH: f64 = 15.0;
const GAUSSIAN_GRID_POINTS: usize = 6001;

fn default_k_max() -> usize {
    5000
}
fn default_l_max() -> usize {
    60
}
fn default_tail_tolerance() -> f64 {
    1e-8
}
fn default_grid() -> usize {
    2001
}
fn default_d() -> u32 {
    3
}
fn one() -> f64 {
    1.0
}

/// Materialization cutoffs and tolerances shared by all kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    /// Flat-index cutoff.
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    /// Harmonic-level cutoff.
    #[serde(default = "default_l_max")]
    pub l_max: usize,
    /// Largest acceptable truncation mass for kernels without an analytic tail.
    #[serde(default = "default_tail_tolerance")]
    pub tail_tolerance: f64,
    /// Points of the profile validation grid.
    #[serde(default = "default_grid")]
    pub validation_grid: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            k_max: default_k_max(),
            l_max: default_l_max(),
            tail_tolerance: default_tail_tolerance(),
            validation_grid: default_grid(),
        }
    }
}

/// Named kernels as written in a run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Constant {
        p0: f64,
        #[serde(default = "default_d")]
        d: u32,
    },
    Linear {
        p0: f64,
        p1: f64,
        d: u32,
    },
    Threshold {
        d: u32,
    },
    Logistic {
        r: f64,
        d: u32,
    },
    /// Dot-product kernel with a piecewise-linear profile read from CSV.
    ProfileTable {
        path: PathBuf,
        d: u32,
    },
    GaussianNarrow,
    GaussianWide,
    /// λ_k = c k^{−δ}, ‖φ_k‖_∞ = k^s; sequence only.
    PowerLaw {
        #[serde(default = "one")]
        c: f64,
        delta: f64,
        #[serde(default)]
        s: f64,
    },
    /// λ_k = c q^k, ‖φ_k‖_∞ = k^s or e^{sk}; sequence only.
    Geometric {
        #[serde(default = "one")]
        c: f64,
        q: f64,
        #[serde(default)]
        s: f64,
        #[serde(default = "polynomial")]
        growth: Growth,
    },
}

fn polynomial() -> Growth {
    Growth::Polynomial
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Sphere { d: u32 },
    GaussianLine,
    /// Eigenvalue sequence without a concrete domain.
    Sequence,
}

/// One distinct eigenvalue with its multiplicity (a harmonic level on the sphere).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Level {
    pub index: usize,
    pub value: f64,
    pub multiplicity: u64,
}

/// One materialized eigenpair in decreasing-|λ| order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlatEntry {
    pub value: f64,
    /// Level index (harmonic level, Hermite degree, or sequence position).
    pub level: usize,
    /// Position inside the level.
    pub slot: usize,
    /// ‖φ‖²_∞
    pub sup_sq: f64,
    /// Share of ‖Σ|λ|φ²‖_∞ per unit |λ|; see [`TailSums`].
    pub diag_weight: f64,
    /// Flat position of the first entry of the same level.
    pub level_start: usize,
}

/// How ‖φ_k‖_∞ was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SupSource {
    /// Addition theorem: ‖Y‖²_∞ ≤ d_l.
    AdditionTheorem,
    Analytic { bound: f64 },
    Grid { lo: f64, hi: f64, points: usize },
    Declared,
}

/// Whether Σ|λ_k| ‖φ_k‖²_∞ is known to converge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HStatus {
    Satisfied,
    Violated,
    Undetermined,
}

#[derive(Debug, Clone)]
enum Evaluator {
    Profile(Profile),
    /// Σ_l coeff_l G_l^γ(s) with coeff_l = λ_l c_l.
    LevelSum(Vec<f64>),
    Expansion,
    None,
}

/// The three parts of a tail sum over flat indices k > R.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailParts {
    /// Materialized entries beyond R.
    pub materialized: TailSums,
    /// Known eigenvalues past the flat cutoff (levels ≤ L_max).
    pub unmaterialized: TailSums,
    /// Analytic bound (or truncation-mass estimate) past the last computed level.
    pub analytic: TailSums,
}

impl TailParts {
    pub fn total(&self) -> TailSums {
        self.materialized.add(self.unmaterialized).add(self.analytic)
    }
}

/// Serializable description of a kernel for reports.
#[derive(Debug, Clone, Serialize)]
pub struct KernelSummary {
    pub id: String,
    pub spec: Option<KernelSpec>,
    pub compose: u32,
    pub domain: Domain,
    pub materialized: usize,
    pub tail_model: TailModel,
    pub truncation_mass: f64,
    pub sup_source: SupSource,
    pub hypothesis_h: HStatus,
    pub flags: Vec<String>,
    pub config: KernelConfig,
}

/// A kernel given by its eigenvalues (decreasing |λ|, materialized up to K_max), eigenfunction
/// evaluators and a model of what lies beyond the materialized part.
#[derive(Debug, Clone)]
pub struct SpectralKernel {
    id: String,
    spec: Option<KernelSpec>,
    compose: u32,
    domain: Domain,
    levels: Vec<Level>,
    flat: Vec<FlatEntry>,
    evaluator: Evaluator,
    basis: Basis,
    tail: TailModel,
    unmaterialized: TailSums,
    analytic: Option<TailSums>,
    truncation_mass: f64,
    truncation_sup: f64,
    /// sup_x Σ_{k≤R} φ_k(x)², R = 1..=len, when estimated on a grid.
    diag_prefix: Option<Vec<f64>>,
    sup_source: SupSource,
    finite_rank: bool,
    flags: Vec<String>,
    config: KernelConfig,
    // suffix sums over the flat listing, index k covers entries k..
    suffix: Vec<TailSums>,
    prefix_sup_sq: Vec<f64>,
}

/// Builds the kernel named by `spec`.
pub fn named_kernel(spec: &KernelSpec, config: &KernelConfig) -> Result<SpectralKernel, KernelError> {
    validate_config(config)?;
    match spec {
        KernelSpec::Constant { p0, d } => {
            check_unit("p0", *p0)?;
            let profile = Profile::Constant { p0: *p0 };
            sphere_kernel(spec, format!("constant(p0={p0},d={d})"), *d, profile, TailModel::Zero, true, config)
        }
        KernelSpec::Linear { p0, p1, d } => {
            check_unit("p0", *p0)?;
            let gamma = (f64::from(*d) - 2.0) / 2.0;
            if *d < 3 {
                return Err(KernelError::Constraint(format!("d ≥ 3 violated: d = {d}")));
            }
            if p1.abs() > p0 / (2.0 * gamma) {
                return Err(KernelError::Constraint(format!(
                    "|p1| ≤ p0/(2γ) violated: |{p1}| > {p0}/{}",
                    2.0 * gamma
                )));
            }
            let profile = Profile::Linear { p0: *p0, p1: *p1, gamma };
            sphere_kernel(spec, format!("linear(p0={p0},p1={p1},d={d})"), *d, profile, TailModel::Zero, true, config)
        }
        KernelSpec::Threshold { d } => {
            let c = gamma(f64::from(*d) / 2.0) * 2f64.powf(f64::from(*d) / 2.0) / (2.0 * std::f64::consts::PI);
            let tail = TailModel::LevelPowerLaw { c, p: f64::from(*d) / 2.0, d: *d };
            sphere_kernel(spec, format!("threshold(d={d})"), *d, Profile::Threshold, tail, false, config)
        }
        KernelSpec::Logistic { r, d } => {
            if !(r.is_finite() && *r >= 0.0) {
                return Err(KernelError::Constraint(format!("r ≥ 0 violated: r = {r}")));
            }
            let (tail, finite) = if *r == 0.0 { (TailModel::Zero, true) } else { (TailModel::Divergent, false) };
            sphere_kernel(spec, format!("logistic(r={r},d={d})"), *d, Profile::Logistic { r: *r }, tail, finite, config)
        }
        KernelSpec::ProfileTable { path, d } => {
            let profile = Profile::from_csv(path)?;
            sphere_kernel(spec, format!("table({},d={d})", path.display()), *d, profile, TailModel::Unknown, false, config)
        }
        KernelSpec::GaussianNarrow => gaussian_kernel(spec, GaussianVariant::Narrow, config),
        KernelSpec::GaussianWide => gaussian_kernel(spec, GaussianVariant::Wide, config),
        KernelSpec::PowerLaw { c, delta, s } => {
            if !(*c > 0.0 && *delta > 0.0 && *s >= 0.0) {
                return Err(KernelError::Constraint("power law needs c > 0, δ > 0, s ≥ 0".into()));
            }
            let values = (1..=config.k_max).map(|k| c * (k as f64).powf(-delta)).collect();
            let sups = (1..=config.k_max).map(|k| (k as f64).powf(2.0 * s)).collect();
            let tail = TailModel::PowerLaw { c: *c, delta: *delta, s: *s };
            let mut k = SpectralKernel::from_sequence(values, sups, tail, config)?;
            k.id = format!("power_law(c={c},delta={delta},s={s})");
            k.spec = Some(spec.clone());
            Ok(k)
        }
        KernelSpec::Geometric { c, q, s, growth } => {
            if !(*c > 0.0 && *q > 0.0 && *q < 1.0 && *s >= 0.0) {
                return Err(KernelError::Constraint("geometric needs c > 0, 0 < q < 1, s ≥ 0".into()));
            }
            let sup = |k: f64| match growth {
                Growth::Polynomial => k.powf(*s),
                Growth::Exponential => (s * k).exp(),
            };
            let values: Vec<f64> = (1..=config.k_max)
                .map(|k| c * q.powi(k as i32))
                .take_while(|v| *v > 0.0)
                .collect();
            let sups = (1..=values.len()).map(|k| sup(k as f64).powi(2)).collect();
            let tail = TailModel::Geometric { c: *c, q: *q, s: *s, sup_scale: 1.0, growth: *growth };
            let mut k = SpectralKernel::from_sequence(values, sups, tail, config)?;
            k.id = format!("geometric(c={c},q={q},s={s})");
            k.spec = Some(spec.clone());
            Ok(k)
        }
    }
}

/// Kernel of the m-fold composed operator: same eigenfunctions, eigenvalues λ^m, re-sorted.
pub fn compose_power(kernel: &SpectralKernel, m: u32) -> Result<SpectralKernel, KernelError> {
    if m == 0 {
        return Err(KernelError::Constraint("m ≥ 1 violated: m = 0".into()));
    }
    if m == 1 {
        return Ok(kernel.clone());
    }
    let levels: Vec<Level> = kernel
        .levels
        .iter()
        .map(|lv| Level { value: lv.value.powi(m as i32), ..*lv })
        .collect();
    let tail = kernel.tail.powered(m);
    let compose = kernel.compose * m;
    let id = format!("{}^{}", base_id(&kernel.id), compose);
    match kernel.domain {
        Domain::Sphere { d } => {
            let evaluator = match &kernel.evaluator {
                Evaluator::Profile(Profile::Threshold) if compose == 2 => Evaluator::Profile(Profile::HemisphereOverlap),
                Evaluator::Profile(Profile::Constant { p0 }) => {
                    Evaluator::Profile(Profile::Constant { p0: p0.powi(m as i32) })
                }
                _ => level_sum(d, &levels),
            };
            let mut out = assemble_sphere(id, d, levels, evaluator, tail, kernel.finite_rank, &kernel.config)?;
            out.spec = kernel.spec.clone();
            out.compose = compose;
            out.basis = kernel.basis.clone();
            Ok(out)
        }
        Domain::GaussianLine | Domain::Sequence => {
            let flat_levels: Vec<Level> = levels;
            let sups: Vec<f64> = kernel.flat.iter().map(|e| e.sup_sq).collect();
            let mut order: Vec<usize> = (0..flat_levels.len()).collect();
            order.sort_by(|&a, &b| abs_desc(flat_levels[a].value, flat_levels[b].value).then(a.cmp(&b)));
            let flat = order
                .iter()
                .enumerate()
                .map(|(pos, &i)| FlatEntry {
                    value: flat_levels[i].value,
                    level: flat_levels[i].index,
                    slot: 0,
                    sup_sq: sups[i],
                    diag_weight: sups[i],
                    level_start: pos,
                })
                .collect();
            let mut out = SpectralKernel {
                id,
                compose,
                levels: flat_levels,
                flat,
                tail,
                ..kernel.clone()
            };
            // the grid estimate of Σφ² no longer matches the new order
            if order.iter().enumerate().any(|(p, &i)| p != i) {
                out.diag_prefix = None;
            }
            out.finish()
        }
    }
}

fn base_id(id: &str) -> &str {
    id.rsplit_once('^').map_or(id, |(b, _)| b)
}

fn validate_config(config: &KernelConfig) -> Result<(), KernelError> {
    if config.k_max == 0 {
        return Err(KernelError::Constraint("k_max ≥ 1 violated".into()));
    }
    if !(config.tail_tolerance > 0.0) {
        return Err(KernelError::Constraint("tail_tolerance > 0 violated".into()));
    }
    Ok(())
}

fn check_unit(name: &str, v: f64) -> Result<(), KernelError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(KernelError::Constraint(format!("{name} ∈ [0, 1] violated: {name} = {v}")))
    }
}

fn abs_desc(a: f64, b: f64) -> Ordering {
    b.abs().total_cmp(&a.abs())
}

fn level_sum(d: u32, levels: &[Level]) -> Evaluator {
    Evaluator::LevelSum(levels.iter().map(|lv| lv.value * zonal_factor::<f64>(d, lv.index)).collect())
}

fn sphere_kernel(
    spec: &KernelSpec,
    id: String,
    d: u32,
    profile: Profile,
    tail: TailModel,
    finite_rank: bool,
    config: &KernelConfig,
) -> Result<SpectralKernel, KernelError> {
    GegenbauerParam::<f64>::from_dimension(d)?;
    profile.validate(config.validation_grid)?;
    let values = match profile {
        Profile::Threshold => (0..=config.l_max).map(|l| threshold_eigenvalue::<f64>(d, l)).collect(),
        _ => level_eigenvalues(d, &profile, config.l_max, DEFAULT_START_ORDER)?,
    };
    let levels = (0..=config.l_max)
        .zip(values)
        .map(|(l, value)| {
            Ok(Level {
                index: l,
                value,
                multiplicity: harmonic_dim(d, l as u32)?,
            })
        })
        .collect::<Result<Vec<_>, KernelError>>()?;
    let mut k = assemble_sphere(id, d, levels, Evaluator::Profile(profile), tail, finite_rank, config)?;
    k.spec = Some(spec.clone());
    Ok(k)
}

fn assemble_sphere(
    id: String,
    d: u32,
    levels: Vec<Level>,
    evaluator: Evaluator,
    tail: TailModel,
    finite_rank: bool,
    config: &KernelConfig,
) -> Result<SpectralKernel, KernelError> {
    let mut order: Vec<usize> = (0..levels.len()).filter(|&i| levels[i].value != 0.0).collect();
    order.sort_by(|&a, &b| abs_desc(levels[a].value, levels[b].value).then(levels[a].index.cmp(&levels[b].index)));
    let mut flat = Vec::new();
    let mut unmaterialized = TailSums::default();
    for &i in &order {
        let lv = levels[i];
        let start = flat.len();
        let room = config.k_max.saturating_sub(start) as u64;
        let taken = lv.multiplicity.min(room);
        let sup_sq = lv.multiplicity as f64;
        for slot in 0..taken as usize {
            flat.push(FlatEntry {
                value: lv.value,
                level: lv.index,
                slot,
                sup_sq,
                diag_weight: 1.0,
                level_start: start,
            });
        }
        let rest = (lv.multiplicity - taken) as f64;
        let a = lv.value.abs();
        unmaterialized = unmaterialized.add(TailSums {
            abs: rest * a,
            sq: rest * a * a,
            diag: rest * a,
            sup: rest * a * sup_sq.sqrt(),
        });
    }
    let last = *levels.last().expect("l_max + 1 levels");
    let truncation_mass = if finite_rank { 0.0 } else { last.value.abs() * last.multiplicity as f64 };
    let l_max = levels.len() - 1;
    let k = SpectralKernel {
        id,
        spec: None,
        compose: 1,
        domain: Domain::Sphere { d },
        analytic: if finite_rank { Some(TailSums::default()) } else { tail.beyond(l_max) },
        levels,
        flat,
        evaluator,
        basis: Basis::Zonal(ZonalBasis::new(d, l_max)),
        tail,
        unmaterialized,
        truncation_mass,
        truncation_sup: (last.multiplicity as f64).sqrt(),
        diag_prefix: None,
        sup_source: SupSource::AdditionTheorem,
        finite_rank,
        flags: Vec::new(),
        config: *config,
        suffix: Vec::new(),
        prefix_sup_sq: Vec::new(),
    };
    k.finish()
}

fn gaussian_kernel(spec: &KernelSpec, variant: GaussianVariant, config: &KernelConfig) -> Result<SpectralKernel, KernelError> {
    let sqrt2 = std::f64::consts::SQRT_2;
    let lambda0 = 2.0 * (sqrt2 - 1.0);
    let q = 3.0 - 2.0 * sqrt2;
    let mut values = Vec::new();
    let mut v = lambda0;
    while v >= GAUSSIAN_CUTOFF * lambda0 && values.len() < config.k_max {
        values.push(v);
        v *= q;
    }
    let big_k = values.len();

    // grid sup norms and running sup of Σ_{k≤R} φ_k²
    let mut sup = vec![0.0f64; big_k];
    let mut diag = vec![0.0f64; big_k];
    for g in 0..GAUSSIAN_GRID_POINTS {
        let x = -GAUSSIAN_GRID_HALF_WIDTH + 2.0 * GAUSSIAN_GRID_HALF_WIDTH * g as f64 / (GAUSSIAN_GRID_POINTS - 1) as f64;
        let phi = gaussian_eigenfunctions(big_k - 1, x, variant);
        let mut acc = 0.0;
        for k in 0..big_k {
            sup[k] = sup[k].max(phi[k].abs());
            acc += phi[k] * phi[k];
            diag[k] = diag[k].max(acc);
        }
    }
    let (sup_sq, tail, sup_source) = match variant {
        GaussianVariant::Narrow => {
            let b = 2f64.powf(0.125);
            (
                vec![b * b; big_k],
                TailModel::Geometric { c: lambda0 / q, q, s: 0.0, sup_scale: b, growth: Growth::Polynomial },
                SupSource::Analytic { bound: b },
            )
        }
        GaussianVariant::Wide => {
            // sup_k ≤ a e^{s k} in the flat index k = degree + 1, fitted on the upper half
            let half = big_k / 2;
            let s = (half..big_k - 1)
                .map(|k| (sup[k + 1] / sup[k]).ln())
                .fold(0.0f64, f64::max);
            let a = (0..big_k).map(|k| sup[k] / (s * (k + 1) as f64).exp()).fold(0.0f64, f64::max);
            (
                sup.iter().map(|v| v * v).collect(),
                TailModel::Geometric { c: lambda0 / q, q, s, sup_scale: a, growth: Growth::Exponential },
                SupSource::Grid {
                    lo: -GAUSSIAN_GRID_HALF_WIDTH,
                    hi: GAUSSIAN_GRID_HALF_WIDTH,
                    points: GAUSSIAN_GRID_POINTS,
                },
            )
        }
    };
    let levels = values
        .iter()
        .enumerate()
        .map(|(k, &value)| Level { index: k, value, multiplicity: 1 })
        .collect();
    let flat = values
        .iter()
        .enumerate()
        .map(|(k, &value)| FlatEntry {
            value,
            level: k,
            slot: 0,
            sup_sq: sup_sq[k],
            diag_weight: sup_sq[k],
            level_start: k,
        })
        .collect();
    let name = match variant {
        GaussianVariant::Narrow => "gaussian_narrow",
        GaussianVariant::Wide => "gaussian_wide",
    };
    let k = SpectralKernel {
        id: name.into(),
        spec: Some(spec.clone()),
        compose: 1,
        domain: Domain::GaussianLine,
        levels,
        flat,
        evaluator: Evaluator::Expansion,
        basis: Basis::Hermite(variant),
        analytic: tail.beyond(big_k),
        tail,
        unmaterialized: TailSums::default(),
        truncation_mass: 0.0,
        truncation_sup: 0.0,
        diag_prefix: Some(diag),
        sup_source,
        finite_rank: false,
        flags: Vec::new(),
        config: *config,
        suffix: Vec::new(),
        prefix_sup_sq: Vec::new(),
    };
    k.finish()
}

impl SpectralKernel {
    /// A sequence-only kernel from eigenvalues λ_1, λ_2, … (re-sorted by |λ|), declared sup
    /// norms ‖φ_k‖²_∞ and a tail model for k > len.
    pub fn from_sequence(
        values: Vec<f64>,
        sup_sq: Vec<f64>,
        tail: TailModel,
        config: &KernelConfig,
    ) -> Result<Self, KernelError> {
        validate_config(config)?;
        if values.len() != sup_sq.len() {
            return Err(KernelError::Constraint(format!(
                "{} eigenvalues but {} sup norms",
                values.len(),
                sup_sq.len()
            )));
        }
        if values.iter().chain(&sup_sq).any(|v| !v.is_finite()) || sup_sq.iter().any(|v| *v < 0.0) {
            return Err(KernelError::Constraint("eigenvalues and sup norms must be finite".into()));
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| abs_desc(values[a], values[b]).then(a.cmp(&b)));
        order.truncate(config.k_max);
        let levels: Vec<Level> = order
            .iter()
            .map(|&i| Level { index: i, value: values[i], multiplicity: 1 })
            .collect();
        let flat = order
            .iter()
            .enumerate()
            .map(|(pos, &i)| FlatEntry {
                value: values[i],
                level: i,
                slot: 0,
                sup_sq: sup_sq[i],
                diag_weight: sup_sq[i],
                level_start: pos,
            })
            .collect();
        let finite_rank = tail == TailModel::Zero;
        let k = SpectralKernel {
            id: "sequence".into(),
            spec: None,
            compose: 1,
            domain: Domain::Sequence,
            levels,
            flat,
            evaluator: Evaluator::None,
            basis: Basis::None,
            analytic: tail.beyond(values.len().min(config.k_max)),
            tail,
            unmaterialized: TailSums::default(),
            truncation_mass: 0.0,
            truncation_sup: 0.0,
            diag_prefix: None,
            sup_source: SupSource::Declared,
            finite_rank,
            flags: Vec::new(),
            config: *config,
            suffix: Vec::new(),
            prefix_sup_sq: Vec::new(),
        };
        k.finish()
    }

    /// Recomputes derived sums, analytic tails and flags after the listing changed.
    fn finish(mut self) -> Result<Self, KernelError> {
        self.analytic = if self.finite_rank {
            Some(TailSums::default())
        } else if let Domain::Sphere { .. } = self.domain {
            let last = self.levels.last().expect("levels");
            self.truncation_mass = last.value.abs() * last.multiplicity as f64;
            self.tail.beyond(self.levels.len() - 1)
        } else {
            self.tail.beyond(self.flat.len())
        };
        let n = self.flat.len();
        let mut suffix = vec![TailSums::default(); n + 1];
        for k in (0..n).rev() {
            let e = self.flat[k];
            let a = e.value.abs();
            suffix[k] = suffix[k + 1].add(TailSums {
                abs: a,
                sq: a * a,
                diag: a * e.diag_weight,
                sup: a * e.sup_sq.sqrt(),
            });
        }
        self.suffix = suffix;
        let mut acc = 0.0;
        self.prefix_sup_sq = std::iter::once(0.0)
            .chain(self.flat.iter().map(|e| {
                acc += e.sup_sq;
                acc
            }))
            .collect();

        self.flags.clear();
        match self.h_status() {
            HStatus::Violated => self
                .flags
                .push("violates hypothesis H: Σ|λ_k|‖φ_k‖²_∞ diverges".into()),
            HStatus::Undetermined => self
                .flags
                .push(format!("no analytic tail; truncation mass {:e}", self.truncation_mass)),
            HStatus::Satisfied => {}
        }
        if self.basis_is_approximate() {
            self.flags
                .push("eigenfunctions are not orthonormal in L²(μ) for this variant".into());
        }
        Ok(self)
    }

    fn basis_is_approximate(&self) -> bool {
        matches!(self.basis, Basis::Hermite(GaussianVariant::Narrow))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn spec(&self) -> Option<&KernelSpec> {
        self.spec.as_ref()
    }

    /// Composition power m (1 for a base kernel).
    pub fn compose(&self) -> u32 {
        self.compose
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn config(&self) -> &KernelConfig {
        &self.config
    }

    /// Distinct eigenvalues by level (harmonic level on the sphere), zeros included.
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Materialized eigenpairs in decreasing-|λ| order.
    pub fn flat(&self) -> &[FlatEntry] {
        &self.flat
    }

    /// λ_1, …, λ_K of the materialized listing.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.flat.iter().map(|e| e.value).collect()
    }

    /// λ_k for the 1-based flat index k; zero past the listing of a finite-rank kernel, `None`
    /// when k is past the materialized listing of an infinite-rank one.
    pub fn eigenvalue(&self, k: usize) -> Option<f64> {
        if k == 0 {
            return None;
        }
        match self.flat.get(k - 1) {
            Some(e) => Some(e.value),
            None if self.finite_rank && self.unmaterialized.abs == 0.0 => Some(0.0),
            None => None,
        }
    }

    pub fn tail_model(&self) -> &TailModel {
        &self.tail
    }

    /// |λ*_{L_max}| d_{L_max} for sphere kernels; zero otherwise.
    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    pub fn sup_source(&self) -> &SupSource {
        &self.sup_source
    }

    pub fn is_finite_rank(&self) -> bool {
        self.finite_rank
    }

    /// Number of nonzero eigenvalues of a finite-rank kernel.
    pub fn rank(&self) -> Option<usize> {
        self.finite_rank.then_some(self.flat.len())
    }

    pub fn flags(&self) -> &[String] {
        &self.flags
    }

    pub fn h_status(&self) -> HStatus {
        if self.finite_rank {
            return HStatus::Satisfied;
        }
        match self.tail {
            TailModel::Unknown => HStatus::Undetermined,
            TailModel::Divergent => HStatus::Violated,
            _ if self.analytic.is_some() => HStatus::Satisfied,
            _ => HStatus::Violated,
        }
    }

    pub fn violates_h(&self) -> bool {
        self.h_status() == HStatus::Violated
    }

    pub fn summary(&self) -> KernelSummary {
        KernelSummary {
            id: self.id.clone(),
            spec: self.spec.clone(),
            compose: self.compose,
            domain: self.domain,
            materialized: self.flat.len(),
            tail_model: self.tail.clone(),
            truncation_mass: self.truncation_mass,
            sup_source: self.sup_source.clone(),
            hypothesis_h: self.h_status(),
            flags: self.flags.clone(),
            config: self.config,
        }
    }

    /// Sums over flat indices k > r, split into materialized, unmaterialized and analytic parts.
    ///
    /// Kernels without an analytic tail fall back to the truncation mass when it is below the
    /// configured tolerance.
    pub fn tail_parts(&self, r: usize) -> Result<TailParts, KernelError> {
        let materialized = self.suffix.get(r).copied().unwrap_or_default();
        if r > self.flat.len() && !(self.finite_rank && self.unmaterialized.abs == 0.0) {
            return Err(KernelError::Constraint(format!(
                "R = {r} exceeds the {} materialized eigenvalues; raise k_max",
                self.flat.len()
            )));
        }
        let analytic = match self.analytic {
            Some(t) => t,
            None => {
                if self.tail == TailModel::Unknown && self.truncation_mass <= self.config.tail_tolerance {
                    let m = self.truncation_mass;
                    let last = self.levels.last().map_or(0.0, |l| l.value.abs());
                    TailSums { abs: m, sq: m * last, diag: m, sup: m * self.truncation_sup }
                } else if self.tail == TailModel::Unknown {
                    return Err(KernelError::Constraint(format!(
                        "truncation mass {:e} exceeds tolerance {:e} and no tail model is declared; raise l_max/k_max",
                        self.truncation_mass, self.config.tail_tolerance
                    )));
                } else {
                    return Err(KernelError::Constraint(format!(
                        "{}: Σ|λ_k| diverges (hypothesis H fails), tail sums are infinite",
                        self.id
                    )));
                }
            }
        };
        Ok(TailParts {
            materialized,
            unmaterialized: self.unmaterialized,
            analytic,
        })
    }

    /// Σ_{k≤r} ‖φ_k‖²_∞.
    pub fn sup_sq_prefix(&self, r: usize) -> Result<f64, KernelError> {
        self.prefix_sup_sq.get(r).copied().ok_or_else(|| self.beyond_listing(r))
    }

    /// Upper estimate of ‖Σ_{k≤r} φ_k²‖_∞: whole levels on the sphere (addition theorem), the
    /// grid estimate on the line, Σ‖φ_k‖²_∞ otherwise.
    pub fn diagonal_sup(&self, r: usize) -> Result<f64, KernelError> {
        if r == 0 {
            return Ok(0.0);
        }
        let e = self.flat.get(r - 1).ok_or_else(|| self.beyond_listing(r))?;
        match self.domain {
            Domain::Sphere { .. } => {
                let mult = self.levels[e.level].multiplicity as f64;
                Ok(e.level_start as f64 + mult)
            }
            _ => match &self.diag_prefix {
                Some(p) => Ok(p[r - 1]),
                None => self.sup_sq_prefix(r),
            },
        }
    }

    /// Upper bound on ‖Σ_{k>r}|λ_k|φ_k²‖_∞. On the sphere a level cut by r is counted whole.
    pub fn residual_diagonal(&self, r: usize) -> Result<f64, KernelError> {
        let parts = self.tail_parts(r)?;
        let from = match self.flat.get(r) {
            Some(e) => e.level_start,
            None => r.min(self.flat.len()),
        };
        Ok(self.suffix[from].diag + parts.unmaterialized.diag + parts.analytic.diag)
    }

    fn beyond_listing(&self, r: usize) -> KernelError {
        KernelError::Constraint(format!(
            "R = {r} exceeds the {} materialized eigenvalues of {}",
            self.flat.len(),
            self.id
        ))
    }

    /// True when W is evaluated through the truncated eigen-expansion itself.
    pub fn evaluates_by_expansion(&self) -> bool {
        matches!(self.evaluator, Evaluator::Expansion)
    }

    /// Whether [`SpectralKernel::eval`] is available.
    pub fn has_evaluator(&self) -> bool {
        !matches!(self.evaluator, Evaluator::None)
    }

    /// W(x, y): the profile at ⟨x, y⟩, the level sum Σ_l λ_l Z_l(⟨x, y⟩), or the truncated
    /// expansion Σ_{k≤K} λ_k φ_k(x) φ_k(y).
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64, KernelError> {
        match &self.evaluator {
            Evaluator::Profile(p) => Ok(p.eval(dot(x, y))),
            Evaluator::LevelSum(coeffs) => {
                let Domain::Sphere { d } = self.domain else { unreachable!("level sums live on spheres") };
                let param = GegenbauerParam::<f64>::from_dimension(d)?;
                let g = gegenbauer_all(param, coeffs.len() - 1, dot(x, y));
                Ok(coeffs.iter().zip(&g).map(|(c, g)| c * g).sum())
            }
            Evaluator::Expansion => {
                let a = self.eigenfunctions(x, self.flat.len())?;
                let b = self.eigenfunctions(y, self.flat.len())?;
                Ok(self.flat.iter().zip(a.iter().zip(&b)).map(|(e, (p, q))| e.value * p * q).sum())
            }
            Evaluator::None => Err(KernelError::NoEvaluator(self.id.clone())),
        }
    }

    /// φ_1(x), …, φ_count(x) in flat order.
    pub fn eigenfunctions(&self, x: &[f64], count: usize) -> Result<Vec<f64>, KernelError> {
        if count > self.flat.len() {
            return Err(self.beyond_listing(count));
        }
        let labels: Vec<(usize, usize)> = self.flat[..count].iter().map(|e| (e.level, e.slot)).collect();
        self.basis.eval(&labels, x)
    }

    /// Whether eigenfunctions can be evaluated.
    pub fn has_basis(&self) -> bool {
        !matches!(self.basis, Basis::None)
    }
}
