use serde::{Deserialize, Serialize};

/// Growth of ‖φ_k‖_∞ in the flat index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Growth {
    /// a · k^s
    Polynomial,
    /// a · e^{s k}
    Exponential,
}

/// Declared decay of the eigenvalues beyond what is materialized.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailModel {
    /// Finite rank: nothing beyond the listing.
    Zero,
    /// |λ_k| ≤ c k^{−δ}, ‖φ_k‖_∞ ≤ k^s.
    PowerLaw { c: f64, delta: f64, s: f64 },
    /// |λ_k| ≤ c q^k, ‖φ_k‖_∞ ≤ a·k^s or a·e^{sk}.
    Geometric { c: f64, q: f64, s: f64, sup_scale: f64, growth: Growth },
    /// Harmonic levels on S^{d−1}: |λ*_l| ≤ c l^{−p}, multiplicity d_l, ‖φ‖²_∞ ≤ d_l.
    LevelPowerLaw { c: f64, p: f64, d: u32 },
    /// No analytic bound; the truncation mass must be negligible.
    Unknown,
    /// Σ |λ_k| diverges: hypothesis H fails.
    Divergent,
}

/// Sums over a set of eigenpairs: Σ|λ|, Σλ², Σ|λ|·w_diag and Σ|λ|·‖φ‖_∞.
///
/// `diag` carries each function's share of ‖Σ|λ_k|φ_k²‖_∞: ‖φ_k‖²_∞ in general, and exactly 1 per
/// spherical harmonic since a full level contributes |λ*_l| d_l by the addition theorem.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct TailSums {
    pub abs: f64,
    pub sq: f64,
    pub diag: f64,
    pub sup: f64,
}

impl TailSums {
    pub fn add(self, o: TailSums) -> TailSums {
        TailSums {
            abs: self.abs + o.abs,
            sq: self.sq + o.sq,
            diag: self.diag + o.diag,
            sup: self.sup + o.sup,
        }
    }
}

/// Number of levels summed term by term before switching to an integral bound.
const EXPLICIT_LEVELS: usize = 1 << 20;

impl TailModel {
    /// Upper bounds on the sums over flat indices k > `after` (for flat models) or over
    /// harmonic levels l > `after` (for [`TailModel::LevelPowerLaw`]). `None` when the model
    /// gives no finite bound.
    pub fn beyond(&self, after: usize) -> Option<TailSums> {
        match *self {
            TailModel::Zero => Some(TailSums::default()),
            TailModel::PowerLaw { c, delta, s } => {
                let k = after.max(1) as f64;
                // Σ_{j>K} j^{−e} ≤ ∫_K^∞ x^{−e} dx for decreasing terms
                let integral = |scale: f64, e: f64| {
                    if e > 1.0 {
                        Some(scale * k.powf(1.0 - e) / (e - 1.0))
                    } else {
                        None
                    }
                };
                if after == 0 {
                    return None;
                }
                Some(TailSums {
                    abs: integral(c, delta)?,
                    sq: integral(c * c, 2.0 * delta)?,
                    diag: integral(c, delta - 2.0 * s)?,
                    sup: integral(c, delta - s)?,
                })
            }
            TailModel::Geometric { c, q, s, sup_scale, growth } => {
                let k1 = (after + 1) as f64;
                let sup = |k: f64| match growth {
                    Growth::Polynomial => sup_scale * k.powf(s),
                    Growth::Exponential => sup_scale * (s * k).exp(),
                };
                let ratio_growth = |power: f64| match growth {
                    Growth::Polynomial => (1.0 + 1.0 / k1).powf(power * s),
                    Growth::Exponential => (power * s).exp(),
                };
                // first term over (1 − ratio) with the ratio bounded from k = K + 1 on
                let geo = |first: f64, ratio: f64| if ratio < 1.0 { Some(first / (1.0 - ratio)) } else { None };
                let lam = c * q.powf(k1);
                Some(TailSums {
                    abs: geo(lam, q)?,
                    sq: geo(lam * lam, q * q)?,
                    diag: geo(lam * sup(k1).powi(2), q * ratio_growth(2.0))?,
                    sup: geo(lam * sup(k1), q * ratio_growth(1.0))?,
                })
            }
            TailModel::LevelPowerLaw { c, p, d } => {
                let dm2 = f64::from(d - 2);
                let fact: f64 = (1..=(d - 2)).map(f64::from).product();
                let dim_bound = |l: f64| 2.0 * (l + dm2).powf(dm2) / fact;
                let l0 = after + 1;
                let mut sums = TailSums::default();
                for l in l0..(l0 + EXPLICIT_LEVELS) {
                    let lf = l as f64;
                    let lam = c * lf.powf(-p);
                    let dl = dim_bound(lf);
                    sums.abs += lam * dl;
                    sums.sq += lam * lam * dl;
                    sums.diag += lam * dl;
                    sums.sup += lam * dl * dl.sqrt();
                }
                // integral remainder with (x + d − 2) ≤ x·(1 + (d − 2)/L)
                let big_l = (l0 + EXPLICIT_LEVELS - 1) as f64;
                let stretch = 1.0 + dm2 / big_l;
                let rem = |lam_pow: f64, dim_pow: f64| {
                    let eta = lam_pow * p - dm2 * dim_pow;
                    if eta <= 1.0 {
                        return None;
                    }
                    let pre = c.powf(lam_pow) * (2.0 / fact).powf(dim_pow) * stretch.powf(dm2 * dim_pow);
                    Some(pre * big_l.powf(1.0 - eta) / (eta - 1.0))
                };
                Some(TailSums {
                    abs: sums.abs + rem(1.0, 1.0)?,
                    sq: sums.sq + rem(2.0, 1.0)?,
                    diag: sums.diag + rem(1.0, 1.0)?,
                    sup: sums.sup + rem(1.0, 1.5)?,
                })
            }
            TailModel::Unknown | TailModel::Divergent => None,
        }
    }

    /// Tail of the m-fold composed operator (eigenvalues raised to the m-th power).
    pub fn powered(&self, m: u32) -> TailModel {
        let mf = f64::from(m);
        match *self {
            TailModel::Zero => TailModel::Zero,
            TailModel::PowerLaw { c, delta, s } => TailModel::PowerLaw { c: c.powf(mf), delta: delta * mf, s },
            TailModel::Geometric { c, q, s, sup_scale, growth } => TailModel::Geometric {
                c: c.powf(mf),
                q: q.powf(mf),
                s,
                sup_scale,
                growth,
            },
            TailModel::LevelPowerLaw { c, p, d } => TailModel::LevelPowerLaw { c: c.powf(mf), p: p * mf, d },
            TailModel::Unknown => TailModel::Unknown,
            TailModel::Divergent if m == 1 => TailModel::Divergent,
            TailModel::Divergent => TailModel::Unknown,
        }
    }
}
