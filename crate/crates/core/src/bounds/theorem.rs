use serde::Serialize;

use crate::kernelmodel::{RegularityClass, RegularityTag, SpectralKernel};

use super::{check_alpha, noise_terms, tail_sums, BoundsError, NoiseTerms};

fn nonzero_eigenvalue(kernel: &SpectralKernel, i: usize) -> Result<f64, BoundsError> {
    let lam = kernel.eigenvalue(i).ok_or_else(|| {
        BoundsError::Constraint(format!("λ_{i} lies past the {} materialized eigenvalues", kernel.flat().len()))
    })?;
    if lam == 0.0 {
        return Err(BoundsError::ZeroEigenvalue { i });
    }
    Ok(lam)
}

/// R(i) = min{R ≥ 1 : |λ_i| > max(b_R, √(R b_{2,R}))}, by ascending scan.
pub fn r_of_i(kernel: &SpectralKernel, i: usize) -> Result<usize, BoundsError> {
    let lam = nonzero_eigenvalue(kernel, i)?.abs();
    let k_max = kernel.flat().len();
    for r in 1..=k_max {
        let t = tail_sums(kernel, r)?;
        if lam > t.b_r.max((r as f64 * t.b2_r).sqrt()) {
            return Ok(r);
        }
    }
    Err(BoundsError::ScanExhausted { i, k_max })
}

/// Result of the relative bound for a fixed index.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Theorem1Outcome {
    /// |λ_i| √(V1(R(i)) log(R(i)/α)/n), unit constant.
    Bound { value: f64, ri: usize, noise: NoiseTerms },
    /// n is below the range where the bound applies; `blocking` names the failing inequality.
    PreAsymptotic { ri: usize, blocking: String, noise: Option<NoiseTerms> },
}

impl Theorem1Outcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            Theorem1Outcome::Bound { value, .. } => Some(*value),
            Theorem1Outcome::PreAsymptotic { .. } => None,
        }
    }

    pub fn ri(&self) -> usize {
        match self {
            Theorem1Outcome::Bound { ri, .. } | Theorem1Outcome::PreAsymptotic { ri, .. } => *ri,
        }
    }
}

/// The relative deviation bound for λ_i, or the inequality that keeps n below n₀
/// (γ₂(n, R(i)) < |λ_i| and τ < ½, with R(i) < n).
pub fn theorem1_bound(kernel: &SpectralKernel, i: usize, n: usize, alpha: f64) -> Result<Theorem1Outcome, BoundsError> {
    check_alpha(alpha)?;
    let lam = nonzero_eigenvalue(kernel, i)?.abs();
    let ri = r_of_i(kernel, i)?;
    if ri >= n {
        return Ok(Theorem1Outcome::PreAsymptotic {
            ri,
            blocking: format!("R(i) < n fails: R(i) = {ri}, n = {n}"),
            noise: None,
        });
    }
    let noise = noise_terms(kernel, n, ri, alpha)?;
    let blocking = if noise.gamma2 >= lam {
        Some(format!("γ₂(n, R(i)) < |λ_i| fails: {:e} ≥ {:e}", noise.gamma2, lam))
    } else if noise.tau >= 0.5 {
        Some(format!("τ < 1/2 fails: τ = {}", noise.tau))
    } else {
        None
    };
    Ok(match blocking {
        Some(blocking) => Theorem1Outcome::PreAsymptotic { ri, blocking, noise: Some(noise) },
        None => Theorem1Outcome::Bound { value: lam * noise.tau, ri, noise },
    })
}

/// |λ_i| √(V1(R(i)) log(R(i)/α)/n) without the n₀ check, for envelope fitting.
pub fn theorem1_envelope(kernel: &SpectralKernel, i: usize, n: usize, alpha: f64) -> Result<f64, BoundsError> {
    check_alpha(alpha)?;
    let lam = nonzero_eigenvalue(kernel, i)?.abs();
    let ri = r_of_i(kernel, i)?;
    let v1 = kernel.variance_proxies().v1(ri)?;
    Ok(lam * (v1 * (ri as f64 / alpha).ln() / n as f64).sqrt())
}

/// Smallest n for which [`theorem1_bound`] is not pre-asymptotic. Both conditions are monotone
/// in n, so this is a bisection; `None` when even n = 2⁴⁰ does not suffice.
pub fn n0(kernel: &SpectralKernel, i: usize, alpha: f64) -> Result<Option<usize>, BoundsError> {
    let ok = |n: usize| theorem1_bound(kernel, i, n, alpha).map(|o| o.value().is_some());
    let mut hi = 2usize;
    while !ok(hi)? {
        if hi >= 1 << 40 {
            return Ok(None);
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    if ok(lo)? {
        return Ok(Some(lo));
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Row of the per-index rate table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// H1, s ≥ 1, i ≤ n^{((δ−1)/δ)/(2s+1)}
    H1Low,
    /// H1, s ≥ 1, between the two breakpoints
    H1Mid,
    /// H1, s ≥ 1, i ≥ n^{1/(2s)}
    H1High,
    H1Flat,
    /// H2, s ≥ 1, i ≤ n^{1/(2s)}
    H2Low,
    H2High,
    /// H2 with s = 0, also used for H3 with s = 0
    H2Flat,
    H3,
}

impl Regime {
    /// B(i, n) as a formula.
    pub fn label(self) -> &'static str {
        match self {
            Regime::H1Low => "H1 s>=1: i^(-delta+delta/(delta-1)(s+1/2)) n^(-1/2)",
            Regime::H1Mid => "H1 s>=1: i^(-delta+1+(delta-1)/delta(s+1/2)) n^(-1/2)",
            Regime::H1High => "H1 s>=1: i^(-delta+s+1) n^(-1/2)",
            Regime::H1Flat => "H1 s=0: i^(-delta+1/2) n^(-1/2)",
            Regime::H2Low => "H2 s>=1: e^(-delta i+(s+1/2)log i) n^(-1/2)",
            Regime::H2High => "H2 s>=1: e^(-delta i+s log i) n^(-1/2)",
            Regime::H2Flat => "H2 s=0: e^(-delta i+1/2 log i) n^(-1/2)",
            Regime::H3 => "H3 s>=1: e^((-delta+s)i) n^(-1/2)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem2Rate {
    pub b: f64,
    pub regime: Regime,
    pub label: &'static str,
}

/// B(i, n) for a regularity class; at a breakpoint the earlier row is used.
pub fn theorem2_rate(reg: RegularityClass, i: usize, n: usize) -> Result<Theorem2Rate, BoundsError> {
    reg.validate()?;
    if i < 1 || i > n {
        return Err(BoundsError::NoRow {
            i,
            n,
            gap: "every row needs 1 ≤ i ≤ n".into(),
        });
    }
    let (d, s, fi, nf) = (reg.delta, f64::from(reg.s), i as f64, n as f64);
    let root_n = nf.sqrt();
    let (regime, b) = match (reg.tag, reg.s) {
        (RegularityTag::H, _) => {
            return Err(BoundsError::NoRow {
                i,
                n,
                gap: "hypothesis H alone has no rate row".into(),
            })
        }
        (RegularityTag::H1, 0) => (Regime::H1Flat, fi.powf(0.5 - d) / root_n),
        (RegularityTag::H1, _) => {
            let first = nf.powf((d - 1.0) / d / (2.0 * s + 1.0));
            let second = nf.powf(1.0 / (2.0 * s));
            if fi <= first {
                (Regime::H1Low, fi.powf(-d + d / (d - 1.0) * (s + 0.5)) / root_n)
            } else if fi <= second {
                (Regime::H1Mid, fi.powf(-d + 1.0 + (d - 1.0) / d * (s + 0.5)) / root_n)
            } else {
                (Regime::H1High, fi.powf(-d + s + 1.0) / root_n)
            }
        }
        (RegularityTag::H2 | RegularityTag::H3, 0) => (Regime::H2Flat, (-d * fi + 0.5 * fi.ln()).exp() / root_n),
        (RegularityTag::H2, _) => {
            if fi <= nf.powf(1.0 / (2.0 * s)) {
                (Regime::H2Low, (-d * fi + (s + 0.5) * fi.ln()).exp() / root_n)
            } else {
                (Regime::H2High, (-d * fi + s * fi.ln()).exp() / root_n)
            }
        }
        (RegularityTag::H3, _) => (Regime::H3, ((s - d) * fi).exp() / root_n),
    };
    Ok(Theorem2Rate {
        b,
        regime,
        label: regime.label(),
    })
}
