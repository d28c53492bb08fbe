use serde::{Deserialize, Serialize};

use super::{KernelError, SpectralKernel};

/// Minimum number of nonzero eigenvalues for a decay fit.
pub const MIN_FIT_POINTS: usize = 20;

/// Eigenvalue/eigenfunction hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegularityTag {
    /// Σ|λ_k|‖φ_k‖²_∞ < ∞
    H,
    /// |λ_i| = O(i^{−δ}), ‖φ_i‖_∞ = O(i^s)
    H1,
    /// |λ_i| = O(e^{−δi}), ‖φ_i‖_∞ = O(i^s)
    H2,
    /// |λ_i| = O(e^{−δi}), ‖φ_i‖_∞ = O(e^{si})
    H3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityClass {
    pub tag: RegularityTag,
    pub delta: f64,
    pub s: u32,
}

impl RegularityClass {
    /// Checks δ > 0 and δ > 2s+1 (H1), δ > s (H2), δ > 2s (H3).
    pub fn new(tag: RegularityTag, delta: f64, s: u32) -> Result<Self, KernelError> {
        let c = Self { tag, delta, s };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        let s = f64::from(self.s);
        let (needed, text) = match self.tag {
            RegularityTag::H => (0.0, "δ > 0"),
            RegularityTag::H1 => (2.0 * s + 1.0, "δ > 2s + 1"),
            RegularityTag::H2 => (s, "δ > s"),
            RegularityTag::H3 => (2.0 * s, "δ > 2s"),
        };
        if self.delta.is_finite() && self.delta > needed.max(0.0) {
            Ok(())
        } else {
            Err(KernelError::Constraint(format!(
                "{:?} requires {text}: δ = {}, s = {}",
                self.tag, self.delta, self.s
            )))
        }
    }

    fn family(&self) -> Option<DecayFamily> {
        match self.tag {
            RegularityTag::H => None,
            RegularityTag::H1 => Some(DecayFamily::Polynomial),
            RegularityTag::H2 | RegularityTag::H3 => Some(DecayFamily::Exponential),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayFamily {
    /// log|λ_i| linear in log i
    Polynomial,
    /// log|λ_i| linear in i
    Exponential,
}

/// Outcome of [`classify_regularity`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityFit {
    pub class: RegularityClass,
    pub family: DecayFamily,
    /// Fitted decay rate (slope with sign flipped).
    pub delta: f64,
    pub intercept: f64,
    /// Root-mean-square residuals of both fits.
    pub rms_polynomial: f64,
    pub rms_exponential: f64,
    /// Flat indices used, inclusive.
    pub window: (usize, usize),
    pub points: usize,
}

/// Least-squares fits of log|λ_i| against log i and against i over the nonzero eigenvalues in
/// `window` (1-based, inclusive; all materialized entries when `None`). The family with the
/// smaller residual wins; the result takes the first candidate of that family whose Table 1
/// constraint holds at the fitted δ.
pub fn classify_regularity(
    kernel: &SpectralKernel,
    candidates: &[RegularityClass],
    window: Option<(usize, usize)>,
) -> Result<RegularityFit, KernelError> {
    let n = kernel.flat().len();
    let (lo, hi) = window.unwrap_or((1, n));
    let hi = hi.min(n);
    let pts: Vec<(f64, f64)> = (lo.max(1)..=hi)
        .filter_map(|i| {
            let v = kernel.flat()[i - 1].value.abs();
            (v > 0.0).then(|| (i as f64, v.ln()))
        })
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(KernelError::TooFewEigenvalues {
            needed: MIN_FIT_POINTS,
            found: pts.len(),
        });
    }
    let first = pts[0].1;
    if pts.iter().all(|p| p.1 == first) {
        return Err(KernelError::DegenerateFit);
    }
    let poly = least_squares(pts.iter().map(|&(i, y)| (i.ln(), y)));
    let expo = least_squares(pts.iter().map(|&(i, y)| (i, y)));
    let (family, fit) = if poly.rms <= expo.rms {
        (DecayFamily::Polynomial, poly)
    } else {
        (DecayFamily::Exponential, expo)
    };
    let delta = -fit.slope;
    let default_candidates = [
        RegularityClass { tag: RegularityTag::H1, delta, s: 0 },
        RegularityClass { tag: RegularityTag::H2, delta, s: 0 },
    ];
    let pool = if candidates.is_empty() { &default_candidates[..] } else { candidates };
    let class = pool
        .iter()
        .filter(|c| c.family() == Some(family))
        .map(|c| RegularityClass { delta, ..*c })
        .find(|c| c.validate().is_ok())
        .ok_or(KernelError::NoCandidate {
            family: match family {
                DecayFamily::Polynomial => "polynomial",
                DecayFamily::Exponential => "exponential",
            },
        })?;
    Ok(RegularityFit {
        class,
        family,
        delta,
        intercept: fit.intercept,
        rms_polynomial: poly.rms,
        rms_exponential: expo.rms,
        window: (lo, hi),
        points: pts.len(),
    })
}

#[derive(Clone, Copy)]
struct LineFit {
    slope: f64,
    intercept: f64,
    rms: f64,
}

fn least_squares(points: impl Iterator<Item = (f64, f64)>) -> LineFit {
    let pts: Vec<(f64, f64)> = points.collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    LineFit { slope, intercept, rms }
}

/// δ = (p + ε)/(d − 1) + 1/2 for a profile in the Sobolev space of order p + ε on S^{d−1}.
///
/// ε = 0 is accepted so the boundary case of a two-fold composition can be expressed.
pub fn sobolev_to_delta(p: f64, d: u32, epsilon: f64) -> Result<f64, KernelError> {
    if !(p > 0.0 && epsilon >= 0.0 && d >= 3) {
        return Err(KernelError::Constraint(format!(
            "p > 0, ε ≥ 0, d ≥ 3 violated: p = {p}, ε = {epsilon}, d = {d}"
        )));
    }
    Ok((p + epsilon) / f64::from(d - 1) + 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernelmodel::{compose_power, named_kernel, Growth, KernelConfig, KernelSpec};

    fn cfg() -> KernelConfig {
        KernelConfig { k_max: 200, ..KernelConfig::default() }
    }

    #[test]
    fn exact_power_law() {
        let k = named_kernel(&KernelSpec::PowerLaw { c: 1.0, delta: 4.0, s: 0.0 }, &cfg()).unwrap();
        let fit = classify_regularity(&k, &[], None).unwrap();
        assert_eq!(fit.class.tag, RegularityTag::H1);
        assert!((fit.delta - 4.0).abs() < 1e-6);
    }

    #[test]
    fn exact_exponential() {
        let q = (-1.6f64).exp();
        let k = named_kernel(&KernelSpec::Geometric { c: 1.0, q, s: 0.0, growth: Growth::Polynomial }, &cfg()).unwrap();
        let cands = [RegularityClass { tag: RegularityTag::H3, delta: 1.0, s: 0 }];
        let fit = classify_regularity(&k, &cands, None).unwrap();
        assert_eq!(fit.family, DecayFamily::Exponential);
        assert_eq!(fit.class.tag, RegularityTag::H3);
        assert!((fit.delta - 1.6).abs() < 1e-6);
    }

    #[test]
    fn composed_threshold_decay() {
        let t = named_kernel(&KernelSpec::Threshold { d: 3 }, &KernelConfig::default()).unwrap();
        let t2 = compose_power(&t, 2).unwrap();
        let fit = classify_regularity(&t2, &[], Some((50, 500))).unwrap();
        assert_eq!(fit.family, DecayFamily::Polynomial);
        assert!((fit.delta - 1.5).abs() < 0.1, "δ = {}", fit.delta);
    }

    #[test]
    fn constraint_checks() {
        assert!(RegularityClass::new(RegularityTag::H1, 3.0, 1).is_err());
        assert!(RegularityClass::new(RegularityTag::H1, 3.5, 1).is_ok());
        assert!(RegularityClass::new(RegularityTag::H2, 1.0, 1).is_err());
        assert!(RegularityClass::new(RegularityTag::H3, 2.5, 1).is_ok());
        let k = named_kernel(&KernelSpec::PowerLaw { c: 1.0, delta: 2.0, s: 0.0 }, &cfg()).unwrap();
        let cands = [RegularityClass { tag: RegularityTag::H1, delta: 9.0, s: 1 }];
        assert!(matches!(classify_regularity(&k, &cands, None), Err(KernelError::NoCandidate { .. })));
    }

    #[test]
    fn degenerate_and_short_fits() {
        let k = named_kernel(&KernelSpec::Constant { p0: 0.5, d: 3 }, &cfg()).unwrap();
        assert!(matches!(classify_regularity(&k, &[], None), Err(KernelError::TooFewEigenvalues { .. })));
        let k = named_kernel(&KernelSpec::Threshold { d: 3 }, &KernelConfig::default()).unwrap();
        // levels 1 (three copies) ... within a window of equal values
        assert!(matches!(classify_regularity(&k, &[], Some((2, 4))), Err(KernelError::TooFewEigenvalues { .. })));
        let flat = crate::kernelmodel::SpectralKernel::from_sequence(
            vec![0.5; 30],
            vec![1.0; 30],
            crate::kernelmodel::TailModel::Zero,
            &cfg(),
        )
        .unwrap();
        assert_eq!(classify_regularity(&flat, &[], None), Err(KernelError::DegenerateFit));
    }

    #[test]
    fn sobolev_examples() {
        assert!((sobolev_to_delta(1.0, 3, 1e-9).unwrap() - 1.0).abs() < 1e-8);
        assert_eq!(sobolev_to_delta(0.5, 3, 0.0).unwrap(), 0.75);
        assert!((sobolev_to_delta(2.0, 5, 0.1).unwrap() - 1.025).abs() < 1e-15);
        assert!(sobolev_to_delta(0.0, 3, 0.1).is_err());
    }
}
