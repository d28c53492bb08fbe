use std::f64::consts::PI;
use std::path::Path;

use serde::Serialize;

use super::KernelError;

/// A dot-product profile f: [−1, 1] → [0, 1], so that W(x, y) = f(⟨x, y⟩).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Constant { p0: f64 },
    /// p0 + p1·G_1^γ(t) = p0 + 2γ p1 t
    Linear { p0: f64, p1: f64, gamma: f64 },
    /// 1_{t ≥ 0}
    Threshold,
    /// σ-measure of the intersection of two hemispheres at inner product t: (π − arccos t)/(2π).
    /// This is the two-fold composition of the threshold kernel.
    HemisphereOverlap,
    /// 1/(1 + e^{−rt})
    Logistic { r: f64 },
    /// Piecewise-linear interpolation through (t, f) knots covering [−1, 1].
    Table { knots: Vec<(f64, f64)> },
}

impl Profile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::Constant { p0 } => *p0,
            Profile::Linear { p0, p1, gamma } => p0 + 2.0 * gamma * p1 * t,
            Profile::Threshold => {
                if t >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::HemisphereOverlap => (PI - t.clamp(-1.0, 1.0).acos()) / (2.0 * PI),
            Profile::Logistic { r } => 1.0 / (1.0 + (-r * t).exp()),
            Profile::Table { knots } => interpolate(knots, t),
        }
    }

    /// Interior points of (−1, 1) where the profile is not analytic or changes scale sharply.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Profile::Threshold => vec![0.0],
            Profile::Logistic { r } if *r > 0.0 => {
                let mut pts = vec![0.0];
                let mut h = 1.0 / r;
                while h < 1.0 {
                    pts.push(h);
                    pts.push(-h);
                    h *= 2.0;
                }
                pts.sort_by(f64::total_cmp);
                pts
            }
            Profile::Table { knots } => knots
                .iter()
                .map(|k| k.0)
                .filter(|t| *t > -1.0 && *t < 1.0)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Polynomial degree when f is a polynomial; such profiles are integrated exactly.
    pub fn polynomial_degree(&self) -> Option<usize> {
        match self {
            Profile::Constant { .. } => Some(0),
            Profile::Linear { .. } => Some(1),
            Profile::Logistic { r } if *r == 0.0 => Some(0),
            _ => None,
        }
    }

    /// True when the (1 − t²)^{γ−1/2}-weighted integrand is smooth only after the t = sin θ
    /// substitution, i.e. f has kinks or endpoint square-root behaviour.
    pub(crate) fn needs_splitting(&self) -> bool {
        self.polynomial_degree().is_none()
    }

    /// Checks 0 ≤ f(t) ≤ 1 on an equispaced grid of `points` nodes.
    pub fn validate(&self, points: usize) -> Result<(), KernelError> {
        let points = points.max(2);
        for i in 0..points {
            let t = -1.0 + 2.0 * i as f64 / (points - 1) as f64;
            let v = self.eval(t);
            if !(0.0..=1.0).contains(&v) {
                return Err(KernelError::ProfileRange { t, value: v });
            }
        }
        Ok(())
    }

    /// Reads a two-column CSV table `t,f` (optional header, `#` comments).
    pub fn from_csv(path: &Path) -> Result<Self, KernelError> {
        let err = |message: String| KernelError::ProfileTable {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        let mut knots = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(err(format!("line {}: expected two columns", lineno + 1)));
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(t), Ok(f)) => knots.push((t, f)),
                _ if knots.is_empty() => continue, // header
                _ => return Err(err(format!("line {}: not a number", lineno + 1))),
            }
        }
        Self::table(knots).map_err(|e| match e {
            KernelError::Constraint(m) => err(m),
            other => other,
        })
    }

    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self, KernelError> {
        if knots.len() < 2 {
            return Err(KernelError::Constraint("profile table needs at least two knots".into()));
        }
        if knots.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(KernelError::Constraint("profile knots must be strictly increasing in t".into()));
        }
        let (lo, hi) = (knots[0].0, knots[knots.len() - 1].0);
        if lo > -1.0 || hi < 1.0 {
            return Err(KernelError::Constraint(format!(
                "profile knots must cover [-1, 1], got [{lo}, {hi}]"
            )));
        }
        Ok(Profile::Table { knots })
    }
}

fn interpolate(knots: &[(f64, f64)], t: f64) -> f64 {
    let idx = knots.partition_point(|k| k.0 <= t);
    if idx == 0 {
        return knots[0].1;
    }
    if idx == knots.len() {
        return knots[knots.len() - 1].1;
    }
    let (t0, f0) = knots[idx - 1];
    let (t1, f1) = knots[idx];
    f0 + (f1 - f0) * (t - t0) / (t1 - t0)
}
