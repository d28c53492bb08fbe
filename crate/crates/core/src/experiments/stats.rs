use serde::Serialize;

/// Median of a non-empty sample (mean of the two middle values for even sizes).
pub fn median(xs: &[f64]) -> f64 {
    let v = sorted(xs);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Order statistic at rank ⌈p·m⌉ (1-based): the smallest sample value with at least a fraction
/// p of the sample at or below it.
pub fn quantile(xs: &[f64], p: f64) -> f64 {
    let v = sorted(xs);
    let rank = ((p * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    assert!(!xs.is_empty(), "statistic of an empty sample");
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Least-squares line through (log x, log y).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub grid: Vec<usize>,
}

/// `None` when fewer than two points are given or any y is not positive.
pub fn log_log_slope(grid: &[usize], ys: &[f64]) -> Option<SlopeFit> {
    if grid.len() < 2 || grid.len() != ys.len() || ys.iter().any(|y| !(*y > 0.0 && y.is_finite())) {
        return None;
    }
    let pts: Vec<(f64, f64)> = grid.iter().zip(ys).map(|(&x, &y)| ((x as f64).ln(), y.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / m).sqrt();
    Some(SlopeFit {
        slope,
        intercept,
        residual,
        grid: grid.to_vec(),
    })
}

/// √(p(1−p)/m), the binomial standard deviation of a fraction.
pub fn binomial_sigma(p: f64, m: usize) -> f64 {
    (p * (1.0 - p) / m as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_samples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(quantile(&xs, 0.9), 9.0);
        assert_eq!(quantile(&xs, 0.91), 10.0);
        assert_eq!(quantile(&xs, 0.0), 1.0);
    }

    #[test]
    fn exact_power_law_slope() {
        let grid = [250, 500, 1000, 2000];
        let ys: Vec<f64> = grid.iter().map(|&n| 3.0 * (n as f64).powf(-0.5)).collect();
        let fit = log_log_slope(&grid, &ys).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12 && fit.residual < 1e-12);
        assert!(log_log_slope(&grid, &[1.0, 0.0, 1.0, 1.0]).is_none());
    }

    proptest! {
        #[test]
        fn quantiles_are_monotone_and_bracketed(xs in proptest::collection::vec(-1e3f64..1e3, 1..60), p in 0.0f64..1.0, q in 0.0f64..1.0) {
            let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
            prop_assert!(quantile(&xs, lo) <= quantile(&xs, hi));
            let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let m = median(&xs);
            prop_assert!(m >= min && m <= max);
        }
    }
}
