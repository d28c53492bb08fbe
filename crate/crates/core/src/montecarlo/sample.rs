use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::kernelmodel::{unit_vector, Domain};

use super::MonteCarloError;

/// Generator for trial `trial` of a study seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ trial)
}

/// n i.i.d. points from the kernel's measure, with the seed kept for replay.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    points: Vec<Vec<f64>>,
    seed: u64,
    domain: Domain,
}

impl SampleSet {
    /// Wraps given points; sphere points must have unit norm to 1e-12.
    pub fn new(domain: Domain, points: Vec<Vec<f64>>, seed: u64) -> Result<Self, MonteCarloError> {
        let dim = match domain {
            Domain::Sphere { d } => d as usize,
            Domain::GaussianLine => 1,
            Domain::Sequence => return Err(MonteCarloError::Constraint("sequence kernels have no points".into())),
        };
        for (i, p) in points.iter().enumerate() {
            let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            let bad_norm = matches!(domain, Domain::Sphere { .. }) && (norm - 1.0).abs() > 1e-12;
            if p.len() != dim || bad_norm || p.iter().any(|v| !v.is_finite()) {
                return Err(MonteCarloError::Constraint(format!("point {i} does not lie in the domain")));
            }
        }
        Ok(Self { points, seed, domain })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// One point per row, coordinates comma separated.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let dim = self.points.first().map_or(0, Vec::len);
        let header: Vec<String> = (0..dim).map(|a| format!("x{a}")).collect();
        writeln!(out, "{}", header.join(","))?;
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Uniform points on S^{d−1} (normalized Gaussian vectors) or points on the line with density
/// e^{−x²}/√π, i.e. Normal(0, 1/√2).
pub fn sample_points(domain: Domain, n: usize, seed: u64) -> Result<SampleSet, MonteCarloError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_points_with(domain, n, seed, &mut rng)
}

fn sample_points_with(
    domain: Domain,
    n: usize,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<SampleSet, MonteCarloError> {
    if n == 0 {
        return Err(MonteCarloError::Constraint("n ≥ 1 violated".into()));
    }
    let points = match domain {
        Domain::Sphere { d } => (0..n).map(|_| unit_vector(d as usize, rng)).collect(),
        Domain::GaussianLine => {
            let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid normal");
            (0..n).map(|_| vec![normal.sample(rng)]).collect()
        }
        Domain::Sequence => {
            return Err(MonteCarloError::Constraint(
                "sequence-only kernels have no domain to sample".into(),
            ))
        }
    };
    Ok(SampleSet { points, seed, domain })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_points() {
        let s = sample_points(Domain::Sphere { d: 3 }, 1000, 7).unwrap();
        for p in s.points() {
            let norm: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        for a in 0..3 {
            let mean: f64 = s.points().iter().map(|p| p[a]).sum::<f64>() / 1000.0;
            assert!(mean.abs() < 4.0 / 1000f64.sqrt());
        }
        assert_eq!(s, sample_points(Domain::Sphere { d: 3 }, 1000, 7).unwrap());
    }

    #[test]
    fn line_variance() {
        let s = sample_points(Domain::GaussianLine, 100_000, 3).unwrap();
        let n = s.len() as f64;
        let mean: f64 = s.points().iter().map(|p| p[0]).sum::<f64>() / n;
        let var: f64 = s.points().iter().map(|p| (p[0] - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var - 0.5).abs() < 0.025);
    }

    #[test]
    fn csv_export() {
        let s = sample_points(Domain::Sphere { d: 3 }, 4, 1).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("x0,x1,x2\n"));
        let first: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first, s.points()[0]);
    }

    #[test]
    fn rejects_empty_and_sequences() {
        assert!(sample_points(Domain::Sphere { d: 3 }, 0, 1).is_err());
        assert!(sample_points(Domain::Sequence, 5, 1).is_err());
    }
}
