use std::sync::{Arc, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{eig_sym, Matrix, SymMatrix};
use crate::specfun::{gaussian_eigenfunctions, harmonic_dim, zonal_eval, GaussianVariant};

use super::KernelError;

/// Orthonormal basis of one harmonic level l ≥ 2, spanned by zonal functions at fixed anchors.
///
/// With anchors y_1..y_m and G_jk = Z_l(⟨y_j, y_k⟩) = Σ_a Y_a(y_j) Y_a(y_k), the top eigenpairs
/// (μ_a, u_a) of G give the L²(σ)-orthonormal functions μ_a^{−1/2} Σ_j u_ja Z_l(⟨·, y_j⟩).
#[derive(Debug)]
struct LevelBasis {
    anchors: Vec<Vec<f64>>,
    coeffs: Matrix<f64>,
}

impl LevelBasis {
    fn build(d: u32, l: usize) -> Result<Self, KernelError> {
        let dim = harmonic_dim(d, l as u32)? as usize;
        let m = 2 * dim;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000_0000_0000 ^ (u64::from(d) << 20) ^ l as u64);
        let anchors: Vec<Vec<f64>> = (0..m).map(|_| unit_vector(d as usize, &mut rng)).collect();
        let mut gram = SymMatrix::zeros(m);
        for j in 0..m {
            for k in 0..=j {
                gram.set(j, k, zonal_eval(d, l, dot(&anchors[j], &anchors[k]))?);
            }
        }
        let eig = eig_sym(&gram)?;
        let top = eig.spectrum.values()[0];
        let last = eig.spectrum.values()[dim - 1];
        if !(last > 1e-8 * top) {
            return Err(KernelError::Constraint(format!(
                "zonal anchors for level {l} on S^{} do not span the level",
                d - 1
            )));
        }
        let coeffs = Matrix::from_fn(dim, m, |a, j| eig.vectors.get(j, a) / eig.spectrum.values()[a].sqrt());
        Ok(Self { anchors, coeffs })
    }

    fn eval(&self, d: u32, l: usize, x: &[f64]) -> Vec<f64> {
        let z: Vec<f64> = self
            .anchors
            .iter()
            .map(|y| zonal_eval(d, l, dot(x, y)).expect("dimension validated"))
            .collect();
        self.coeffs.mul_vec(&z)
    }
}

pub(crate) fn unit_vector(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().clamp(-1.0, 1.0)
}

/// Spherical harmonics on S^{d−1}, level by level: 1 at level 0, √d·x_a at level 1, and zonal
/// anchor bases above. Higher levels are built on first use and cached.
#[derive(Debug, Clone)]
pub struct ZonalBasis {
    d: u32,
    levels: Vec<Arc<OnceLock<Result<LevelBasis, KernelError>>>>,
}

impl ZonalBasis {
    pub fn new(d: u32, l_max: usize) -> Self {
        Self {
            d,
            levels: (0..=l_max).map(|_| Arc::new(OnceLock::new())).collect(),
        }
    }

    /// All d_l functions of level `l` at the unit vector `x`.
    pub fn level_values(&self, l: usize, x: &[f64]) -> Result<Vec<f64>, KernelError> {
        match l {
            0 => Ok(vec![1.0]),
            1 => {
                let s = f64::from(self.d).sqrt();
                Ok(x.iter().map(|v| s * v).collect())
            }
            _ => {
                let cell = self.levels.get(l).ok_or_else(|| {
                    KernelError::Constraint(format!("level {l} beyond the basis cutoff"))
                })?;
                let basis = cell.get_or_init(|| LevelBasis::build(self.d, l));
                match basis {
                    Ok(b) => Ok(b.eval(self.d, l, x)),
                    Err(e) => Err(e.clone()),
                }
            }
        }
    }
}

/// Eigenfunction evaluators by domain.
#[derive(Debug, Clone)]
pub enum Basis {
    Zonal(ZonalBasis),
    Hermite(GaussianVariant),
    /// Sequence-only kernels.
    None,
}

impl Basis {
    /// Values of the functions with the given (level, slot) labels at `x`.
    pub(crate) fn eval(&self, labels: &[(usize, usize)], x: &[f64]) -> Result<Vec<f64>, KernelError> {
        match self {
            Basis::Zonal(z) => {
                let mut out = Vec::with_capacity(labels.len());
                let mut cached: Option<(usize, Vec<f64>)> = None;
                for &(level, slot) in labels {
                    if cached.as_ref().map(|c| c.0) != Some(level) {
                        cached = Some((level, z.level_values(level, x)?));
                    }
                    out.push(cached.as_ref().expect("just set").1[slot]);
                }
                Ok(out)
            }
            Basis::Hermite(variant) => {
                let top = labels.iter().map(|l| l.0).max().unwrap_or(0);
                let all = gaussian_eigenfunctions(top, x[0], *variant);
                Ok(labels.iter().map(|l| all[l.0]).collect())
            }
            Basis::None => Err(KernelError::NoEvaluator("sequence-only kernel".into())),
        }
    }
}
