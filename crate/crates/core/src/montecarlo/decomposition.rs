use serde::Serialize;

use crate::kernelmodel::SpectralKernel;
use crate::linalg::{eigvals_sym, op_norm, Cholesky, Matrix, SymMatrix, ThinQr};

use super::assembly::{factored, feature_matrix, kernel_matrix};
use super::{MonteCarloError, SampleSet};

/// Smallest admissible eigenvalue of Φ_RᵀΦ_R.
pub const RANK_TOL: f64 = 1e-10;

/// Which representation carried the operator-norm computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecompositionPath {
    /// n×n matrices.
    Dense,
    /// Coordinates of the K-dimensional column space of the full feature matrix.
    Factored,
}

/// T_n = Φ_R Λ_R Φ_Rᵀ + E_R for one sample, with the norms used by the perturbation argument.
#[derive(Debug, Clone, Serialize)]
pub struct TruncationDecomposition {
    pub r: usize,
    pub n: usize,
    #[serde(skip)]
    pub phi_r: Matrix<f64>,
    pub lambda_r: Vec<f64>,
    #[serde(skip)]
    pub er: SymMatrix<f64>,
    /// ‖Φ_RᵀΦ_R − Id_R‖_op
    pub gram_dev: f64,
    pub smallest_gram_eigenvalue: f64,
    /// ‖P₁E_RP₂ + P₂E_RP₁ + P₁E_RP₁‖_op
    pub a_norm: f64,
    /// ‖E_R‖_op
    pub er_norm: f64,
    /// ‖P₂E_RP₂‖_op
    pub complement_norm: f64,
    /// max over unit φ ∈ span Φ_R of ‖E_R φ‖
    pub e_on_span: f64,
    /// ‖E_R‖_max
    pub er_max: f64,
    pub path: DecompositionPath,
}

/// Builds Φ_R, Λ_R and E_R = T_n − Φ_R Λ_R Φ_Rᵀ and the norms of the block pieces.
///
/// P₁ is the projector onto span Φ_R, applied through the Cholesky factor of Φ_RᵀΦ_R; a Gram
/// eigenvalue at or below [`RANK_TOL`] is reported as rank deficiency.
pub fn decompose(kernel: &SpectralKernel, sample: &SampleSet, r: usize) -> Result<TruncationDecomposition, MonteCarloError> {
    let n = sample.len();
    let available = kernel.flat().len();
    if r > n.min(available) {
        return Err(MonteCarloError::Constraint(format!(
            "R ≤ min(n, materialized) violated: R = {r}, n = {n}, materialized = {available}"
        )));
    }
    let values = kernel.eigenvalues();
    let lambda_r = values[..r].to_vec();

    let (phi_r, coords_phi, coords_e, er, path) = if factored(kernel, n) {
        let f = feature_matrix(kernel, sample, available)?;
        let phi_r = f.leading_columns(r);
        let er = residual_from_features(kernel, sample, &f, &values, r)?;
        // F = Q R_f: Φ_R = Q R_f[:, :R] and E_R = Q R_f diag(0, Λ_{>R}) R_fᵀ Qᵀ
        let rf = ThinQr::new(&f)?.r().clone();
        let mut tail_w = values.clone();
        tail_w[..r].iter_mut().for_each(|v| *v = 0.0);
        let coords_e = rf.weighted_outer(&tail_w);
        let coords_phi = rf.leading_columns(r);
        (phi_r, coords_phi, coords_e, er, DecompositionPath::Factored)
    } else {
        let t = kernel_matrix(kernel, sample)?;
        let phi_r = feature_matrix(kernel, sample, r)?;
        let low = phi_r.weighted_outer(&lambda_r);
        let er = t.sub(&low)?;
        (phi_r.clone(), phi_r, er.clone(), er, DecompositionPath::Dense)
    };

    let er_max = er.max_abs();
    let blocks = block_norms(&coords_phi, &coords_e)?;
    Ok(TruncationDecomposition {
        r,
        n,
        phi_r,
        lambda_r,
        er,
        gram_dev: blocks.gram_dev,
        smallest_gram_eigenvalue: blocks.smallest,
        a_norm: blocks.a_norm,
        er_norm: blocks.er_norm,
        complement_norm: blocks.complement_norm,
        e_on_span: blocks.e_on_span,
        er_max,
        path,
    })
}

/// ‖Φ_RᵀΦ_R − Id_R‖_op alone, without assembling T_n.
pub fn gram_deviation(kernel: &SpectralKernel, sample: &SampleSet, r: usize) -> Result<f64, MonteCarloError> {
    if r == 0 {
        return Ok(0.0);
    }
    let gram = feature_matrix(kernel, sample, r)?.gram();
    Ok(op_norm(&gram.sub(&SymMatrix::identity(r))?)?)
}

/// E_R entrywise: T_n from the kernel's own evaluator minus the rank-R part, or the trailing
/// expansion terms when the kernel is evaluated through its expansion.
fn residual_from_features(
    kernel: &SpectralKernel,
    sample: &SampleSet,
    f: &Matrix<f64>,
    values: &[f64],
    r: usize,
) -> Result<SymMatrix<f64>, MonteCarloError> {
    let n = sample.len();
    if kernel.evaluates_by_expansion() || !kernel.has_evaluator() {
        let mut w = values.to_vec();
        w[..r].iter_mut().for_each(|v| *v = 0.0);
        return Ok(f.weighted_outer(&w));
    }
    let t = kernel_matrix(kernel, sample)?;
    let head = f.leading_columns(r).weighted_outer(&values[..r]);
    debug_assert_eq!(t.order(), n);
    Ok(t.sub(&head)?)
}

struct BlockNorms {
    gram_dev: f64,
    smallest: f64,
    a_norm: f64,
    er_norm: f64,
    complement_norm: f64,
    e_on_span: f64,
}

/// Norms of the block pieces, computed in any coordinates where the columns of `phi` and the
/// symmetric `e` are expressed in an orthonormal frame.
fn block_norms(phi: &Matrix<f64>, e: &SymMatrix<f64>) -> Result<BlockNorms, MonteCarloError> {
    let m = e.order();
    let r = phi.cols();
    let er_norm = op_norm(e)?;
    if r == 0 {
        return Ok(BlockNorms {
            gram_dev: 0.0,
            smallest: f64::INFINITY,
            a_norm: 0.0,
            er_norm,
            complement_norm: er_norm,
            e_on_span: 0.0,
        });
    }
    let gram = phi.gram();
    let gram_spec = eigvals_sym(&gram)?;
    let smallest = gram_spec.values().iter().fold(f64::INFINITY, |a, v| a.min(*v));
    let gram_dev = op_norm(&gram.sub(&SymMatrix::identity(r))?)?;
    if !(smallest > RANK_TOL) {
        return Err(MonteCarloError::RankDeficient { smallest, r });
    }
    // orthonormal basis Q = Φ L^{−T} of span Φ, with Φ_RᵀΦ_R = L Lᵀ
    let chol = Cholesky::new(&gram, 0.0)?;
    let l = chol.factor();
    let mut q = Matrix::zeros(m, r);
    for i in 0..m {
        let row = phi.row(i);
        for a in 0..r {
            let mut s = row[a];
            for b in 0..a {
                s -= l.get(a, b) * q.get(i, b);
            }
            q.set(i, a, s / l.get(a, a));
        }
    }
    let ed = e.to_dense();
    let em = ed.matmul(&q)?; // E Q, m×R
    let c = q.transpose().matmul(&em)?; // Qᵀ E Q
    let qc = q.matmul(&c)?;
    // A = QMᵀ + MQᵀ − Q C Qᵀ with M = EQ
    let a = SymMatrix::from_fn(m, |i, j| {
        let (qi, qj) = (q.row(i), q.row(j));
        let (mi, mj) = (em.row(i), em.row(j));
        let ci = qc.row(i);
        (0..r).map(|k| qi[k] * mj[k] + mi[k] * qj[k] - ci[k] * qj[k]).sum()
    });
    let a_norm = op_norm(&a)?;
    let complement_norm = op_norm(&e.sub(&a)?)?;
    let e_on_span = op_norm(&em.gram())?.sqrt();
    Ok(BlockNorms {
        gram_dev,
        smallest,
        a_norm,
        er_norm,
        complement_norm,
        e_on_span,
    })
}
