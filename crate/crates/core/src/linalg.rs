//! Internal dense linear-algebra helpers shared across modules.
//!
//! Everything is computed over `Complex<f64>`; real frames simply carry
//! zero imaginary parts. Hermitian eigendecompositions are used for frame
//! operators and Gram matrices, SVD for rank decisions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::FrameError;
use crate::tolerance::ToleranceConfig;

pub(crate) fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Inner product `<u, v>`, conjugate-linear in the second argument, the
/// convention used for analysis coefficients `<f, f_k>`.
pub(crate) fn inner(u: &DVector<Complex64>, v: &DVector<Complex64>) -> Complex64 {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v.iter()).map(|(a, b)| a * b.conj()).sum()
}

pub(crate) fn max_abs_entry(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn matrices_close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
    a.shape() == b.shape() && max_abs_entry(&(a - b)) <= tol
}

/// Force exact Hermitian symmetry, killing rounding asymmetry before an
/// eigendecomposition.
pub(crate) fn hermitianize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let adj = m.adjoint();
    (m + adj).map(|z| z * 0.5)
}

/// Eigendecomposition of a Hermitian matrix. Returns eigenvalues in
/// ascending order with matching eigenvector columns.
pub(crate) fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = m.nrows();
    let eig = hermitianize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Singular values in descending order.
pub(crate) fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let svd = m.clone().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Numerical rank with cutoff `rank_tol * sigma_max`.
pub(crate) fn rank(m: &DMatrix<Complex64>, rank_tol: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        None | Some(&0.0) => 0,
        Some(&smax) => sv.iter().filter(|&&s| s > rank_tol * smax).count(),
    }
}

/// Least squares `min_x ||a x - b||`. Returns the minimiser and the
/// residual norm.
pub(crate) fn least_squares(
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    rank_tol: f64,
) -> (DVector<Complex64>, f64) {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    let eps = if smax > 0.0 {
        rank_tol * smax
    } else {
        rank_tol
    };
    let x = svd
        .solve(b, eps)
        .expect("svd solve with computed u/v")
        .column(0)
        .into_owned();
    let residual = (a * &x - b).norm();
    (x, residual)
}

/// Orthonormal basis of the kernel of a Hermitian PSD matrix: the
/// eigenvectors whose eigenvalue is at most `rank_tol * lambda_max`.
pub(crate) fn hermitian_kernel_onb(m: &DMatrix<Complex64>, rank_tol: f64) -> DMatrix<Complex64> {
    let (values, vectors) = hermitian_eigen(m);
    let lmax = values.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = rank_tol * lmax;
    let kernel_cols: Vec<usize> = (0..values.len()).filter(|&i| values[i] <= cutoff).collect();
    let n = m.nrows();
    DMatrix::from_fn(n, kernel_cols.len(), |r, c| vectors[(r, kernel_cols[c])])
}

/// Apply a spectral function to a Hermitian matrix: `V f(Lambda) V^H`.
pub(crate) fn hermitian_spectral_map(
    m: &DMatrix<Complex64>,
    f: impl Fn(f64) -> f64,
) -> DMatrix<Complex64> {
    let (values, vectors) = hermitian_eigen(m);
    let n = m.nrows();
    let scaled = DMatrix::from_fn(n, n, |r, c| vectors[(r, c)] * cx(f(values[c])));
    &scaled * vectors.adjoint()
}

fn check_invertible(values: &[f64], rank_tol: f64, what: &str) -> Result<(), FrameError> {
    let lmax = values.last().copied().unwrap_or(0.0);
    let lmin = values.first().copied().unwrap_or(0.0);
    if lmax <= 0.0 || lmin <= rank_tol * lmax {
        return Err(FrameError::NotAFrame(format!(
            "{what}: frame operator is singular (lambda_min = {lmin:.3e}, lambda_max = {lmax:.3e})"
        )));
    }
    Ok(())
}

/// `S^{-1}` of a Hermitian positive-definite matrix; refuses when
/// `lambda_min <= rank_tol * lambda_max`.
pub(crate) fn hermitian_inverse(
    s: &DMatrix<Complex64>,
    tol: &ToleranceConfig,
) -> Result<DMatrix<Complex64>, FrameError> {
    let (values, _) = hermitian_eigen(s);
    check_invertible(&values, tol.rank_tol, "inverse")?;
    Ok(hermitian_spectral_map(s, |l| 1.0 / l))
}

/// `S^{-1/2}` of a Hermitian positive-definite matrix, same refusal rule.
pub(crate) fn hermitian_inverse_sqrt(
    s: &DMatrix<Complex64>,
    tol: &ToleranceConfig,
) -> Result<DMatrix<Complex64>, FrameError> {
    let (values, _) = hermitian_eigen(s);
    check_invertible(&values, tol.rank_tol, "inverse square root")?;
    Ok(hermitian_spectral_map(s, |l| 1.0 / l.sqrt()))
}

/// Modified Gram-Schmidt. Orthonormalises `candidates` against `fixed`
/// (assumed orthonormal) and against each other, dropping vectors whose
/// residual norm falls below `drop_tol`.
pub(crate) fn orthonormalize_against(
    fixed: &[DVector<Complex64>],
    candidates: &[DVector<Complex64>],
    drop_tol: f64,
) -> Vec<DVector<Complex64>> {
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    for cand in candidates {
        let mut v = cand.clone();
        for _ in 0..2 {
            for u in fixed.iter().chain(basis.iter()) {
                let coeff = inner(&v, u);
                v -= u * coeff;
            }
        }
        let n = v.norm();
        if n > drop_tol {
            basis.push(v / cx(n));
        }
    }
    basis
}
