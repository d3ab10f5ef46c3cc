//! Dual frames of balanced frames.
//!
//! For a balanced frame the set of duals splits into equivalence classes
//! under constant shifts `(g_k + g)_k`, each class holding exactly one
//! balanced dual. Everything here revolves around that structure: the
//! canonical dual, the balanced representative of a class, a seeded
//! sampler of balanced duals via the free parameter `W` with `We = 0`,
//! erasure duals, balanced tight duals, and the classical/B-complements.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::FrameError;
use crate::frame::{all_ones, Frame, FrameField};
use crate::linalg::{self, cx};
use crate::predicates;
use crate::random;
use crate::tolerance::ToleranceConfig;
use crate::Result;

/// The canonical dual `S_F^{-1} F`. Balancedness is inherited.
pub fn canonical_dual(f: &Frame, tol: &ToleranceConfig) -> Result<Frame> {
    let s_inv = linalg::hermitian_inverse(&f.frame_operator(), tol)?;
    Ok(Frame::from_operator_result(f.field(), s_inv * f.matrix()))
}

/// Duality test `T_G T_F^* = I`, entrywise.
pub fn is_dual_pair(f: &Frame, g: &Frame, tol: &ToleranceConfig) -> Result<bool> {
    if f.dim() != g.dim() || f.len() != g.len() {
        return Err(FrameError::ShapeMismatch {
            context: "dual pair",
            detail: format!("{}x{} vs {}x{}", f.dim(), f.len(), g.dim(), g.len()),
        });
    }
    let product = g.matrix() * f.matrix().adjoint();
    let id = DMatrix::identity(f.dim(), f.dim());
    let scale = linalg::max_abs_entry(&product).max(1.0);
    Ok(linalg::matrices_close(&product, &id, tol.rel_tol * scale))
}

fn require_dual_pair(f: &Frame, g: &Frame, tol: &ToleranceConfig) -> Result<()> {
    if !is_dual_pair(f, g, tol)? {
        return Err(FrameError::NotADualPair(
            "T_G T_F^* differs from the identity".into(),
        ));
    }
    Ok(())
}

fn require_balanced(f: &Frame, tol: &ToleranceConfig, what: &str) -> Result<()> {
    if !predicates::is_balanced(f, tol) {
        return Err(FrameError::PredicateFailed(format!(
            "{what} must be balanced"
        )));
    }
    Ok(())
}

/// The balanced member of the dual equivalence class of `G`:
/// `(g_k - (1/K) T_G e)_k`. Idempotent, and constant on classes.
pub fn balanced_dual_representative(f: &Frame, g: &Frame, tol: &ToleranceConfig) -> Result<Frame> {
    require_balanced(f, tol, "the primal frame")?;
    require_dual_pair(f, g, tol)?;
    let mean = g.column_sum() / cx(g.len() as f64);
    let mat = DMatrix::from_fn(g.dim(), g.len(), |r, c| g.matrix()[(r, c)] - mean[r]);
    Frame::new(g.field(), mat)
}

/// The free parameter of the balanced-dual parametrisation
/// `T_G = S^{-1} T + W (I - T^* S^{-1} T)` with `W e = 0`, together with
/// the induced correction `R = W (I - T^* S^{-1} T)`, which annihilates
/// both `im(T^*)` and `e` and has rank at most `K - d - 1`.
#[derive(Clone, Debug)]
pub struct DualPerturbation {
    w: DMatrix<Complex64>,
    r: DMatrix<Complex64>,
}

impl DualPerturbation {
    /// Build from a free `W` (a `d x K` matrix); `W e = 0` is required.
    pub fn from_w(f: &Frame, w: DMatrix<Complex64>, tol: &ToleranceConfig) -> Result<Self> {
        if w.nrows() != f.dim() || w.ncols() != f.len() {
            return Err(FrameError::ShapeMismatch {
                context: "dual perturbation",
                detail: format!(
                    "W must be {}x{}, got {}x{}",
                    f.dim(),
                    f.len(),
                    w.nrows(),
                    w.ncols()
                ),
            });
        }
        let we = &w * all_ones(f.len());
        if we.norm() > tol.zero_tol(linalg::max_abs_entry(&w)) * f.len() as f64 {
            return Err(FrameError::InvalidArgument(
                "W does not annihilate the all-ones vector".into(),
            ));
        }
        let s_inv = linalg::hermitian_inverse(&f.frame_operator(), tol)?;
        let projector =
            DMatrix::identity(f.len(), f.len()) - f.matrix().adjoint() * &s_inv * f.matrix();
        let r = &w * projector;
        Ok(DualPerturbation { w, r })
    }

    pub fn w(&self) -> &DMatrix<Complex64> {
        &self.w
    }

    pub fn r(&self) -> &DMatrix<Complex64> {
        &self.r
    }

    /// Numerical rank of `R`; at most `K - d - 1` for balanced frames.
    pub fn rank_r(&self, tol: &ToleranceConfig) -> usize {
        linalg::rank(&self.r, tol.rank_tol)
    }

    /// `max |R T_F^*|`, which vanishes for a genuine dual correction.
    pub fn dual_residual(&self, f: &Frame) -> f64 {
        linalg::max_abs_entry(&(&self.r * f.matrix().adjoint()))
    }

    /// `||R e||`, which vanishes for balanced duals.
    pub fn balance_residual(&self) -> f64 {
        (&self.r * all_ones(self.r.ncols())).norm()
    }
}

/// Sample a balanced dual of a balanced frame: a seeded random `W` with
/// its row means removed (so `W e = 0`) drives the parametrisation. For
/// `K = d + 1` the correction space is trivial and the canonical dual is
/// returned for every seed.
pub fn sample_balanced_dual(f: &Frame, seed: u64, tol: &ToleranceConfig) -> Result<Frame> {
    Ok(sample_balanced_dual_detailed(f, seed, tol)?.0)
}

/// As [`sample_balanced_dual`], also returning the perturbation data.
pub fn sample_balanced_dual_detailed(
    f: &Frame,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<(Frame, DualPerturbation)> {
    require_balanced(f, tol, "the primal frame")?;
    let canonical = canonical_dual(f, tol)?;
    let (d, k) = (f.dim(), f.len());
    let mut rng = random::rng_from_seed(seed);
    let mut w = DMatrix::from_element(d, k, cx(0.0));
    for r in 0..d {
        let row = random::standard_vector(&mut rng, k, f.field());
        let mean: Complex64 = row.iter().sum::<Complex64>() / cx(k as f64);
        for c in 0..k {
            w[(r, c)] = row[c] - mean;
        }
    }
    let perturbation = DualPerturbation::from_w(f, w, tol)?;
    let mat = canonical.matrix() + perturbation.r();
    let dual = Frame::from_operator_result(f.field(), mat);
    Ok((dual, perturbation))
}

/// Erasure dual pair: deleting index `l` (0-based) from a balanced frame
/// leaves `(f_k)_{k != l}` dual to `(g_k - g_l)_{k != l}` for any dual
/// `G`. Returns `(deleted_frame, shifted_dual)`.
pub fn erasure_dual(
    f: &Frame,
    dual: &Frame,
    l: usize,
    tol: &ToleranceConfig,
) -> Result<(Frame, Frame)> {
    require_balanced(f, tol, "the primal frame")?;
    require_dual_pair(f, dual, tol)?;
    if l >= f.len() {
        return Err(FrameError::IndexOutOfRange {
            context: "erasure index",
            index: l,
            len: f.len(),
        });
    }
    let deleted = f.without_column(l)?;
    let gl = dual.column(l)?;
    let cols: Vec<DVector<Complex64>> = (0..dual.len())
        .filter(|&k| k != l)
        .map(|k| dual.column(k).map(|c| c - &gl))
        .collect::<Result<_>>()?;
    let shifted = Frame::from_columns(dual.field(), &cols)?;
    Ok((deleted, shifted))
}

/// Parameters for [`balanced_tight_dual`]: the squared norm `rho` of the
/// auxiliary orthogonal vectors and the seed that picks them.
#[derive(Clone, Copy, Debug)]
pub struct TightDualSpec {
    pub rho: f64,
    pub seed: u64,
}

impl TightDualSpec {
    pub fn new(rho: f64, seed: u64) -> Result<Self> {
        if rho <= 0.0 || !rho.is_finite() {
            return Err(FrameError::InvalidArgument(format!(
                "rho must be a positive real, got {rho}"
            )));
        }
        Ok(TightDualSpec { rho, seed })
    }
}

/// A balanced tight dual of a balanced Parseval frame.
#[derive(Clone, Debug)]
pub struct BalancedTightDual {
    pub frame: Frame,
    /// With `K <= 2d` the only balanced tight dual is the frame itself.
    pub is_unique_self: bool,
}

/// Balanced tight dual frame of a balanced Parseval frame. For
/// `K <= 2d` the frame itself is the unique balanced tight dual and is
/// returned as-is. For `K > 2d`, `d` equal-norm orthogonal vectors `s_i`
/// with `||s_i||^2 = rho` are drawn from `(span{e} + im(T_F^*))^perp`
/// and the dual `(f_k + r_k)_k` with `r_k = sum_i conj(s_i(k)) e_i` is a
/// balanced `(rho + 1)`-tight dual. Distinct `rho` give duals whose
/// frame operators differ by `(rho - rho') I`, so they are not unitarily
/// equivalent.
pub fn balanced_tight_dual(
    f: &Frame,
    spec: &TightDualSpec,
    tol: &ToleranceConfig,
) -> Result<BalancedTightDual> {
    require_balanced(f, tol, "the primal frame")?;
    if !predicates::is_parseval(f, tol) {
        return Err(FrameError::PredicateFailed(
            "balanced tight duals are constructed from a Parseval frame".into(),
        ));
    }
    let (d, k) = (f.dim(), f.len());
    if k <= 2 * d {
        return Ok(BalancedTightDual {
            frame: f.clone(),
            is_unique_self: true,
        });
    }

    // orthonormal basis of (span{e} + im(T^*))^perp = ker(G) ∩ {e}^perp
    let kernel = linalg::hermitian_kernel_onb(f.gram().entries(), tol.rank_tol);
    let e_unit = all_ones(k) / cx((k as f64).sqrt());
    let kernel_cols: Vec<DVector<Complex64>> = (0..kernel.ncols())
        .map(|c| kernel.column(c).into_owned())
        .collect();
    let perp_basis = linalg::orthonormalize_against(&[e_unit], &kernel_cols, 1e-8);
    debug_assert_eq!(perp_basis.len(), k - d - 1);

    // draw d orthonormal directions inside that space
    let mut rng = random::rng_from_seed(spec.seed);
    let mut directions: Vec<DVector<Complex64>> = Vec::new();
    for _ in 0..4 * d {
        if directions.len() == d {
            break;
        }
        let coeffs = random::standard_vector(&mut rng, perp_basis.len(), f.field());
        let mut cand: DVector<Complex64> = DVector::zeros(k);
        for (basis_vec, c) in perp_basis.iter().zip(coeffs.iter()) {
            cand += basis_vec * *c;
        }
        let accepted = linalg::orthonormalize_against(&directions, &[cand], 1e-8);
        directions.extend(accepted);
    }
    if directions.len() < d {
        return Err(FrameError::InvalidArgument(
            "could not draw d orthogonal directions; retry with another seed".into(),
        ));
    }

    // R(i, col) = conj(s_i(col)) with s_i = sqrt(rho) * direction_i
    let scale = cx(spec.rho.sqrt());
    let r = DMatrix::from_fn(d, k, |i, col| (directions[i][col] * scale).conj());
    let mat = f.matrix() + r;
    Ok(BalancedTightDual {
        frame: Frame::from_operator_result(f.field(), mat),
        is_unique_self: false,
    })
}

/// Classical complement of a Parseval frame: Gram `I - G_F`, realised
/// from an orthonormal basis `(v_i)` of `ker(T_F)` as the matrix with
/// rows `v_i^*`. A basis (`K = d`) has a zero-dimensional complement,
/// returned as the `1 x K` zero frame.
pub fn complement(f: &Frame, tol: &ToleranceConfig) -> Result<Frame> {
    if !predicates::is_parseval(f, tol) {
        return Err(FrameError::PredicateFailed(
            "the classical complement is defined for Parseval frames".into(),
        ));
    }
    let kernel = linalg::hermitian_kernel_onb(f.gram().entries(), tol.rank_tol);
    let rows: Vec<DVector<Complex64>> = (0..kernel.ncols())
        .map(|c| kernel.column(c).into_owned())
        .collect();
    rows_from_kernel(f.field(), &rows, f.len())
}

/// B-complement of a balanced Parseval frame: Gram `I - G_F - ee^t/K`,
/// dimension `K - d - 1`, realised from an orthonormal basis of
/// `ker(T_F)` from which `e/sqrt(K)` has been split off. Simplex frames
/// (`K = d + 1`) degenerate to the `1 x K` zero frame.
pub fn b_complement(f: &Frame, tol: &ToleranceConfig) -> Result<Frame> {
    require_balanced(f, tol, "the frame")?;
    if !predicates::is_parseval(f, tol) {
        return Err(FrameError::PredicateFailed(
            "the B-complement is defined for balanced Parseval frames".into(),
        ));
    }
    let k = f.len();
    let kernel = linalg::hermitian_kernel_onb(f.gram().entries(), tol.rank_tol);
    let e_unit = all_ones(k) / cx((k as f64).sqrt());
    let kernel_cols: Vec<DVector<Complex64>> = (0..kernel.ncols())
        .map(|c| kernel.column(c).into_owned())
        .collect();
    let basis = linalg::orthonormalize_against(&[e_unit], &kernel_cols, 1e-8);
    rows_from_kernel(f.field(), &basis, k)
}

fn rows_from_kernel(field: FrameField, rows: &[DVector<Complex64>], k: usize) -> Result<Frame> {
    if rows.is_empty() {
        // stand-in for the frame of the zero space: K zero vectors
        return Frame::new(field, DMatrix::zeros(1, k));
    }
    let mat = DMatrix::from_fn(rows.len(), k, |r, c| rows[r][c].conj());
    Ok(Frame::from_operator_result(field, mat))
}

/// The five equivalent characterisations of a B-complementary pair of
/// balanced frames, each evaluated independently.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct BComplementReport {
    /// Gramians of the canonical Parseval versions sum to `I - ee^t/K`.
    pub gram_sum: bool,
    /// `im(G_F) ⊕ im(G_G) = span{e}^perp`.
    pub range_split: bool,
    /// `d1 + d2 = K - 1` and `T_G T_F^* = 0`.
    pub dimension_and_cross: bool,
    /// The inner sum `(f_k, g_k)_k` is a balanced frame for the direct
    /// sum with `K = d1 + d2 + 1` and zero cross-Gramian.
    pub inner_sum: bool,
    /// `T_G = T_G (I - ee^t/K - T_F^* S_F^{-1} T_F)`.
    pub synthesis_identity: bool,
}

impl BComplementReport {
    pub fn as_array(&self) -> [bool; 5] {
        [
            self.gram_sum,
            self.range_split,
            self.dimension_and_cross,
            self.inner_sum,
            self.synthesis_identity,
        ]
    }

    pub fn all(&self) -> bool {
        self.as_array().iter().all(|&b| b)
    }

    pub fn consistent(&self) -> bool {
        let arr = self.as_array();
        arr.iter().all(|&b| b == arr[0])
    }
}

/// Evaluate the five B-complement equivalences for two balanced frames
/// with the same number of vectors.
pub fn check_b_complement_pair(
    f: &Frame,
    g: &Frame,
    tol: &ToleranceConfig,
) -> Result<BComplementReport> {
    require_balanced(f, tol, "the first frame")?;
    require_balanced(g, tol, "the second frame")?;
    if f.len() != g.len() {
        return Err(FrameError::ShapeMismatch {
            context: "B-complement pair",
            detail: format!("K mismatch: {} vs {}", f.len(), g.len()),
        });
    }
    if !predicates::is_frame(f, tol) || !predicates::is_frame(g, tol) {
        return Err(FrameError::NotAFrame(
            "B-complement equivalences require spanning frames".into(),
        ));
    }
    let k = f.len();
    let (d1, d2) = (f.dim(), g.dim());
    let ee_over_k = DMatrix::from_element(k, k, cx(1.0 / k as f64));

    // (1) Gram sum of the Parseval versions
    let pf = predicates::canonical_parseval(f, tol)?;
    let pg = predicates::canonical_parseval(g, tol)?;
    let target = DMatrix::identity(k, k) - &ee_over_k;
    let sum = pf.gram().entries() + pg.gram().entries();
    let gram_sum = linalg::matrices_close(&sum, &target, tol.zero_tol(1.0) * k as f64);

    // (2) ranges decompose span{e}^perp: dimensions add up to K - 1, the
    // combined ranges have full rank d1 + d2, and both are orthogonal to e
    #[allow(clippy::needless_range_loop)] // paired eigenvalue/vector scan
    let range_split = {
        let dims_ok = d1 + d2 == k - 1;
        let mut cols: Vec<DVector<Complex64>> = Vec::new();
        for frame in [f, g] {
            let gram = frame.gram();
            let (values, vectors) = linalg::hermitian_eigen(gram.entries());
            let lmax = values.last().copied().unwrap_or(0.0);
            for i in 0..k {
                if values[i] > tol.rank_tol * lmax {
                    cols.push(vectors.column(i).into_owned());
                }
            }
        }
        let stacked = DMatrix::from_fn(k, cols.len(), |r, c| cols[c][r]);
        let gram_scale = f.max_column_norm().max(g.max_column_norm()).powi(2);
        dims_ok
            && linalg::rank(&stacked, tol.rank_tol) == d1 + d2
            && (f.gram().apply_to_e().norm() + g.gram().apply_to_e().norm())
                <= tol.zero_tol(gram_scale) * k as f64
    };

    // (3) dimensions and zero cross-Gramian
    let cross = g.matrix() * f.matrix().adjoint();
    let cross_zero = linalg::max_abs_entry(&cross)
        <= tol.zero_tol(k as f64 * f.max_column_norm() * g.max_column_norm());
    let dimension_and_cross = d1 + d2 == k - 1 && cross_zero;

    // (4) the inner sum is a balanced frame for the direct sum with
    // K = d1 + d2 + 1 and zero cross-Gramian
    let inner_sum = {
        let mat = DMatrix::from_fn(d1 + d2, k, |r, c| {
            if r < d1 {
                f.matrix()[(r, c)]
            } else {
                g.matrix()[(r - d1, c)]
            }
        });
        let field = if f.field() == FrameField::Complex || g.field() == FrameField::Complex {
            FrameField::Complex
        } else {
            FrameField::Real
        };
        let stacked = Frame::new(field, mat)?;
        predicates::is_frame(&stacked, tol)
            && predicates::is_balanced(&stacked, tol)
            && k == d1 + d2 + 1
            && cross_zero
    };

    // (5) synthesis identity
    let synthesis_identity = match linalg::hermitian_inverse(&f.frame_operator(), tol) {
        Ok(s_inv) => {
            let projector =
                DMatrix::identity(k, k) - &ee_over_k - f.matrix().adjoint() * s_inv * f.matrix();
            let rhs = g.matrix() * projector;
            linalg::matrices_close(
                g.matrix(),
                &rhs,
                tol.zero_tol(g.max_column_norm()) * k as f64,
            )
        }
        Err(_) => false,
    };

    Ok(BComplementReport {
        gram_sum,
        range_split,
        dimension_and_cross,
        inner_sum,
        synthesis_identity,
    })
}
