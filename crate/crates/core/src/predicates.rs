//! Frame predicates and structure reports.
//!
//! Zero tests are relative to the largest column norm, rank decisions go
//! through SVD with the `rank_tol` cutoff. All predicates accept arbitrary
//! sequences (spanning is itself a predicate, not an assumption).

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::FrameError;
use crate::frame::{all_ones, Frame, FrameField};
use crate::linalg::{self, cx};
use crate::random;
use crate::tolerance::ToleranceConfig;
use crate::Result;

/// Fixed seed for the random probe vectors of the universally-quantified
/// balancedness characterisations.
const PROBE_SEED: u64 = 0x5eed_0b5e;

/// Guard for the exhaustive `is_maximally_robust` subset scan.
const MAX_SUBSETS: u128 = 1_000_000;

/// `sum_k f_k`, reported exactly as computed.
pub fn balance_sum(f: &Frame) -> DVector<Complex64> {
    f.column_sum()
}

/// A sequence is balanced when its vectors sum to zero, relative to the
/// largest column norm.
pub fn is_balanced(f: &Frame, tol: &ToleranceConfig) -> bool {
    balance_sum(f).norm() <= tol.zero_tol(f.max_column_norm())
}

/// Spanning test: `rank(T_F) = d` by singular values.
pub fn is_frame(f: &Frame, tol: &ToleranceConfig) -> bool {
    linalg::rank(f.matrix(), tol.rank_tol) == f.dim()
}

/// Tight constant when the frame is tight, `None` otherwise.
pub fn tight_constant(f: &Frame, tol: &ToleranceConfig) -> Option<f64> {
    if !is_frame(f, tol) {
        return None;
    }
    f.spectral(tol).tight_constant
}

pub fn is_tight(f: &Frame, tol: &ToleranceConfig) -> bool {
    tight_constant(f, tol).is_some()
}

pub fn is_parseval(f: &Frame, tol: &ToleranceConfig) -> bool {
    matches!(tight_constant(f, tol), Some(c) if (c - 1.0).abs() <= tol.rel_tol)
}

pub fn is_equal_norm(f: &Frame, tol: &ToleranceConfig) -> bool {
    let max = f.max_column_norm();
    (0..f.len()).all(|k| (f.column_norm(k) - max).abs() <= tol.zero_tol(max))
}

pub fn is_unit_norm(f: &Frame, tol: &ToleranceConfig) -> bool {
    (0..f.len()).all(|k| (f.column_norm(k) - 1.0).abs() <= tol.rel_tol)
}

/// Balanced unit-norm tight frame: the central object of the crate.
pub fn is_buntf(f: &Frame, tol: &ToleranceConfig) -> bool {
    is_balanced(f, tol) && is_unit_norm(f, tol) && is_tight(f, tol)
}

/// The common off-diagonal Gram value of an isogonal sequence, when one
/// exists. The definition asks for a real value; a complex frame may
/// exhibit a common non-real value, which is returned so callers can flag
/// it.
pub fn isogonal_common_value(f: &Frame, tol: &ToleranceConfig) -> Option<Complex64> {
    if !is_equal_norm(f, tol) {
        return None;
    }
    let k = f.len();
    if k < 2 {
        return Some(cx(0.0));
    }
    let g = f.gram();
    let scale = f.max_column_norm().powi(2);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut count = 0.0;
    for row in 0..k {
        for col in 0..k {
            if row != col {
                sum += g.entries()[(row, col)];
                count += 1.0;
            }
        }
    }
    let mean = sum / cx(count);
    let common = (0..k)
        .cartesian_product(0..k)
        .filter(|(r, c)| r != c)
        .all(|(r, c)| (g.entries()[(r, c)] - mean).norm() <= tol.zero_tol(scale));
    common.then_some(mean)
}

pub fn is_isogonal(f: &Frame, tol: &ToleranceConfig) -> bool {
    isogonal_common_value(f, tol).is_some()
}

/// Whether the Gram matrix is real. This is the unitarily invariant
/// sense of "real": it also admits complex frames that are unitarily
/// equivalent to real ones.
pub fn has_real_gram(f: &Frame, tol: &ToleranceConfig) -> bool {
    let g = f.gram();
    let scale = f.max_column_norm().powi(2);
    g.entries()
        .iter()
        .all(|z| z.im.abs() <= tol.zero_tol(scale))
}

/// Simplex test: `G_F = I - (1/K) e e^t` entrywise.
pub fn is_simplex(f: &Frame, tol: &ToleranceConfig) -> bool {
    let k = f.len();
    let g = f.gram();
    let scale = linalg::max_abs_entry(g.entries());
    let target = DMatrix::from_fn(k, k, |r, c| {
        cx(if r == c {
            1.0 - 1.0 / k as f64
        } else {
            -1.0 / k as f64
        })
    });
    linalg::matrices_close(g.entries(), &target, tol.zero_tol(scale))
}

pub fn is_orthonormal_basis(f: &Frame, tol: &ToleranceConfig) -> bool {
    f.len() == f.dim()
        && linalg::matrices_close(
            f.gram().entries(),
            &DMatrix::identity(f.len(), f.len()),
            tol.rel_tol,
        )
}

/// Exhaustive check that every `d`-subset of the frame is a basis.
/// Guarded: errors when `C(K, d)` exceeds 10^6.
pub fn is_maximally_robust(f: &Frame, tol: &ToleranceConfig) -> Result<bool> {
    let (d, k) = (f.dim(), f.len());
    if k < d {
        return Ok(false);
    }
    let subsets = binomial(k as u128, d as u128);
    if subsets > MAX_SUBSETS {
        return Err(FrameError::GuardExceeded(format!(
            "C({k}, {d}) = {subsets} d-subsets exceeds the 10^6 guard"
        )));
    }
    for subset in (0..k).combinations(d) {
        let sub = DMatrix::from_fn(d, d, |r, c| f.matrix()[(r, subset[c])]);
        if linalg::rank(&sub, tol.rank_tol) < d {
            return Ok(false);
        }
    }
    Ok(true)
}

fn binomial(n: u128, mut r: u128) -> u128 {
    if r > n {
        return 0;
    }
    r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// `S_F^{-1/2} F`, the canonical Parseval frame. Preserves balancedness.
pub fn canonical_parseval(f: &Frame, tol: &ToleranceConfig) -> Result<Frame> {
    let s = f.frame_operator();
    let inv_sqrt = linalg::hermitian_inverse_sqrt(&s, tol)?;
    Ok(Frame::from_operator_result(
        f.field(),
        inv_sqrt * f.matrix(),
    ))
}

// ---------------------------------------------------------------------------
// Eight-way balancedness equivalence report
// ---------------------------------------------------------------------------

/// One boolean per characterisation of balancedness, evaluated
/// independently. On clean data all eight agree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct BalanceEquivalences {
    /// (1) `sum f_k = 0`
    pub vector_sum: bool,
    /// (2) `T_F e = 0`
    pub synthesis_annihilates_e: bool,
    /// (3) `G_F e = 0`
    pub gram_annihilates_e: bool,
    /// (4) `sum_k <f_l, f_k> = 0` for each `l`
    pub gram_row_sums: bool,
    /// (5) `sum_{k,l} <f_k, f_l> = 0`
    pub gram_total_sum: bool,
    /// (6) `sum_k <f, f_k> = 0` over the probe set
    pub analysis_sums: bool,
    /// (7) `sum_k ||f - f_k||^2 = sum_k ||f_k||^2 + K ||f||^2` over probes
    pub shifted_norm_identity: bool,
    /// (8) `sum_{k != l} ||f_l - f_k||^2 = sum_k ||f_k||^2 + K ||f_l||^2`
    pub pairwise_distance_identity: bool,
}

impl BalanceEquivalences {
    pub fn as_array(&self) -> [bool; 8] {
        [
            self.vector_sum,
            self.synthesis_annihilates_e,
            self.gram_annihilates_e,
            self.gram_row_sums,
            self.gram_total_sum,
            self.analysis_sums,
            self.shifted_norm_identity,
            self.pairwise_distance_identity,
        ]
    }

    /// All eight characterisations hold.
    pub fn all(&self) -> bool {
        self.as_array().iter().all(|&b| b)
    }

    /// The report is internally consistent: all true or all false.
    pub fn consistent(&self) -> bool {
        let arr = self.as_array();
        arr.iter().all(|&b| b == arr[0])
    }
}

/// Deterministic probe vectors: the standard basis, the imaginary-rotated
/// basis for complex frames, and `d` seeded random unit vectors.
fn probe_vectors(d: usize, field: FrameField) -> Vec<DVector<Complex64>> {
    let mut probes = Vec::new();
    for j in 0..d {
        let mut v = DVector::zeros(d);
        v[j] = cx(1.0);
        probes.push(v);
    }
    if field == FrameField::Complex {
        for j in 0..d {
            let mut v = DVector::zeros(d);
            v[j] = Complex64::new(0.0, 1.0);
            probes.push(v);
        }
    }
    let mut rng = random::rng_from_seed(PROBE_SEED);
    for _ in 0..d {
        probes.push(random::unit_vector(&mut rng, d, field));
    }
    probes
}

/// Evaluate all eight balancedness characterisations independently.
pub fn check_balanced_equivalences(f: &Frame, tol: &ToleranceConfig) -> BalanceEquivalences {
    let k = f.len() as f64;
    let max_norm = f.max_column_norm();
    let vec_tol = tol.zero_tol(max_norm) * k.sqrt().max(1.0);
    let gram_scale = max_norm * max_norm;
    let gram_tol = tol.zero_tol(gram_scale) * k;

    let vector_sum = f.column_sum().norm() <= vec_tol;
    let synthesis_annihilates_e = f
        .synthesis_apply(&all_ones(f.len()))
        .expect("length matches")
        .norm()
        <= vec_tol;

    let g = f.gram();
    let gram_annihilates_e = g.apply_to_e().norm() <= gram_tol * k.sqrt().max(1.0);

    // (4) directly from pairwise inner products, independent of the Gram
    let gram_row_sums = (0..f.len()).all(|l| {
        let fl = f.matrix().column(l).into_owned();
        let sum: Complex64 = f.columns_iter().map(|fk| linalg::inner(&fl, &fk)).sum();
        sum.norm() <= gram_tol
    });

    let total: Complex64 = (0..f.len())
        .cartesian_product(0..f.len())
        .map(|(r, c)| g.entries()[(r, c)])
        .sum();
    let gram_total_sum = total.norm() <= gram_tol * k;

    let probes = probe_vectors(f.dim(), f.field());
    let norms_sq: f64 = (0..f.len()).map(|j| f.column_norm(j).powi(2)).sum();

    let analysis_sums = probes.iter().all(|p| {
        let coeffs = f.analysis_apply(p).expect("probe has dimension d");
        coeffs.iter().sum::<Complex64>().norm() <= tol.zero_tol(max_norm) * k
    });

    let shifted_norm_identity = probes.iter().all(|p| {
        let lhs: f64 = f.columns_iter().map(|col| (p - col).norm_squared()).sum();
        let rhs = norms_sq + k * p.norm_squared();
        (lhs - rhs).abs() <= tol.zero_tol(rhs.abs()) * k
    });

    let pairwise_distance_identity = (0..f.len()).all(|l| {
        let fl = f.matrix().column(l).into_owned();
        let lhs: f64 = (0..f.len())
            .filter(|&kk| kk != l)
            .map(|kk| (&fl - f.matrix().column(kk)).norm_squared())
            .sum();
        let rhs = norms_sq + k * fl.norm_squared();
        (lhs - rhs).abs() <= tol.zero_tol(rhs.abs()) * k
    });

    BalanceEquivalences {
        vector_sum,
        synthesis_annihilates_e,
        gram_annihilates_e,
        gram_row_sums,
        gram_total_sum,
        analysis_sums,
        shifted_norm_identity,
        pairwise_distance_identity,
    }
}

// ---------------------------------------------------------------------------
// Naimark completion
// ---------------------------------------------------------------------------

/// Naimark data for a balanced Parseval frame: an orthonormal basis of
/// `field^K` (the standard basis, under the canonical embedding of the
/// frame's space as the row space of `T_F`) together with the orthogonal
/// projection (the Gram matrix) that maps each basis vector onto the
/// embedded copy of `f_k`. The basis-vector sum `e` lies in the orthogonal
/// complement of the embedded space.
#[derive(Clone, Debug)]
pub struct NaimarkCompletion {
    basis: DMatrix<Complex64>,
    projection: DMatrix<Complex64>,
}

impl NaimarkCompletion {
    /// Columns form the completing orthonormal basis of `field^K`.
    pub fn basis(&self) -> &DMatrix<Complex64> {
        &self.basis
    }

    /// The orthogonal projection onto the embedded `H_d` (equals `G_F`).
    pub fn projection(&self) -> &DMatrix<Complex64> {
        &self.projection
    }

    /// Projected basis vectors `G_F e_k`, the embedded frame.
    pub fn embedded_frame(&self) -> DMatrix<Complex64> {
        &self.projection * &self.basis
    }
}

/// Naimark completion of a balanced Parseval frame.
pub fn naimark_complete(f: &Frame, tol: &ToleranceConfig) -> Result<NaimarkCompletion> {
    if !is_parseval(f, tol) {
        return Err(FrameError::PredicateFailed(
            "naimark completion requires a Parseval frame".into(),
        ));
    }
    if !is_balanced(f, tol) {
        return Err(FrameError::PredicateFailed(
            "naimark completion requires a balanced frame".into(),
        ));
    }
    let k = f.len();
    let g = f.gram();
    // sum of the projected basis vectors is G e, zero for balanced frames
    debug_assert!(g.apply_to_e().norm() <= tol.zero_tol(f.max_column_norm().powi(2)) * k as f64);
    Ok(NaimarkCompletion {
        basis: DMatrix::identity(k, k),
        projection: g.entries().clone(),
    })
}

// ---------------------------------------------------------------------------
// Frame graph
// ---------------------------------------------------------------------------

/// Connected components of the frame graph (vertices `0..K`, edge between
/// `k` and `l` iff `|<f_k, f_l>| > rel_tol * ||f_k|| ||f_l||`). Components
/// are sorted and cover every index.
#[allow(clippy::needless_range_loop)] // `seen` is mutated while scanned
pub fn frame_graph_components(f: &Frame, tol: &ToleranceConfig) -> Vec<Vec<usize>> {
    let k = f.len();
    let g = f.gram();
    let norms: Vec<f64> = (0..k).map(|j| f.column_norm(j)).collect();
    let edge = |a: usize, b: usize| -> bool {
        g.entries()[(a, b)].norm() > tol.rel_tol * norms[a] * norms[b]
    };
    let mut seen = vec![false; k];
    let mut components = Vec::new();
    for start in 0..k {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut component = Vec::new();
        seen[start] = true;
        while let Some(v) = stack.pop() {
            component.push(v);
            for w in 0..k {
                if !seen[w] && w != v && edge(v, w) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        component.sort_unstable();
        components.push(component);
    }
    components
}

/// Restriction of the frame to the listed columns.
pub fn subframe(f: &Frame, indices: &[usize]) -> Result<Frame> {
    let cols: Result<Vec<_>> = indices.iter().map(|&k| f.column(k)).collect();
    Frame::from_columns(f.field(), &cols?)
}

/// Tight constant of the frame restricted to its span: the nonzero
/// eigenvalues of `S_F` must agree. Returns `None` when they do not or the
/// frame is entirely zero.
pub fn tight_constant_for_span(f: &Frame, tol: &ToleranceConfig) -> Option<f64> {
    let spec = f.spectral(tol);
    if spec.upper <= 0.0 {
        return None;
    }
    let nonzero: Vec<f64> = spec
        .eigenvalues
        .iter()
        .copied()
        .filter(|&l| l > tol.rank_tol * spec.upper)
        .collect();
    let min = nonzero.first().copied()?;
    let max = nonzero.last().copied()?;
    ((max - min) <= tol.rel_tol * max).then(|| nonzero.iter().sum::<f64>() / nonzero.len() as f64)
}

/// Balanced unit-norm tight frame *for its span* (the frame-graph
/// decomposition criterion).
pub fn is_buntf_for_span(f: &Frame, tol: &ToleranceConfig) -> bool {
    is_balanced(f, tol) && is_unit_norm(f, tol) && tight_constant_for_span(f, tol).is_some()
}

// ---------------------------------------------------------------------------
// Planar spherical 2-designs
// ---------------------------------------------------------------------------

/// The frame `((cos theta_k, sin theta_k))_k` in `R^2`.
pub fn angle_frame(angles: &[f64]) -> Result<Frame> {
    if angles.is_empty() {
        return Err(FrameError::InvalidArgument("empty angle list".into()));
    }
    let mat = DMatrix::from_fn(2, angles.len(), |r, c| {
        cx(if r == 0 {
            angles[c].cos()
        } else {
            angles[c].sin()
        })
    });
    Frame::new(FrameField::Real, mat)
}

/// Exponential-sum test for a spherical 2-design on the unit circle:
/// both `sum_k e^{i theta_k}` and `sum_k e^{2 i theta_k}` vanish.
pub fn is_spherical_2_design_r2(angles: &[f64], tol: &ToleranceConfig) -> bool {
    let k = angles.len() as f64;
    let sum1: Complex64 = angles.iter().map(|&t| Complex64::from_polar(1.0, t)).sum();
    let sum2: Complex64 = angles
        .iter()
        .map(|&t| Complex64::from_polar(1.0, 2.0 * t))
        .sum();
    sum1.norm() <= tol.rel_tol * k && sum2.norm() <= tol.rel_tol * k
}
