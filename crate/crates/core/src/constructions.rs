//! Generators for the named balanced-frame families and the
//! combination/lift constructions.
//!
//! Family generators (roots of unity, harmonic, Hadamard, crosses and
//! eutactic stars, partition and simplex frames) return plain frames and
//! error on malformed input. Combination and lift builders never assume
//! their theorem's hypotheses: they build the candidate frame
//! unconditionally and return it together with a checklist of the
//! hypotheses, each evaluated numerically. `Construction::into_verified`
//! converts a failed checklist into an error for callers that want the
//! claimed object or nothing.
//!
//! All index arguments (Fourier/Hadamard row selections) are 0-based; row
//! 0 of the Fourier matrix is the constant row.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::FrameError;
use crate::frame::{Frame, FrameField};
use crate::linalg::{self, cx};
use crate::predicates;
use crate::tolerance::ToleranceConfig;
use crate::Result;

// ---------------------------------------------------------------------------
// Hypothesis reporting
// ---------------------------------------------------------------------------

/// One numerically evaluated theorem hypothesis.
#[derive(Clone, Debug, serde::Serialize)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl HypothesisCheck {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        HypothesisCheck {
            name,
            passed,
            detail,
        }
    }

    fn close(name: &'static str, actual: f64, required: f64, tol: &ToleranceConfig) -> Self {
        let passed = (actual - required).abs() <= tol.zero_tol(required.abs());
        HypothesisCheck::new(
            name,
            passed,
            format!("required {required:.12}, got {actual:.12}"),
        )
    }

    fn zero(name: &'static str, magnitude: f64, threshold: f64) -> Self {
        HypothesisCheck::new(
            name,
            magnitude <= threshold,
            format!("magnitude {magnitude:.3e}, threshold {threshold:.3e}"),
        )
    }

    fn predicate(name: &'static str, passed: bool) -> Self {
        HypothesisCheck::new(name, passed, String::new())
    }
}

/// A built frame plus the hypothesis checklist of the theorem that
/// justifies the claim. When every check passes the frame satisfies
/// `claim`; when a hypothesis fails, the theorem's `iff` direction says
/// the claim fails too.
#[derive(Clone, Debug)]
pub struct Construction {
    pub frame: Frame,
    pub claim: &'static str,
    pub checks: Vec<HypothesisCheck>,
}

impl Construction {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&HypothesisCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    /// The frame, provided every hypothesis held.
    pub fn into_verified(self) -> Result<Frame> {
        if self.all_pass() {
            Ok(self.frame)
        } else {
            let names: Vec<&str> = self.failed().iter().map(|c| c.name).collect();
            Err(FrameError::HypothesesFailed(names.join(", ")))
        }
    }
}

// ---------------------------------------------------------------------------
// Section 7 families
// ---------------------------------------------------------------------------

/// The K-th roots of unity as a real planar frame: columns
/// `(cos 2 pi k / K, sin 2 pi k / K)`, `k = 0..K-1`. A BUNTF for `R^2`
/// with tight constant `K/2`; requires `K >= 3`.
pub fn roots_of_unity_frame(k: usize) -> Result<Frame> {
    if k < 3 {
        return Err(FrameError::InvalidArgument(format!(
            "roots-of-unity frame needs K >= 3, got {k}"
        )));
    }
    let mat = DMatrix::from_fn(2, k, |r, c| {
        let theta = 2.0 * std::f64::consts::PI * c as f64 / k as f64;
        cx(if r == 0 { theta.cos() } else { theta.sin() })
    });
    Frame::new(FrameField::Real, mat)
}

/// Submatrix of the `K x K` Fourier matrix
/// `F(r, l) = K^{-1/2} e^{2 pi i r l / K}` restricted to the given rows
/// (0-based, distinct). Equal-norm Parseval; balanced iff row 0 (the
/// constant row) is not selected.
pub fn harmonic_frame(k: usize, rows: &[usize]) -> Result<Frame> {
    validate_rows(k, rows)?;
    let scale = 1.0 / (k as f64).sqrt();
    let mat = DMatrix::from_fn(rows.len(), k, |r, l| {
        let angle = 2.0 * std::f64::consts::PI * (rows[r] as f64) * (l as f64) / k as f64;
        Complex64::from_polar(scale, angle)
    });
    let frame = Frame::new(FrameField::Complex, mat)?;
    // each non-constant Fourier row sums to zero, so the subframe is
    // balanced exactly when row 0 is left out
    debug_assert_eq!(
        predicates::is_balanced(&frame, &ToleranceConfig::default()),
        !rows.contains(&0)
    );
    Ok(frame)
}

fn validate_rows(k: usize, rows: &[usize]) -> Result<()> {
    if rows.is_empty() {
        return Err(FrameError::InvalidArgument("no rows selected".into()));
    }
    let mut seen = vec![false; k];
    for &r in rows {
        if r >= k {
            return Err(FrameError::IndexOutOfRange {
                context: "row selection",
                index: r,
                len: k,
            });
        }
        if seen[r] {
            return Err(FrameError::InvalidArgument(format!("duplicate row {r}")));
        }
        seen[r] = true;
    }
    Ok(())
}

/// Sylvester-Hadamard matrix of the given order (a power of two):
/// `H_{2n} = [[H, H], [H, -H]]` starting from `(1)`.
pub fn sylvester_hadamard(order: usize) -> Result<DMatrix<f64>> {
    if order == 0 || !order.is_power_of_two() {
        return Err(FrameError::InvalidArgument(format!(
            "Sylvester-Hadamard order must be a power of two, got {order}"
        )));
    }
    let mut h = DMatrix::from_element(1, 1, 1.0);
    while h.nrows() < order {
        let n = h.nrows();
        h = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
            let sign = if r >= n && c >= n { -1.0 } else { 1.0 };
            sign * h[(r % n, c % n)]
        });
    }
    Ok(h)
}

/// Row-selected subframe of a Hadamard matrix (0-based rows). The input
/// must be a genuine Hadamard matrix (`+-1` entries, `H H^t = n I`). The
/// raw subframe is an equal-norm tight frame with constant `n`; it is
/// balanced iff every selected row sums to zero.
pub fn hadamard_subframe(h: &DMatrix<f64>, rows: &[usize]) -> Result<Frame> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(FrameError::InvalidArgument(
            "Hadamard matrix must be square".into(),
        ));
    }
    if h.iter().any(|&x| x != 1.0 && x != -1.0) {
        return Err(FrameError::InvalidArgument("entries must be +-1".into()));
    }
    let hht = h * h.transpose();
    let id = DMatrix::from_diagonal_element(n, n, n as f64);
    if (hht - id).amax() > 1e-9 * n as f64 {
        return Err(FrameError::InvalidArgument(
            "matrix is not Hadamard: H H^t != n I".into(),
        ));
    }
    validate_rows(n, rows)?;
    let mat = DMatrix::from_fn(rows.len(), n, |r, c| cx(h[(rows[r], c)]));
    Frame::new(FrameField::Real, mat)
}

/// The cross `(+-u_1, ..., +-u_d)` built from an orthonormal basis:
/// columns `[U, -U]`. A BUNTF with tight constant 2.
pub fn cross_frame(u: &Frame) -> Result<Frame> {
    let tol = ToleranceConfig::default();
    if !predicates::is_orthonormal_basis(u, &tol) {
        return Err(FrameError::InvalidArgument(
            "cross requires an orthonormal basis".into(),
        ));
    }
    let d = u.dim();
    let mat = DMatrix::from_fn(d, 2 * d, |r, c| {
        if c < d {
            u.matrix()[(r, c)]
        } else {
            -u.matrix()[(r, c - d)]
        }
    });
    Frame::new(u.field(), mat)
}

/// Eutactic star: the cross projected by an orthogonal projection `P`
/// (`P^2 = P = P^*`). A balanced 2-tight frame for `im(P)`.
pub fn eutactic_star(u: &Frame, p: &DMatrix<Complex64>, tol: &ToleranceConfig) -> Result<Frame> {
    if p.nrows() != u.dim() || p.ncols() != u.dim() {
        return Err(FrameError::ShapeMismatch {
            context: "eutactic star projection",
            detail: format!(
                "projection is {}x{}, basis dim {}",
                p.nrows(),
                p.ncols(),
                u.dim()
            ),
        });
    }
    let scale = linalg::max_abs_entry(p).max(1.0);
    let idempotent = linalg::matrices_close(&(p * p), p, tol.rel_tol * scale);
    let hermitian = linalg::matrices_close(&p.adjoint(), p, tol.rel_tol * scale);
    if !idempotent || !hermitian {
        return Err(FrameError::InvalidArgument(
            "P is not an orthogonal projection (needs P^2 = P = P^*)".into(),
        ));
    }
    let cross = cross_frame(u)?;
    let projected = p * cross.matrix();
    let field = if u.field() == FrameField::Real && p.iter().all(|z| z.im == 0.0) {
        FrameField::Real
    } else {
        FrameField::Complex
    };
    Ok(Frame::from_operator_result(field, projected))
}

/// A partition of `K` into nondecreasing positive parts; the derived
/// partition frame lives in dimension `d = K - n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSpec {
    eta: Vec<usize>,
}

impl PartitionSpec {
    pub fn new(eta: Vec<usize>) -> Result<Self> {
        if eta.is_empty() {
            return Err(FrameError::InvalidArgument("empty partition".into()));
        }
        if eta[0] < 1 || eta.windows(2).any(|w| w[0] > w[1]) {
            return Err(FrameError::InvalidArgument(
                "partition parts must be nondecreasing positive integers".into(),
            ));
        }
        Ok(PartitionSpec { eta })
    }

    pub fn eta(&self) -> &[usize] {
        &self.eta
    }

    /// `K`, the number of frame vectors.
    pub fn total(&self) -> usize {
        self.eta.iter().sum()
    }

    /// `n`, the number of parts.
    pub fn parts(&self) -> usize {
        self.eta.len()
    }

    /// `d = K - n`, the frame dimension.
    pub fn dim(&self) -> usize {
        self.total() - self.parts()
    }

    /// The block-diagonal Gram matrix with blocks
    /// `B_j = I - (1/eta_j) 1 1^t`.
    pub fn gram(&self) -> DMatrix<f64> {
        let k = self.total();
        let mut g = DMatrix::zeros(k, k);
        let mut offset = 0;
        for &block in &self.eta {
            for r in 0..block {
                for c in 0..block {
                    g[(offset + r, offset + c)] = if r == c {
                        (block as f64 - 1.0) / block as f64
                    } else {
                        -1.0 / block as f64
                    };
                }
            }
            offset += block;
        }
        g
    }
}

/// The eta-partition frame: a balanced Parseval frame for `R^{K-n}` whose
/// Gram is the block projection of [`PartitionSpec::gram`], realised from
/// the unit-eigenvalue eigenvectors of that Gram. Equal-norm iff all parts
/// are equal; `eta = (K)` yields the simplex frame.
pub fn partition_frame(spec: &PartitionSpec) -> Result<Frame> {
    let d = spec.dim();
    if d == 0 {
        return Err(FrameError::InvalidArgument(
            "partition frame needs d = K - n >= 1 (some part must exceed 1)".into(),
        ));
    }
    let g = spec.gram().map(cx);
    let (values, vectors) = linalg::hermitian_eigen(&g);
    let k = spec.total();
    // eigenvalues are exactly 0 and 1; keep the d unit ones (ascending order)
    debug_assert!(values[k - d] > 0.5 && values[k - d - 1] < 0.5);
    let mat = DMatrix::from_fn(d, k, |r, c| {
        let col = k - d + r;
        vectors[(c, col)].conj() * cx(values[col].sqrt())
    });
    Ok(Frame::from_operator_result(FrameField::Real, mat))
}

/// The simplex frame with `d + 1` vectors in `R^d`: Gram
/// `I - ee^t/(d+1)`, balanced Parseval, `||f_k||^2 = d/(d+1)`.
pub fn simplex_frame(d: usize) -> Result<Frame> {
    if d == 0 {
        return Err(FrameError::InvalidArgument("simplex needs d >= 1".into()));
    }
    partition_frame(&PartitionSpec::new(vec![d + 1])?)
}

/// Append `-sum_k f_k` so the result is balanced; requires a spanning
/// input (spanning is preserved).
pub fn append_balancing_vector(f: &Frame, tol: &ToleranceConfig) -> Result<Frame> {
    if !predicates::is_frame(f, tol) {
        return Err(FrameError::NotAFrame(
            "append_balancing_vector requires a spanning frame".into(),
        ));
    }
    f.with_appended_column(&(-f.column_sum()))
}

// ---------------------------------------------------------------------------
// Section 8 combinations
// ---------------------------------------------------------------------------

fn buntf_check(name: &'static str, f: &Frame, tol: &ToleranceConfig) -> HypothesisCheck {
    HypothesisCheck::predicate(name, predicates::is_buntf(f, tol))
}

fn combined_field(frames: &[&Frame]) -> FrameField {
    if frames.iter().any(|f| f.field() == FrameField::Complex) {
        FrameField::Complex
    } else {
        FrameField::Real
    }
}

/// Disjoint union `F ∪ G` in the orthogonal direct sum: block-embedded
/// columns. BUNTF iff both inputs are BUNTFs with matching redundancy
/// `K/d1 = L/d2`.
pub fn disjoint_union(f: &Frame, g: &Frame, tol: &ToleranceConfig) -> Construction {
    let (d1, k) = (f.dim(), f.len());
    let (d2, l) = (g.dim(), g.len());
    let mat = DMatrix::from_fn(d1 + d2, k + l, |r, c| {
        if r < d1 && c < k {
            f.matrix()[(r, c)]
        } else if r >= d1 && c >= k {
            g.matrix()[(r - d1, c - k)]
        } else {
            cx(0.0)
        }
    });
    let frame = Frame::new(combined_field(&[f, g]), mat).expect("block embedding is finite");
    let ratio_f = k as f64 / d1 as f64;
    let ratio_g = l as f64 / d2 as f64;
    Construction {
        frame,
        claim: "balanced unit-norm tight frame",
        checks: vec![
            buntf_check("first factor is a BUNTF", f, tol),
            buntf_check("second factor is a BUNTF", g, tol),
            HypothesisCheck::close(
                "redundancy ratios match (K/d1 = L/d2)",
                ratio_f,
                ratio_g,
                tol,
            ),
        ],
    }
}

fn default_direct_sum_scalars(d1: usize, d2: usize) -> (Complex64, Complex64) {
    let total = (d1 + d2) as f64;
    (
        cx((d1 as f64 / total).sqrt()),
        cx((d2 as f64 / total).sqrt()),
    )
}

fn modulus_checks(
    alpha: Complex64,
    beta: Complex64,
    d1: usize,
    d2: usize,
    tol: &ToleranceConfig,
) -> [HypothesisCheck; 2] {
    let total = (d1 + d2) as f64;
    [
        HypothesisCheck::close(
            "|alpha|^2 = d1/(d1+d2)",
            alpha.norm_sqr(),
            d1 as f64 / total,
            tol,
        ),
        HypothesisCheck::close(
            "|beta|^2 = d2/(d1+d2)",
            beta.norm_sqr(),
            d2 as f64 / total,
            tol,
        ),
    ]
}

/// Inner direct sum `alpha F ⊕ beta G`: columns `(alpha f_k, beta g_k)`.
/// Needs equal lengths (structural); BUNTF iff both factors are BUNTFs,
/// the cross-Gramian `T_F T_G^*` vanishes, and the moduli split the
/// dimensions. Defaults take the positive real roots.
pub fn inner_direct_sum(
    f: &Frame,
    g: &Frame,
    alpha: Option<Complex64>,
    beta: Option<Complex64>,
    tol: &ToleranceConfig,
) -> Result<Construction> {
    if f.len() != g.len() {
        return Err(FrameError::ShapeMismatch {
            context: "inner direct sum",
            detail: format!("K mismatch: {} vs {}", f.len(), g.len()),
        });
    }
    let (d1, d2) = (f.dim(), g.dim());
    let defaults = default_direct_sum_scalars(d1, d2);
    let alpha = alpha.unwrap_or(defaults.0);
    let beta = beta.unwrap_or(defaults.1);
    let mat = DMatrix::from_fn(d1 + d2, f.len(), |r, c| {
        if r < d1 {
            alpha * f.matrix()[(r, c)]
        } else {
            beta * g.matrix()[(r - d1, c)]
        }
    });
    let field = if combined_field(&[f, g]) == FrameField::Real && alpha.im == 0.0 && beta.im == 0.0
    {
        FrameField::Real
    } else {
        FrameField::Complex
    };
    let cross = f.matrix() * g.matrix().adjoint();
    let cross_scale = f.len() as f64 * f.max_column_norm() * g.max_column_norm();
    let [a_check, b_check] = modulus_checks(alpha, beta, d1, d2, tol);
    let mut checks = vec![
        buntf_check("first factor is a BUNTF", f, tol),
        buntf_check("second factor is a BUNTF", g, tol),
        HypothesisCheck::zero(
            "cross-Gramian T_F T_G^* = 0",
            linalg::max_abs_entry(&cross),
            tol.zero_tol(cross_scale),
        ),
    ];
    checks.push(a_check);
    checks.push(b_check);
    Ok(Construction {
        frame: Frame::new(field, mat).expect("finite"),
        claim: "balanced unit-norm tight frame",
        checks,
    })
}

/// The sum `alpha F +^ beta G`: all `K * L` pairs `(alpha f_k, beta g_l)`
/// (k-major order). BUNTF iff both factors are BUNTFs and the moduli
/// split the dimensions.
pub fn sum_combine(
    f: &Frame,
    g: &Frame,
    alpha: Option<Complex64>,
    beta: Option<Complex64>,
    tol: &ToleranceConfig,
) -> Construction {
    let (d1, d2) = (f.dim(), g.dim());
    let (k, l) = (f.len(), g.len());
    let defaults = default_direct_sum_scalars(d1, d2);
    let alpha = alpha.unwrap_or(defaults.0);
    let beta = beta.unwrap_or(defaults.1);
    let mat = DMatrix::from_fn(d1 + d2, k * l, |r, c| {
        let (ki, li) = (c / l, c % l);
        if r < d1 {
            alpha * f.matrix()[(r, ki)]
        } else {
            beta * g.matrix()[(r - d1, li)]
        }
    });
    let field = if combined_field(&[f, g]) == FrameField::Real && alpha.im == 0.0 && beta.im == 0.0
    {
        FrameField::Real
    } else {
        FrameField::Complex
    };
    let [a_check, b_check] = modulus_checks(alpha, beta, d1, d2, tol);
    Construction {
        frame: Frame::new(field, mat).expect("finite"),
        claim: "balanced unit-norm tight frame",
        checks: vec![
            buntf_check("first factor is a BUNTF", f, tol),
            buntf_check("second factor is a BUNTF", g, tol),
            a_check,
            b_check,
        ],
    }
}

/// Tensor product: Kronecker columns `f_j ⊗ g_l` (j-major order). BUNTF
/// iff both factors are tight, at least one is balanced, and every norm
/// product `||f_j|| ||g_l||` is 1.
pub fn tensor_product(f: &Frame, g: &Frame, tol: &ToleranceConfig) -> Construction {
    let (d1, d2) = (f.dim(), g.dim());
    let (k, l) = (f.len(), g.len());
    let mat = DMatrix::from_fn(d1 * d2, k * l, |r, c| {
        let (ri, rj) = (r / d2, r % d2);
        let (ci, cj) = (c / l, c % l);
        f.matrix()[(ri, ci)] * g.matrix()[(rj, cj)]
    });
    let norm_products_ok = (0..k)
        .all(|j| (0..l).all(|m| (f.column_norm(j) * g.column_norm(m) - 1.0).abs() <= tol.rel_tol));
    Construction {
        frame: Frame::new(combined_field(&[f, g]), mat).expect("finite"),
        claim: "balanced unit-norm tight frame",
        checks: vec![
            HypothesisCheck::predicate("first factor is tight", predicates::is_tight(f, tol)),
            HypothesisCheck::predicate("second factor is tight", predicates::is_tight(g, tol)),
            HypothesisCheck::predicate(
                "some factor is balanced",
                predicates::is_balanced(f, tol) || predicates::is_balanced(g, tol),
            ),
            HypothesisCheck::predicate("all norm products are 1", norm_products_ok),
        ],
    }
}

// ---------------------------------------------------------------------------
// Section 8 lifts (the one-dimensional factor is fixed to the scalar 1)
// ---------------------------------------------------------------------------

fn positive_root(modulus_sq: f64) -> Option<Complex64> {
    (modulus_sq > 0.0).then(|| cx(modulus_sq.sqrt()))
}

fn lift_field(frames: &[&Frame], scalars: &[Complex64]) -> FrameField {
    if combined_field(frames) == FrameField::Real && scalars.iter().all(|z| z.im == 0.0) {
        FrameField::Real
    } else {
        FrameField::Complex
    }
}

/// Append one antipodal point after a simple lift:
/// `(alpha f_k, beta)_k ∪ (0, -1)`. BUNTF for `H_{d1} ⊕ R` iff `F` is a
/// BUNTF with `K = d1 + 1`, `|alpha|^2 = 1 - 1/K^2`, `|beta|^2 = 1/K^2`.
/// Starting from the third roots of unity this produces the tetrahedron.
pub fn lift_append_antipodal_point(
    f: &Frame,
    alpha: Option<Complex64>,
    beta: Option<Complex64>,
    tol: &ToleranceConfig,
) -> Construction {
    let k = f.len() as f64;
    let alpha = alpha
        .or_else(|| positive_root(1.0 - 1.0 / (k * k)))
        .unwrap_or_else(|| cx(1.0));
    let beta = beta.unwrap_or_else(|| cx(1.0 / k));
    let d1 = f.dim();
    let mat = DMatrix::from_fn(d1 + 1, f.len() + 1, |r, c| {
        if c < f.len() {
            if r < d1 {
                alpha * f.matrix()[(r, c)]
            } else {
                beta
            }
        } else if r < d1 {
            cx(0.0)
        } else {
            cx(-1.0)
        }
    });
    Construction {
        frame: Frame::new(lift_field(&[f], &[alpha, beta]), mat).expect("finite"),
        claim: "balanced unit-norm tight frame",
        checks: vec![
            buntf_check("base frame is a BUNTF", f, tol),
            HypothesisCheck::close("K = d1 + 1", k, (d1 + 1) as f64, tol),
            HypothesisCheck::close(
                "|alpha|^2 = 1 - 1/K^2",
                alpha.norm_sqr(),
                1.0 - 1.0 / (k * k),
                tol,
            ),
            HypothesisCheck::close("|beta|^2 = 1/K^2", beta.norm_sqr(), 1.0 / (k * k), tol),
        ],
    }
}

/// Add two antipodal unit vectors along a fresh coordinate:
/// `(f_k, 0)_k ∪ (0, 1) ∪ (0, -1)`. BUNTF iff `F` is a BUNTF with
/// `K = 2 d1`; from the fourth roots of unity this is the octahedron.
pub fn lift_two_antipodal(f: &Frame, tol: &ToleranceConfig) -> Construction {
    let d1 = f.dim();
    let k = f.len();
    let mat = DMatrix::from_fn(d1 + 1, k + 2, |r, c| {
        if c < k {
            if r < d1 {
                f.matrix()[(r, c)]
            } else {
                cx(0.0)
            }
        } else if r < d1 {
            cx(0.0)
        } else if c == k {
            cx(1.0)
        } else {
            cx(-1.0)
        }
    });
    Construction {
        frame: Frame::new(f.field(), mat).expect("finite"),
        claim: "balanced unit-norm tight frame",
        checks: vec![
            buntf_check("base frame is a BUNTF", f, tol),
            HypothesisCheck::close("K = 2 d1", k as f64, 2.0 * d1 as f64, tol),
        ],
    }
}

/// Symmetric simple lift `(alpha F ⊕ (beta_k)) ∪ (alpha G ⊕ (-beta_k))`.
/// BUNTF for `H_d ⊕ R` iff both factors are BUNTFs,
/// `sum conj(beta_k) f_k = sum conj(beta_k) g_k`, `|alpha|^2 = d/(d+1)`
/// and `|beta_k|^2 = 1/(d+1)`. The hexahedron arises from the fourth
/// roots of unity with constant `beta_k`.
pub fn symmetric_simple_lift(
    f: &Frame,
    g: &Frame,
    alpha: Option<Complex64>,
    betas: Option<&[Complex64]>,
    tol: &ToleranceConfig,
) -> Result<Construction> {
    if f.dim() != g.dim() || f.len() != g.len() {
        return Err(FrameError::ShapeMismatch {
            context: "symmetric simple lift",
            detail: format!(
                "factors must share shape, got {}x{} and {}x{}",
                f.dim(),
                f.len(),
                g.dim(),
                g.len()
            ),
        });
    }
    let d = f.dim();
    let k = f.len();
    let default_beta = cx(1.0 / ((d + 1) as f64).sqrt());
    let betas: Vec<Complex64> = match betas {
        Some(b) if b.len() != k => {
            return Err(FrameError::DimensionMismatch {
                context: "beta coefficients",
                expected: k,
                got: b.len(),
            })
        }
        Some(b) => b.to_vec(),
        None => vec![default_beta; k],
    };
    let alpha = alpha
        .or_else(|| positive_root(d as f64 / (d + 1) as f64))
        .expect("d >= 1");

    let mat = DMatrix::from_fn(d + 1, 2 * k, |r, c| {
        let (frame, sign, idx) = if c < k {
            (f, cx(1.0), c)
        } else {
            (g, cx(-1.0), c - k)
        };
        if r < d {
            alpha * frame.matrix()[(r, idx)]
        } else {
            sign * betas[idx]
        }
    });

    let weighted = |fr: &Frame| -> DVector<Complex64> {
        let mut acc = DVector::zeros(d);
        for (idx, col) in fr.columns_iter().enumerate() {
            acc += col * betas[idx].conj();
        }
        acc
    };
    let sum_gap = (weighted(f) - weighted(g)).norm();
    let beta_scale = betas.iter().map(|b| b.norm()).fold(0.0, f64::max);
    let beta_moduli_ok = betas
        .iter()
        .all(|b| (b.norm_sqr() - 1.0 / (d + 1) as f64).abs() <= tol.rel_tol);

    let mut scalars = vec![alpha];
    scalars.extend_from_slice(&betas);
    Ok(Construction {
        frame: Frame::new(lift_field(&[f, g], &scalars), mat).expect("finite"),
        claim: "balanced unit-norm tight frame",
        checks: vec![
            buntf_check("first factor is a BUNTF", f, tol),
            buntf_check("second factor is a BUNTF", g, tol),
            HypothesisCheck::zero(
                "weighted sums agree",
                sum_gap,
                tol.zero_tol(k as f64 * beta_scale * f.max_column_norm().max(g.max_column_norm())),
            ),
            HypothesisCheck::close(
                "|alpha|^2 = d/(d+1)",
                alpha.norm_sqr(),
                d as f64 / (d + 1) as f64,
                tol,
            ),
            HypothesisCheck::predicate("|beta_k|^2 = 1/(d+1)", beta_moduli_ok),
        ],
    })
}

/// Partial simple lift `((f_k, 0)) ∪ (alpha G ⊕ beta)`: `F` a UNTF with
/// `K` vectors, `G` a BUNTF with `L` vectors, both for `H_{d1}`. UNTF for
/// `H_{d1} ⊕ R` iff `L d1 > K`, `|alpha|^2 = (d1 L - K)/((d1+1) L)` and
/// `|beta|^2 = (K + L)/((d1+1) L)`. The result is generally not balanced.
pub fn partial_simple_lift(
    f: &Frame,
    g: &Frame,
    alpha: Option<Complex64>,
    beta: Option<Complex64>,
    tol: &ToleranceConfig,
) -> Result<Construction> {
    if f.dim() != g.dim() {
        return Err(FrameError::ShapeMismatch {
            context: "partial simple lift",
            detail: format!("dimension mismatch: {} vs {}", f.dim(), g.dim()),
        });
    }
    let d1 = f.dim();
    let (k, l) = (f.len(), g.len());
    let alpha_sq = (d1 as f64 * l as f64 - k as f64) / ((d1 + 1) as f64 * l as f64);
    let beta_sq = (k + l) as f64 / ((d1 + 1) as f64 * l as f64);
    let alpha = match alpha.or_else(|| positive_root(alpha_sq)) {
        Some(a) => a,
        None => {
            return Err(FrameError::InvalidArgument(format!(
                "cannot default alpha: required |alpha|^2 = {alpha_sq} is not positive (needs L d1 > K); pass alpha explicitly"
            )))
        }
    };
    let beta = beta
        .or_else(|| positive_root(beta_sq))
        .expect("beta_sq > 0");

    let mat = DMatrix::from_fn(d1 + 1, k + l, |r, c| {
        if c < k {
            if r < d1 {
                f.matrix()[(r, c)]
            } else {
                cx(0.0)
            }
        } else if r < d1 {
            alpha * g.matrix()[(r, c - k)]
        } else {
            beta
        }
    });
    Ok(Construction {
        frame: Frame::new(lift_field(&[f, g], &[alpha, beta]), mat).expect("finite"),
        claim: "unit-norm tight frame",
        checks: vec![
            HypothesisCheck::predicate(
                "first factor is a UNTF",
                predicates::is_unit_norm(f, tol) && predicates::is_tight(f, tol),
            ),
            buntf_check("second factor is a BUNTF", g, tol),
            HypothesisCheck::new(
                "L d1 > K",
                l * d1 > k,
                format!("L d1 = {}, K = {k}", l * d1),
            ),
            HypothesisCheck::close(
                "|alpha|^2 = (d1 L - K)/((d1+1) L)",
                alpha.norm_sqr(),
                alpha_sq,
                tol,
            ),
            HypothesisCheck::close(
                "|beta|^2 = (K + L)/((d1+1) L)",
                beta.norm_sqr(),
                beta_sq,
                tol,
            ),
        ],
    })
}

/// Symmetric partial lift
/// `((f_k, 0)) ∪ (alpha G ⊕ beta) ∪ (alpha G~ ⊕ (-beta))` with `F`, `G`,
/// `G~` BUNTFs for `H_{d1}`. BUNTF for `H_{d1} ⊕ R` iff
/// `T_G e = T_G~ e`, `K < 2 d1 L`,
/// `|alpha|^2 = (2 d1 L - K)/(2 (d1+1) L)` and
/// `|beta|^2 = (2 L + K)/(2 (d1+1) L)`.
pub fn symmetric_partial_lift(
    f: &Frame,
    g: &Frame,
    g_tilde: &Frame,
    alpha: Option<Complex64>,
    beta: Option<Complex64>,
    tol: &ToleranceConfig,
) -> Result<Construction> {
    if f.dim() != g.dim() || g.dim() != g_tilde.dim() || g.len() != g_tilde.len() {
        return Err(FrameError::ShapeMismatch {
            context: "symmetric partial lift",
            detail: "F, G, G~ must share the dimension and G, G~ the length".into(),
        });
    }
    let d1 = f.dim();
    let (k, l) = (f.len(), g.len());
    let alpha_sq = (2.0 * (d1 * l) as f64 - k as f64) / (2.0 * ((d1 + 1) * l) as f64);
    let beta_sq = (2 * l + k) as f64 / (2.0 * ((d1 + 1) * l) as f64);
    let alpha = match alpha.or_else(|| positive_root(alpha_sq)) {
        Some(a) => a,
        None => {
            return Err(FrameError::InvalidArgument(format!(
                "cannot default alpha: required |alpha|^2 = {alpha_sq} is not positive (needs K < 2 d1 L); pass alpha explicitly"
            )))
        }
    };
    let beta = beta
        .or_else(|| positive_root(beta_sq))
        .expect("beta_sq > 0");

    let mat = DMatrix::from_fn(d1 + 1, k + 2 * l, |r, c| {
        if c < k {
            if r < d1 {
                f.matrix()[(r, c)]
            } else {
                cx(0.0)
            }
        } else {
            let (fr, sign, idx) = if c < k + l {
                (g, cx(1.0), c - k)
            } else {
                (g_tilde, cx(-1.0), c - k - l)
            };
            if r < d1 {
                alpha * fr.matrix()[(r, idx)]
            } else {
                sign * beta
            }
        }
    });
    let sum_gap = (g.column_sum() - g_tilde.column_sum()).norm();
    Ok(Construction {
        frame: Frame::new(lift_field(&[f, g, g_tilde], &[alpha, beta]), mat).expect("finite"),
        claim: "balanced unit-norm tight frame",
        checks: vec![
            buntf_check("first factor is a BUNTF", f, tol),
            buntf_check("second factor is a BUNTF", g, tol),
            buntf_check("third factor is a BUNTF", g_tilde, tol),
            HypothesisCheck::zero(
                "T_G e = T_G~ e",
                sum_gap,
                tol.zero_tol(l as f64 * g.max_column_norm().max(g_tilde.max_column_norm())),
            ),
            HypothesisCheck::new(
                "K < 2 d1 L",
                k < 2 * d1 * l,
                format!("K = {k}, 2 d1 L = {}", 2 * d1 * l),
            ),
            HypothesisCheck::close(
                "|alpha|^2 = (2 d1 L - K)/(2 (d1+1) L)",
                alpha.norm_sqr(),
                alpha_sq,
                tol,
            ),
            HypothesisCheck::close(
                "|beta|^2 = (2 L + K)/(2 (d1+1) L)",
                beta.norm_sqr(),
                beta_sq,
                tol,
            ),
        ],
    })
}

/// Union of lifted copies `⋃_m (alpha_m F_m ⊕ beta_m)` with
/// `|alpha_m|^2 + |beta_m|^2 = 1` (alpha taken as the positive root).
/// BUNTF for `H_{d1} ⊕ R` iff every `F_m` is a BUNTF, `sum beta_m = 0`
/// and `sum |beta_m|^2 = M/(d1+1)`.
pub fn multi_lift_union(
    frames: &[Frame],
    betas: &[Complex64],
    tol: &ToleranceConfig,
) -> Result<Construction> {
    if frames.len() < 2 {
        return Err(FrameError::InvalidArgument(
            "multi lift union needs M >= 2 frames".into(),
        ));
    }
    if betas.len() != frames.len() {
        return Err(FrameError::DimensionMismatch {
            context: "beta coefficients",
            expected: frames.len(),
            got: betas.len(),
        });
    }
    let d1 = frames[0].dim();
    let k = frames[0].len();
    if frames.iter().any(|fm| fm.dim() != d1 || fm.len() != k) {
        return Err(FrameError::ShapeMismatch {
            context: "multi lift union",
            detail: "all frames must share the same d and K".into(),
        });
    }
    let alphas: Vec<Complex64> = betas
        .iter()
        .map(|b| {
            let rem = 1.0 - b.norm_sqr();
            if rem < 0.0 {
                Err(FrameError::InvalidArgument(format!(
                    "|beta_m| = {} exceeds 1, no alpha_m with |alpha|^2 + |beta|^2 = 1 exists",
                    b.norm()
                )))
            } else {
                Ok(cx(rem.sqrt()))
            }
        })
        .collect::<Result<_>>()?;

    let m = frames.len();
    let mat = DMatrix::from_fn(d1 + 1, m * k, |r, c| {
        let (mi, ki) = (c / k, c % k);
        if r < d1 {
            alphas[mi] * frames[mi].matrix()[(r, ki)]
        } else {
            betas[mi]
        }
    });
    let beta_sum: Complex64 = betas.iter().sum();
    let beta_power: f64 = betas.iter().map(|b| b.norm_sqr()).sum();
    let refs: Vec<&Frame> = frames.iter().collect();
    let mut scalars = alphas.clone();
    scalars.extend_from_slice(betas);
    Ok(Construction {
        frame: Frame::new(lift_field(&refs, &scalars), mat).expect("finite"),
        claim: "balanced unit-norm tight frame",
        checks: vec![
            HypothesisCheck::predicate(
                "every factor is a BUNTF",
                frames.iter().all(|fm| predicates::is_buntf(fm, tol)),
            ),
            HypothesisCheck::zero(
                "sum beta_m = 0",
                beta_sum.norm(),
                tol.zero_tol(1.0) * m as f64,
            ),
            HypothesisCheck::close(
                "sum |beta_m|^2 = M/(d1+1)",
                beta_power,
                m as f64 / (d1 + 1) as f64,
                tol,
            ),
        ],
    })
}
