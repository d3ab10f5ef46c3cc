//! The frame data model: a `d x K` matrix of column vectors over the real
//! or complex field, together with the operator calculus built on it
//! (synthesis, analysis, frame operator, Gram matrix, spectral data).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::FrameError;
use crate::linalg::{self, cx};
use crate::tolerance::ToleranceConfig;
use crate::Result;

/// Scalar field of the ambient inner-product space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameField {
    Real,
    Complex,
}

/// A sequence of `K` vectors in `field^d`, stored column-major: column `k`
/// is the frame vector `f_k`. The matrix itself is the synthesis operator
/// in the standard bases.
///
/// A `Frame` value need not span; the predicates in [`crate::predicates`]
/// decide that, and operations that require spanning say so.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    field: FrameField,
    mat: DMatrix<Complex64>,
}

impl Frame {
    /// Build a frame from an explicit complex matrix. For `FrameField::Real`
    /// every entry must have zero imaginary part.
    pub fn new(field: FrameField, mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() == 0 || mat.ncols() == 0 {
            return Err(FrameError::InvalidFrameData(format!(
                "frame must have d >= 1 and K >= 1, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(FrameError::InvalidFrameData(
                "frame entries must be finite".into(),
            ));
        }
        if field == FrameField::Real && mat.iter().any(|z| z.im != 0.0) {
            return Err(FrameError::InvalidFrameData(
                "real frame carries a nonzero imaginary part".into(),
            ));
        }
        Ok(Frame { field, mat })
    }

    /// Build a real frame from an `f64` matrix.
    pub fn from_real(mat: DMatrix<f64>) -> Result<Self> {
        Frame::new(FrameField::Real, mat.map(cx))
    }

    /// Build a complex frame.
    pub fn from_complex(mat: DMatrix<Complex64>) -> Result<Self> {
        Frame::new(FrameField::Complex, mat)
    }

    /// Build from a list of column vectors (all of the same dimension).
    pub fn from_columns(field: FrameField, columns: &[DVector<Complex64>]) -> Result<Self> {
        if columns.is_empty() {
            return Err(FrameError::InvalidFrameData("no columns".into()));
        }
        let d = columns[0].len();
        if columns.iter().any(|c| c.len() != d) {
            return Err(FrameError::InvalidFrameData(
                "columns have differing dimensions".into(),
            ));
        }
        let mat = DMatrix::from_fn(d, columns.len(), |r, c| columns[c][r]);
        Frame::new(field, mat)
    }

    pub fn field(&self) -> FrameField {
        self.field
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Number of frame vectors `K`.
    pub fn len(&self) -> usize {
        self.mat.ncols()
    }

    pub fn is_empty(&self) -> bool {
        false // d >= 1 and K >= 1 by construction
    }

    /// The synthesis matrix `T_F` (the frame itself, `d x K`).
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Frame vector `f_k` (0-based `k`).
    pub fn column(&self, k: usize) -> Result<DVector<Complex64>> {
        if k >= self.len() {
            return Err(FrameError::IndexOutOfRange {
                context: "frame columns",
                index: k,
                len: self.len(),
            });
        }
        Ok(self.mat.column(k).into_owned())
    }

    pub fn columns_iter(&self) -> impl Iterator<Item = DVector<Complex64>> + '_ {
        (0..self.len()).map(|k| self.mat.column(k).into_owned())
    }

    pub fn column_norm(&self, k: usize) -> f64 {
        self.mat.column(k).norm()
    }

    pub fn max_column_norm(&self) -> f64 {
        (0..self.len())
            .map(|k| self.column_norm(k))
            .fold(0.0, f64::max)
    }

    /// `sum_k f_k`, the quantity whose vanishing defines balancedness.
    pub fn column_sum(&self) -> DVector<Complex64> {
        let mut sum = DVector::zeros(self.dim());
        for k in 0..self.len() {
            sum += self.mat.column(k);
        }
        sum
    }

    /// Synthesis `T_F c = sum_k c_k f_k`.
    pub fn synthesis_apply(&self, c: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        if c.len() != self.len() {
            return Err(FrameError::DimensionMismatch {
                context: "synthesis coefficients",
                expected: self.len(),
                got: c.len(),
            });
        }
        Ok(&self.mat * c)
    }

    /// Analysis `T_F^* f = (<f, f_k>)_k`, conjugate-linear in the frame
    /// vectors.
    pub fn analysis_apply(&self, f: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        if f.len() != self.dim() {
            return Err(FrameError::DimensionMismatch {
                context: "analysis input",
                expected: self.dim(),
                got: f.len(),
            });
        }
        Ok(self.mat.adjoint() * f)
    }

    /// Frame operator `S_F = T_F T_F^*` (`d x d`, Hermitian PSD).
    pub fn frame_operator(&self) -> DMatrix<Complex64> {
        linalg::hermitianize(&(&self.mat * self.mat.adjoint()))
    }

    /// Gram matrix `G_F = T_F^* T_F` (`K x K`, Hermitian PSD).
    pub fn gram(&self) -> GramMatrix {
        GramMatrix {
            entries: linalg::hermitianize(&(self.mat.adjoint() * &self.mat)),
        }
    }

    /// Eigenvalue data of the frame operator.
    pub fn spectral(&self, tol: &ToleranceConfig) -> SpectralData {
        let (mut values, _) = linalg::hermitian_eigen(&self.frame_operator());
        let lmax = values.last().copied().unwrap_or(0.0);
        // clamp eigenvalues that are zero up to rounding
        for v in values.iter_mut() {
            if *v < 0.0 && -*v <= tol.rel_tol * lmax.max(1.0) {
                *v = 0.0;
            }
        }
        let lower = values.first().copied().unwrap_or(0.0);
        let upper = values.last().copied().unwrap_or(0.0);
        let tight_constant = if upper > 0.0 && (upper - lower) <= tol.rel_tol * upper {
            Some(values.iter().sum::<f64>() / values.len() as f64)
        } else {
            None
        };
        SpectralData {
            eigenvalues: values,
            lower,
            upper,
            tight_constant,
        }
    }

    /// Same frame with every vector scaled by `s`.
    pub fn scaled(&self, s: Complex64) -> Frame {
        let field = if self.field == FrameField::Real && s.im != 0.0 {
            FrameField::Complex
        } else {
            self.field
        };
        Frame {
            field,
            mat: self.mat.map(|z| z * s),
        }
    }

    /// Columns normalised to unit norm; errors on a zero column.
    pub fn normalized_columns(&self) -> Result<Frame> {
        let mut mat = self.mat.clone();
        for k in 0..self.len() {
            let n = mat.column(k).norm();
            if n == 0.0 {
                return Err(FrameError::InvalidArgument(format!(
                    "column {k} has zero norm, cannot normalise"
                )));
            }
            let mut col = mat.column_mut(k);
            col /= cx(n);
        }
        Ok(Frame {
            field: self.field,
            mat,
        })
    }

    /// Frame with the listed column removed.
    pub fn without_column(&self, k: usize) -> Result<Frame> {
        if k >= self.len() {
            return Err(FrameError::IndexOutOfRange {
                context: "frame columns",
                index: k,
                len: self.len(),
            });
        }
        if self.len() == 1 {
            return Err(FrameError::InvalidArgument(
                "cannot delete the only column".into(),
            ));
        }
        Ok(Frame {
            field: self.field,
            mat: self.mat.clone().remove_column(k),
        })
    }

    /// Frame with `v` appended as an extra column.
    pub fn with_appended_column(&self, v: &DVector<Complex64>) -> Result<Frame> {
        if v.len() != self.dim() {
            return Err(FrameError::DimensionMismatch {
                context: "appended column",
                expected: self.dim(),
                got: v.len(),
            });
        }
        let k = self.len();
        let mut mat = self.mat.clone().insert_column(k, cx(0.0));
        mat.column_mut(k).copy_from(v);
        let field = if self.field == FrameField::Real && v.iter().any(|z| z.im != 0.0) {
            FrameField::Complex
        } else {
            self.field
        };
        Frame { field, mat }.validate()
    }

    fn validate(self) -> Result<Frame> {
        Frame::new(self.field, self.mat)
    }

    /// Wrap the result of an operator computation that is known to stay in
    /// `field` algebraically. For real frames, rounding residue in the
    /// imaginary parts (from phase-invariant spectral maps) is stripped;
    /// anything larger than rounding is an internal error.
    pub(crate) fn from_operator_result(field: FrameField, mat: DMatrix<Complex64>) -> Frame {
        let mat = match field {
            FrameField::Real => {
                let scale = mat.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
                let max_im = mat.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
                assert!(
                    max_im <= 1e-9 * scale,
                    "real-field operator result carries imaginary residue {max_im:.3e}"
                );
                mat.map(|z| cx(z.re))
            }
            FrameField::Complex => mat,
        };
        Frame::new(field, mat).expect("operator results are finite")
    }

    /// Apply a matrix on the left: `A F` (columns `A f_k`).
    pub fn left_multiplied(&self, a: &DMatrix<Complex64>) -> Result<Frame> {
        if a.ncols() != self.dim() {
            return Err(FrameError::ShapeMismatch {
                context: "left multiplication",
                detail: format!(
                    "operator is {}x{}, frame dim {}",
                    a.nrows(),
                    a.ncols(),
                    self.dim()
                ),
            });
        }
        let field = if self.field == FrameField::Real && a.iter().any(|z| z.im != 0.0) {
            FrameField::Complex
        } else {
            self.field
        };
        Frame::new(field, a * &self.mat)
    }
}

/// The `K x K` Gram matrix of pairwise inner products, entry `(k, l) =
/// <f_l, f_k>`, together with the distinguished all-ones vector `e`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    entries: DMatrix<Complex64>,
}

impl GramMatrix {
    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// The all-ones vector `e` of length `K`.
    pub fn e(&self) -> DVector<Complex64> {
        all_ones(self.dim())
    }

    /// `G e`, whose vanishing is one of the balancedness characterisations.
    pub fn apply_to_e(&self) -> DVector<Complex64> {
        &self.entries * self.e()
    }
}

/// All-ones vector of length `k`.
pub fn all_ones(k: usize) -> DVector<Complex64> {
    DVector::from_element(k, cx(1.0))
}

/// Eigenvalues of the frame operator with the optimal frame bounds.
///
/// `lower` is the optimal lower frame bound `lambda_min(S_F)` (positive iff
/// the frame spans) and `upper` the optimal upper bound `lambda_max(S_F)`.
/// `tight_constant` is present when all eigenvalues agree within the
/// relative tolerance; a frame of zero vectors gets `None`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub tight_constant: Option<f64>,
}

// ---------------------------------------------------------------------------
// JSON interchange format
//
// {"field":"real"|"complex","d":2,"K":3,"columns":[[...],[...],[...]]}
// Real entries are plain numbers, complex entries are [re, im] pairs.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct FrameJson {
    field: FrameField,
    d: usize,
    #[serde(rename = "K")]
    k: usize,
    columns: Vec<Vec<serde_json::Value>>,
}

impl Frame {
    pub fn to_json_value(&self) -> serde_json::Value {
        let columns = (0..self.len())
            .map(|k| {
                (0..self.dim())
                    .map(|r| {
                        let z = self.mat[(r, k)];
                        match self.field {
                            FrameField::Real => serde_json::json!(z.re),
                            FrameField::Complex => serde_json::json!([z.re, z.im]),
                        }
                    })
                    .collect()
            })
            .collect();
        serde_json::to_value(FrameJson {
            field: self.field,
            d: self.dim(),
            k: self.len(),
            columns,
        })
        .expect("frame json is serialisable")
    }

    pub fn to_json_string(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Frame> {
        let parsed: FrameJson = serde_json::from_value(value)?;
        if parsed.columns.len() != parsed.k {
            return Err(FrameError::InvalidFrameData(format!(
                "expected K = {} columns, got {}",
                parsed.k,
                parsed.columns.len()
            )));
        }
        let mut mat = DMatrix::zeros(parsed.d, parsed.k);
        for (k, col) in parsed.columns.iter().enumerate() {
            if col.len() != parsed.d {
                return Err(FrameError::InvalidFrameData(format!(
                    "column {k} has {} entries, expected d = {}",
                    col.len(),
                    parsed.d
                )));
            }
            for (r, entry) in col.iter().enumerate() {
                mat[(r, k)] = parse_entry(parsed.field, entry)?;
            }
        }
        Frame::new(parsed.field, mat)
    }

    pub fn from_json_str(s: &str) -> Result<Frame> {
        Frame::from_json_value(serde_json::from_str(s)?)
    }
}

fn parse_entry(field: FrameField, v: &serde_json::Value) -> Result<Complex64> {
    let bad = || FrameError::InvalidFrameData(format!("bad {field:?} entry: {v}"));
    match field {
        FrameField::Real => v.as_f64().map(cx).ok_or_else(bad),
        FrameField::Complex => {
            let arr = v.as_array().ok_or_else(bad)?;
            if arr.len() != 2 {
                return Err(bad());
            }
            let re = arr[0].as_f64().ok_or_else(bad)?;
            let im = arr[1].as_f64().ok_or_else(bad)?;
            Ok(Complex64::new(re, im))
        }
    }
}

impl Serialize for Frame {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_value().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Frame {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        Frame::from_json_value(value).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn real_frame(d: usize, k: usize, data: &[f64]) -> Frame {
        Frame::from_real(DMatrix::from_row_slice(d, k, data)).unwrap()
    }

    #[test]
    fn synthesis_on_basis() {
        // F = {e1, e2}, c = (1, 1) -> (1, 1)
        let f = real_frame(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let c = DVector::from_vec(vec![cx(1.0), cx(1.0)]);
        let out = f.synthesis_apply(&c).unwrap();
        assert_eq!(out, DVector::from_vec(vec![cx(1.0), cx(1.0)]));
        assert!(f
            .synthesis_apply(&DVector::from_vec(vec![cx(1.0)]))
            .is_err());
    }

    #[test]
    fn analysis_on_basis() {
        // F = {e1, e2}, f = (3, 4) -> (3, 4)
        let f = real_frame(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let v = DVector::from_vec(vec![cx(3.0), cx(4.0)]);
        assert_eq!(f.analysis_apply(&v).unwrap(), v);
        assert!(f.analysis_apply(&DVector::from_vec(vec![cx(1.0)])).is_err());
    }

    #[test]
    fn analysis_conjugates_the_frame_vector() {
        // single complex vector f_1 = i, f = 1: <f, f_1> = 1 * conj(i) = -i
        let mat = DMatrix::from_vec(1, 1, vec![Complex64::new(0.0, 1.0)]);
        let f = Frame::from_complex(mat).unwrap();
        let coeff = f.analysis_apply(&DVector::from_vec(vec![cx(1.0)])).unwrap();
        assert_eq!(coeff[0], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn synthesis_matches_direct_summation() {
        // random 2x3 frozen values against a brute-force sum
        let f = real_frame(2, 3, &[0.3, -1.2, 0.7, 1.1, 0.4, -0.9]);
        let c = DVector::from_vec(vec![cx(0.5), cx(-1.0), cx(2.0)]);
        let mut expected = DVector::zeros(2);
        for k in 0..3 {
            expected += f.column(k).unwrap() * c[k];
        }
        let got = f.synthesis_apply(&c).unwrap();
        assert!((got - expected).norm() < 1e-14);
    }

    #[test]
    fn trace_identity() {
        // trace(S) = trace(G) = sum ||f_k||^2
        let f = real_frame(2, 3, &[0.3, -1.2, 0.7, 1.1, 0.4, -0.9]);
        let s = f.frame_operator();
        let g = f.gram();
        let norms: f64 = (0..3).map(|k| f.column_norm(k).powi(2)).sum();
        assert!((s.trace().re - norms).abs() < 1e-12);
        assert!((g.entries().trace().re - norms).abs() < 1e-12);
    }

    #[test]
    fn spectral_of_repeated_basis_vector() {
        // F = {e1, e2, e1}: eigenvalues {1, 2}
        let f = real_frame(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        let spec = f.spectral(&ToleranceConfig::default());
        assert!((spec.lower - 1.0).abs() < 1e-12);
        assert!((spec.upper - 2.0).abs() < 1e-12);
        assert!(spec.tight_constant.is_none());
    }

    #[test]
    fn zero_frame_spectrum() {
        let f = real_frame(2, 2, &[0.0; 4]);
        let spec = f.spectral(&ToleranceConfig::default());
        assert_eq!(spec.lower, 0.0);
        assert_eq!(spec.tight_constant, None);
    }

    #[test]
    fn rejects_bad_frames() {
        assert!(Frame::from_real(DMatrix::from_row_slice(1, 1, &[f64::NAN])).is_err());
        let complex_entry = DMatrix::from_vec(1, 1, vec![Complex64::new(0.0, 1.0)]);
        assert!(Frame::new(FrameField::Real, complex_entry).is_err());
    }

    #[test]
    fn json_round_trip_real_and_complex() {
        let f = real_frame(2, 3, &[0.1, 0.25, -3.5e-7, 1.0 / 3.0, 2.0, 0.0]);
        let back = Frame::from_json_str(&f.to_json_string()).unwrap();
        assert_eq!(f, back);

        let mat = DMatrix::from_vec(
            1,
            2,
            vec![Complex64::new(0.1, -0.2), Complex64::new(1.0 / 7.0, 3.0)],
        );
        let g = Frame::from_complex(mat).unwrap();
        let back = Frame::from_json_str(&g.to_json_string()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn json_rejects_malformed() {
        assert!(Frame::from_json_str("{}").is_err());
        // wrong column count
        let s = r#"{"field":"real","d":1,"K":2,"columns":[[1.0]]}"#;
        assert!(Frame::from_json_str(s).is_err());
        // complex entry in real frame
        let s = r#"{"field":"real","d":1,"K":1,"columns":[[[1.0,2.0]]]}"#;
        assert!(Frame::from_json_str(s).is_err());
    }
}
