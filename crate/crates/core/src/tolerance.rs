use crate::error::FrameError;

/// Numerical tolerances used by every predicate and rank test.
///
/// `rel_tol` drives zero tests, which are always taken relative to the
/// natural scale of the data (largest column norm, matrix entry, ...).
/// `rank_tol` is the singular-value cutoff relative to the largest
/// singular value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceConfig {
    pub rel_tol: f64,
    pub rank_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            rel_tol: 1e-9,
            rank_tol: 1e-10,
        }
    }
}

impl ToleranceConfig {
    pub fn new(rel_tol: f64, rank_tol: f64) -> Result<Self, FrameError> {
        for (name, v) in [("rel_tol", rel_tol), ("rank_tol", rank_tol)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(FrameError::InvalidArgument(format!(
                    "{name} must lie strictly between 0 and 1, got {v}"
                )));
            }
        }
        Ok(ToleranceConfig { rel_tol, rank_tol })
    }

    /// Zero threshold for a quantity whose natural scale is `scale`.
    /// Scales below 1 are clamped so that exact zeros stay detectable.
    pub fn zero_tol(&self, scale: f64) -> f64 {
        self.rel_tol * scale.max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(ToleranceConfig::new(0.0, 1e-10).is_err());
        assert!(ToleranceConfig::new(1e-9, 1.0).is_err());
        assert!(ToleranceConfig::new(1e-9, 1e-10).is_ok());
    }

    #[test]
    fn zero_tol_clamps_small_scales() {
        let tol = ToleranceConfig::default();
        assert_eq!(tol.zero_tol(0.5), tol.rel_tol);
        assert_eq!(tol.zero_tol(100.0), 100.0 * tol.rel_tol);
    }
}
