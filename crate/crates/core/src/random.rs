//! Seeded generators for random vectors, frames and unitaries.
//!
//! Every function is deterministic given its seed; the crate never touches
//! OS entropy. ChaCha8 is used throughout so that simulation code can
//! derive independent streams per work item.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::frame::{Frame, FrameField};
use crate::linalg::cx;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal_scalar(rng: &mut impl Rng, field: FrameField) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    match field {
        FrameField::Real => cx(re),
        FrameField::Complex => Complex64::new(re, StandardNormal.sample(rng)),
    }
}

/// Vector with independent standard-normal entries.
pub fn standard_vector(rng: &mut impl Rng, d: usize, field: FrameField) -> DVector<Complex64> {
    DVector::from_fn(d, |_, _| normal_scalar(rng, field))
}

/// Uniformly random unit vector (normalised Gaussian).
pub fn unit_vector(rng: &mut impl Rng, d: usize, field: FrameField) -> DVector<Complex64> {
    loop {
        let v = standard_vector(rng, d, field);
        let n = v.norm();
        if n > 1e-6 {
            return v / cx(n);
        }
    }
}

/// Random `d x K` frame with independent Gaussian entries.
pub fn random_frame(seed: u64, d: usize, k: usize, field: FrameField) -> Frame {
    let mut rng = rng_from_seed(seed);
    let mat = DMatrix::from_fn(d, k, |_, _| normal_scalar(&mut rng, field));
    Frame::new(field, mat).expect("gaussian entries are finite")
}

/// Random balanced spanning frame. Requires `K >= d + 1` (a balanced
/// sequence with `K = d` cannot span). Mean subtraction enforces balance;
/// draws whose condition number exceeds 100 are rejected and retried
/// with a derived seed, so downstream operator arithmetic (inverses,
/// square roots) stays well away from the rank cutoff.
pub fn random_balanced_frame(seed: u64, d: usize, k: usize, field: FrameField) -> Frame {
    assert!(k > d, "balanced spanning frames need K >= d + 1");
    for attempt in 0..64u64 {
        let raw = random_frame(
            seed.wrapping_add(attempt.wrapping_mul(0x9e3779b97f4a7c15)),
            d,
            k,
            field,
        );
        let mean = raw.column_sum() / cx(k as f64);
        let mat = DMatrix::from_fn(d, k, |r, c| raw.matrix()[(r, c)] - mean[r]);
        let frame = Frame::new(field, mat).expect("finite entries");
        let singular = crate::linalg::singular_values(frame.matrix());
        let (largest, smallest) = (singular[0], singular[singular.len() - 1]);
        if smallest > 1e-2 * largest {
            return frame;
        }
    }
    unreachable!("could not draw a well-conditioned balanced frame");
}

/// Haar-ish random unitary via QR of a Gaussian matrix, with the phases of
/// the R diagonal fixed so the result is deterministic and exactly unitary
/// up to rounding.
pub fn random_unitary(seed: u64, d: usize, field: FrameField) -> DMatrix<Complex64> {
    let mut rng = rng_from_seed(seed);
    let m = DMatrix::from_fn(d, d, |_, _| normal_scalar(&mut rng, field));
    let qr = m.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let diag = r[(j, j)];
        if diag.norm() > 0.0 {
            let phase = diag / cx(diag.norm());
            let mut col = q.column_mut(j);
            for z in col.iter_mut() {
                *z *= phase;
            }
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrices_close;
    use crate::tolerance::ToleranceConfig;

    #[test]
    fn deterministic_per_seed() {
        let a = random_balanced_frame(7, 3, 5, FrameField::Real);
        let b = random_balanced_frame(7, 3, 5, FrameField::Real);
        assert_eq!(a, b);
        let c = random_balanced_frame(8, 3, 5, FrameField::Real);
        assert_ne!(a, c);
    }

    #[test]
    fn balanced_frames_are_balanced_and_span() {
        let tol = ToleranceConfig::default();
        for seed in 0..10 {
            for &field in &[FrameField::Real, FrameField::Complex] {
                let f = random_balanced_frame(seed, 2, 4, field);
                assert!(f.column_sum().norm() < 1e-12);
                assert!(crate::predicates::is_frame(&f, &tol));
            }
        }
    }

    #[test]
    fn unitary_is_unitary() {
        for &field in &[FrameField::Real, FrameField::Complex] {
            let u = random_unitary(3, 4, field);
            let id = DMatrix::identity(4, 4);
            assert!(matrices_close(&(u.adjoint() * &u), &id, 1e-12));
        }
    }
}
