//! Balanced frames: finite frames whose vectors sum to zero.
//!
//! A frame is a spanning family of `K` vectors in a `d`-dimensional real or
//! complex inner-product space, `K >= d`. Balanced frames annihilate the
//! all-ones coefficient vector, which buys several signal-processing
//! properties for free: reconstruction is immune to a constant offset added
//! to every frame coefficient, additive noise does not need zero mean for
//! the usual MSE optimality of unit-norm tight frames, any single erased
//! coefficient can be recovered exactly, and a nonzero coefficient sum
//! flags a perturbed transmission.
//!
//! The crate is organised around that story:
//!
//! - [`frame`]: the `Frame` data model, synthesis/analysis operators, frame
//!   operator and Gram matrix, spectral data, JSON (de)serialisation.
//! - [`predicates`]: frame/tight/Parseval/equal-norm/balanced/simplex tests,
//!   the eight-way balancedness equivalence report, Naimark completion,
//!   frame-graph decomposition, the planar spherical 2-design test.
//! - [`constructions`]: generators for the named example families (roots of
//!   unity, harmonic, Hadamard, crosses and eutactic stars, partition and
//!   simplex frames) and the combination/lift theorems, each validating its
//!   hypotheses.
//! - [`duality`]: canonical and balanced duals, the balanced representative
//!   of a dual equivalence class, erasure duals, balanced tight duals,
//!   classical and B-complements.
//! - [`nearest`]: l1/l2-nearest balanced frame with exact existence tests
//!   and the epsilon-refuter for the non-existence case.
//! - [`channel`]: simulated coefficient transmission (systematic error,
//!   additive noise, erasure), error-bound verification, Monte-Carlo MSE
//!   estimation and the coefficient-sum anomaly detector.
//!
//! Monte-Carlo loops are data-parallel. With the default `parallel` feature
//! they run on rayon; results are bit-identical to the sequential fallback
//! because every batch derives its RNG stream from the batch counter.

pub mod channel;
pub mod constructions;
pub mod duality;
pub mod error;
mod exec;
pub mod frame;
mod linalg;
pub mod nearest;
pub mod predicates;
pub mod random;
pub mod tolerance;

pub use error::FrameError;
pub use frame::{Frame, FrameField, GramMatrix, SpectralData};
pub use tolerance::ToleranceConfig;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, FrameError>;
