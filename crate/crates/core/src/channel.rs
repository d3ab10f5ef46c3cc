//! Simulated transmission of frame coefficients over a noisy channel.
//!
//! A signal is encoded as its analysis coefficients, perturbed
//! (systematic offset, additive noise, or erasure), and decoded with a
//! dual frame. The balanced-frame story shows up as measurable facts:
//! systematic offsets decode exactly through a balanced dual, additive
//! noise achieves the tight-frame MSE even with nonzero mean, a single
//! erased coefficient is recovered exactly through the erasure dual, and
//! the coefficient sum acts as a perturbation detector.
//!
//! Monte-Carlo estimators split trials into fixed 1024-trial batches;
//! batch `b` draws from ChaCha stream `b + 1` of the run seed and batch
//! results are combined in counter order, so a given seed produces
//! bit-identical results sequentially or on the rayon thread pool.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::duality;
use crate::error::FrameError;
pub use crate::exec::ExecMode;
use crate::exec::{self};
use crate::frame::Frame;
use crate::linalg::{self, cx};
use crate::predicates;
use crate::tolerance::ToleranceConfig;
use crate::Result;

const BATCH_TRIALS: u64 = 1024;

/// Additive-noise model: i.i.d. entries with mean `mu` and standard
/// deviation `sigma`, drawn from the chosen distribution (the uniform
/// variant is shifted and scaled to match the two moments).
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct NoiseModel {
    pub mu: f64,
    pub sigma: f64,
    pub distribution: NoiseDistribution,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseDistribution {
    Gaussian,
    Uniform,
}

impl NoiseModel {
    pub fn new(mu: f64, sigma: f64, distribution: NoiseDistribution) -> Result<Self> {
        if sigma <= 0.0 || !sigma.is_finite() || !mu.is_finite() {
            return Err(FrameError::InvalidArgument(format!(
                "noise needs finite mu and sigma > 0, got mu = {mu}, sigma = {sigma}"
            )));
        }
        Ok(NoiseModel {
            mu,
            sigma,
            distribution,
        })
    }

    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        match self.distribution {
            NoiseDistribution::Gaussian => {
                let normal = Normal::new(self.mu, self.sigma).expect("validated");
                for x in out.iter_mut() {
                    *x = normal.sample(rng);
                }
            }
            NoiseDistribution::Uniform => {
                let w = self.sigma * 3f64.sqrt();
                let uniform = Uniform::new(self.mu - w, self.mu + w).expect("validated");
                for x in out.iter_mut() {
                    *x = uniform.sample(rng);
                }
            }
        }
    }
}

/// Channel perturbation applied to the transmitted coefficients.
#[derive(Clone, Debug)]
pub enum NoiseKind {
    /// The same constant added to every coefficient.
    Systematic { offset: Complex64 },
    /// Independent random noise per coefficient.
    Additive(NoiseModel),
    /// Lost coefficients. Dual-based recovery handles exactly one index;
    /// `zero_fill` reconstructs with the original dual and zeroed
    /// coefficients instead (any number of indices), for comparison.
    Erasure {
        indices: Vec<usize>,
        zero_fill: bool,
    },
}

/// Perturbation plus the seed driving its randomized parts.
#[derive(Clone, Debug)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub seed: u64,
}

impl NoiseSpec {
    /// Check the perturbation against a frame of `K` vectors.
    pub fn validate(&self, k: usize) -> Result<()> {
        if let NoiseKind::Erasure { indices, .. } = &self.kind {
            if indices.is_empty() || indices.len() >= k {
                return Err(FrameError::InvalidArgument(
                    "erasure indices must form a nonempty proper subset".into(),
                ));
            }
            let mut seen = vec![false; k];
            for &i in indices {
                if i >= k {
                    return Err(FrameError::IndexOutOfRange {
                        context: "erasure index",
                        index: i,
                        len: k,
                    });
                }
                if seen[i] {
                    return Err(FrameError::InvalidArgument(format!(
                        "duplicate erasure index {i}"
                    )));
                }
                seen[i] = true;
            }
        }
        Ok(())
    }
}

/// Extra work for [`transmit`] beyond the single-shot reconstruction.
#[derive(Clone, Copy, Debug, Default)]
pub struct TransmitOptions {
    /// Monte-Carlo MSE trials (additive noise only).
    pub mse_trials: Option<u64>,
    /// Re-transmit this many coefficient batches and run the anomaly
    /// detector on them (needs at least 3 to do anything).
    pub detector_batches: usize,
}

/// Reconstruction report of a single transmission.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ChannelReport {
    pub reconstruction_error_l2: f64,
    pub reconstruction_error_inf: f64,
    /// Sum of the received coefficients, `[re, im]`.
    pub coefficient_sum: [f64; 2],
    /// Reconstruction-error bounds, when the theory applies (balanced
    /// frame, canonical dual, non-erasure noise).
    pub bound_values: Option<BoundReport>,
    /// Monte-Carlo MSE, for additive runs with `mse_trials` set.
    pub empirical_mse: Option<McEstimate>,
    /// Anomaly-detector verdict, when `detector_batches >= 3`.
    pub detector_verdict: Option<DetectorVerdict>,
}

/// Transmit `signal` through the channel and decode.
///
/// The dual defaults to the canonical dual; erasure recovery follows the
/// deletion route through [`duality::erasure_dual`] unless `zero_fill`
/// asks for the naive zero-filled decode.
pub fn transmit(
    f: &Frame,
    dual: Option<&Frame>,
    signal: &DVector<Complex64>,
    noise: &NoiseSpec,
    opts: &TransmitOptions,
    tol: &ToleranceConfig,
) -> Result<ChannelReport> {
    noise.validate(f.len())?;
    let canonical = duality::canonical_dual(f, tol)?;
    let dual = match dual {
        Some(g) => {
            if !duality::is_dual_pair(f, g, tol)? {
                return Err(FrameError::NotADualPair(
                    "the supplied dual does not satisfy T_G T_F^* = I".into(),
                ));
            }
            g.clone()
        }
        None => canonical.clone(),
    };
    let dual_is_canonical = linalg::matrices_close(
        dual.matrix(),
        canonical.matrix(),
        tol.rel_tol * canonical.max_column_norm().max(1.0),
    );

    let clean = f.analysis_apply(signal)?;
    let k = f.len();

    // received coefficients (zero-filled for erasures) and reconstruction
    let (received, reconstructed) = match &noise.kind {
        NoiseKind::Systematic { offset } => {
            let received = DVector::from_fn(k, |i, _| clean[i] + offset);
            let rec = dual.synthesis_apply(&received)?;
            (received, rec)
        }
        NoiseKind::Additive(model) => {
            let mut draws = vec![0.0; k];
            let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
            model.sample_into(&mut rng, &mut draws);
            let received = DVector::from_fn(k, |i, _| clean[i] + cx(draws[i]));
            let rec = dual.synthesis_apply(&received)?;
            (received, rec)
        }
        NoiseKind::Erasure { indices, zero_fill } => {
            let mut received = clean.clone();
            for &i in indices {
                received[i] = cx(0.0);
            }
            let rec = if *zero_fill {
                dual.synthesis_apply(&received)?
            } else {
                if indices.len() != 1 {
                    return Err(FrameError::InvalidArgument(
                        "dual-based erasure recovery handles exactly one index; use zero_fill for larger sets".into(),
                    ));
                }
                let l = indices[0];
                let (kept, shifted) = duality::erasure_dual(f, &dual, l, tol)?;
                let kept_coeffs =
                    DVector::from_iterator(k - 1, (0..k).filter(|&j| j != l).map(|j| clean[j]));
                debug_assert_eq!(kept.len(), k - 1);
                shifted.synthesis_apply(&kept_coeffs)?
            };
            (received, rec)
        }
    };

    let error = &reconstructed - signal;
    let coefficient_sum: Complex64 = received.iter().sum();

    // error bounds hold for the canonical-dual reconstruction of a
    // balanced frame under non-erasure perturbations
    let bound_values = match &noise.kind {
        NoiseKind::Erasure { .. } => None,
        _ if !dual_is_canonical || !predicates::is_balanced(f, tol) => None,
        NoiseKind::Systematic { offset } if offset.im == 0.0 => Some(verify_error_bounds(
            f,
            signal,
            &vec![offset.re; k],
            offset.re,
            tol,
        )?),
        NoiseKind::Systematic { .. } => None,
        NoiseKind::Additive(model) => {
            let mut draws = vec![0.0; k];
            let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
            model.sample_into(&mut rng, &mut draws);
            Some(verify_error_bounds(f, signal, &draws, model.mu, tol)?)
        }
    };

    let empirical_mse = match (&noise.kind, opts.mse_trials) {
        (NoiseKind::Additive(model), Some(trials)) => Some(mse_core(
            dual.matrix(),
            f.dim(),
            model,
            &MonteCarlo {
                trials,
                seed: noise.seed ^ 0x9e37_79b9_7f4a_7c15,
            },
            ExecMode::default(),
        )?),
        _ => None,
    };

    let detector_verdict = if opts.detector_batches >= 3 {
        let batches: Vec<DVector<Complex64>> = (0..opts.detector_batches)
            .map(|b| match &noise.kind {
                NoiseKind::Systematic { offset } => DVector::from_fn(k, |i, _| clean[i] + offset),
                NoiseKind::Additive(model) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
                    rng.set_stream(b as u64 + 1);
                    let mut draws = vec![0.0; k];
                    model.sample_into(&mut rng, &mut draws);
                    DVector::from_fn(k, |i, _| clean[i] + cx(draws[i]))
                }
                NoiseKind::Erasure { indices, .. } => {
                    let mut v = clean.clone();
                    for &i in indices {
                        v[i] = cx(0.0);
                    }
                    v
                }
            })
            .collect();
        predicates::is_balanced(f, tol)
            .then(|| detect_anomaly(f, &batches, &DetectorConfig::fixed_signal(), tol))
            .transpose()?
            .map(|report| report.verdict)
    } else {
        None
    };

    Ok(ChannelReport {
        reconstruction_error_l2: error.norm(),
        reconstruction_error_inf: error.iter().map(|z| z.norm()).fold(0.0, f64::max),
        coefficient_sum: [coefficient_sum.re, coefficient_sum.im],
        bound_values,
        empirical_mse,
        detector_verdict,
    })
}

// ---------------------------------------------------------------------------
// Error bounds
// ---------------------------------------------------------------------------

/// Reconstruction-error bounds for a balanced frame under additive noise
/// `a` centred near `mu`, decoded with the canonical dual.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct BoundReport {
    /// `max_k |a_k - mu|`.
    pub epsilon_max: f64,
    /// `(sum_k (a_k - mu)^2)^{1/2}`.
    pub epsilon_l2: f64,
    pub error_l2: f64,
    pub error_inf: f64,
    /// `sqrt(K / lambda_min) * epsilon_max` (any balanced frame).
    pub spectral_bound: f64,
    /// `sqrt(d) * epsilon_max` (BUNTF only).
    pub buntf_l2_bound: Option<f64>,
    /// `d * epsilon_max` (BUNTF only).
    pub buntf_inf_bound: Option<f64>,
    /// `sqrt(d / K) * epsilon_l2` (BUNTF only).
    pub buntf_energy_bound: Option<f64>,
    pub all_satisfied: bool,
}

/// Decode `<f, f_k> + a_k` with the canonical dual and compare the error
/// against every applicable bound.
pub fn verify_error_bounds(
    f: &Frame,
    signal: &DVector<Complex64>,
    noise: &[f64],
    mu: f64,
    tol: &ToleranceConfig,
) -> Result<BoundReport> {
    if !predicates::is_balanced(f, tol) {
        return Err(FrameError::PredicateFailed(
            "error bounds hold for balanced frames".into(),
        ));
    }
    if noise.len() != f.len() {
        return Err(FrameError::DimensionMismatch {
            context: "noise vector",
            expected: f.len(),
            got: noise.len(),
        });
    }
    if signal.len() != f.dim() {
        return Err(FrameError::DimensionMismatch {
            context: "signal",
            expected: f.dim(),
            got: signal.len(),
        });
    }
    let spec = f.spectral(tol);
    if spec.lower <= 0.0 {
        return Err(FrameError::NotAFrame("the frame must span".into()));
    }
    let (d, k) = (f.dim() as f64, f.len() as f64);

    // error = sum_k a_k S^{-1} f_k, independent of the signal
    let canonical = duality::canonical_dual(f, tol)?;
    let a = DVector::from_iterator(noise.len(), noise.iter().map(|&x| cx(x)));
    let error = canonical.matrix() * &a;
    let error_l2 = error.norm();
    let error_inf = error.iter().map(|z| z.norm()).fold(0.0, f64::max);

    let epsilon_max = noise.iter().map(|&x| (x - mu).abs()).fold(0.0, f64::max);
    let epsilon_l2 = noise.iter().map(|&x| (x - mu).powi(2)).sum::<f64>().sqrt();

    let spectral_bound = (k / spec.lower).sqrt() * epsilon_max;
    let buntf = predicates::is_buntf(f, tol);
    let buntf_l2_bound = buntf.then_some(d.sqrt() * epsilon_max);
    let buntf_inf_bound = buntf.then_some(d * epsilon_max);
    let buntf_energy_bound = buntf.then_some((d / k).sqrt() * epsilon_l2);

    let slack = tol.zero_tol(error_l2.max(spectral_bound));
    let mut all_satisfied = error_l2 <= spectral_bound + slack;
    if let Some(b) = buntf_l2_bound {
        all_satisfied &= error_l2 <= b + slack;
    }
    if let Some(b) = buntf_inf_bound {
        all_satisfied &= error_inf <= b + slack;
    }
    if let Some(b) = buntf_energy_bound {
        all_satisfied &= error_l2 <= b + slack;
    }

    Ok(BoundReport {
        epsilon_max,
        epsilon_l2,
        error_l2,
        error_inf,
        spectral_bound,
        buntf_l2_bound,
        buntf_inf_bound,
        buntf_energy_bound,
        all_satisfied,
    })
}

// ---------------------------------------------------------------------------
// Monte-Carlo estimators
// ---------------------------------------------------------------------------

/// Trial budget and seed of a Monte-Carlo run.
#[derive(Clone, Copy, Debug)]
pub struct MonteCarlo {
    pub trials: u64,
    pub seed: u64,
}

/// A Monte-Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

fn mc_accumulate(
    trials: u64,
    seed: u64,
    mode: ExecMode,
    per_trial: impl Fn(&mut ChaCha8Rng) -> f64 + Sync + Send,
) -> McEstimate {
    let batches = trials.div_ceil(BATCH_TRIALS);
    let partials = exec::map_batches(batches, mode, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b + 1);
        let in_batch = BATCH_TRIALS.min(trials - b * BATCH_TRIALS);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..in_batch {
            let x = per_trial(&mut rng);
            sum += x;
            sum_sq += x * x;
        }
        (sum, sum_sq)
    });
    let (sum, sum_sq) = partials
        .into_iter()
        .fold((0.0, 0.0), |(s, q), (bs, bq)| (s + bs, q + bq));
    let n = trials as f64;
    let mean = sum / n;
    let variance = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    McEstimate {
        mean,
        stderr: (variance / n).sqrt(),
        trials,
    }
}

fn mse_core(
    dual_matrix: &DMatrix<Complex64>,
    dim: usize,
    noise: &NoiseModel,
    mc: &MonteCarlo,
    mode: ExecMode,
) -> Result<McEstimate> {
    if mc.trials < 2 {
        return Err(FrameError::InvalidArgument(
            "Monte-Carlo needs at least 2 trials".into(),
        ));
    }
    let k = dual_matrix.ncols();
    let noise = *noise;
    Ok(mc_accumulate(mc.trials, mc.seed, mode, move |rng| {
        let mut draws = vec![0.0; k];
        noise.sample_into(rng, &mut draws);
        let eta = DVector::from_iterator(k, draws.iter().map(|&x| cx(x)));
        let err = dual_matrix * eta;
        err.norm_squared() / dim as f64
    }))
}

/// Monte-Carlo estimate of the reconstruction MSE
/// `(1/d) E[|| sum_k eta_k g_k ||^2]` for a balanced unit-norm frame
/// decoded with `dual` (canonical by default). The noise mean does not
/// have to be zero: balanced duals cancel it. For a BUNTF with the
/// canonical dual the expectation is `(d/K) sigma^2`; in general it
/// lies in `[K sigma^2 / (d beta^2), K sigma^2 / (d alpha^2)]`.
///
/// Requires `trials >= 1000`.
pub fn empirical_mse(
    f: &Frame,
    dual: Option<&Frame>,
    noise: &NoiseModel,
    mc: &MonteCarlo,
    tol: &ToleranceConfig,
) -> Result<McEstimate> {
    empirical_mse_with_mode(f, dual, noise, mc, tol, ExecMode::default())
}

/// [`empirical_mse`] with an explicit execution mode; results are
/// bit-identical across modes.
pub fn empirical_mse_with_mode(
    f: &Frame,
    dual: Option<&Frame>,
    noise: &NoiseModel,
    mc: &MonteCarlo,
    tol: &ToleranceConfig,
    mode: ExecMode,
) -> Result<McEstimate> {
    if mc.trials < 1000 {
        return Err(FrameError::InvalidArgument(
            "the MSE estimator requires at least 1000 trials".into(),
        ));
    }
    if !predicates::is_balanced(f, tol) || !predicates::is_unit_norm(f, tol) {
        return Err(FrameError::PredicateFailed(
            "the MSE claims hold for balanced unit-norm frames".into(),
        ));
    }
    let dual = match dual {
        Some(g) => {
            if !duality::is_dual_pair(f, g, tol)? {
                return Err(FrameError::NotADualPair(
                    "the supplied dual does not satisfy T_G T_F^* = I".into(),
                ));
            }
            g.clone()
        }
        None => duality::canonical_dual(f, tol)?,
    };
    mse_core(dual.matrix(), f.dim(), noise, mc, mode)
}

/// Monte-Carlo estimate of the per-coordinate power `E[|p(k)|^2]` of the
/// noise projected onto the analysis range,
/// `p = T^* S^{-1} T (eta - mu e)`. For a balanced tight unit-norm frame
/// every coordinate has power `(d/K) sigma^2`; the estimator averages
/// over coordinates. Requires `trials >= 1000`.
pub fn projection_coefficient_power(
    f: &Frame,
    noise: &NoiseModel,
    mc: &MonteCarlo,
    tol: &ToleranceConfig,
) -> Result<McEstimate> {
    projection_coefficient_power_with_mode(f, noise, mc, tol, ExecMode::default())
}

/// [`projection_coefficient_power`] with an explicit execution mode.
pub fn projection_coefficient_power_with_mode(
    f: &Frame,
    noise: &NoiseModel,
    mc: &MonteCarlo,
    tol: &ToleranceConfig,
    mode: ExecMode,
) -> Result<McEstimate> {
    if mc.trials < 1000 {
        return Err(FrameError::InvalidArgument(
            "the projection-power estimator requires at least 1000 trials".into(),
        ));
    }
    if !predicates::is_buntf(f, tol) {
        return Err(FrameError::PredicateFailed(
            "the projection-power claims hold for balanced tight unit-norm frames".into(),
        ));
    }
    let s_inv = linalg::hermitian_inverse(&f.frame_operator(), tol)?;
    let projector = f.matrix().adjoint() * s_inv * f.matrix();
    let k = f.len();
    let mu = noise.mu;
    let noise = *noise;
    Ok(mc_accumulate(mc.trials, mc.seed, mode, move |rng| {
        let mut draws = vec![0.0; k];
        noise.sample_into(rng, &mut draws);
        let centered = DVector::from_iterator(k, draws.iter().map(|&x| cx(x - mu)));
        let p = &projector * centered;
        p.norm_squared() / k as f64
    }))
}

// ---------------------------------------------------------------------------
// Anomaly detection from coefficient sums
// ---------------------------------------------------------------------------

/// What the coefficient sums of a batch sequence look like.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorVerdict {
    /// All sums vanish: coefficients of a balanced frame, unperturbed.
    Clean,
    /// Sums sit on a nonzero constant `K c`: systematic offset.
    Systematic,
    /// Sums fluctuate in a signal-independent band: random noise.
    Random,
    /// Sums vary with the signal: erasures or other structural damage.
    SignalDependent,
}

/// Detector thresholds. The verdicts are qualitative distinctions, so
/// every cut-off is deliberately configuration with stated defaults.
#[derive(Clone, Copy, Debug)]
pub struct DetectorConfig {
    /// Absolute threshold below which a batch sum counts as zero;
    /// `None` derives `rel_tol * K * max(1, coefficient scale)`.
    pub clean_tol: Option<f64>,
    /// Relative spread below which nonzero sums count as constant.
    pub systematic_spread_rel: f64,
    /// Minimum sign-change fraction of the sum differences for a
    /// "patternless" fluctuation.
    pub trend_sign_change_frac: f64,
    /// Maximum |correlation| between batch-sum magnitudes and batch
    /// coefficient norms before the fluctuation counts as
    /// signal-dependent.
    pub signal_correlation_max: f64,
    /// Minimum coefficient of variation of the batch norms for the
    /// correlation test to be meaningful: without signal variation
    /// across batches, signal dependence is unobservable.
    pub signal_variation_min: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            clean_tol: None,
            systematic_spread_rel: 1e-3,
            trend_sign_change_frac: 0.30,
            signal_correlation_max: 0.5,
            signal_variation_min: 0.1,
        }
    }
}

impl DetectorConfig {
    /// Configuration for batches that all encode the same signal (as in
    /// [`transmit`]): the signal-dependence test is disabled because a
    /// fixed signal cannot reveal it.
    pub fn fixed_signal() -> Self {
        DetectorConfig {
            signal_correlation_max: f64::INFINITY,
            ..DetectorConfig::default()
        }
    }
}

/// Detector evidence: the verdict plus the statistics it was based on.
#[derive(Clone, Debug, serde::Serialize)]
pub struct DetectorReport {
    pub verdict: DetectorVerdict,
    pub batch_sums: Vec<[f64; 2]>,
    pub center: f64,
    pub spread: f64,
    pub sign_change_frac: f64,
    pub signal_correlation: f64,
    /// Coefficient of variation of the batch norms (signal variation).
    pub norm_variation: f64,
}

/// Classify a sequence of received coefficient batches for a balanced
/// frame by their sums: zero sums are clean, a constant nonzero sum is a
/// systematic offset, patternless signal-independent fluctuation is
/// random noise, anything else (in particular sums that track the
/// signal) is flagged as signal-dependent. Needs at least 3 batches.
pub fn detect_anomaly(
    f: &Frame,
    batches: &[DVector<Complex64>],
    config: &DetectorConfig,
    tol: &ToleranceConfig,
) -> Result<DetectorReport> {
    if !predicates::is_balanced(f, tol) {
        return Err(FrameError::PredicateFailed(
            "the coefficient-sum detector assumes a balanced frame".into(),
        ));
    }
    if batches.len() < 3 {
        return Err(FrameError::InvalidArgument(format!(
            "the detector needs at least 3 batches, got {}",
            batches.len()
        )));
    }
    for (j, b) in batches.iter().enumerate() {
        if b.len() != f.len() {
            return Err(FrameError::DimensionMismatch {
                context: "coefficient batch",
                expected: f.len(),
                got: batches[j].len(),
            });
        }
    }

    let sums: Vec<Complex64> = batches.iter().map(|b| b.iter().sum()).collect();
    let complex_field = f.field() == crate::frame::FrameField::Complex;
    // the statistic the thresholds act on: the real sum for real frames,
    // the modulus for complex ones
    let t: Vec<f64> = sums
        .iter()
        .map(|s| if complex_field { s.norm() } else { s.re })
        .collect();
    let scale = batches
        .iter()
        .flat_map(|b| b.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let clean_tol = config
        .clean_tol
        .unwrap_or_else(|| tol.rel_tol * f.len() as f64 * scale.max(1.0));

    let center = t.iter().sum::<f64>() / t.len() as f64;
    let spread =
        t.iter().copied().fold(f64::MIN, f64::max) - t.iter().copied().fold(f64::MAX, f64::min);

    let diffs: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let mut changes = 0usize;
    let mut comparisons = 0usize;
    for w in diffs.windows(2) {
        if w[0] != 0.0 && w[1] != 0.0 {
            comparisons += 1;
            if (w[0] > 0.0) != (w[1] > 0.0) {
                changes += 1;
            }
        }
    }
    let sign_change_frac = if comparisons == 0 {
        0.0
    } else {
        changes as f64 / comparisons as f64
    };

    // signal dependence: batch-sum magnitudes tracking batch norms,
    // tested only when the norms actually vary across batches
    let norms: Vec<f64> = batches.iter().map(|b| b.norm()).collect();
    let magnitudes: Vec<f64> = sums.iter().map(|s| s.norm()).collect();
    let signal_correlation = pearson(&magnitudes, &norms).abs();
    let norm_mean = norms.iter().sum::<f64>() / norms.len() as f64;
    let norm_variation = if norm_mean > 0.0 {
        let var =
            norms.iter().map(|n| (n - norm_mean).powi(2)).sum::<f64>() / (norms.len() as f64 - 1.0);
        var.sqrt() / norm_mean
    } else {
        0.0
    };
    let tracks_signal = norm_variation > config.signal_variation_min
        && signal_correlation > config.signal_correlation_max;

    let verdict = if sums.iter().all(|s| s.norm() <= clean_tol) {
        DetectorVerdict::Clean
    } else if center.abs() > clean_tol && spread <= config.systematic_spread_rel * center.abs() {
        DetectorVerdict::Systematic
    } else if sign_change_frac >= config.trend_sign_change_frac && !tracks_signal {
        DetectorVerdict::Random
    } else {
        DetectorVerdict::SignalDependent
    };

    Ok(DetectorReport {
        verdict,
        batch_sums: sums.iter().map(|s| [s.re, s.im]).collect(),
        center,
        spread,
        sign_change_frac,
        signal_correlation,
        norm_variation,
    })
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        cov += (a - mx) * (b - my);
        vx += (a - mx).powi(2);
        vy += (b - my).powi(2);
    }
    if vx <= f64::EPSILON * n || vy <= f64::EPSILON * n {
        return 0.0;
    }
    cov / (vx.sqrt() * vy.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::roots_of_unity_frame;
    use crate::frame::FrameField;
    use crate::random;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn random_signal(seed: u64, d: usize) -> DVector<Complex64> {
        let mut rng = random::rng_from_seed(seed);
        random::standard_vector(&mut rng, d, FrameField::Real)
    }

    fn systematic(offset: f64) -> NoiseSpec {
        NoiseSpec {
            kind: NoiseKind::Systematic { offset: cx(offset) },
            seed: 0,
        }
    }

    #[test]
    fn systematic_error_is_invisible_to_balanced_duals() {
        let f = random::random_balanced_frame(42, 3, 6, FrameField::Real);
        let signal = random_signal(7, 3);
        let report = transmit(
            &f,
            None,
            &signal,
            &systematic(3.7),
            &TransmitOptions::default(),
            &tol(),
        )
        .unwrap();
        assert!(report.reconstruction_error_l2 <= 1e-10 * signal.norm());
        // the coefficient sum betrays the offset: K * c
        assert!((report.coefficient_sum[0] - 6.0 * 3.7).abs() < 1e-9);
    }

    #[test]
    fn systematic_error_breaks_unbalanced_frames() {
        // F = {e1, e2, e1}: canonical dual columns sum to (1, 1), so a
        // unit offset shifts the reconstruction by exactly that vector
        let f = Frame::from_real(DMatrix::from_row_slice(
            2,
            3,
            &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0],
        ))
        .unwrap();
        let signal = random_signal(8, 2);
        let report = transmit(
            &f,
            None,
            &signal,
            &systematic(1.0),
            &TransmitOptions::default(),
            &tol(),
        )
        .unwrap();
        assert!((report.reconstruction_error_l2 - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn erasure_recovers_exactly_and_zero_fill_does_not() {
        let f = random::random_balanced_frame(11, 2, 5, FrameField::Real);
        let signal = random_signal(12, 2);
        for l in 0..5 {
            let spec = NoiseSpec {
                kind: NoiseKind::Erasure {
                    indices: vec![l],
                    zero_fill: false,
                },
                seed: 0,
            };
            let report = transmit(
                &f,
                None,
                &signal,
                &spec,
                &TransmitOptions::default(),
                &tol(),
            )
            .unwrap();
            assert!(report.reconstruction_error_l2 <= 1e-10 * signal.norm());
        }
        let spec = NoiseSpec {
            kind: NoiseKind::Erasure {
                indices: vec![1],
                zero_fill: true,
            },
            seed: 0,
        };
        let report = transmit(
            &f,
            None,
            &signal,
            &spec,
            &TransmitOptions::default(),
            &tol(),
        )
        .unwrap();
        assert!(report.reconstruction_error_l2 > 1e-6);

        // improper subsets are rejected
        let bad = NoiseSpec {
            kind: NoiseKind::Erasure {
                indices: (0..5).collect(),
                zero_fill: false,
            },
            seed: 0,
        };
        assert!(transmit(&f, None, &signal, &bad, &TransmitOptions::default(), &tol()).is_err());
    }

    #[test]
    fn bounds_hold_for_explicit_patterns() {
        let roots4 = roots_of_unity_frame(4).unwrap();
        let signal = random_signal(3, 2);
        let mu = 0.4;
        let eps = 0.05;

        // alternating deviations cancel entirely
        let a: Vec<f64> = [eps, -eps, eps, -eps].iter().map(|d| mu + d).collect();
        let report = verify_error_bounds(&roots4, &signal, &a, mu, &tol()).unwrap();
        assert!(report.error_l2 < 1e-12);
        assert!(report.all_satisfied);

        // a non-cancelling pattern stays within sqrt(2) * eps
        let a: Vec<f64> = [eps, -eps, eps, eps].iter().map(|d| mu + d).collect();
        let report = verify_error_bounds(&roots4, &signal, &a, mu, &tol()).unwrap();
        assert!((report.error_l2 - eps).abs() < 1e-12); // exact for this pattern
        assert!(report.all_satisfied);
        assert!(report.buntf_l2_bound.unwrap() > report.error_l2);

        // pure systematic offset: zero error under every bound
        let a = vec![mu; 4];
        let report = verify_error_bounds(&roots4, &signal, &a, mu, &tol()).unwrap();
        assert!(report.error_l2 < 1e-12 && report.all_satisfied);

        // non-balanced frames are rejected
        let basis = Frame::from_real(DMatrix::identity(2, 2)).unwrap();
        assert!(
            verify_error_bounds(&basis, &random_signal(1, 2), &[0.1, 0.2], 0.0, &tol()).is_err()
        );
    }

    #[test]
    fn bounds_hold_over_random_draws() {
        let f = roots_of_unity_frame(7).unwrap();
        let signal = random_signal(5, 2);
        let model = NoiseModel::new(0.3, 0.8, NoiseDistribution::Gaussian).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let mut a = vec![0.0; 7];
            model.sample_into(&mut rng, &mut a);
            let report = verify_error_bounds(&f, &signal, &a, model.mu, &tol()).unwrap();
            assert!(report.all_satisfied, "{report:?}");
        }
    }

    #[test]
    fn mse_matches_the_tight_frame_constant() {
        let roots4 = roots_of_unity_frame(4).unwrap();
        let noise = NoiseModel::new(0.7, 1.0, NoiseDistribution::Gaussian).unwrap();
        let mc = MonteCarlo {
            trials: 20_000,
            seed: 5,
        };
        let est = empirical_mse(&roots4, None, &noise, &mc, &tol()).unwrap();
        assert!(
            (est.mean - 0.5).abs() <= 4.0 * est.stderr,
            "mse {} stderr {}",
            est.mean,
            est.stderr
        );

        // uniform noise obeys the same law
        let uniform = NoiseModel::new(-0.3, 0.5, NoiseDistribution::Uniform).unwrap();
        let est = empirical_mse(&roots4, None, &uniform, &mc, &tol()).unwrap();
        assert!((est.mean - 0.5 * 0.25).abs() <= 4.0 * est.stderr);

        assert!(empirical_mse(
            &roots4,
            None,
            &noise,
            &MonteCarlo {
                trials: 10,
                seed: 0
            },
            &tol()
        )
        .is_err());
    }

    #[test]
    fn mse_band_for_non_tight_balanced_unit_norm_frames() {
        // third roots plus an antipodal pair: balanced, unit norm, not tight
        let mut angles: Vec<f64> = (0..3)
            .map(|k| 2.0 * std::f64::consts::PI * k as f64 / 3.0)
            .collect();
        angles.push(0.3);
        angles.push(0.3 + std::f64::consts::PI);
        let f = crate::predicates::angle_frame(&angles).unwrap();
        assert!(crate::predicates::is_balanced(&f, &tol()));
        assert!(!crate::predicates::is_tight(&f, &tol()));

        let spec = f.spectral(&tol());
        let sigma = 0.9f64;
        let noise = NoiseModel::new(0.2, sigma, NoiseDistribution::Gaussian).unwrap();
        let mc = MonteCarlo {
            trials: 40_000,
            seed: 6,
        };
        let est = empirical_mse(&f, None, &noise, &mc, &tol()).unwrap();
        let (k, d) = (5.0, 2.0);
        let lo = k * sigma.powi(2) / (d * spec.upper.powi(2));
        let hi = k * sigma.powi(2) / (d * spec.lower.powi(2));
        assert!(
            est.mean >= lo - 4.0 * est.stderr && est.mean <= hi + 4.0 * est.stderr,
            "mse {} outside [{lo}, {hi}]",
            est.mean
        );
    }

    #[test]
    fn mse_is_deterministic_and_mode_independent() {
        let roots4 = roots_of_unity_frame(4).unwrap();
        let noise = NoiseModel::new(0.7, 1.0, NoiseDistribution::Gaussian).unwrap();
        let mc = MonteCarlo {
            trials: 5_000,
            seed: 123,
        };
        let a = empirical_mse_with_mode(&roots4, None, &noise, &mc, &tol(), ExecMode::Sequential)
            .unwrap();
        let b = empirical_mse_with_mode(&roots4, None, &noise, &mc, &tol(), ExecMode::Sequential)
            .unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        #[cfg(feature = "parallel")]
        {
            let c = empirical_mse_with_mode(&roots4, None, &noise, &mc, &tol(), ExecMode::Parallel)
                .unwrap();
            assert_eq!(a.mean.to_bits(), c.mean.to_bits());
            assert_eq!(a.stderr.to_bits(), c.stderr.to_bits());
        }
    }

    #[test]
    fn projection_power_decreases_with_redundancy() {
        let noise = NoiseModel::new(0.5, 1.0, NoiseDistribution::Gaussian).unwrap();
        let mc = MonteCarlo {
            trials: 20_000,
            seed: 9,
        };
        let p4 =
            projection_coefficient_power(&roots_of_unity_frame(4).unwrap(), &noise, &mc, &tol())
                .unwrap();
        assert!((p4.mean - 0.5).abs() <= 4.0 * p4.stderr);
        let p8 =
            projection_coefficient_power(&roots_of_unity_frame(8).unwrap(), &noise, &mc, &tol())
                .unwrap();
        assert!((p8.mean - 0.25).abs() <= 4.0 * p8.stderr);
        assert!(p8.mean < p4.mean);

        // sigma -> 0 drives the power to zero
        let tiny = NoiseModel::new(0.5, 1e-9, NoiseDistribution::Gaussian).unwrap();
        let p = projection_coefficient_power(&roots_of_unity_frame(4).unwrap(), &tiny, &mc, &tol())
            .unwrap();
        assert!(p.mean < 1e-15);
    }

    #[test]
    fn detector_distinguishes_the_four_regimes() {
        let f = random::random_balanced_frame(21, 2, 6, FrameField::Real);
        let config = DetectorConfig::default();
        let signals: Vec<DVector<Complex64>> = (0..12)
            .map(|j| random_signal(100 + j, 2) * cx(1.0 + j as f64))
            .collect();

        // clean
        let clean: Vec<DVector<Complex64>> = signals
            .iter()
            .map(|s| f.analysis_apply(s).unwrap())
            .collect();
        let report = detect_anomaly(&f, &clean, &config, &tol()).unwrap();
        assert_eq!(report.verdict, DetectorVerdict::Clean);

        // systematic: every coefficient shifted by 0.5
        let shifted: Vec<DVector<Complex64>> =
            clean.iter().map(|c| c.map(|z| z + cx(0.5))).collect();
        let report = detect_anomaly(&f, &shifted, &config, &tol()).unwrap();
        assert_eq!(report.verdict, DetectorVerdict::Systematic);
        assert!((report.batch_sums[0][0] - 3.0).abs() < 1e-9);

        // random additive noise
        let model = NoiseModel::new(0.4, 0.6, NoiseDistribution::Gaussian).unwrap();
        let noisy: Vec<DVector<Complex64>> = clean
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let mut rng = ChaCha8Rng::seed_from_u64(500 + j as u64);
                let mut draws = vec![0.0; 6];
                model.sample_into(&mut rng, &mut draws);
                DVector::from_fn(6, |i, _| c[i] + cx(draws[i]))
            })
            .collect();
        let report = detect_anomaly(&f, &noisy, &config, &tol()).unwrap();
        assert_eq!(report.verdict, DetectorVerdict::Random);

        // one erased coordinate per batch with signals of growing norm:
        // the sums track the signal
        let erased: Vec<DVector<Complex64>> = clean
            .iter()
            .map(|c| {
                let mut v = c.clone();
                v[3] = cx(0.0);
                v
            })
            .collect();
        let report = detect_anomaly(&f, &erased, &config, &tol()).unwrap();
        assert_eq!(report.verdict, DetectorVerdict::SignalDependent);

        assert!(detect_anomaly(&f, &clean[..2], &config, &tol()).is_err());
    }

    #[test]
    fn transmit_fills_optional_report_fields() {
        let roots4 = roots_of_unity_frame(4).unwrap();
        let signal = random_signal(2, 2);
        let spec = NoiseSpec {
            kind: NoiseKind::Additive(
                NoiseModel::new(0.7, 1.0, NoiseDistribution::Gaussian).unwrap(),
            ),
            seed: 31,
        };
        let opts = TransmitOptions {
            mse_trials: Some(2000),
            detector_batches: 12,
        };
        let report = transmit(&roots4, None, &signal, &spec, &opts, &tol()).unwrap();
        assert!(report.bound_values.is_some());
        assert!(report.bound_values.unwrap().all_satisfied);
        let mse = report.empirical_mse.unwrap();
        assert!((mse.mean - 0.5).abs() < 10.0 * mse.stderr);
        assert_eq!(report.detector_verdict, Some(DetectorVerdict::Random));

        // deterministic per seed
        let again = transmit(&roots4, None, &signal, &spec, &opts, &tol()).unwrap();
        assert_eq!(
            report.reconstruction_error_l2.to_bits(),
            again.reconstruction_error_l2.to_bits()
        );
    }

    #[test]
    fn transmit_with_explicit_balanced_dual() {
        let f = random::random_balanced_frame(77, 2, 5, FrameField::Real);
        let dual = crate::duality::sample_balanced_dual(&f, 3, &tol()).unwrap();
        let signal = random_signal(4, 2);
        let report = transmit(
            &f,
            Some(&dual),
            &signal,
            &systematic(-2.2),
            &TransmitOptions::default(),
            &tol(),
        )
        .unwrap();
        assert!(report.reconstruction_error_l2 <= 1e-9 * signal.norm());
        // bounds are canonical-dual statements and stay empty here
        assert!(report.bound_values.is_none());

        // a non-dual is rejected
        let not_dual = random::random_balanced_frame(78, 2, 5, FrameField::Real);
        assert!(transmit(
            &f,
            Some(&not_dual),
            &signal,
            &systematic(1.0),
            &TransmitOptions::default(),
            &tol()
        )
        .is_err());
    }
}
