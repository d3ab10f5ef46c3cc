//! `bframe`: build, check, dualise, repair and simulate balanced frames.
//!
//! Every command prints JSON on stdout. Domain failures exit with code 1
//! and a structured `{code, message, context}` JSON; usage errors exit
//! with code 2 (clap). All indices are 0-based (row 0 of the Fourier or
//! Hadamard matrix is the constant/all-ones row). Randomised commands
//! take `--seed`; without it a fixed default seed is used and echoed in
//! the output.

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use balanced_frames::channel::{
    self, NoiseDistribution, NoiseKind, NoiseModel, NoiseSpec, TransmitOptions,
};
use balanced_frames::constructions::{self, Construction, PartitionSpec};
use balanced_frames::duality::{self, TightDualSpec};
use balanced_frames::nearest::{self, NearestOutcome, WeightVector};
use balanced_frames::predicates;
use balanced_frames::{Frame, FrameError, FrameField, ToleranceConfig};

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "bframe",
    about = "Balanced-frame construction, analysis, duality, repair and channel simulation",
    version
)]
struct Cli {
    /// Relative tolerance for zero tests.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Singular-value cutoff relative to the largest singular value.
    #[arg(long, global = true, default_value_t = 1e-10)]
    rank_tol: f64,

    /// Seed for randomised commands (a fixed default is used and
    /// reported when omitted).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output format; csv applies to frame outputs only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named frame family or combination.
    Build(BuildArgs),
    /// Run the predicate suite on a frame.
    Check {
        /// Frame JSON file.
        frame: String,
    },
    /// Dual-frame operations.
    Dual(DualArgs),
    /// Nearest balanced frame in the l1 or l2 sense.
    Nearest {
        /// Frame JSON file.
        frame: String,
        #[arg(long, value_enum)]
        norm: NormArg,
        /// JSON file holding an array of K weights (l1 only).
        #[arg(long)]
        weights: Option<String>,
    },
    /// Classical or B-complement of a Parseval frame.
    Complement {
        /// Frame JSON file.
        frame: String,
        #[arg(long, value_enum, default_value_t = ComplementKind::Classical)]
        kind: ComplementKind,
    },
    /// Transmit a signal through a noisy coefficient channel.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormArg {
    L1,
    L2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ComplementKind {
    Classical,
    B,
}

#[derive(Args)]
struct BuildArgs {
    /// Include the hypothesis checklist in the output.
    #[arg(long)]
    report: bool,
    /// Emit the frame even when theorem hypotheses fail.
    #[arg(long)]
    unchecked: bool,
    #[command(subcommand)]
    family: Family,
}

#[derive(Subcommand)]
enum Family {
    /// K-th roots of unity in R^2 (K >= 3).
    RootsOfUnity { k: usize },
    /// Row-selected submatrix of the K x K Fourier matrix.
    Harmonic {
        k: usize,
        /// 0-based rows, e.g. --rows 1,2 (row 0 is the constant row).
        #[arg(long, value_delimiter = ',', required = true)]
        rows: Vec<usize>,
    },
    /// Sylvester-Hadamard matrix of the given order, or a row subframe.
    Hadamard {
        order: usize,
        /// 0-based rows; defaults to all rows.
        #[arg(long, value_delimiter = ',')]
        rows: Option<Vec<usize>>,
    },
    /// The cross {+-e_1, ..., +-e_d}.
    Cross { d: usize },
    /// Cross projected by an orthogonal projection (eutactic star).
    EutacticStar {
        /// d x d projection matrix, stored in the frame JSON format.
        projection: String,
    },
    /// Partition frame for a nondecreasing partition, e.g. 1,2,2.
    Partition {
        #[arg(value_delimiter = ',')]
        eta: Vec<usize>,
    },
    /// Simplex frame with d + 1 vectors in R^d.
    Simplex { d: usize },
    /// Append -sum(f_k) to an existing frame.
    AppendBalancing { frame: String },
    /// Block-orthogonal union of two frames.
    DisjointUnion { a: String, b: String },
    /// Inner direct sum (alpha f_k, beta g_k).
    InnerDirectSum {
        a: String,
        b: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// All pairs (alpha f_k, beta g_l).
    Sum {
        a: String,
        b: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Kronecker columns f_j (x) g_l.
    Tensor { a: String, b: String },
    /// Simple lift plus one antipodal point (tetrahedron pattern).
    LiftAntipodal {
        frame: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Two antipodal points on a fresh axis (octahedron pattern).
    LiftTwoAntipodal { frame: String },
    /// Symmetric simple lift of two frames (hexahedron pattern).
    SymmetricSimpleLift {
        a: String,
        b: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        betas: Option<Vec<f64>>,
    },
    /// Partial simple lift of a UNTF by a BUNTF.
    PartialSimpleLift {
        a: String,
        b: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Symmetric partial lift of three BUNTFs.
    SymmetricPartialLift {
        a: String,
        b: String,
        b_tilde: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Union of lifted copies with per-copy beta coefficients.
    MultiLiftUnion {
        frames: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
    },
}

#[derive(Args)]
struct DualArgs {
    #[command(subcommand)]
    mode: DualMode,
}

#[derive(Subcommand)]
enum DualMode {
    /// Canonical dual S^{-1} F.
    Canonical { frame: String },
    /// Seeded random balanced dual.
    BalancedSample { frame: String },
    /// Balanced (rho + 1)-tight dual of a balanced Parseval frame.
    Tight {
        frame: String,
        #[arg(long)]
        rho: f64,
    },
    /// Erasure dual pair after deleting one index (0-based).
    Erasure {
        frame: String,
        #[arg(long)]
        index: usize,
        /// Dual frame JSON; canonical dual when omitted.
        #[arg(long)]
        dual: Option<String>,
    },
    /// Classical complement of a Parseval frame.
    Complement { frame: String },
    /// B-complement of a balanced Parseval frame.
    BComplement { frame: String },
}

#[derive(Args)]
struct SimulateArgs {
    /// Frame JSON file.
    #[arg(long)]
    frame: String,
    /// Dual frame JSON file, or "auto" for the canonical dual.
    #[arg(long, default_value = "auto")]
    dual: String,
    /// Perturbation: systematic:c=0.5 | additive:mu=0.7,sigma=1,dist=gaussian | erasure:3[,zero-fill]
    #[arg(long, value_parser = parse_noise)]
    noise: NoiseArg,
    /// Monte-Carlo trials for the MSE estimate (additive noise).
    #[arg(long)]
    trials: Option<u64>,
    /// Batches for the anomaly detector (>= 3 to enable).
    #[arg(long, default_value_t = 0)]
    detector_batches: usize,
    /// Signal JSON file (array of entries); random when omitted.
    #[arg(long)]
    signal: Option<String>,
}

#[derive(Clone, Debug)]
struct NoiseArg {
    kind: NoiseKind,
}

fn parse_noise(s: &str) -> Result<NoiseArg, String> {
    let (head, rest) = s.split_once(':').unwrap_or((s, ""));
    let params: Vec<&str> = rest
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect();
    let lookup = |key: &str| -> Option<f64> {
        params.iter().find_map(|p| {
            p.split_once('=')
                .filter(|(k, _)| *k == key)
                .and_then(|(_, v)| v.parse().ok())
        })
    };
    match head {
        "systematic" => {
            let c = lookup("c").ok_or("systematic noise needs c=<value>")?;
            Ok(NoiseArg {
                kind: NoiseKind::Systematic {
                    offset: Complex64::new(c, 0.0),
                },
            })
        }
        "additive" => {
            let mu = lookup("mu").ok_or("additive noise needs mu=<value>")?;
            let sigma = lookup("sigma").ok_or("additive noise needs sigma=<value>")?;
            let dist = params
                .iter()
                .find_map(|p| p.split_once('=').filter(|(k, _)| *k == "dist"))
                .map(|(_, v)| v)
                .unwrap_or("gaussian");
            let distribution = match dist {
                "gaussian" => NoiseDistribution::Gaussian,
                "uniform" => NoiseDistribution::Uniform,
                other => return Err(format!("unknown distribution: {other}")),
            };
            let model = NoiseModel::new(mu, sigma, distribution).map_err(|e| e.to_string())?;
            Ok(NoiseArg {
                kind: NoiseKind::Additive(model),
            })
        }
        "erasure" => {
            let mut indices = Vec::new();
            let mut zero_fill = false;
            for p in &params {
                if *p == "zero-fill" {
                    zero_fill = true;
                } else if let Ok(i) = p.parse::<usize>() {
                    indices.push(i);
                } else {
                    return Err(format!("bad erasure parameter: {p}"));
                }
            }
            if indices.is_empty() {
                return Err("erasure needs at least one index, e.g. erasure:3".into());
            }
            Ok(NoiseArg {
                kind: NoiseKind::Erasure { indices, zero_fill },
            })
        }
        other => Err(format!(
            "unknown noise kind {other}; expected systematic | additive | erasure"
        )),
    }
}

fn main() {
    let cli = Cli::parse();
    let command_name = command_name(&cli.command);
    match run(cli) {
        Ok(output) => println!("{output}"),
        Err(err) => {
            let payload = serde_json::json!({
                "code": err.code(),
                "message": err.to_string(),
                "context": { "command": command_name },
            });
            println!("{payload}");
            std::process::exit(1);
        }
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Build(_) => "build",
        Command::Check { .. } => "check",
        Command::Dual(_) => "dual",
        Command::Nearest { .. } => "nearest",
        Command::Complement { .. } => "complement",
        Command::Simulate(_) => "simulate",
    }
}

fn run(cli: Cli) -> Result<String, FrameError> {
    let tol = ToleranceConfig::new(cli.tol, cli.rank_tol)?;
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let format = cli.format;
    match cli.command {
        Command::Build(args) => run_build(args, seed, &tol, format),
        Command::Check { frame } => {
            let f = load_frame(&frame)?;
            render(check_report(&f, &tol), format)
        }
        Command::Dual(args) => run_dual(args, seed, &tol, format),
        Command::Nearest {
            frame,
            norm,
            weights,
        } => {
            let f = load_frame(&frame)?;
            let outcome = match norm {
                NormArg::L2 => nearest::nearest_balanced_l2(&f, &tol)?,
                NormArg::L1 => {
                    let w = weights
                        .map(|path| -> Result<WeightVector, FrameError> {
                            let text = read_file(&path)?;
                            let raw: Vec<f64> = serde_json::from_str(&text)?;
                            WeightVector::new(raw)
                        })
                        .transpose()?;
                    nearest::nearest_balanced_l1(&f, w.as_ref(), &tol)?
                }
            };
            render(nearest_report(&outcome), format)
        }
        Command::Complement { frame, kind } => {
            let f = load_frame(&frame)?;
            let result = match kind {
                ComplementKind::Classical => duality::complement(&f, &tol)?,
                ComplementKind::B => duality::b_complement(&f, &tol)?,
            };
            render_frame(&result, format)
        }
        Command::Simulate(args) => run_simulate(args, seed, &tol, format),
    }
}

fn run_build(
    args: BuildArgs,
    seed: u64,
    tol: &ToleranceConfig,
    format: Format,
) -> Result<String, FrameError> {
    let _ = seed;
    let cx = |x: Option<f64>| x.map(|v| Complex64::new(v, 0.0));
    enum Built {
        Plain(Frame),
        Checked(Construction),
    }
    let built = match args.family {
        Family::RootsOfUnity { k } => Built::Plain(constructions::roots_of_unity_frame(k)?),
        Family::Harmonic { k, rows } => Built::Plain(constructions::harmonic_frame(k, &rows)?),
        Family::Hadamard { order, rows } => {
            let h = constructions::sylvester_hadamard(order)?;
            let rows = rows.unwrap_or_else(|| (0..order).collect());
            Built::Plain(constructions::hadamard_subframe(&h, &rows)?)
        }
        Family::Cross { d } => {
            if d == 0 {
                return Err(FrameError::InvalidArgument("cross needs d >= 1".into()));
            }
            let basis = Frame::from_real(DMatrix::identity(d, d)).expect("identity");
            Built::Plain(constructions::cross_frame(&basis)?)
        }
        Family::EutacticStar { projection } => {
            let p = load_frame(&projection)?;
            if p.dim() != p.len() {
                return Err(FrameError::InvalidArgument(
                    "the projection file must hold a square matrix".into(),
                ));
            }
            let basis = Frame::from_real(DMatrix::identity(p.dim(), p.dim())).expect("identity");
            Built::Plain(constructions::eutactic_star(&basis, p.matrix(), tol)?)
        }
        Family::Partition { eta } => {
            Built::Plain(constructions::partition_frame(&PartitionSpec::new(eta)?)?)
        }
        Family::Simplex { d } => Built::Plain(constructions::simplex_frame(d)?),
        Family::AppendBalancing { frame } => {
            let f = load_frame(&frame)?;
            Built::Plain(constructions::append_balancing_vector(&f, tol)?)
        }
        Family::DisjointUnion { a, b } => {
            let (fa, fb) = (load_frame(&a)?, load_frame(&b)?);
            Built::Checked(constructions::disjoint_union(&fa, &fb, tol))
        }
        Family::InnerDirectSum { a, b, alpha, beta } => {
            let (fa, fb) = (load_frame(&a)?, load_frame(&b)?);
            Built::Checked(constructions::inner_direct_sum(
                &fa,
                &fb,
                cx(alpha),
                cx(beta),
                tol,
            )?)
        }
        Family::Sum { a, b, alpha, beta } => {
            let (fa, fb) = (load_frame(&a)?, load_frame(&b)?);
            Built::Checked(constructions::sum_combine(
                &fa,
                &fb,
                cx(alpha),
                cx(beta),
                tol,
            ))
        }
        Family::Tensor { a, b } => {
            let (fa, fb) = (load_frame(&a)?, load_frame(&b)?);
            Built::Checked(constructions::tensor_product(&fa, &fb, tol))
        }
        Family::LiftAntipodal { frame, alpha, beta } => {
            let f = load_frame(&frame)?;
            Built::Checked(constructions::lift_append_antipodal_point(
                &f,
                cx(alpha),
                cx(beta),
                tol,
            ))
        }
        Family::LiftTwoAntipodal { frame } => {
            let f = load_frame(&frame)?;
            Built::Checked(constructions::lift_two_antipodal(&f, tol))
        }
        Family::SymmetricSimpleLift { a, b, alpha, betas } => {
            let (fa, fb) = (load_frame(&a)?, load_frame(&b)?);
            let betas_cx: Option<Vec<Complex64>> =
                betas.map(|v| v.into_iter().map(|x| Complex64::new(x, 0.0)).collect());
            Built::Checked(constructions::symmetric_simple_lift(
                &fa,
                &fb,
                cx(alpha),
                betas_cx.as_deref(),
                tol,
            )?)
        }
        Family::PartialSimpleLift { a, b, alpha, beta } => {
            let (fa, fb) = (load_frame(&a)?, load_frame(&b)?);
            Built::Checked(constructions::partial_simple_lift(
                &fa,
                &fb,
                cx(alpha),
                cx(beta),
                tol,
            )?)
        }
        Family::SymmetricPartialLift {
            a,
            b,
            b_tilde,
            alpha,
            beta,
        } => {
            let (fa, fb, ft) = (load_frame(&a)?, load_frame(&b)?, load_frame(&b_tilde)?);
            Built::Checked(constructions::symmetric_partial_lift(
                &fa,
                &fb,
                &ft,
                cx(alpha),
                cx(beta),
                tol,
            )?)
        }
        Family::MultiLiftUnion { frames, betas } => {
            if frames.len() < 2 {
                return Err(FrameError::InvalidArgument(
                    "multi-lift-union needs at least two frame files".into(),
                ));
            }
            let loaded: Result<Vec<Frame>, FrameError> =
                frames.iter().map(|p| load_frame(p)).collect();
            let betas_cx: Vec<Complex64> =
                betas.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
            Built::Checked(constructions::multi_lift_union(&loaded?, &betas_cx, tol)?)
        }
    };

    match built {
        Built::Plain(frame) => render_frame(&frame, format),
        Built::Checked(construction) => {
            let all_pass = construction.all_pass();
            if !all_pass && !args.unchecked {
                let failed: Vec<&str> = construction.failed().iter().map(|c| c.name).collect();
                return Err(FrameError::HypothesesFailed(format!(
                    "{} (rerun with --unchecked to emit the frame anyway)",
                    failed.join(", ")
                )));
            }
            if args.report || !all_pass {
                let checks: Vec<serde_json::Value> = construction
                    .checks
                    .iter()
                    .map(|c| {
                        serde_json::json!({
                            "name": c.name,
                            "passed": c.passed,
                            "detail": c.detail,
                        })
                    })
                    .collect();
                render(
                    serde_json::json!({
                        "frame": construction.frame.to_json_value(),
                        "claim": construction.claim,
                        "all_hypotheses_pass": all_pass,
                        "checks": checks,
                    }),
                    format,
                )
            } else {
                render_frame(&construction.frame, format)
            }
        }
    }
}

fn run_dual(
    args: DualArgs,
    seed: u64,
    tol: &ToleranceConfig,
    format: Format,
) -> Result<String, FrameError> {
    match args.mode {
        DualMode::Canonical { frame } => {
            let f = load_frame(&frame)?;
            render_frame(&duality::canonical_dual(&f, tol)?, format)
        }
        DualMode::BalancedSample { frame } => {
            let f = load_frame(&frame)?;
            let dual = duality::sample_balanced_dual(&f, seed, tol)?;
            render(
                serde_json::json!({
                    "seed": seed,
                    "frame": dual.to_json_value(),
                }),
                format,
            )
        }
        DualMode::Tight { frame, rho } => {
            let f = load_frame(&frame)?;
            let spec = TightDualSpec::new(rho, seed)?;
            let result = duality::balanced_tight_dual(&f, &spec, tol)?;
            render(
                serde_json::json!({
                    "seed": seed,
                    "rho": rho,
                    "unique_self": result.is_unique_self,
                    "frame": result.frame.to_json_value(),
                }),
                format,
            )
        }
        DualMode::Erasure { frame, index, dual } => {
            let f = load_frame(&frame)?;
            let dual = match dual {
                Some(path) => load_frame(&path)?,
                None => duality::canonical_dual(&f, tol)?,
            };
            let (kept, shifted) = duality::erasure_dual(&f, &dual, index, tol)?;
            render(
                serde_json::json!({
                    "erased_index": index,
                    "kept_frame": kept.to_json_value(),
                    "shifted_dual": shifted.to_json_value(),
                }),
                format,
            )
        }
        DualMode::Complement { frame } => {
            let f = load_frame(&frame)?;
            render_frame(&duality::complement(&f, tol)?, format)
        }
        DualMode::BComplement { frame } => {
            let f = load_frame(&frame)?;
            render_frame(&duality::b_complement(&f, tol)?, format)
        }
    }
}

fn run_simulate(
    args: SimulateArgs,
    seed: u64,
    tol: &ToleranceConfig,
    format: Format,
) -> Result<String, FrameError> {
    let f = load_frame(&args.frame)?;
    let dual = if args.dual == "auto" {
        None
    } else {
        Some(load_frame(&args.dual)?)
    };
    let signal = match &args.signal {
        Some(path) => {
            let text = read_file(path)?;
            parse_vector(&text, f.field())?
        }
        None => {
            let mut rng = balanced_frames::random::rng_from_seed(seed);
            balanced_frames::random::standard_vector(&mut rng, f.dim(), f.field())
        }
    };
    if signal.len() != f.dim() {
        return Err(FrameError::DimensionMismatch {
            context: "signal",
            expected: f.dim(),
            got: signal.len(),
        });
    }
    let spec = NoiseSpec {
        kind: args.noise.kind.clone(),
        seed,
    };
    let opts = TransmitOptions {
        mse_trials: args.trials,
        detector_batches: args.detector_batches,
    };
    let report = channel::transmit(&f, dual.as_ref(), &signal, &spec, &opts, tol)?;
    let signal_json: Vec<serde_json::Value> = signal
        .iter()
        .map(|z| match f.field() {
            FrameField::Real => serde_json::json!(z.re),
            FrameField::Complex => serde_json::json!([z.re, z.im]),
        })
        .collect();
    render(
        serde_json::json!({
            "seed": seed,
            "signal": signal_json,
            "report": serde_json::to_value(&report)?,
        }),
        format,
    )
}

fn check_report(f: &Frame, tol: &ToleranceConfig) -> serde_json::Value {
    let spectral = f.spectral(tol);
    let equivalences = predicates::check_balanced_equivalences(f, tol);
    let robust = predicates::is_maximally_robust(f, tol).ok();
    let isogonal_value = predicates::isogonal_common_value(f, tol).map(|a| [a.re, a.im]);
    serde_json::json!({
        "field": match f.field() { FrameField::Real => "real", FrameField::Complex => "complex" },
        "d": f.dim(),
        "K": f.len(),
        "frame": predicates::is_frame(f, tol),
        "balanced": predicates::is_balanced(f, tol),
        "tight": {
            "is_tight": predicates::is_tight(f, tol),
            "constant": predicates::tight_constant(f, tol),
        },
        "parseval": predicates::is_parseval(f, tol),
        "unit_norm": predicates::is_unit_norm(f, tol),
        "equal_norm": predicates::is_equal_norm(f, tol),
        "isogonal": predicates::is_isogonal(f, tol),
        "isogonal_common_value": isogonal_value,
        "simplex": predicates::is_simplex(f, tol),
        "maximally_robust": robust,
        "equivalences": {
            "vector_sum": equivalences.vector_sum,
            "synthesis_annihilates_e": equivalences.synthesis_annihilates_e,
            "gram_annihilates_e": equivalences.gram_annihilates_e,
            "gram_row_sums": equivalences.gram_row_sums,
            "gram_total_sum": equivalences.gram_total_sum,
            "analysis_sums": equivalences.analysis_sums,
            "shifted_norm_identity": equivalences.shifted_norm_identity,
            "pairwise_distance_identity": equivalences.pairwise_distance_identity,
            "consistent": equivalences.consistent(),
        },
        "spectral": serde_json::to_value(&spectral).expect("serialisable"),
        "balance_sum_norm": predicates::balance_sum(f).norm(),
    })
}

fn nearest_report(outcome: &NearestOutcome) -> serde_json::Value {
    match outcome {
        NearestOutcome::Minimizer {
            frame,
            distance,
            weights,
            residual,
        } => serde_json::json!({
            "exists": true,
            "distance": distance,
            "residual": residual,
            "reason": serde_json::Value::Null,
            "frame": frame.to_json_value(),
            "weights": weights.as_ref().map(|w| w.values().to_vec()),
        }),
        NearestOutcome::NotExists {
            infimum,
            reason,
            residual,
        } => serde_json::json!({
            "exists": false,
            "distance": infimum,
            "residual": residual,
            "reason": serde_json::to_value(reason).expect("serialisable"),
            "frame": serde_json::Value::Null,
            "weights": serde_json::Value::Null,
        }),
    }
}

fn load_frame(path: &str) -> Result<Frame, FrameError> {
    Frame::from_json_str(&read_file(path)?)
}

fn read_file(path: &str) -> Result<String, FrameError> {
    std::fs::read_to_string(path)
        .map_err(|e| FrameError::InvalidArgument(format!("cannot read {path}: {e}")))
}

fn parse_vector(text: &str, field: FrameField) -> Result<DVector<Complex64>, FrameError> {
    let raw: Vec<serde_json::Value> = serde_json::from_str(text)?;
    let mut out = DVector::zeros(raw.len());
    for (i, v) in raw.iter().enumerate() {
        out[i] = match (field, v) {
            (FrameField::Real, v) if v.is_number() => {
                Complex64::new(v.as_f64().expect("number"), 0.0)
            }
            (FrameField::Complex, serde_json::Value::Array(pair)) if pair.len() == 2 => {
                match (pair[0].as_f64(), pair[1].as_f64()) {
                    (Some(re), Some(im)) => Complex64::new(re, im),
                    _ => {
                        return Err(FrameError::InvalidFrameData(format!(
                            "bad complex entry at {i}"
                        )))
                    }
                }
            }
            (FrameField::Complex, v) if v.is_number() => {
                Complex64::new(v.as_f64().expect("number"), 0.0)
            }
            _ => {
                return Err(FrameError::InvalidFrameData(format!(
                    "bad vector entry at {i}: {v}"
                )))
            }
        };
    }
    Ok(out)
}

fn render(value: serde_json::Value, format: Format) -> Result<String, FrameError> {
    match format {
        Format::Json => Ok(value.to_string()),
        Format::Csv => Err(FrameError::InvalidArgument(
            "csv output applies to frame outputs only".into(),
        )),
    }
}

fn render_frame(frame: &Frame, format: Format) -> Result<String, FrameError> {
    match format {
        Format::Json => Ok(frame.to_json_string()),
        Format::Csv => {
            let mut lines = vec![format!(
                "# field={} d={} K={}",
                match frame.field() {
                    FrameField::Real => "real",
                    FrameField::Complex => "complex",
                },
                frame.dim(),
                frame.len()
            )];
            for k in 0..frame.len() {
                let col = frame.column(k).expect("in range");
                let cells: Vec<String> = col
                    .iter()
                    .map(|z| match frame.field() {
                        FrameField::Real => format!("{}", z.re),
                        FrameField::Complex => format!("{},{}", z.re, z.im),
                    })
                    .collect();
                lines.push(cells.join(","));
            }
            Ok(lines.join("\n"))
        }
    }
}
