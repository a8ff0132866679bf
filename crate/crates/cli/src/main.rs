//! Command-line front end: classification, measures, conversion planning,
//! mixed-unitary decomposition, and scripted verification demos.
//!
//! JSON goes to standard output; human-readable progress goes to standard
//! error. Exit codes: 0 on success, 1 on verification failure, 2 on usage or
//! parse errors. Basis indices in all files are 0-based.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use gencoh_core::channels::{
    channels_equal, kraus_equivalence_isometry, random_deterministic_schur,
};
use gencoh_core::error::Error as CoreError;
use gencoh_core::families::{
    classification_report, erasing_map, gio_not_pio_example, hadamard_demo_pair, is_gio,
    pauli_mix, Verdict,
};
use gencoh_core::fileio::{load_channel, load_state, plan_to_json, LoadedChannel, LoadedState};
use gencoh_core::measures::evaluate;
use gencoh_core::numerics::{ComplexMatrix, Scalar, ToleranceConfig};
use gencoh_core::states::{plus_state, random_pure, DensityMatrix, PureState};
use gencoh_core::structure::{
    extremal_nonunitary_example, is_extremal_gio, mixed_unitary_decompose,
};
use gencoh_core::transforms::{
    activation_demo, fio_pure_to_pure, fio_to_maximally_mixed, gio_mixed_to_mixed,
    gio_mixed_to_pure, gio_mixed_to_pure_stochastic, gio_pure_to_mixed, gio_pure_to_pure,
    sfio_protocol, sgio_optimal_probability, TransformVerdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

#[derive(Parser)]
#[command(
    name = "gencoh",
    version,
    about = "Numerics for genuinely and fully incoherent quantum operations"
)]
struct Cli {
    /// Seed for randomized checks; falls back to COHERE_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Relative equality tolerance override.
    #[arg(long, global = true)]
    eq_tol: Option<f64>,

    /// Relative PSD eigenvalue floor override.
    #[arg(long, global = true)]
    psd_tol: Option<f64>,

    /// Iterative-solver convergence tolerance override.
    #[arg(long, global = true)]
    opt_tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a channel against the incoherent-operation families.
    Classify {
        #[arg(long)]
        channel: PathBuf,
    },
    /// Evaluate a coherence measure on a state.
    Measure {
        #[arg(long)]
        state: PathBuf,
        /// One of: cr, l1, dephase, mindist, wy.
        #[arg(long)]
        measure: String,
        /// Schatten exponent for dephase/mindist.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Diagonal Hamiltonian entries for wy, comma separated.
        #[arg(long = "h", value_delimiter = ',', num_args = 1..)]
        hamiltonian: Option<Vec<f64>>,
    },
    /// Plan a state conversion under a family of free operations.
    Convert {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        /// One of: gio, sgio, fio.
        #[arg(long)]
        family: String,
        /// Ask for the optimal stochastic protocol instead of a
        /// deterministic one.
        #[arg(long)]
        stochastic: bool,
    },
    /// Decompose a deterministic Schur channel into diagonal unitaries.
    Decompose {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        mixed_unitary: bool,
        #[arg(long, default_value_t = 9)]
        max_terms: usize,
    },
    /// Run a scripted verification demo. Names: hadamard-kraus, erasing,
    /// pauli-mix, gio-not-pio, plus3-reachable, activation, extremal-d4,
    /// appendix-c.
    Demo { name: String },
}

/// Failure modes mapped to exit codes 1 (verification) and 2 (usage).
enum CliError {
    Usage(String),
    Verification(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Io(_) | CoreError::Parse(_) | CoreError::InvalidParameter(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Verification(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = cli
        .seed
        .or_else(|| {
            std::env::var("COHERE_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0);
    let mut tol = ToleranceConfig::default();
    if let Some(v) = cli.eq_tol {
        tol.eq_tol = v;
    }
    if let Some(v) = cli.psd_tol {
        tol.psd_tol = v;
    }
    if let Some(v) = cli.opt_tol {
        tol.opt_tol = v;
    }
    if let Err(e) = tol.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }

    match run(cli.command, seed, &tol) {
        Ok(value) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("serializable")
            );
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failure: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command, seed: u64, tol: &ToleranceConfig) -> Result<Value, CliError> {
    match command {
        Command::Classify { channel } => {
            let loaded = load_channel(&channel, tol)?;
            let kraus = loaded.kraus(tol)?;
            eprintln!("classifying a dimension-{} channel", kraus.dim());
            let report = classification_report(&kraus, tol)?;
            Ok(serde_json::to_value(&report).expect("serializable"))
        }
        Command::Measure {
            state,
            measure,
            p,
            hamiltonian,
        } => {
            let loaded = load_state(&state, tol)?;
            let rho = loaded.density();
            let result = evaluate(&rho, &measure, p, hamiltonian.as_deref(), tol)?;
            Ok(serde_json::to_value(&result).expect("serializable"))
        }
        Command::Convert {
            from,
            to,
            family,
            stochastic,
        } => {
            let source = load_state(&from, tol)?;
            let target = load_state(&to, tol)?;
            convert(&source, &target, &family, stochastic, tol)
        }
        Command::Decompose {
            channel,
            mixed_unitary,
            max_terms,
        } => {
            if !mixed_unitary {
                return Err(CliError::Usage(
                    "only --mixed-unitary decomposition is available".into(),
                ));
            }
            let loaded = load_channel(&channel, tol)?;
            let schur = match loaded {
                LoadedChannel::Schur(s) => s,
                LoadedChannel::Kraus(c) => c.to_schur(tol)?,
            };
            match mixed_unitary_decompose(&schur, max_terms, tol)? {
                Some(dec) => {
                    let vectors: Vec<Vec<[f64; 2]>> = dec
                        .phase_vectors
                        .iter()
                        .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
                        .collect();
                    Ok(json!({
                        "decomposition": {
                            "weights": dec.weights,
                            "phase_vectors": vectors,
                            "terms": dec.terms(),
                            "residual": dec.residual(&schur),
                        }
                    }))
                }
                None => Ok(json!({
                    "decomposition": null,
                    "reason": format!(
                        "no mixture of at most {max_terms} diagonal unitaries reproduced the \
                         channel within opt_tol"
                    ),
                })),
            }
        }
        Command::Demo { name } => demo(&name, seed, tol),
    }
}

fn convert(
    source: &LoadedState,
    target: &LoadedState,
    family: &str,
    stochastic: bool,
    tol: &ToleranceConfig,
) -> Result<Value, CliError> {
    if source.dim() != target.dim() {
        return Err(CliError::Usage(format!(
            "source dimension {} does not match target dimension {}",
            source.dim(),
            target.dim()
        )));
    }
    let plan_value = match (family, stochastic) {
        ("gio", false) => {
            let plan = match (source, target) {
                (LoadedState::Pure(psi), LoadedState::Pure(phi)) => {
                    gio_pure_to_pure(psi, phi, tol)?
                }
                (LoadedState::Pure(psi), LoadedState::Density(rho)) => {
                    gio_pure_to_mixed(psi, rho, tol)?
                }
                (LoadedState::Density(rho), LoadedState::Pure(phi)) => {
                    gio_mixed_to_pure(rho, phi, tol)?
                }
                (LoadedState::Density(rho), LoadedState::Density(sigma)) => {
                    gio_mixed_to_mixed(rho, sigma, tol)?
                }
            };
            plan_to_json(&plan)
        }
        ("gio", true) => {
            let phi = target.pure_state(tol).map_err(|_| {
                CliError::Usage("stochastic gio planning requires a pure target state".into())
            })?;
            let plan = gio_mixed_to_pure_stochastic(&source.density(), Some(&phi), tol)?;
            plan_to_json(&plan)
        }
        ("sgio", _) => {
            let psi = source.pure_state(tol)?;
            let phi = target.pure_state(tol)?;
            let plan = sgio_optimal_probability(&psi, &phi, tol)?;
            plan_to_json(&plan)
        }
        ("fio", false) => {
            let rho = source.density();
            let target_is_max_mixed = target
                .density()
                .mat()
                .approx_eq(DensityMatrix::maximally_mixed(rho.dim()).mat(), tol.eq_tol);
            if target_is_max_mixed && !matches!(target, LoadedState::Pure(_)) {
                plan_to_json(&fio_to_maximally_mixed(&rho, tol)?)
            } else {
                let psi = source.pure_state(tol).map_err(|_| {
                    CliError::Usage(
                        "deterministic fio planning handles pure sources or the maximally \
                         mixed target"
                            .into(),
                    )
                })?;
                let phi = target.pure_state(tol)?;
                plan_to_json(&fio_pure_to_pure(&psi, &phi, tol)?)
            }
        }
        ("fio", true) => {
            let psi = source.pure_state(tol)?;
            let phi = target.pure_state(tol)?;
            let (plan, bound) = sfio_protocol(&psi, &phi, tol)?;
            let mut v = plan_to_json(&plan);
            v["sfio_bound"] = json!({
                "probability": bound.probability,
                "tight": bound.tight,
            });
            v
        }
        (other, _) => {
            return Err(CliError::Usage(format!(
                "unknown family '{other}' (expected gio|sgio|fio)"
            )));
        }
    };
    Ok(plan_value)
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn checks_to_json(demo: &str, checks: Vec<Check>) -> Result<Value, CliError> {
    let all_passed = checks.iter().all(|c| c.passed);
    let items: Vec<Value> = checks
        .iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
        .collect();
    let value = json!({ "demo": demo, "checks": items, "passed": all_passed });
    if all_passed {
        Ok(value)
    } else {
        let failed: Vec<&str> = checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        eprintln!(
            "{}",
            serde_json::to_string_pretty(&value).expect("serializable")
        );
        Err(CliError::Verification(format!(
            "demo '{demo}' failed checks: {}",
            failed.join(", ")
        )))
    }
}

fn demo(name: &str, seed: u64, tol: &ToleranceConfig) -> Result<Value, CliError> {
    eprintln!("running demo '{name}' with seed {seed}");
    match name {
        "hadamard-kraus" => demo_hadamard(tol),
        "erasing" => demo_erasing(tol),
        "pauli-mix" => demo_pauli_mix(tol),
        "gio-not-pio" => demo_gio_not_pio(tol),
        "plus3-reachable" => demo_plus3(seed, tol),
        "activation" => demo_activation(tol),
        "extremal-d4" => demo_extremal(seed, tol),
        "appendix-c" => demo_maximally_mixed_target(tol),
        other => Err(CliError::Usage(format!(
            "unknown demo '{other}'; see --help for the list"
        ))),
    }
}

fn demo_hadamard(tol: &ToleranceConfig) -> Result<Value, CliError> {
    let (incoherent, rotated) = hadamard_demo_pair(tol)?;
    let equal = channels_equal(&incoherent, &rotated, tol)?;
    let isometry = kraus_equivalence_isometry(&incoherent, &rotated, tol)?;
    let mut residual = f64::INFINITY;
    if let Some(v) = &isometry {
        residual = 0.0;
        for i in 0..rotated.kraus().len() {
            let mut li = ComplexMatrix::zeros(2, 2);
            for (j, k) in incoherent.kraus().iter().enumerate() {
                li = li.add(&k.scale(v.get(i, j)))?;
            }
            residual += (&li - &rotated.kraus()[i]).frobenius_norm();
        }
    }
    let zero = PureState::basis(2, 0);
    let image = rotated.kraus()[0].mul_vec(zero.amplitudes())?;
    let image_ok = (image[0] - Scalar::new(0.5, 0.0)).norm() < 1e-9
        && (image[1] - Scalar::new(0.5, 0.0)).norm() < 1e-9;
    checks_to_json(
        "hadamard-kraus",
        vec![
            Check {
                name: "same channel in both decompositions",
                passed: equal,
                detail: "Choi matrices agree".into(),
            },
            Check {
                name: "partial isometry recovered",
                passed: isometry.is_some() && residual < 1e-8,
                detail: format!("reconstruction residual {residual:.3e}"),
            },
            Check {
                name: "rotated operator creates coherence from |0⟩",
                passed: image_ok,
                detail: "L₊|0⟩ = (|0⟩ + |1⟩)/2".into(),
            },
        ],
    )
}

fn demo_erasing(tol: &ToleranceConfig) -> Result<Value, CliError> {
    let erase = erasing_map(2, 0, tol)?;
    let report = classification_report(&erase, tol)?;
    let plus = plus_state(2)?.density();
    let (out, _) = erase.apply(&plus)?;
    let mut expected = ComplexMatrix::zeros(2, 2);
    expected.set(0, 0, Scalar::new(1.0, 0.0));
    checks_to_json(
        "erasing",
        vec![
            Check {
                name: "fixed output |0⟩⟨0|",
                passed: out.approx_eq(&expected, 1e-9),
                detail: "the channel erases every input".into(),
            },
            Check {
                name: "fully incoherent but not genuinely incoherent",
                passed: report.fio == Verdict::Yes && report.gio == Verdict::No,
                detail: format!("fio = {:?}, gio = {:?}", report.fio, report.gio),
            },
            Check {
                name: "dephasing-covariant, maximal, translation-invariant",
                passed: report.dio == Verdict::Yes
                    && report.mio == Verdict::Yes
                    && report.tio == Verdict::Yes,
                detail: format!(
                    "dio = {:?}, mio = {:?}, tio = {:?}",
                    report.dio, report.mio, report.tio
                ),
            },
            Check {
                name: "incoherent witness without a strict witness",
                passed: report.io == Verdict::WitnessYes && report.sio == Verdict::No,
                detail: format!("io = {:?}, sio = {:?}", report.io, report.sio),
            },
        ],
    )
}

fn demo_pauli_mix(tol: &ToleranceConfig) -> Result<Value, CliError> {
    let mix = pauli_mix(0.5, tol)?;
    let report = classification_report(&mix, tol)?;
    let endpoint = classification_report(&pauli_mix(1.0, tol)?, tol)?;
    checks_to_json(
        "pauli-mix",
        vec![
            Check {
                name: "the balanced mixture is not fully incoherent",
                passed: report.fio == Verdict::No,
                detail: format!("fio = {:?}", report.fio),
            },
            Check {
                name: "it stays maximally incoherent with a strict witness",
                passed: report.mio == Verdict::Yes && report.sio == Verdict::WitnessYes,
                detail: format!("mio = {:?}, sio = {:?}", report.mio, report.sio),
            },
            Check {
                name: "the unitary endpoints are fully incoherent",
                passed: endpoint.fio == Verdict::Yes,
                detail: "mixing breaks full incoherence, the parts have it".into(),
            },
        ],
    )
}

fn demo_gio_not_pio(tol: &ToleranceConfig) -> Result<Value, CliError> {
    let ch = gio_not_pio_example(std::f64::consts::FRAC_PI_4, tol)?;
    let gio = is_gio(&ch, tol)?;
    let report = classification_report(&ch, tol)?;
    let evidence = report
        .evidence
        .iter()
        .find(|e| matches!(e.family, gencoh_core::families::Family::Pio))
        .map(|e| e.detail.clone())
        .unwrap_or_default();
    checks_to_json(
        "gio-not-pio",
        vec![
            Check {
                name: "the channel is genuinely incoherent",
                passed: gio,
                detail: "every basis projector is fixed".into(),
            },
            Check {
                name: "physical incoherence is certifiably excluded",
                passed: report.pio == Verdict::No,
                detail: evidence,
            },
        ],
    )
}

fn demo_plus3(seed: u64, tol: &ToleranceConfig) -> Result<Value, CliError> {
    let plus3 = plus_state(3)?;
    let hi = (2.0f64 / 3.0).sqrt();
    let lo = (1.0f64 / 3.0).sqrt();

    let canonical = [
        PureState::from_reals(&[1.0, 0.0, 0.0], tol)?,
        PureState::from_reals(&[hi, lo, 0.0], tol)?,
        PureState::from_reals(&[lo, lo, lo], tol)?,
    ];
    let mut all_reachable = true;
    for target in &canonical {
        let plan = fio_pure_to_pure(&plus3, target, tol)?;
        all_reachable &= plan.verdict == TransformVerdict::Feasible;
    }

    let rank2 = &canonical[1];
    let plan = fio_pure_to_pure(&plus3, rank2, tol)?;
    let construction_ok = match &plan.channel {
        Some(ch) => {
            let (out, p) = ch.apply_matrix(plus3.density().mat())?;
            (p - 1.0).abs() < 1e-9 && (&out - rank2.density().mat()).frobenius_norm() < 1e-9
        }
        None => false,
    };

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut unreachable_ok = true;
    for _ in 0..200 {
        let target = random_pure(3, &mut rng);
        let plan = fio_pure_to_pure(&plus3, &target, tol)?;
        unreachable_ok &= plan.verdict != TransformVerdict::Feasible;
    }
    let wrong_rank2 = PureState::from_reals(&[0.5f64.sqrt(), 0.5f64.sqrt(), 0.0], tol)?;
    let plan = fio_pure_to_pure(&plus3, &wrong_rank2, tol)?;
    let wrong_blocked = plan.verdict == TransformVerdict::Infeasible;

    checks_to_json(
        "plus3-reachable",
        vec![
            Check {
                name: "the three admissible moduli patterns are reachable",
                passed: all_reachable,
                detail: "(1,0,0), (√(2/3),√(1/3),0), uniform".into(),
            },
            Check {
                name: "the explicit two-Kraus construction is exact",
                passed: construction_ok,
                detail: "output matches the rank-two target within 1e-9".into(),
            },
            Check {
                name: "random targets are rejected",
                passed: unreachable_ok,
                detail: "200 seeded Haar targets, none feasible".into(),
            },
            Check {
                name: "wrong rank-two moduli are rejected",
                passed: wrong_blocked,
                detail: "(√½, √½, 0) is not reachable".into(),
            },
        ],
    )
}

fn demo_activation(tol: &ToleranceConfig) -> Result<Value, CliError> {
    match activation_demo(tol) {
        Ok(report) => checks_to_json(
            "activation",
            vec![
                Check {
                    name: "two copies map onto the coupled pure state",
                    passed: report.two_copy_output_matches,
                    detail: "(√2|00⟩ + |01⟩ + |11⟩)/2 reached deterministically".into(),
                },
                Check {
                    name: "tracing the second qubit leaves the activated state",
                    passed: report.reduced_state_matches,
                    detail: "[[3/4, 1/4], [1/4, 1/4]]".into(),
                },
                Check {
                    name: "one copy cannot do it",
                    passed: report.single_copy_infeasible,
                    detail: format!("max residual {:.3e}", report.max_residual),
                },
            ],
        ),
        Err(e) => Err(CliError::Verification(e.to_string())),
    }
}

fn demo_extremal(seed: u64, tol: &ToleranceConfig) -> Result<Value, CliError> {
    let ch = extremal_nonunitary_example(4, tol)?;
    let gio = is_gio(&ch, tol)?;
    let extremal = is_extremal_gio(&ch, tol)?;
    let schur = ch.to_schur(tol)?;
    let no_decomposition = mixed_unitary_decompose(&schur, 9, tol)?.is_none();

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut low_dims_decompose = true;
    for d in [2usize, 3] {
        for _ in 0..20 {
            let a = random_deterministic_schur(d, &mut rng, tol);
            match mixed_unitary_decompose(&a, 9, tol)? {
                Some(dec) => low_dims_decompose &= dec.residual(&a) < 1e-6,
                None => low_dims_decompose = false,
            }
        }
    }
    checks_to_json(
        "extremal-d4",
        vec![
            Check {
                name: "the two-Kraus construction is genuinely incoherent",
                passed: gio,
                detail: "K₁ = diag(1, 1/2, 1/3, 1/4) and its completion".into(),
            },
            Check {
                name: "it is extremal",
                passed: extremal,
                detail: "the four product vectors are linearly independent".into(),
            },
            Check {
                name: "no mixed-unitary decomposition exists",
                passed: no_decomposition,
                detail: "peeling and phase search both fail, as they must".into(),
            },
            Check {
                name: "dimensions 2 and 3 always decompose",
                passed: low_dims_decompose,
                detail: "40 random channels, residuals below 1e-6".into(),
            },
        ],
    )
}

fn demo_maximally_mixed_target(tol: &ToleranceConfig) -> Result<Value, CliError> {
    let already = DensityMatrix::maximally_mixed(3);
    let from_uniform = fio_to_maximally_mixed(&already, tol)?;
    let plus4 = plus_state(4)?.density();
    let from_plus = fio_to_maximally_mixed(&plus4, tol)?;
    let skew = DensityMatrix::from_diagonal(&[0.75, 0.25], tol)?;
    let from_skew = fio_to_maximally_mixed(&skew, tol)?;
    checks_to_json(
        "appendix-c",
        vec![
            Check {
                name: "the maximally mixed state maps to itself",
                passed: from_uniform.verdict == TransformVerdict::Feasible,
                detail: "dephasing acts as the identity here".into(),
            },
            Check {
                name: "uniform-diagonal states reach it by dephasing",
                passed: from_plus.verdict == TransformVerdict::Feasible
                    && from_plus.probability == 1.0,
                detail: "the maximally coherent four-level state has a uniform diagonal".into(),
            },
            Check {
                name: "non-uniform diagonals cannot reach it",
                passed: from_skew.verdict == TransformVerdict::Infeasible,
                detail: from_skew.certificate.unwrap_or_default(),
            },
        ],
    )
}
