//! `spacelike`: command-line front end for the behavior, quantum and
//! theory-space tools.
//!
//! Every command prints JSON to stdout, or to the path given with `-o`.
//! Exit status is 0 on success, 1 when the input fails validation or an
//! operation's precondition, and 2 on usage errors.

mod io;
mod qm;
mod space;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use spacelike_core::behavior::{
    condition_with, diagnose_extension_with, equivalent_observations, equivalent_preparations, marginal_local,
    marginal_remote, signaling_measure, SignalingReport,
};
use spacelike_core::space::{openness_radius, MarginalEqualities, TheoryPoint};
use spacelike_core::{tol, Error};

use io::{emit, load_joint, load_single, Loaded, Usage};

const ABOUT: &str = "No-signaling checks, conditioned states and theory-space experiments.

Tolerances can be overridden with SPACELIKE_SIG_TOL (signaling equalities,
default 1e-9) and SPACELIKE_EQUIV_TOL (equivalence tests, default 1e-9).
Random commands use seed 42 unless --seed is given.

Exit status: 0 success, 1 validation or precondition failure, 2 usage error.";

#[derive(Parser)]
#[command(name = "spacelike", version, about = "No-signaling checks, conditioned states and theory-space experiments", long_about = ABOUT)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// Write the JSON result here instead of stdout.
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct SigTol {
    /// Tolerance for the signaling equalities.
    #[arg(long = "tol", env = "SPACELIKE_SIG_TOL", default_value_t = tol::SIG)]
    value: f64,
}

#[derive(Args, Clone, Copy)]
struct EquivTol {
    /// Tolerance for equality of outcome probabilities.
    #[arg(long = "tol", env = "SPACELIKE_EQUIV_TOL", default_value_t = tol::SIG)]
    value: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Region {
    Local,
    Remote,
}

#[derive(Subcommand)]
enum Command {
    /// Report normalization, sign and finiteness violations of a behavior or
    /// quantum setup file.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Marginal of every block on one region.
    Marginal {
        file: PathBuf,
        #[arg(long, value_enum)]
        region: Region,
        #[command(flatten)]
        out: Output,
    },
    /// Condition a preparation on an outcome of a remote detector.
    Condition {
        file: PathBuf,
        /// Preparation name.
        #[arg(long)]
        prep: String,
        /// Remote context name.
        #[arg(long)]
        detector: String,
        /// Outcome label, or its index.
        #[arg(long)]
        outcome: String,
        #[command(flatten)]
        tol: SigTol,
        #[command(flatten)]
        out: Output,
    },
    /// Signaling measures with their witnesses.
    Sig {
        file: PathBuf,
        /// Single-region behavior the local marginals must reproduce.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[command(flatten)]
        tol: SigTol,
        #[command(flatten)]
        out: Output,
    },
    /// Classify an extension against its single-region reference.
    Diagnose {
        file: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[command(flatten)]
        tol: SigTol,
        #[command(flatten)]
        out: Output,
    },
    /// Compare two preparations or two contexts of a single-region behavior.
    Equiv {
        file: PathBuf,
        /// Two preparation names, `W,W2`.
        #[arg(
            long,
            value_delimiter = ',',
            conflicts_with = "contexts",
            required_unless_present = "contexts"
        )]
        preps: Option<Vec<String>>,
        /// Two context names, `E,E2`.
        #[arg(long, value_delimiter = ',')]
        contexts: Option<Vec<String>>,
        #[command(flatten)]
        tol: EquivTol,
        #[command(flatten)]
        out: Output,
    },
    /// Quantum behaviors and sequential measurements.
    #[command(subcommand)]
    Qm(qm::QmCommand),
    /// Sampling, perturbation, projection and stability experiments.
    #[command(subcommand)]
    Space(space::SpaceCommand),
    /// Write the scenario fixtures to a directory.
    Fixtures {
        #[arg(short, long, value_name = "DIR", default_value = "fixtures")]
        output: PathBuf,
    },
}

#[derive(Serialize)]
struct BlockMarginal<'a> {
    preparation: &'a str,
    local_context: &'a str,
    remote_context: &'a str,
    marginal: Vec<f64>,
}

#[derive(Serialize)]
struct SigOutput {
    #[serde(flatten)]
    report: SignalingReport,
    tol: f64,
    signaling: bool,
    openness_radius: f64,
}

#[derive(Serialize)]
struct ValidateOutput<T: Serialize> {
    kind: &'static str,
    valid: bool,
    violations: Vec<T>,
}

#[derive(Serialize)]
struct ObservationEquivalence<'a> {
    contexts: [&'a str; 2],
    equivalent: bool,
    /// `permutation[i]` is the outcome of the second context matching outcome `i`.
    permutation: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct PreparationOutput<'a> {
    preparations: [&'a str; 2],
    equivalent: bool,
    max_deviation: f64,
}

/// Outcome name or index within a context.
fn outcome_index(ctx: &spacelike_core::Context, outcome: &str) -> Result<usize> {
    if let Some(i) = ctx.outcomes.position(outcome) {
        return Ok(i);
    }
    match outcome.parse::<usize>() {
        Ok(i) if i < ctx.len() => Ok(i),
        _ => Err(Usage(format!("context `{}` has no outcome `{outcome}`", ctx.name)).into()),
    }
}

/// Exit status 1 when the command ran but the input was found invalid.
struct Failed;

fn run(cli: Cli) -> Result<Option<Failed>> {
    match cli.command {
        Command::Validate { file, out } => match io::load_any(&file)? {
            Loaded::Behavior(b) => {
                let report = match &b {
                    spacelike_core::behavior::BehaviorFile::Single(b) => b.validate(),
                    spacelike_core::behavior::BehaviorFile::Joint(jb) => jb.validate(),
                };
                let kind = match b {
                    spacelike_core::behavior::BehaviorFile::Single(_) => "behavior",
                    spacelike_core::behavior::BehaviorFile::Joint(_) => "joint_behavior",
                };
                let valid = report.is_clean();
                emit(
                    &out.output,
                    &ValidateOutput {
                        kind,
                        valid,
                        violations: report.violations,
                    },
                )?;
                return Ok((!valid).then_some(Failed));
            }
            Loaded::Quantum(file) => {
                let violations = match file.to_setup() {
                    Ok(_) => vec![],
                    Err(Error::InvalidQuantum(report)) => report.violations,
                    Err(e) => return Err(e.into()),
                };
                let valid = violations.is_empty();
                emit(
                    &out.output,
                    &ValidateOutput {
                        kind: "quantum_setup",
                        valid,
                        violations,
                    },
                )?;
                return Ok((!valid).then_some(Failed));
            }
        },
        Command::Marginal { file, region, out } => {
            let jb = load_joint(&file)?;
            let mut rows = Vec::new();
            for w in 0..jb.preparations().len() {
                for e in 0..jb.local_contexts().len() {
                    for d in 0..jb.remote_contexts().len() {
                        let marginal = match region {
                            Region::Local => marginal_local(&jb, w, e, d)?,
                            Region::Remote => marginal_remote(&jb, w, e, d)?,
                        };
                        rows.push(BlockMarginal {
                            preparation: &jb.preparations()[w],
                            local_context: &jb.local_contexts()[e].name,
                            remote_context: &jb.remote_contexts()[d].name,
                            marginal,
                        });
                    }
                }
            }
            emit(&out.output, &rows)?;
        }
        Command::Condition {
            file,
            prep,
            detector,
            outcome,
            tol,
            out,
        } => {
            let jb = load_joint(&file)?;
            let w = jb.preparation(&prep)?;
            let d = jb.remote_context(&detector)?;
            let j = outcome_index(&jb.remote_contexts()[d], &outcome)?;
            emit(&out.output, &condition_with(&jb, w, d, j, tol.value)?)?;
        }
        Command::Sig {
            file,
            reference,
            tol,
            out,
        } => {
            let jb = load_joint(&file)?;
            let reference = reference.map(|r| load_single(&r)).transpose()?;
            let report = signaling_measure(&jb, reference.as_ref())?;
            let radius = openness_radius(&TheoryPoint::new(jb)?, &MarginalEqualities::no_signaling());
            let signaling = report.max() > tol.value;
            emit(
                &out.output,
                &SigOutput {
                    report,
                    tol: tol.value,
                    signaling,
                    openness_radius: radius,
                },
            )?;
        }
        Command::Diagnose {
            file,
            reference,
            tol,
            out,
        } => {
            let jb = load_joint(&file)?;
            let reference = load_single(&reference)?;
            emit(&out.output, &diagnose_extension_with(&jb, &reference, tol.value)?)?;
        }
        Command::Equiv {
            file,
            preps,
            contexts,
            tol,
            out,
        } => {
            let b = load_single(&file)?;
            let pair = |flag: &str, names: &Option<Vec<String>>| match names {
                Some(v) if v.len() != 2 => Err(Usage(format!("--{flag} takes exactly two names"))),
                _ => Ok(()),
            };
            pair("preps", &preps)?;
            pair("contexts", &contexts)?;
            if let Some(p) = preps {
                let (w, w2) = (b.preparation(&p[0])?, b.preparation(&p[1])?);
                let r = equivalent_preparations(&b, w, w2, tol.value)?;
                emit(
                    &out.output,
                    &PreparationOutput {
                        preparations: [&p[0], &p[1]],
                        equivalent: r.equivalent,
                        max_deviation: r.max_deviation,
                    },
                )?;
            } else if let Some(c) = contexts {
                let (e, e2) = (b.context(&c[0])?, b.context(&c[1])?);
                let permutation = equivalent_observations(&b, e, e2, tol.value)?;
                emit(
                    &out.output,
                    &ObservationEquivalence {
                        contexts: [&c[0], &c[1]],
                        equivalent: permutation.is_some(),
                        permutation,
                    },
                )?;
            } else {
                bail!(Usage("give --preps or --contexts".into()));
            }
        }
        Command::Qm(cmd) => qm::run(cmd)?,
        Command::Space(cmd) => space::run(cmd)?,
        Command::Fixtures { output } => {
            std::fs::create_dir_all(&output).with_context(|| format!("creating {}", output.display()))?;
            for (name, text) in spacelike_core::fixtures::all() {
                let path = output.join(name);
                std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    Ok(None)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.is::<Usage>() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::UnknownIndex { .. }) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(Failed)) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            if let Some(Error::Invalid(report)) = err.downcast_ref::<Error>() {
                if let Ok(text) = serde_json::to_string_pretty(report) {
                    eprintln!("{text}");
                }
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
