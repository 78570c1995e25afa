use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Subcommand};
use serde::Serialize;

use spacelike_core::behavior::BehaviorFile;
use spacelike_core::fixtures::reduced_reference;
use spacelike_core::quantum::{
    bipartite_behavior, joint_probability, local_behavior, post_condition_witness, pre_condition, BipartiteSetup,
    CMatrix, STATE_PREPARATION,
};
use spacelike_core::{tol, ProjectiveMeasurement};

use crate::io::{emit, load_quantum, Usage};
use crate::Output;

#[derive(Args)]
pub struct SetupArg {
    /// Quantum setup file.
    setup: PathBuf,
}

#[derive(Subcommand)]
pub enum QmCommand {
    /// Behavior generated by the setup: joint when remote measurements exist,
    /// otherwise the single-region behavior of the state.
    Behavior {
        #[command(flatten)]
        setup: SetupArg,
        #[command(flatten)]
        out: Output,
    },
    /// Single-region behavior of the reduced local state.
    Reference {
        #[command(flatten)]
        setup: SetupArg,
        #[command(flatten)]
        out: Output,
    },
    /// `P(i, j)` for measurement `--first` followed by `--then`.
    Joint {
        #[command(flatten)]
        setup: SetupArg,
        #[arg(long)]
        first: String,
        #[arg(long)]
        then: String,
        #[command(flatten)]
        out: Output,
    },
    /// State left by outcome `--outcome` of `--first`, and optionally the
    /// statistics of `--then` on it.
    Precondition {
        #[command(flatten)]
        setup: SetupArg,
        #[arg(long)]
        first: String,
        /// Outcome label or index.
        #[arg(long)]
        outcome: String,
        #[arg(long)]
        then: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// `P(i | j)`: outcome `i` of `--first` given the later outcome `j` of `--then`.
    Postcondition {
        #[command(flatten)]
        setup: SetupArg,
        #[arg(long)]
        first: String,
        #[arg(long)]
        then: String,
        #[command(flatten)]
        out: Output,
    },
    /// Largest change of `P(shared | j)` when the measurement sharing the
    /// projector is swapped.
    Witness {
        #[command(flatten)]
        setup: SetupArg,
        /// Measurement containing the shared projector.
        #[arg(long)]
        first: String,
        /// Alternative measurement with the same projector.
        #[arg(long)]
        alt: String,
        /// Later measurement conditioned on.
        #[arg(long)]
        then: String,
        /// Index of the shared projector in `--first`.
        #[arg(long, default_value_t = 0)]
        shared: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Serialize)]
struct JointOutput<'a> {
    first: &'a str,
    then: &'a str,
    table: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct PreconditionOutput<'a> {
    first: &'a str,
    outcome: &'a str,
    probability: f64,
    /// Rows of `[re, im]` pairs.
    state: Vec<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    then: Option<ThenStatistics<'a>>,
}

#[derive(Serialize)]
struct ThenStatistics<'a> {
    measurement: &'a str,
    probabilities: Vec<f64>,
}

#[derive(Serialize)]
struct PostconditionOutput<'a> {
    first: &'a str,
    then: &'a str,
    /// `table[i][j] = P(i | j)`; null where `j` has zero probability.
    table: Vec<Vec<Option<f64>>>,
}

#[derive(Serialize)]
struct WitnessOutput<'a> {
    first: &'a str,
    alt: &'a str,
    then: &'a str,
    shared: usize,
    deviation: f64,
}

fn setup(arg: &SetupArg) -> Result<BipartiteSetup> {
    Ok(load_quantum(&arg.setup)?.to_setup()?)
}

fn measurement<'a>(setup: &'a BipartiteSetup, name: &str) -> Result<&'a ProjectiveMeasurement> {
    Ok(setup.measurement(name)?)
}

/// Sequential measurements act on the local system only.
fn local<'a>(setup: &'a BipartiteSetup, name: &str) -> Result<&'a ProjectiveMeasurement> {
    let m = measurement(setup, name)?;
    if m.dim() != setup.state().dim() {
        return Err(Usage(format!(
            "`{name}` acts on dimension {}, the state has dimension {}",
            m.dim(),
            setup.state().dim()
        ))
        .into());
    }
    Ok(m)
}

fn matrix_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub fn run(cmd: QmCommand) -> Result<()> {
    match cmd {
        QmCommand::Behavior { setup: arg, out } => {
            let s = setup(&arg)?;
            let file = if s.remote_measurements().is_empty() {
                BehaviorFile::Single(local_behavior(s.state(), s.local_measurements(), STATE_PREPARATION)?)
            } else {
                BehaviorFile::Joint(bipartite_behavior(&s)?)
            };
            emit(&out.output, &file)
        }
        QmCommand::Reference { setup: arg, out } => {
            let s = setup(&arg)?;
            emit(&out.output, &BehaviorFile::Single(reduced_reference(&s)))
        }
        QmCommand::Joint {
            setup: arg,
            first,
            then,
            out,
        } => {
            let s = setup(&arg)?;
            let table = joint_probability(s.state(), local(&s, &first)?, local(&s, &then)?)?;
            emit(
                &out.output,
                &JointOutput {
                    first: &first,
                    then: &then,
                    table,
                },
            )
        }
        QmCommand::Precondition {
            setup: arg,
            first,
            outcome,
            then,
            out,
        } => {
            let s = setup(&arg)?;
            let a = local(&s, &first)?;
            let i = crate::outcome_index(&spacelike_core::Context::new(a.name(), a.outcomes().clone()), &outcome)?;
            let (probability, state) = pre_condition(s.state(), &a.projectors()[i])?;
            let then = match &then {
                Some(name) => {
                    let b = local(&s, name)?;
                    Some(ThenStatistics {
                        measurement: name,
                        probabilities: b.projectors().iter().map(|q| state.expectation(q)).collect(),
                    })
                }
                None => None,
            };
            emit(
                &out.output,
                &PreconditionOutput {
                    first: &first,
                    outcome: &a.outcomes().labels()[i],
                    probability,
                    state: matrix_rows(state.matrix()),
                    then,
                },
            )
        }
        QmCommand::Postcondition {
            setup: arg,
            first,
            then,
            out,
        } => {
            let s = setup(&arg)?;
            let t = joint_probability(s.state(), local(&s, &first)?, local(&s, &then)?)?;
            let m = t.first().map_or(0, Vec::len);
            let totals: Vec<f64> = (0..m).map(|j| t.iter().map(|row| row[j]).sum()).collect();
            let table = t
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&totals)
                        .map(|(&p, &c)| (c > tol::ZERO).then(|| p / c))
                        .collect()
                })
                .collect();
            emit(
                &out.output,
                &PostconditionOutput {
                    first: &first,
                    then: &then,
                    table,
                },
            )
        }
        QmCommand::Witness {
            setup: arg,
            first,
            alt,
            then,
            shared,
            out,
        } => {
            let s = setup(&arg)?;
            let deviation = post_condition_witness(
                s.state(),
                local(&s, &then)?,
                local(&s, &first)?,
                local(&s, &alt)?,
                shared,
            )?;
            emit(
                &out.output,
                &WitnessOutput {
                    first: &first,
                    alt: &alt,
                    then: &then,
                    shared,
                    deviation,
                },
            )
        }
    }
}
