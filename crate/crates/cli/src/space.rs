use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use clap::{Args, Subcommand, ValueEnum};

use spacelike_core::behavior::BehaviorFile;
use spacelike_core::space::{
    construct_signaling_perturbation, perturb_in_ball, project_onto, sample_theory, stability_experiment_with,
    EqualityFamily, MarginalEqualities, ProjectionOptions, StabilityConfig, DEFAULT_SEED,
};
use spacelike_core::{Structure, TheoryPoint};

use crate::io::{emit, load_joint};
use crate::Output;

#[derive(Clone, Copy, ValueEnum)]
pub enum Family {
    /// Marginals of each region independent of the other region's context.
    NoSignaling,
    /// Only the remote marginals must ignore the local context.
    NoRetrograde,
}

impl Family {
    fn equalities(self) -> MarginalEqualities {
        match self {
            Family::NoSignaling => MarginalEqualities::no_signaling(),
            Family::NoRetrograde => MarginalEqualities::no_retrograde(),
        }
    }
}

#[derive(Args, Clone, Copy)]
pub struct FamilyArg {
    /// Equalities defining the exceptional set.
    #[arg(long, value_enum, default_value = "no-signaling")]
    family: Family,
}

#[derive(Args, Clone, Copy)]
pub struct SeedArg {
    /// Seed of the random generator.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

fn parse_structure(s: &str) -> Result<Structure, String> {
    Structure::parse(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
pub enum SpaceCommand {
    /// Uniformly random theory (flat Dirichlet in every block).
    Sample {
        /// `PxLxRxN` or `PxLxRxNxM`: preparations, local and remote contexts,
        /// local and remote outcome counts.
        #[arg(long, default_value = "2x2x2x2", value_parser = parse_structure)]
        structure: Structure,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: Output,
    },
    /// Random theory within sup-distance `--eps`, or with `--signaling` an
    /// explicit violating theory that close to a satisfying one.
    Perturb {
        file: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        signaling: bool,
        #[command(flatten)]
        family: FamilyArg,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: Output,
    },
    /// Nearest theory satisfying the equalities (Dykstra projection).
    Project {
        file: PathBuf,
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long, default_value_t = ProjectionOptions::default().max_iterations)]
        max_iterations: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Monte Carlo stability experiment: signaling fraction, histogram,
    /// density and openness checks.
    Stability {
        #[arg(long, default_value = "2x2x2x2", value_parser = parse_structure)]
        structure: Structure,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// A sampled theory counts as violating when its measure exceeds this.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        family: FamilyArg,
        #[command(flatten)]
        seed: SeedArg,
        /// Also write one CSV row per trial: index, sig_to_remote, sig_to_local.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
}

fn load_point(file: &Path) -> Result<TheoryPoint> {
    Ok(TheoryPoint::new(load_joint(file)?)?)
}

pub fn run(cmd: SpaceCommand) -> Result<()> {
    match cmd {
        SpaceCommand::Sample { structure, seed, out } => {
            let p = sample_theory(&structure, seed.seed)?;
            emit(&out.output, &BehaviorFile::Joint(p.into_behavior()))
        }
        SpaceCommand::Perturb {
            file,
            eps,
            signaling,
            family,
            seed,
            out,
        } => {
            let p = load_point(&file)?;
            let q = if signaling {
                construct_signaling_perturbation(&p, eps, &family.family.equalities())?
            } else {
                perturb_in_ball(&p, eps, seed.seed)?
            };
            emit(&out.output, &BehaviorFile::Joint(q.into_behavior()))
        }
        SpaceCommand::Project {
            file,
            family,
            max_iterations,
            out,
        } => {
            let p = load_point(&file)?;
            let equalities = family.family.equalities();
            let options = ProjectionOptions {
                max_iterations,
                ..ProjectionOptions::default()
            };
            let projection = project_onto(&p, &equalities, options)?;
            eprintln!(
                "{} iterations, violation {:e}",
                projection.iterations,
                equalities.measure(projection.point.behavior())
            );
            emit(&out.output, &BehaviorFile::Joint(projection.point.into_behavior()))
        }
        SpaceCommand::Stability {
            structure,
            trials,
            tol,
            family,
            seed,
            csv,
            out,
        } => {
            if trials == 0 {
                return Err(crate::io::Usage("--trials must be at least 1".into()).into());
            }
            let config = StabilityConfig::new(trials, tol, seed.seed);
            let run = stability_experiment_with(&structure, &config, &family.family.equalities())?;
            if let Some(path) = csv {
                let mut writer =
                    csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
                for record in &run.records {
                    writer.serialize(record)?;
                }
                writer.flush()?;
            }
            emit(&out.output, &run.result)
        }
    }
}
