//! Monte Carlo checks that violating theories are generic: almost every
//! uniformly sampled theory signals (and the set is open), and every
//! non-signaling theory has signaling theories arbitrarily close by.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    construct_signaling_perturbation, openness_radius, perturb_at_distance, project_onto, sample_with, stream_rng,
    sup_distance, EqualityFamily, MarginalEqualities, ProjectionOptions, Structure,
};
use crate::error::Result;

// stream namespaces for the generator of each phase
const TRIALS: u64 = 0;
const DENSITY: u64 = 1 << 56;
const OPENNESS: u64 = 2 << 56;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig {
    pub trials: usize,
    pub tol: f64,
    pub seed: u64,
    /// Projected non-signaling points used for the density check.
    pub density_points: usize,
    pub density_eps: Vec<f64>,
    /// Signaling points used for the openness check, and probes per point.
    pub openness_points: usize,
    pub openness_probes: usize,
    /// Probes sit at this fraction of the openness radius.
    pub openness_fraction: f64,
    pub histogram_bins: usize,
}

impl StabilityConfig {
    pub fn new(trials: usize, tol: f64, seed: u64) -> Self {
        Self {
            trials,
            tol,
            seed,
            density_points: 10,
            density_eps: vec![1e-2, 1e-4],
            openness_points: 10,
            openness_probes: 100,
            openness_fraction: 0.9,
            histogram_bins: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` edges over `[0, 1]`; the last bin is closed.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    fn of(values: impl Iterator<Item = f64>, bins: usize) -> Self {
        let bins = bins.max(1);
        let mut counts = vec![0; bins];
        for v in values {
            let k = ((v.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1);
            counts[k] += 1;
        }
        Self {
            edges: (0..=bins).map(|k| k as f64 / bins as f64).collect(),
            counts,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityCheck {
    pub eps: Vec<f64>,
    /// One attempt per (point, eps).
    pub attempted: usize,
    pub succeeded: usize,
    pub min_sig_after: f64,
    pub max_distance_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpennessCheck {
    pub points: usize,
    pub probes: usize,
    pub counterexamples: usize,
    pub min_probe_sig: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityResult {
    pub family: String,
    pub trials: usize,
    pub tol: f64,
    pub seed: u64,
    pub signaling_fraction: f64,
    pub min_sig: f64,
    pub max_sig: f64,
    pub histogram: Histogram,
    pub density: DensityCheck,
    pub openness: OpennessCheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub sig_to_remote: f64,
    pub sig_to_local: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityRun {
    pub result: StabilityResult,
    pub records: Vec<TrialRecord>,
}

pub fn stability_experiment(structure: &Structure, trials: usize, tol: f64, seed: u64) -> Result<StabilityRun> {
    stability_experiment_with(
        structure,
        &StabilityConfig::new(trials, tol, seed),
        &MarginalEqualities::no_signaling(),
    )
}

fn map_indices<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

pub fn stability_experiment_with(
    structure: &Structure,
    config: &StabilityConfig,
    family: &dyn EqualityFamily,
) -> Result<StabilityRun> {
    let seed = config.seed;

    let sampled = map_indices(config.trials, |index| -> Result<(TrialRecord, f64)> {
        let p = sample_with(structure, &mut stream_rng(seed, TRIALS + index as u64))?;
        let report = p.signaling();
        let sig = family.measure(p.behavior());
        Ok((
            TrialRecord {
                index,
                sig_to_remote: report.sig_to_remote,
                sig_to_local: report.sig_to_local,
            },
            sig,
        ))
    });
    let sampled = sampled.into_iter().collect::<Result<Vec<_>>>()?;
    let sigs: Vec<f64> = sampled.iter().map(|(_, s)| *s).collect();
    let records: Vec<TrialRecord> = sampled.into_iter().map(|(r, _)| r).collect();
    let signaling = sigs.iter().filter(|&&s| s > config.tol).count();

    // density: project random theories onto the equalities, then break them
    let density_runs = map_indices(config.density_points, |k| -> Result<Vec<Option<(f64, f64)>>> {
        let p = sample_with(structure, &mut stream_rng(seed, DENSITY + k as u64))?;
        let projected = match project_onto(&p, family, ProjectionOptions::default()) {
            Ok(proj) => proj.point,
            Err(_) => return Ok(vec![None; config.density_eps.len()]),
        };
        Ok(config
            .density_eps
            .iter()
            .map(|&eps| {
                construct_signaling_perturbation(&projected, eps, family)
                    .ok()
                    .map(|q| (family.measure(q.behavior()), sup_distance(&projected, &q) / eps))
                    .filter(|&(sig, ratio)| sig > 0.0 && ratio <= 1.0)
            })
            .collect())
    });
    let density_outcomes: Vec<Option<(f64, f64)>> = density_runs
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let successes: Vec<(f64, f64)> = density_outcomes.iter().flatten().copied().collect();
    let density = DensityCheck {
        eps: config.density_eps.clone(),
        attempted: density_outcomes.len(),
        succeeded: successes.len(),
        min_sig_after: successes.iter().map(|s| s.0).fold(f64::INFINITY, f64::min),
        max_distance_ratio: successes.iter().map(|s| s.1).fold(0.0, f64::max),
    };

    // openness: probe signaling theories inside their certified radius
    let openness_runs = map_indices(config.openness_points, |k| -> Result<(usize, f64)> {
        let mut rng = stream_rng(seed, OPENNESS + k as u64);
        let p = sample_with(structure, &mut rng)?;
        let radius = openness_radius(&p, family);
        let mut bad = 0;
        let mut min_sig = f64::INFINITY;
        for _ in 0..config.openness_probes {
            let q = perturb_at_distance(&p, config.openness_fraction * radius, &mut rng)?;
            let sig = family.measure(q.behavior());
            min_sig = min_sig.min(sig);
            if sig <= 0.0 {
                bad += 1;
            }
        }
        Ok((bad, min_sig))
    });
    let openness_runs = openness_runs.into_iter().collect::<Result<Vec<_>>>()?;
    let openness = OpennessCheck {
        points: config.openness_points,
        probes: config.openness_points * config.openness_probes,
        counterexamples: openness_runs.iter().map(|r| r.0).sum(),
        min_probe_sig: openness_runs.iter().map(|r| r.1).fold(f64::INFINITY, f64::min),
    };

    let result = StabilityResult {
        family: family.name().to_string(),
        trials: config.trials,
        tol: config.tol,
        seed,
        signaling_fraction: if config.trials == 0 {
            0.0
        } else {
            signaling as f64 / config.trials as f64
        },
        min_sig: sigs.iter().cloned().fold(f64::INFINITY, f64::min),
        max_sig: sigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        histogram: Histogram::of(sigs.iter().cloned(), config.histogram_bins),
        density,
        openness,
    };
    Ok(StabilityRun { result, records })
}
