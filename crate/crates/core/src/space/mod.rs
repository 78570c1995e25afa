//! The space of all theories for a fixed set of procedures.
//!
//! A theory assigns a probability vector to every (preparation, local
//! context, remote context) block, so the space is a product of simplices.
//! Closeness is measured coordinate-wise on finitely many probed blocks
//! (the weak topology); [`sup_distance`] is the probe covering everything.

mod family;
mod perturb;
mod projection;
mod sampling;
mod stability;

pub use family::{EqualityFamily, MarginalEqualities};
pub use perturb::{construct_signaling_perturbation, openness_radius, perturb_at_distance, perturb_in_ball};
pub use projection::{project_no_signaling, project_onto, project_simplex, Projection, ProjectionOptions};
pub use sampling::{sample_theory, sample_with, stream_rng};
pub use stability::{
    stability_experiment, stability_experiment_with, DensityCheck, Histogram, OpennessCheck, StabilityConfig,
    StabilityResult, StabilityRun, TrialRecord,
};

use serde::{Deserialize, Serialize};

use crate::behavior::{signaling_measure, Context, JointBehavior, SignalingReport};
use crate::error::{Error, Result};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 42;

/// Block shapes of a theory: preparation count and the outcome count of
/// every local and remote context.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure {
    pub preparations: usize,
    pub local_outcomes: Vec<usize>,
    pub remote_outcomes: Vec<usize>,
}

impl Structure {
    /// `P`x`L`x`R`x`N` (`N` outcomes on both sides) or `P`x`L`x`R`x`N`x`M`:
    /// preparations, local contexts, remote contexts, outcome counts.
    pub fn parse(text: &str) -> Result<Self> {
        let parts = text
            .split(['x', 'X'])
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Structure(format!("`{text}`: {e}")))?;
        let (p, l, r, n, m) = match parts[..] {
            [p, l, r, n] => (p, l, r, n, n),
            [p, l, r, n, m] => (p, l, r, n, m),
            _ => return Err(Error::Structure(format!("`{text}`: expected PxLxRxN or PxLxRxNxM"))),
        };
        if [p, l, r, n, m].contains(&0) {
            return Err(Error::Structure(format!("`{text}`: every dimension must be positive")));
        }
        Ok(Self {
            preparations: p,
            local_outcomes: vec![n; l],
            remote_outcomes: vec![m; r],
        })
    }

    pub fn of(jb: &JointBehavior) -> Self {
        Self {
            preparations: jb.preparations().len(),
            local_outcomes: jb.local_contexts().iter().map(Context::len).collect(),
            remote_outcomes: jb.remote_contexts().iter().map(Context::len).collect(),
        }
    }

    /// Builds a joint behavior with default names from a flat table.
    pub fn behavior(&self, table: Vec<f64>) -> Result<JointBehavior> {
        let contexts = |prefix: &str, outcomes: &[usize]| {
            outcomes
                .iter()
                .enumerate()
                .map(|(k, &n)| Context::numbered(format!("{prefix}{k}"), n))
                .collect::<Result<Vec<_>>>()
        };
        JointBehavior::from_flat(
            (0..self.preparations).map(|w| format!("W{w}")).collect(),
            contexts("x", &self.local_outcomes)?,
            contexts("y", &self.remote_outcomes)?,
            table,
        )
    }

    /// Sizes of the blocks in table order.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = Vec::new();
        for _ in 0..self.preparations {
            for &n in &self.local_outcomes {
                for &m in &self.remote_outcomes {
                    sizes.push(n * m);
                }
            }
        }
        sizes
    }
}

/// A valid joint behavior viewed as a point of the product of simplices.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoryPoint {
    jb: JointBehavior,
}

impl TheoryPoint {
    pub fn new(jb: JointBehavior) -> Result<Self> {
        Ok(Self { jb: jb.validated()? })
    }

    pub fn behavior(&self) -> &JointBehavior {
        &self.jb
    }

    pub fn into_behavior(self) -> JointBehavior {
        self.jb
    }

    pub fn structure(&self) -> Structure {
        Structure::of(&self.jb)
    }

    pub fn table(&self) -> &[f64] {
        self.jb.table()
    }

    pub fn signaling(&self) -> SignalingReport {
        signaling_measure(&self.jb, None).expect("no reference, no shape error")
    }

    /// Largest violation of the no-signaling equalities in either direction.
    pub fn sig(&self) -> f64 {
        self.signaling().max()
    }

    /// Ranges of the flat table covered by each block, in table order.
    pub(crate) fn block_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let (np, nl, nr) = (
            self.jb.preparations().len(),
            self.jb.local_contexts().len(),
            self.jb.remote_contexts().len(),
        );
        let mut out = Vec::with_capacity(np * nl * nr);
        for w in 0..np {
            for e in 0..nl {
                for d in 0..nr {
                    out.push(self.jb.block_range(w, e, d));
                }
            }
        }
        out
    }

    pub(crate) fn with_table(&self, table: Vec<f64>) -> Result<Self> {
        Self::new(self.jb.with_table(table)?)
    }
}

/// Finitely many probed blocks and a radius: one basic weak neighbourhood.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakProbe {
    pub preparations: Vec<usize>,
    /// `(local context, remote context)` pairs.
    pub context_pairs: Vec<(usize, usize)>,
    pub radius: f64,
}

impl WeakProbe {
    pub fn new(preparations: Vec<usize>, context_pairs: Vec<(usize, usize)>, radius: f64) -> Result<Self> {
        if preparations.is_empty() || context_pairs.is_empty() {
            return Err(Error::Precondition(
                "a probe needs preparations and context pairs".into(),
            ));
        }
        if !(radius > 0.0) {
            return Err(Error::Precondition(format!("probe radius {radius} must be positive")));
        }
        Ok(Self {
            preparations,
            context_pairs,
            radius,
        })
    }

    /// Probes every block of the given structure.
    pub fn full(structure: &Structure, radius: f64) -> Result<Self> {
        let pairs = (0..structure.local_outcomes.len())
            .flat_map(|e| (0..structure.remote_outcomes.len()).map(move |d| (e, d)))
            .collect();
        Self::new((0..structure.preparations).collect(), pairs, radius)
    }

    /// Whether `q` lies in the open neighbourhood of `p`.
    pub fn contains(&self, p: &TheoryPoint, q: &TheoryPoint) -> Result<bool> {
        Ok(weak_distance(p, q, self)? < self.radius)
    }
}

/// Largest coordinate difference over the probed blocks.
pub fn weak_distance(p: &TheoryPoint, q: &TheoryPoint, probe: &WeakProbe) -> Result<f64> {
    if !p.jb.same_structure(&q.jb) {
        return Err(Error::Shape("theories have different structures".into()));
    }
    let (np, nl, nr) = (
        p.jb.preparations().len(),
        p.jb.local_contexts().len(),
        p.jb.remote_contexts().len(),
    );
    let mut dist: f64 = 0.0;
    for &w in &probe.preparations {
        crate::behavior::check_index("preparation", w, np)?;
        for &(e, d) in &probe.context_pairs {
            crate::behavior::check_index("local context", e, nl)?;
            crate::behavior::check_index("remote context", d, nr)?;
            for (a, b) in p.jb.block(w, e, d).iter().zip(q.jb.block(w, e, d)) {
                dist = dist.max((a - b).abs());
            }
        }
    }
    Ok(dist)
}

/// Largest coordinate difference over the whole table.
pub fn sup_distance(p: &TheoryPoint, q: &TheoryPoint) -> f64 {
    p.table()
        .iter()
        .zip(q.table())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}
