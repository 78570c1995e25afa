use serde::{Deserialize, Serialize};

use super::{check_index, Behavior, JointBehavior};
use crate::error::{Error, Result};

/// Direction of a signal between the two regions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// The local context choice shows up in remote statistics.
    ToRemote,
    /// The remote context choice (or running the detector at all) shows up in
    /// local statistics.
    ToLocal,
}

impl Direction {
    pub fn reverse(self) -> Self {
        match self {
            Direction::ToRemote => Direction::ToLocal,
            Direction::ToLocal => Direction::ToRemote,
        }
    }
}

/// Local outcome distribution of block `(w, e, d)`, summed over the remote outcome.
pub fn marginal_local(jb: &JointBehavior, w: usize, e: usize, d: usize) -> Result<Vec<f64>> {
    check_block(jb, w, e, d)?;
    let m = jb.remote[d].len();
    Ok(jb.block(w, e, d).chunks(m).map(|row| row.iter().sum()).collect())
}

/// Remote outcome distribution of block `(w, e, d)`, summed over the local outcome.
pub fn marginal_remote(jb: &JointBehavior, w: usize, e: usize, d: usize) -> Result<Vec<f64>> {
    check_block(jb, w, e, d)?;
    let m = jb.remote[d].len();
    let mut out = vec![0.0; m];
    for row in jb.block(w, e, d).chunks(m) {
        for (acc, p) in out.iter_mut().zip(row) {
            *acc += p;
        }
    }
    Ok(out)
}

pub(crate) fn check_block(jb: &JointBehavior, w: usize, e: usize, d: usize) -> Result<()> {
    check_index("preparation", w, jb.preparations.len())?;
    check_index("local context", e, jb.local.len())?;
    check_index("remote context", d, jb.remote.len())
}

/// Where the remote-side maximum was attained: the remote marginal of
/// `(preparation, remote_context, remote_outcome)` differs between the two
/// local contexts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemoteWitness {
    pub preparation: usize,
    pub remote_context: usize,
    pub remote_outcome: usize,
    pub local_contexts: [usize; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LocalWitness {
    /// The local marginal differs between two remote contexts.
    ContextPair {
        preparation: usize,
        local_context: usize,
        local_outcome: usize,
        remote_contexts: [usize; 2],
    },
    /// The local marginal under `remote_context` differs from the reference
    /// behavior, i.e. running the detector changes local statistics.
    Reference {
        preparation: usize,
        local_context: usize,
        remote_context: usize,
        local_outcome: usize,
    },
}

/// Sup-norm violation of the no-signaling equalities in both directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalingReport {
    pub sig_to_remote: f64,
    pub sig_to_local: f64,
    pub remote_witness: Option<RemoteWitness>,
    pub local_witness: Option<LocalWitness>,
}

impl SignalingReport {
    pub fn max(&self) -> f64 {
        self.sig_to_remote.max(self.sig_to_local)
    }

    pub fn in_direction(&self, direction: Direction) -> f64 {
        match direction {
            Direction::ToRemote => self.sig_to_remote,
            Direction::ToLocal => self.sig_to_local,
        }
    }

    /// Recomputes the deviation at each witness from the raw table.
    pub fn witness_values(&self, jb: &JointBehavior, reference: Option<&Behavior>) -> (Option<f64>, Option<f64>) {
        let remote = self.remote_witness.map(|wit| {
            let sum = |e: usize| -> f64 {
                (0..jb.local[e].len())
                    .map(|i| jb.prob(wit.preparation, e, wit.remote_context, i, wit.remote_outcome))
                    .sum()
            };
            (sum(wit.local_contexts[0]) - sum(wit.local_contexts[1])).abs()
        });
        let local = self.local_witness.map(|wit| {
            let sum = |w: usize, e: usize, d: usize, i: usize| -> f64 {
                (0..jb.remote[d].len()).map(|j| jb.prob(w, e, d, i, j)).sum()
            };
            match wit {
                LocalWitness::ContextPair {
                    preparation: w,
                    local_context: e,
                    local_outcome: i,
                    remote_contexts: [d0, d1],
                } => (sum(w, e, d0, i) - sum(w, e, d1, i)).abs(),
                LocalWitness::Reference {
                    preparation: w,
                    local_context: e,
                    remote_context: d,
                    local_outcome: i,
                } => {
                    let r = reference.expect("reference witness requires the reference behavior");
                    (sum(w, e, d, i) - r.prob(w, e, i)).abs()
                }
            }
        });
        (remote, local)
    }
}

/// Exact maxima of the no-signaling violations over all index tuples.
///
/// The maximum over pairs of contexts equals the spread between the largest
/// and smallest marginal, so each direction is a single pass.
pub fn signaling_measure(jb: &JointBehavior, reference: Option<&Behavior>) -> Result<SignalingReport> {
    if let Some(r) = reference {
        check_reference(jb, r)?;
    }
    let np = jb.preparations.len();
    let (nl, nr) = (jb.local.len(), jb.remote.len());

    let mut sig_to_remote = 0.0;
    let mut remote_witness = None;
    let mut sig_to_local = 0.0;
    let mut local_witness = None;

    for w in 0..np {
        // remote marginals for every local context: [e][d][j]
        let rm: Vec<Vec<Vec<f64>>> = (0..nl)
            .map(|e| (0..nr).map(|d| marginal_remote(jb, w, e, d).unwrap()).collect())
            .collect();
        for d in 0..nr {
            for j in 0..jb.remote[d].len() {
                let (lo, hi) = spread((0..nl).map(|e| rm[e][d][j]));
                let v = rm[hi][d][j] - rm[lo][d][j];
                if remote_witness.is_none() || v > sig_to_remote {
                    sig_to_remote = v;
                    remote_witness = (nl > 1).then_some(RemoteWitness {
                        preparation: w,
                        remote_context: d,
                        remote_outcome: j,
                        local_contexts: [hi, lo],
                    });
                }
            }
        }

        for e in 0..nl {
            let lm: Vec<Vec<f64>> = (0..nr).map(|d| marginal_local(jb, w, e, d).unwrap()).collect();
            for i in 0..jb.local[e].len() {
                let (lo, hi) = spread((0..nr).map(|d| lm[d][i]));
                let v = lm[hi][i] - lm[lo][i];
                if local_witness.is_none() || v > sig_to_local {
                    sig_to_local = v;
                    local_witness = (nr > 1).then_some(LocalWitness::ContextPair {
                        preparation: w,
                        local_context: e,
                        local_outcome: i,
                        remote_contexts: [hi, lo],
                    });
                }
                if let Some(r) = reference {
                    for (d, lmd) in lm.iter().enumerate() {
                        let v = (lmd[i] - r.prob(w, e, i)).abs();
                        if v > sig_to_local {
                            sig_to_local = v;
                            local_witness = Some(LocalWitness::Reference {
                                preparation: w,
                                local_context: e,
                                remote_context: d,
                                local_outcome: i,
                            });
                        }
                    }
                }
            }
        }
    }

    Ok(SignalingReport {
        sig_to_remote,
        sig_to_local,
        remote_witness,
        local_witness,
    })
}

/// Indices of the first minimum and first maximum.
fn spread(values: impl Iterator<Item = f64>) -> (usize, usize) {
    let (mut lo, mut hi) = (0, 0);
    let (mut vlo, mut vhi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (k, v) in values.enumerate() {
        if v < vlo {
            vlo = v;
            lo = k;
        }
        if v > vhi {
            vhi = v;
            hi = k;
        }
    }
    (lo, hi)
}

pub(crate) fn check_reference(jb: &JointBehavior, reference: &Behavior) -> Result<()> {
    if reference.preparations != jb.preparations {
        return Err(Error::Shape(
            "reference preparations differ from the joint behavior's".into(),
        ));
    }
    if reference.contexts != jb.local {
        return Err(Error::Shape(
            "reference contexts or outcomes differ from the joint behavior's local side".into(),
        ));
    }
    Ok(())
}
