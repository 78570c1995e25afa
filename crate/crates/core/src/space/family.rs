use crate::behavior::{signaling_measure, Direction, JointBehavior};

/// A family of homogeneous linear equalities on the table of a joint behavior.
///
/// The theories satisfying a family form a proper linear subvariety of the
/// product of simplices; the complement is open and dense.
pub trait EqualityFamily: Sync {
    fn name(&self) -> &str;

    /// Sup-norm violation of the equalities; zero iff all hold.
    fn measure(&self, jb: &JointBehavior) -> f64;

    /// The equalities as sparse rows `(flat index, coefficient)`.
    fn rows(&self, jb: &JointBehavior) -> Vec<Vec<(usize, f64)>>;

    /// Largest number of entries summed on one side of any equality; the
    /// measure is `2 · width`-Lipschitz in the sup-norm.
    fn lipschitz_width(&self, jb: &JointBehavior) -> usize;

    /// Directions whose violation the family measures.
    fn directions(&self) -> &[Direction];
}

/// Equal marginals across contexts of the other region.
///
/// [`MarginalEqualities::no_signaling`] covers both directions (space-like
/// separation). [`MarginalEqualities::no_retrograde`] is the same check with
/// the remote region in the time-like past: only the local context must not
/// influence remote statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalEqualities {
    name: &'static str,
    directions: Vec<Direction>,
}

impl MarginalEqualities {
    pub fn no_signaling() -> Self {
        Self {
            name: "no-signaling",
            directions: vec![Direction::ToRemote, Direction::ToLocal],
        }
    }

    pub fn no_retrograde() -> Self {
        Self {
            name: "no-retrograde",
            directions: vec![Direction::ToRemote],
        }
    }
}

impl EqualityFamily for MarginalEqualities {
    fn name(&self) -> &str {
        self.name
    }

    fn measure(&self, jb: &JointBehavior) -> f64 {
        let report = signaling_measure(jb, None).expect("no reference, no shape error");
        self.directions
            .iter()
            .map(|&d| report.in_direction(d))
            .fold(0.0, f64::max)
    }

    fn rows(&self, jb: &JointBehavior) -> Vec<Vec<(usize, f64)>> {
        let np = jb.preparations().len();
        let (local, remote) = (jb.local_contexts(), jb.remote_contexts());
        let at = |w, e, d, i, j| jb.block_range(w, e, d).start + i * remote[d].len() + j;
        let mut rows = Vec::new();
        for &direction in &self.directions {
            match direction {
                Direction::ToRemote => {
                    for w in 0..np {
                        for d in 0..remote.len() {
                            for j in 0..remote[d].len() {
                                for e in 1..local.len() {
                                    let mut row: Vec<(usize, f64)> =
                                        (0..local[e - 1].len()).map(|i| (at(w, e - 1, d, i, j), 1.0)).collect();
                                    row.extend((0..local[e].len()).map(|i| (at(w, e, d, i, j), -1.0)));
                                    rows.push(row);
                                }
                            }
                        }
                    }
                }
                Direction::ToLocal => {
                    for w in 0..np {
                        for e in 0..local.len() {
                            for i in 0..local[e].len() {
                                for d in 1..remote.len() {
                                    let mut row: Vec<(usize, f64)> =
                                        (0..remote[d - 1].len()).map(|j| (at(w, e, d - 1, i, j), 1.0)).collect();
                                    row.extend((0..remote[d].len()).map(|j| (at(w, e, d, i, j), -1.0)));
                                    rows.push(row);
                                }
                            }
                        }
                    }
                }
            }
        }
        rows
    }

    fn lipschitz_width(&self, jb: &JointBehavior) -> usize {
        let widest = |cs: &[crate::behavior::Context]| cs.iter().map(|c| c.len()).max().unwrap_or(0);
        self.directions
            .iter()
            .map(|d| match d {
                Direction::ToRemote => widest(jb.local_contexts()),
                Direction::ToLocal => widest(jb.remote_contexts()),
            })
            .max()
            .unwrap_or(0)
    }

    fn directions(&self) -> &[Direction] {
        &self.directions
    }
}
