//! Behaviors, joint behaviors and the operations on them.
//!
//! A [`Behavior`] is the empirical content of a theory confined to one region:
//! a probability vector for each (preparation, context) pair. A
//! [`JointBehavior`] adds a detector in a second region; every
//! (preparation, local context, remote context) block is a table over
//! outcome pairs `(i, j)`, stored row-major with the local outcome first.

mod conditioning;
mod diagnosis;
mod equivalence;
mod io;
mod signaling;
mod validate;
mod weight;

pub use conditioning::{condition, condition_with, total_probability_check, Conditioned};
pub use diagnosis::{diagnose_extension, diagnose_extension_with, ConditionedState, ExtensionDiagnosis, Verdict};
pub use equivalence::{equivalent_observations, equivalent_preparations, PreparationEquivalence};
pub use io::{BehaviorFile, ContextRepr};
pub use signaling::{
    marginal_local, marginal_remote, signaling_measure, Direction, LocalWitness, RemoteWitness, SignalingReport,
};
pub use validate::{ValidationReport, Violation, ViolationKind};
pub use weight::Weight;

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::tol;

/// Ordered, non-empty list of distinct outcome labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeSet {
    labels: Vec<String>,
}

impl OutcomeSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::Structure("outcome set must not be empty".into()));
        }
        check_unique("outcome", &labels)?;
        Ok(Self { labels })
    }

    /// Outcomes labelled `"0"`, `"1"`, ... `"n-1"`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A named observation procedure with its outcome set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    pub name: String,
    pub outcomes: OutcomeSet,
}

impl Context {
    pub fn new(name: impl Into<String>, outcomes: OutcomeSet) -> Self {
        Self {
            name: name.into(),
            outcomes,
        }
    }

    pub fn numbered(name: impl Into<String>, n: usize) -> Result<Self> {
        Ok(Self::new(name, OutcomeSet::numbered(n)?))
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

fn check_unique(kind: &str, names: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::Structure(format!("duplicate {kind} `{n}`")));
        }
    }
    Ok(())
}

fn lookup(kind: &'static str, names: impl Iterator<Item = impl AsRef<str>>, key: &str) -> Result<usize> {
    names
        .enumerate()
        .find(|(_, n)| n.as_ref() == key)
        .map(|(i, _)| i)
        .ok_or_else(|| Error::UnknownIndex {
            kind,
            name: key.to_string(),
        })
}

pub(crate) fn check_index(kind: &'static str, index: usize, len: usize) -> Result<()> {
    if index < len {
        Ok(())
    } else {
        Err(Error::UnknownIndex {
            kind,
            name: format!("#{index}"),
        })
    }
}

/// Negative entries within the normalization tolerance of zero are round-off.
fn clamp(table: &mut [f64]) {
    for p in table.iter_mut() {
        if *p < 0.0 && *p >= -tol::NORM {
            *p = 0.0;
        }
    }
}

/// Outcome probabilities for every (preparation, context) pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Behavior {
    preparations: Vec<String>,
    contexts: Vec<Context>,
    offsets: Vec<usize>,
    stride: usize,
    table: Vec<f64>,
}

impl Behavior {
    /// Builds a behavior from rows nested preparation → context → outcome.
    ///
    /// Only the shape is checked here; probabilistic validity is reported by
    /// [`Behavior::validate`].
    pub fn new(preparations: Vec<String>, contexts: Vec<Context>, rows: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if rows.len() != preparations.len() {
            return Err(Error::Shape(format!(
                "table has {} preparation rows, expected {}",
                rows.len(),
                preparations.len()
            )));
        }
        let mut table = Vec::new();
        for (w, per_prep) in rows.into_iter().enumerate() {
            if per_prep.len() != contexts.len() {
                return Err(Error::Shape(format!(
                    "preparation {w} has {} context rows, expected {}",
                    per_prep.len(),
                    contexts.len()
                )));
            }
            for (e, row) in per_prep.into_iter().enumerate() {
                if row.len() != contexts[e].len() {
                    return Err(Error::Shape(format!(
                        "row ({w}, {e}) has {} entries, expected {}",
                        row.len(),
                        contexts[e].len()
                    )));
                }
                table.extend(row);
            }
        }
        Self::from_flat(preparations, contexts, table)
    }

    /// Builds a behavior from a flat table in preparation → context → outcome order.
    pub fn from_flat(preparations: Vec<String>, contexts: Vec<Context>, mut table: Vec<f64>) -> Result<Self> {
        if preparations.is_empty() {
            return Err(Error::Structure("at least one preparation is required".into()));
        }
        if contexts.is_empty() {
            return Err(Error::Structure("at least one context is required".into()));
        }
        check_unique("preparation", &preparations)?;
        check_unique("context", &contexts.iter().map(|c| c.name.clone()).collect::<Vec<_>>())?;
        let mut offsets = Vec::with_capacity(contexts.len());
        let mut stride = 0;
        for c in &contexts {
            offsets.push(stride);
            stride += c.len();
        }
        if table.len() != stride * preparations.len() {
            return Err(Error::Shape(format!(
                "table has {} entries, expected {}",
                table.len(),
                stride * preparations.len()
            )));
        }
        clamp(&mut table);
        Ok(Self {
            preparations,
            contexts,
            offsets,
            stride,
            table,
        })
    }

    pub fn preparations(&self) -> &[String] {
        &self.preparations
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn preparation(&self, name: &str) -> Result<usize> {
        lookup("preparation", self.preparations.iter(), name)
    }

    pub fn context(&self, name: &str) -> Result<usize> {
        lookup("context", self.contexts.iter().map(|c| &c.name), name)
    }

    /// Probability vector for preparation `w` under context `e`.
    pub fn row(&self, w: usize, e: usize) -> &[f64] {
        let start = w * self.stride + self.offsets[e];
        &self.table[start..start + self.contexts[e].len()]
    }

    pub fn prob(&self, w: usize, e: usize, i: usize) -> f64 {
        self.row(w, e)[i]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Fails with the full report unless every row is a probability vector.
    pub fn validated(self) -> Result<Self> {
        let report = self.validate();
        if report.is_clean() {
            Ok(self)
        } else {
            Err(Error::Invalid(report))
        }
    }
}

/// Joint outcome probabilities for a local context run together with a remote detector.
#[derive(Clone, Debug, PartialEq)]
pub struct JointBehavior {
    preparations: Vec<String>,
    local: Vec<Context>,
    remote: Vec<Context>,
    offsets: Vec<usize>,
    stride: usize,
    table: Vec<f64>,
}

impl JointBehavior {
    /// Builds a joint behavior from the nested table
    /// preparation → local context → remote context → local outcome → remote outcome.
    pub fn new(
        preparations: Vec<String>,
        local: Vec<Context>,
        remote: Vec<Context>,
        nested: Vec<Vec<Vec<Vec<Vec<f64>>>>>,
    ) -> Result<Self> {
        let shape = |what: String| Err(Error::Shape(what));
        if nested.len() != preparations.len() {
            return shape(format!(
                "table has {} preparation entries, expected {}",
                nested.len(),
                preparations.len()
            ));
        }
        let mut table = Vec::new();
        for (w, per_prep) in nested.into_iter().enumerate() {
            if per_prep.len() != local.len() {
                return shape(format!("preparation {w}: expected {} local contexts", local.len()));
            }
            for (e, per_local) in per_prep.into_iter().enumerate() {
                if per_local.len() != remote.len() {
                    return shape(format!("block ({w}, {e}): expected {} remote contexts", remote.len()));
                }
                for (d, block) in per_local.into_iter().enumerate() {
                    if block.len() != local[e].len() {
                        return shape(format!(
                            "block ({w}, {e}, {d}): expected {} local outcomes",
                            local[e].len()
                        ));
                    }
                    for (i, row) in block.into_iter().enumerate() {
                        if row.len() != remote[d].len() {
                            return shape(format!(
                                "block ({w}, {e}, {d}) row {i}: expected {} remote outcomes",
                                remote[d].len()
                            ));
                        }
                        table.extend(row);
                    }
                }
            }
        }
        Self::from_flat(preparations, local, remote, table)
    }

    /// Builds a joint behavior by evaluating `f(w, e, d, i, j)` at every index.
    pub fn from_fn(
        preparations: Vec<String>,
        local: Vec<Context>,
        remote: Vec<Context>,
        mut f: impl FnMut(usize, usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut table = Vec::new();
        for w in 0..preparations.len() {
            for (e, lc) in local.iter().enumerate() {
                for (d, rc) in remote.iter().enumerate() {
                    for i in 0..lc.len() {
                        for j in 0..rc.len() {
                            table.push(f(w, e, d, i, j));
                        }
                    }
                }
            }
        }
        Self::from_flat(preparations, local, remote, table)
    }

    pub fn from_flat(
        preparations: Vec<String>,
        local: Vec<Context>,
        remote: Vec<Context>,
        mut table: Vec<f64>,
    ) -> Result<Self> {
        if preparations.is_empty() {
            return Err(Error::Structure("at least one preparation is required".into()));
        }
        if local.is_empty() || remote.is_empty() {
            return Err(Error::Structure(
                "at least one local and one remote context are required".into(),
            ));
        }
        check_unique("preparation", &preparations)?;
        check_unique(
            "local context",
            &local.iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
        )?;
        check_unique(
            "remote context",
            &remote.iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
        )?;
        let mut offsets = Vec::with_capacity(local.len() * remote.len());
        let mut stride = 0;
        for lc in &local {
            for rc in &remote {
                offsets.push(stride);
                stride += lc.len() * rc.len();
            }
        }
        if table.len() != stride * preparations.len() {
            return Err(Error::Shape(format!(
                "table has {} entries, expected {}",
                table.len(),
                stride * preparations.len()
            )));
        }
        clamp(&mut table);
        Ok(Self {
            preparations,
            local,
            remote,
            offsets,
            stride,
            table,
        })
    }

    pub fn preparations(&self) -> &[String] {
        &self.preparations
    }

    pub fn local_contexts(&self) -> &[Context] {
        &self.local
    }

    pub fn remote_contexts(&self) -> &[Context] {
        &self.remote
    }

    pub fn preparation(&self, name: &str) -> Result<usize> {
        lookup("preparation", self.preparations.iter(), name)
    }

    pub fn local_context(&self, name: &str) -> Result<usize> {
        lookup("local context", self.local.iter().map(|c| &c.name), name)
    }

    pub fn remote_context(&self, name: &str) -> Result<usize> {
        lookup("remote context", self.remote.iter().map(|c| &c.name), name)
    }

    /// Number of (preparation, local context, remote context) blocks.
    pub fn block_count(&self) -> usize {
        self.preparations.len() * self.local.len() * self.remote.len()
    }

    pub(crate) fn block_range(&self, w: usize, e: usize, d: usize) -> std::ops::Range<usize> {
        let start = w * self.stride + self.offsets[e * self.remote.len() + d];
        start..start + self.local[e].len() * self.remote[d].len()
    }

    /// The outcome-pair table of block `(w, e, d)`, row-major in the local outcome.
    pub fn block(&self, w: usize, e: usize, d: usize) -> &[f64] {
        &self.table[self.block_range(w, e, d)]
    }

    pub fn prob(&self, w: usize, e: usize, d: usize, i: usize, j: usize) -> f64 {
        self.block(w, e, d)[i * self.remote[d].len() + j]
    }

    /// Flat table in preparation → local → remote → i → j order.
    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Same structure, new entries. Small negatives are clamped as on load.
    pub fn with_table(&self, mut table: Vec<f64>) -> Result<Self> {
        if table.len() != self.table.len() {
            return Err(Error::Shape(format!(
                "table has {} entries, expected {}",
                table.len(),
                self.table.len()
            )));
        }
        clamp(&mut table);
        Ok(Self { table, ..self.clone() })
    }

    /// The single-region behavior obtained by summing out the remote outcome
    /// for a fixed remote context.
    pub fn local_behavior(&self, d: usize) -> Result<Behavior> {
        check_index("remote context", d, self.remote.len())?;
        let mut table = Vec::new();
        for w in 0..self.preparations.len() {
            for e in 0..self.local.len() {
                table.extend(marginal_local(self, w, e, d)?);
            }
        }
        Behavior::from_flat(self.preparations.clone(), self.local.clone(), table)
    }

    pub fn validated(self) -> Result<Self> {
        let report = self.validate();
        if report.is_clean() {
            Ok(self)
        } else {
            Err(Error::Invalid(report))
        }
    }

    /// Same shape and labels (entries may differ).
    pub fn same_structure(&self, other: &Self) -> bool {
        self.preparations == other.preparations && self.local == other.local && self.remote == other.remote
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcome_set_rejects_duplicates_and_empty() {
        assert!(OutcomeSet::new(["a", "a"]).is_err());
        assert!(OutcomeSet::new(Vec::<String>::new()).is_err());
        assert_eq!(OutcomeSet::numbered(3).unwrap().labels(), ["0", "1", "2"]);
    }

    #[test]
    fn joint_layout_is_row_major() {
        let local = vec![Context::numbered("x0", 2).unwrap(), Context::numbered("x1", 3).unwrap()];
        let remote = vec![Context::numbered("y0", 2).unwrap()];
        let jb = JointBehavior::from_fn(vec!["W".into()], local, remote, |_, e, _, i, j| {
            (10 * e + 3 * i + j) as f64
        })
        .unwrap();
        assert_eq!(jb.block(0, 0, 0), &[0.0, 1.0, 3.0, 4.0]);
        assert_eq!(jb.block(0, 1, 0), &[10.0, 11.0, 13.0, 14.0, 16.0, 17.0]);
        assert_eq!(jb.prob(0, 1, 0, 2, 1), 17.0);
    }

    #[test]
    fn shape_errors_are_reported() {
        let c = vec![Context::numbered("E", 2).unwrap()];
        let err = Behavior::new(vec!["W".into()], c, vec![vec![vec![1.0]]]).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn unknown_names_are_named_in_errors() {
        let c = vec![Context::numbered("E", 2).unwrap()];
        let b = Behavior::new(vec!["W".into()], c, vec![vec![vec![0.5, 0.5]]]).unwrap();
        match b.preparation("V") {
            Err(Error::UnknownIndex { name, .. }) => assert_eq!(name, "V"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
