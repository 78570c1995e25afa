use serde::{Deserialize, Serialize};

use super::{Behavior, JointBehavior};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// A row or block does not sum to one.
    Normalization,
    /// An entry is below `-tol::NORM`.
    Negative,
    NonFinite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// `[w, e]` for a behavior row, `[w, e, d]` for a joint block, with the
    /// offending entry index appended for entry-level violations.
    pub index: Vec<usize>,
    pub magnitude: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_cells(cells: &[f64], index: &[usize], out: &mut Vec<Violation>) {
    let mut sum = 0.0;
    let mut finite = true;
    for (k, &p) in cells.iter().enumerate() {
        let mut at = index.to_vec();
        at.push(k);
        if !p.is_finite() {
            finite = false;
            out.push(Violation {
                kind: ViolationKind::NonFinite,
                index: at,
                magnitude: f64::NAN,
            });
            continue;
        }
        if p < -tol::NORM {
            out.push(Violation {
                kind: ViolationKind::Negative,
                index: at,
                magnitude: -p,
            });
        }
        sum += p;
    }
    if finite && (sum - 1.0).abs() > tol::NORM {
        out.push(Violation {
            kind: ViolationKind::Normalization,
            index: index.to_vec(),
            magnitude: (sum - 1.0).abs(),
        });
    }
}

impl Behavior {
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for w in 0..self.preparations.len() {
            for e in 0..self.contexts.len() {
                check_cells(self.row(w, e), &[w, e], &mut violations);
            }
        }
        ValidationReport { violations }
    }
}

impl JointBehavior {
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for w in 0..self.preparations.len() {
            for e in 0..self.local.len() {
                for d in 0..self.remote.len() {
                    check_cells(self.block(w, e, d), &[w, e, d], &mut violations);
                }
            }
        }
        ValidationReport { violations }
    }
}
