use super::{check_index, Behavior, JointBehavior};
use crate::error::{Error, Result};
use crate::tol;

/// Non-negative outcome assignment per context whose total does not depend
/// on the context.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    values: Vec<Vec<f64>>,
    total: f64,
}

impl Weight {
    /// Accepts the assignment if every context sums to the same total within `tolerance`.
    pub fn new(values: Vec<Vec<f64>>, tolerance: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Structure("a weight needs at least one context".into()));
        }
        if let Some(p) = values.iter().flatten().find(|p| !(**p >= 0.0)) {
            return Err(Error::Precondition(format!("weight entry {p} is negative")));
        }
        let sums: Vec<f64> = values.iter().map(|v| v.iter().sum()).collect();
        let lo = sums.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > tolerance {
            return Err(Error::Precondition(format!(
                "context sums range over [{lo}, {hi}]; not a weight"
            )));
        }
        let total = sums.iter().sum::<f64>() / sums.len() as f64;
        Ok(Self { values, total })
    }

    /// The physical weight of preparation `w`: its probability rows.
    pub fn physical(b: &Behavior, w: usize) -> Result<Self> {
        check_index("preparation", w, b.preparations.len())?;
        let values = (0..b.contexts.len()).map(|e| b.row(w, e).to_vec()).collect();
        Self::new(values, tol::NORM)
    }

    /// The unnormalized weight `e, i ↦ P̂(w, e, d, i, j)` for a fixed remote outcome.
    pub(crate) fn remote_slice(jb: &JointBehavior, w: usize, d: usize, j: usize, tolerance: f64) -> Result<Self> {
        let m = jb.remote[d].len();
        let values = (0..jb.local.len())
            .map(|e| jb.block(w, e, d).chunks(m).map(|row| row[j]).collect())
            .collect();
        Self::new(values, tolerance)
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn is_normalized(&self) -> bool {
        (self.total - 1.0).abs() <= tol::NORM
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Rescales each context to sum to one.
    ///
    /// Each context is divided by its own sum, which agrees with the common
    /// total up to the tolerance the weight was accepted with.
    pub fn normalized(&self) -> Result<Self> {
        let mut values = self.values.clone();
        for row in &mut values {
            let s: f64 = row.iter().sum();
            if s <= tol::ZERO {
                return Err(Error::ZeroProbability { probability: s });
            }
            row.iter_mut().for_each(|p| *p /= s);
        }
        Ok(Self { values, total: 1.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_dependent_total_is_rejected() {
        assert!(Weight::new(vec![vec![0.2, 0.3], vec![0.6]], 1e-9).is_err());
        let w = Weight::new(vec![vec![0.2, 0.3], vec![0.5]], 1e-9).unwrap();
        assert_eq!(w.total(), 0.5);
        assert!(!w.is_normalized());
        assert!(w.normalized().unwrap().is_normalized());
    }

    #[test]
    fn negative_entries_are_rejected() {
        assert!(Weight::new(vec![vec![-0.1, 1.1]], 1e-9).is_err());
    }
}
