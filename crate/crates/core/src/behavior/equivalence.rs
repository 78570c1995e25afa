use serde::{Deserialize, Serialize};

use super::{check_index, Behavior};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreparationEquivalence {
    pub equivalent: bool,
    pub max_deviation: f64,
}

/// Statistical equivalence of two preparations: equal probabilities in every
/// context, up to `tol`.
pub fn equivalent_preparations(b: &Behavior, w: usize, w2: usize, tol: f64) -> Result<PreparationEquivalence> {
    check_index("preparation", w, b.preparations.len())?;
    check_index("preparation", w2, b.preparations.len())?;
    let start = |w: usize| w * b.stride;
    let max_deviation = b.table[start(w)..start(w) + b.stride]
        .iter()
        .zip(&b.table[start(w2)..start(w2) + b.stride])
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    Ok(PreparationEquivalence {
        equivalent: max_deviation <= tol,
        max_deviation,
    })
}

/// Statistical equivalence of two contexts up to relabelling of outcomes.
///
/// Returns `pi` with `P(w, e, i) = P(w, e2, pi[i])` within `tol` for every
/// preparation, or `None` if no such relabelling exists. Outcomes are matched
/// by their probability profile across preparations; among interchangeable
/// outcomes the matching pairs them in ascending declared order.
pub fn equivalent_observations(b: &Behavior, e: usize, e2: usize, tol: f64) -> Result<Option<Vec<usize>>> {
    check_index("context", e, b.contexts.len())?;
    check_index("context", e2, b.contexts.len())?;
    let n = b.contexts[e].len();
    if b.contexts[e2].len() != n {
        return Ok(None);
    }
    let np = b.preparations.len();
    let close = |i: usize, k: usize| (0..np).all(|w| (b.prob(w, e, i) - b.prob(w, e2, k)).abs() <= tol);
    let adjacency: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&k| close(i, k)).collect()).collect();
    Ok(perfect_matching(&adjacency))
}

/// Lexicographically smallest perfect matching; `adjacency[i]` must be sorted
/// ascending. Each outcome takes its smallest partner that still leaves a
/// perfect matching of the rest (checked with Kuhn's augmenting paths).
fn perfect_matching(adjacency: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = adjacency.len();
    let mut pi: Vec<usize> = Vec::with_capacity(n);
    let mut taken = vec![false; n];
    for i in 0..n {
        let choice = adjacency[i].iter().copied().find(|&k| {
            if taken[k] {
                return false;
            }
            taken[k] = true;
            let ok = completes(adjacency, i + 1, &taken);
            taken[k] = false;
            ok
        })?;
        taken[choice] = true;
        pi.push(choice);
    }
    Some(pi)
}

/// Whether rows `from..` can be matched into the columns not yet taken.
fn completes(adjacency: &[Vec<usize>], from: usize, taken: &[bool]) -> bool {
    fn augment(
        i: usize,
        adjacency: &[Vec<usize>],
        taken: &[bool],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &k in &adjacency[i] {
            if taken[k] || seen[k] {
                continue;
            }
            seen[k] = true;
            if owner[k].is_none_or(|o| augment(o, adjacency, taken, seen, owner)) {
                owner[k] = Some(i);
                return true;
            }
        }
        false
    }

    let mut owner = vec![None; adjacency.len()];
    (from..adjacency.len()).all(|i| {
        let mut seen = vec![false; adjacency.len()];
        augment(i, adjacency, taken, &mut seen, &mut owner)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::Context;

    fn two_contexts(a: [[f64; 3]; 2], b: [[f64; 3]; 2]) -> Behavior {
        let contexts = vec![Context::numbered("E", 3).unwrap(), Context::numbered("F", 3).unwrap()];
        Behavior::new(
            vec!["W0".into(), "W1".into()],
            contexts,
            vec![vec![a[0].to_vec(), b[0].to_vec()], vec![a[1].to_vec(), b[1].to_vec()]],
        )
        .unwrap()
    }

    #[test]
    fn self_equivalence_has_zero_deviation() {
        let b = two_contexts([[0.2, 0.3, 0.5], [0.1, 0.1, 0.8]], [[0.5, 0.2, 0.3], [0.8, 0.1, 0.1]]);
        let r = equivalent_preparations(&b, 0, 0, 0.0).unwrap();
        assert!(r.equivalent);
        assert_eq!(r.max_deviation, 0.0);
    }

    #[test]
    fn identical_profiles_match_in_ascending_order() {
        // outcomes 0 and 1 of E share a profile; so do outcomes 1 and 2 of F
        let b = two_contexts(
            [[0.25, 0.25, 0.5], [0.1, 0.1, 0.8]],
            [[0.5, 0.25, 0.25], [0.8, 0.1, 0.1]],
        );
        let pi = equivalent_observations(&b, 0, 1, 1e-12).unwrap().unwrap();
        assert_eq!(pi, vec![1, 2, 0]);
        for w in 0..2 {
            for i in 0..3 {
                assert!((b.prob(w, 0, i) - b.prob(w, 1, pi[i])).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn unequal_outcome_counts_are_not_equivalent() {
        let contexts = vec![Context::numbered("E", 2).unwrap(), Context::numbered("F", 3).unwrap()];
        let b = Behavior::new(
            vec!["W".into()],
            contexts,
            vec![vec![vec![0.5, 0.5], vec![0.5, 0.5, 0.0]]],
        )
        .unwrap();
        assert_eq!(equivalent_observations(&b, 0, 1, 1e-9).unwrap(), None);
    }

    #[test]
    fn matching_needs_augmenting_paths() {
        // greedy choice 0 -> 0 would strand outcome 1
        let adjacency = vec![vec![0, 1], vec![0]];
        assert_eq!(perfect_matching(&adjacency), Some(vec![1, 0]));
        assert_eq!(perfect_matching(&[vec![0], vec![0]]), None);
    }
}
