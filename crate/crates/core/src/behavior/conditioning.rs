use serde::{Deserialize, Serialize};

use super::signaling::check_block;
use super::{check_index, marginal_local, marginal_remote, signaling_measure, Behavior, JointBehavior, Weight};
use crate::error::{Error, Result};
use crate::tol;

/// A state prepared indirectly: run `w`, keep the runs where the remote
/// detector `d` reported `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conditioned {
    /// The probability `c_j` of the remote outcome.
    pub probability: f64,
    /// Local statistics of the conditioned state, one preparation named `w|d=j`.
    pub behavior: Behavior,
}

pub fn condition(jb: &JointBehavior, w: usize, d: usize, j: usize) -> Result<Conditioned> {
    condition_with(jb, w, d, j, tol::SIG)
}

/// Conditions preparation `w` on remote outcome `j` of detector `d`.
///
/// The remote outcome probability must agree across local contexts within
/// `sig_tol`, otherwise there is no context-independent `c_j` to divide by.
pub fn condition_with(jb: &JointBehavior, w: usize, d: usize, j: usize, sig_tol: f64) -> Result<Conditioned> {
    check_block(jb, w, 0, d)?;
    check_index("remote outcome", j, jb.remote[d].len())?;

    let per_context: Vec<f64> = (0..jb.local.len())
        .map(|e| marginal_remote(jb, w, e, d).map(|m| m[j]))
        .collect::<Result<_>>()?;
    let lo = per_context.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = per_context.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo > sig_tol {
        let report = signaling_measure(jb, None)?;
        return Err(Error::Signaling(Box::new(report)));
    }
    if lo <= tol::ZERO {
        return Err(Error::ZeroProbability { probability: lo });
    }

    let weight = Weight::remote_slice(jb, w, d, j, sig_tol)?.normalized()?;
    let name = format!(
        "{}|{}={}",
        jb.preparations[w],
        jb.remote[d].name,
        jb.remote[d].outcomes.labels()[j]
    );
    let behavior = Behavior::from_flat(
        vec![name],
        jb.local.clone(),
        weight.values().iter().flatten().copied().collect(),
    )?;
    Ok(Conditioned {
        probability: per_context.iter().sum::<f64>() / per_context.len() as f64,
        behavior,
    })
}

/// Largest deviation between `Σ_j c_j · w_j(i)` and the local marginal of
/// block `(w, e, d)`.
///
/// Remote outcomes with `c_j ≤ tol::ZERO` contribute their raw column. No
/// signaling check is made; the identity holds block by block regardless.
pub fn total_probability_check(jb: &JointBehavior, w: usize, e: usize, d: usize) -> Result<f64> {
    let local = marginal_local(jb, w, e, d)?;
    let c = marginal_remote(jb, w, e, d)?;
    let m = c.len();
    let block = jb.block(w, e, d);
    let mut rebuilt = vec![0.0; local.len()];
    for (j, &cj) in c.iter().enumerate() {
        for (i, acc) in rebuilt.iter_mut().enumerate() {
            let p = block[i * m + j];
            *acc += if cj > tol::ZERO { cj * (p / cj) } else { p };
        }
    }
    Ok(rebuilt
        .iter()
        .zip(&local)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
