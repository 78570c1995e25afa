use serde::{Deserialize, Serialize};

use super::signaling::check_reference;
use super::{condition_with, signaling_measure, Behavior, JointBehavior, SignalingReport};
use crate::error::{Error, Result};
use crate::tol;

/// Which way an extension of a theory by a remote detector goes.
///
/// Either the extension admits conditioned states without signaling, or it
/// signals in one or both directions. A mismatch between the summed-out
/// local statistics and the reference theory shows up as signaling toward
/// the local region (running the detector changes what is seen locally).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "NoSignaling+Collapse")]
    NoSignalingCollapse,
    SignalsRemoteToLocal,
    SignalsLocalToRemote,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionedState {
    pub preparation: String,
    pub remote_context: String,
    pub remote_outcome: String,
    pub probability: f64,
    pub behavior: Behavior,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionDiagnosis {
    pub verdict: Verdict,
    pub report: SignalingReport,
    /// Every conditioned state with non-negligible probability; present
    /// exactly when the remote marginals do not depend on the local context.
    pub conditioned: Option<Vec<ConditionedState>>,
}

pub fn diagnose_extension(jb: &JointBehavior, reference: &Behavior) -> Result<ExtensionDiagnosis> {
    diagnose_extension_with(jb, reference, tol::SIG)
}

pub fn diagnose_extension_with(jb: &JointBehavior, reference: &Behavior, sig_tol: f64) -> Result<ExtensionDiagnosis> {
    check_reference(jb, reference)?;
    let report = signaling_measure(jb, Some(reference))?;
    let to_remote = report.sig_to_remote > sig_tol;
    let to_local = report.sig_to_local > sig_tol;
    let verdict = match (to_local, to_remote) {
        (false, false) => Verdict::NoSignalingCollapse,
        (true, false) => Verdict::SignalsRemoteToLocal,
        (false, true) => Verdict::SignalsLocalToRemote,
        (true, true) => Verdict::Both,
    };

    let conditioned = if to_remote {
        None
    } else {
        let mut states = Vec::new();
        for (w, prep) in jb.preparations.iter().enumerate() {
            for (d, rc) in jb.remote.iter().enumerate() {
                for (j, label) in rc.outcomes.labels().iter().enumerate() {
                    match condition_with(jb, w, d, j, sig_tol) {
                        Ok(c) => states.push(ConditionedState {
                            preparation: prep.clone(),
                            remote_context: rc.name.clone(),
                            remote_outcome: label.clone(),
                            probability: c.probability,
                            behavior: c.behavior,
                        }),
                        Err(Error::ZeroProbability { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        Some(states)
    };

    Ok(ExtensionDiagnosis {
        verdict,
        report,
        conditioned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn copy_box_signals_local_to_remote() {
        let d = diagnose_extension(&fixtures::copy_box(), &fixtures::uniform_reference()).unwrap();
        assert_eq!(d.verdict, Verdict::SignalsLocalToRemote);
        assert!(d.conditioned.is_none());
    }

    #[test]
    fn mismatched_reference_signals_remote_to_local() {
        let reference = fixtures::binary_reference([0.6, 0.4]);
        let d = diagnose_extension(&fixtures::pr_box(), &reference).unwrap();
        assert_eq!(d.verdict, Verdict::SignalsRemoteToLocal);
        assert!((d.report.sig_to_local - 0.1).abs() < 1e-15);
        // remote marginals are still context independent, so collapse is defined
        assert_eq!(d.conditioned.as_ref().unwrap().len(), 4);
    }

    #[test]
    fn pr_box_with_its_marginals_collapses() {
        let d = diagnose_extension(&fixtures::pr_box(), &fixtures::uniform_reference()).unwrap();
        assert_eq!(d.verdict, Verdict::NoSignalingCollapse);
        let states = d.conditioned.unwrap();
        assert_eq!(states.len(), 4);
        assert!(states.iter().all(|s| (s.probability - 0.5).abs() < 1e-15));
    }
}
