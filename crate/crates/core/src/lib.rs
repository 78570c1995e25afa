//! Finite empirical statistical theories over two space-time regions.
//!
//! A [`Behavior`] assigns outcome probabilities to every (preparation,
//! observation context) pair. A [`JointBehavior`] extends it with a detector
//! in a second region, so each block is a table over outcome pairs. On top of
//! these the crate provides:
//!
//! * marginals, signaling measures and the extension diagnosis
//!   ([`behavior`]),
//! * quantum behaviors generated from density matrices and projective
//!   measurements ([`quantum`]),
//! * the product-of-simplices theory space with its weak topology, sampling,
//!   perturbation, no-signaling projection and stability experiments
//!   ([`space`]).

pub mod behavior;
pub mod error;
pub mod fixtures;
pub mod quantum;
pub mod space;
pub mod tol;

pub use behavior::{
    Behavior, Context, ExtensionDiagnosis, JointBehavior, OutcomeSet, SignalingReport, Verdict, Weight,
};
pub use error::{Error, Result};
pub use quantum::{BipartiteSetup, DensityMatrix, ProjectiveMeasurement};
pub use space::{Structure, TheoryPoint, WeakProbe};
