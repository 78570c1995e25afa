//! Quantum behaviors from density matrices and projective measurements.
//!
//! Matrices are dense `DMatrix<Complex64>`; the intended scale is small
//! (dimension up to a few dozen). Measurements are given as explicit
//! projector lists, nothing here diagonalizes an observable.

pub mod bases;
mod bipartite;
mod io;
mod sequential;

pub use bipartite::{
    bipartite_behavior, collapsed_remote_state, kron, local_behavior, partial_trace_remote, STATE_PREPARATION,
};
pub use io::{MeasurementRepr, QuantumSetupFile};
pub use sequential::{joint_probability, post_condition, post_condition_witness, pre_condition};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::behavior::OutcomeSet;
use crate::error::{Error, Result};
use crate::tol;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantumViolationKind {
    NotSquare,
    Dimension,
    NotHermitian,
    Trace,
    NegativeEigenvalue,
    NotIdempotent,
    NotOrthogonal,
    Incomplete,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumViolation {
    pub kind: QuantumViolationKind,
    /// Projector indices for measurement checks, empty for state checks.
    pub index: Vec<usize>,
    pub magnitude: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QuantumReport {
    pub violations: Vec<QuantumViolation>,
}

impl QuantumReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: QuantumViolationKind, index: Vec<usize>, magnitude: f64) {
        self.violations.push(QuantumViolation { kind, index, magnitude });
    }

    fn into_result(self) -> Result<()> {
        if self.is_clean() {
            Ok(())
        } else {
            Err(Error::InvalidQuantum(self))
        }
    }
}

/// Largest entry modulus.
pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    // Tr(AB) = Σ_ab A_ab B_ba
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..n {
        for c in 0..n {
            acc += a[(r, c)] * b[(c, r)];
        }
    }
    acc
}

fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn validate_state(rho: &CMatrix) -> QuantumReport {
    let mut report = QuantumReport::default();
    if !rho.is_square() || rho.nrows() == 0 {
        report.push(QuantumViolationKind::NotSquare, vec![], 0.0);
        return report;
    }
    let herm = hermiticity_defect(rho);
    if herm > tol::QUANTUM {
        report.push(QuantumViolationKind::NotHermitian, vec![], herm);
    }
    let tr = rho.trace();
    let trace_err = (tr - Complex64::new(1.0, 0.0)).norm();
    if trace_err > tol::QUANTUM {
        report.push(QuantumViolationKind::Trace, vec![], trace_err);
    }
    let hermitian_part = (rho + rho.adjoint()).scale(0.5);
    let min_eig = hermitian_part
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if min_eig < -tol::QUANTUM {
        report.push(QuantumViolationKind::NegativeEigenvalue, vec![], -min_eig);
    }
    report
}

pub fn validate_measurement(projectors: &[CMatrix]) -> QuantumReport {
    let mut report = QuantumReport::default();
    let Some(first) = projectors.first() else {
        report.push(QuantumViolationKind::Incomplete, vec![], 1.0);
        return report;
    };
    let d = first.nrows();
    for (k, p) in projectors.iter().enumerate() {
        if !p.is_square() || p.nrows() != d {
            report.push(QuantumViolationKind::Dimension, vec![k], p.nrows() as f64);
        }
    }
    if !report.is_clean() {
        return report;
    }
    for (k, p) in projectors.iter().enumerate() {
        let herm = hermiticity_defect(p);
        if herm > tol::QUANTUM {
            report.push(QuantumViolationKind::NotHermitian, vec![k], herm);
        }
        let idem = max_abs(&(p * p - p));
        if idem > tol::QUANTUM {
            report.push(QuantumViolationKind::NotIdempotent, vec![k], idem);
        }
    }
    for a in 0..projectors.len() {
        for b in a + 1..projectors.len() {
            let overlap = max_abs(&(&projectors[a] * &projectors[b]));
            if overlap > tol::QUANTUM {
                report.push(QuantumViolationKind::NotOrthogonal, vec![a, b], overlap);
            }
        }
    }
    let sum = projectors.iter().fold(CMatrix::zeros(d, d), |acc, p| acc + p);
    let gap = max_abs(&(sum - CMatrix::identity(d, d)));
    if gap > tol::QUANTUM {
        report.push(QuantumViolationKind::Incomplete, vec![], gap);
    }
    report
}

/// A validated density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    rho: CMatrix,
}

impl DensityMatrix {
    pub fn new(rho: CMatrix) -> Result<Self> {
        validate_state(&rho).into_result()?;
        Ok(Self { rho })
    }

    /// `|psi><psi|` for a (not necessarily normalized) vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        let norm = v.norm();
        if norm <= tol::ZERO {
            return Err(Error::Precondition("zero state vector".into()));
        }
        let v = v.unscale(norm);
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            rho: CMatrix::identity(d, d).unscale(d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    /// Probability `Tr(P ρ)` of a projector.
    pub fn expectation(&self, p: &CMatrix) -> f64 {
        trace_product(p, &self.rho).re
    }
}

/// A complete set of mutually orthogonal projectors, each labelled by an outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveMeasurement {
    name: String,
    outcomes: OutcomeSet,
    projectors: Vec<CMatrix>,
}

impl ProjectiveMeasurement {
    /// Outcomes are numbered `0..n` in projector order.
    pub fn new(name: impl Into<String>, projectors: Vec<CMatrix>) -> Result<Self> {
        let outcomes = OutcomeSet::numbered(projectors.len())?;
        Self::with_outcomes(name, outcomes, projectors)
    }

    pub fn with_outcomes(name: impl Into<String>, outcomes: OutcomeSet, projectors: Vec<CMatrix>) -> Result<Self> {
        if outcomes.len() != projectors.len() {
            return Err(Error::Shape(format!(
                "{} outcome labels for {} projectors",
                outcomes.len(),
                projectors.len()
            )));
        }
        validate_measurement(&projectors).into_result()?;
        Ok(Self {
            name: name.into(),
            outcomes,
            projectors,
        })
    }

    /// Rank-one projectors onto the columns of a unitary, optionally grouped:
    /// `groups[k]` lists the columns spanning projector `k`.
    pub fn from_basis(name: impl Into<String>, basis: &CMatrix, groups: &[Vec<usize>]) -> Result<Self> {
        let d = basis.nrows();
        let projectors = groups
            .iter()
            .map(|cols| {
                cols.iter().fold(CMatrix::zeros(d, d), |acc, &c| {
                    let v = basis.column(c);
                    acc + v * v.adjoint()
                })
            })
            .collect();
        Self::new(name, projectors)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn outcomes(&self) -> &OutcomeSet {
        &self.outcomes
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].nrows()
    }

    /// True if every projector commutes with every projector of `other`.
    pub fn commutes_with(&self, other: &Self) -> bool {
        self.projectors.iter().all(|p| {
            other
                .projectors
                .iter()
                .all(|q| max_abs(&(p * q - q * p)) <= tol::QUANTUM)
        })
    }
}

/// A state on a two-region system with measurements available on each side.
/// The local factor comes first in the tensor product.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteSetup {
    dims: (usize, usize),
    state: DensityMatrix,
    local: Vec<ProjectiveMeasurement>,
    remote: Vec<ProjectiveMeasurement>,
}

impl BipartiteSetup {
    pub fn new(
        dims: (usize, usize),
        state: DensityMatrix,
        local: Vec<ProjectiveMeasurement>,
        remote: Vec<ProjectiveMeasurement>,
    ) -> Result<Self> {
        let (da, db) = dims;
        if state.dim() != da * db {
            return Err(Error::Dimension {
                expected: da * db,
                found: state.dim(),
            });
        }
        for m in &local {
            if m.dim() != da {
                return Err(Error::Dimension {
                    expected: da,
                    found: m.dim(),
                });
            }
        }
        for m in &remote {
            if m.dim() != db {
                return Err(Error::Dimension {
                    expected: db,
                    found: m.dim(),
                });
            }
        }
        Ok(Self {
            dims,
            state,
            local,
            remote,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn local_measurements(&self) -> &[ProjectiveMeasurement] {
        &self.local
    }

    pub fn remote_measurements(&self) -> &[ProjectiveMeasurement] {
        &self.remote
    }

    /// Looks up a measurement by name among local, then remote measurements.
    pub fn measurement(&self, name: &str) -> Result<&ProjectiveMeasurement> {
        self.local
            .iter()
            .chain(&self.remote)
            .find(|m| m.name == name)
            .ok_or_else(|| Error::UnknownIndex {
                kind: "measurement",
                name: name.to_string(),
            })
    }
}
