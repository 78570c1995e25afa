//! JSON quantum-setup files.
//!
//! Complex entries are `[re, im]` pairs; matrices are arrays of rows.
//! `dims` is `[d_a, d_b]`, or `[d]` for a single system (no remote
//! measurements).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BipartiteSetup, CMatrix, DensityMatrix, ProjectiveMeasurement};
use crate::behavior::OutcomeSet;
use crate::error::{Error, Result};

type MatrixRepr = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementRepr {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<Vec<String>>,
    pub projectors: Vec<MatrixRepr>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumSetupFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Seed of the search that produced the fixture, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub dims: Vec<usize>,
    pub state: MatrixRepr,
    pub local_measurements: Vec<MeasurementRepr>,
    #[serde(default)]
    pub remote_measurements: Vec<MeasurementRepr>,
}

fn matrix_from_repr(rows: &MatrixRepr) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("matrix with {n} rows is not square")));
    }
    Ok(CMatrix::from_fn(n, n, |r, c| {
        let [re, im] = rows[r][c];
        Complex64::new(re, im)
    }))
}

fn matrix_to_repr(m: &CMatrix) -> MatrixRepr {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

impl MeasurementRepr {
    pub fn to_measurement(&self) -> Result<ProjectiveMeasurement> {
        let projectors = self
            .projectors
            .iter()
            .map(matrix_from_repr)
            .collect::<Result<Vec<_>>>()?;
        let outcomes = match &self.outcomes {
            Some(labels) => OutcomeSet::new(labels.clone())?,
            None => OutcomeSet::numbered(projectors.len())?,
        };
        ProjectiveMeasurement::with_outcomes(&self.name, outcomes, projectors)
    }

    pub fn from_measurement(m: &ProjectiveMeasurement) -> Self {
        let numbered = OutcomeSet::numbered(m.len()).ok();
        Self {
            name: m.name().to_string(),
            outcomes: (numbered.as_ref() != Some(m.outcomes())).then(|| m.outcomes().labels().to_vec()),
            projectors: m.projectors().iter().map(matrix_to_repr).collect(),
        }
    }
}

impl QuantumSetupFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("setups serialize")
    }

    pub fn dims(&self) -> Result<(usize, usize)> {
        match self.dims[..] {
            [d] => Ok((d, 1)),
            [da, db] => Ok((da, db)),
            _ => Err(Error::Shape("dims must have one or two entries".into())),
        }
    }

    pub fn to_setup(&self) -> Result<BipartiteSetup> {
        let state = DensityMatrix::new(matrix_from_repr(&self.state)?)?;
        let convert = |ms: &[MeasurementRepr]| {
            ms.iter()
                .map(MeasurementRepr::to_measurement)
                .collect::<Result<Vec<_>>>()
        };
        BipartiteSetup::new(
            self.dims()?,
            state,
            convert(&self.local_measurements)?,
            convert(&self.remote_measurements)?,
        )
    }

    pub fn from_setup(setup: &BipartiteSetup) -> Self {
        let (da, db) = setup.dims();
        Self {
            description: None,
            seed: None,
            dims: if db == 1 { vec![da] } else { vec![da, db] },
            state: matrix_to_repr(setup.state().matrix()),
            local_measurements: setup
                .local_measurements()
                .iter()
                .map(MeasurementRepr::from_measurement)
                .collect(),
            remote_measurements: setup
                .remote_measurements()
                .iter()
                .map(MeasurementRepr::from_measurement)
                .collect(),
        }
    }
}
