//! Space-like separated measurements on a shared state: `P_i ⊗ Q_j`.

use super::{trace_product, BipartiteSetup, CMatrix, DensityMatrix, ProjectiveMeasurement};
use crate::behavior::{check_index, Behavior, Context, JointBehavior};
use crate::error::{Error, Result};
use crate::tol;

/// Name of the single preparation in behaviors generated from a state.
pub const STATE_PREPARATION: &str = "rho";

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Traces out the remote (second) factor of a `d_a·d_b` matrix.
pub fn partial_trace_remote(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(da, da, |a, a2| (0..db).map(|b| m[(a * db + b, a2 * db + b)]).sum())
}

fn context(m: &ProjectiveMeasurement) -> Context {
    Context::new(m.name(), m.outcomes().clone())
}

/// Joint behavior with `P(i, j | e, d) = Tr((P^e_i ⊗ Q^d_j) ρ)`.
pub fn bipartite_behavior(setup: &BipartiteSetup) -> Result<JointBehavior> {
    if setup.local.is_empty() || setup.remote.is_empty() {
        return Err(Error::Structure(
            "a joint behavior needs at least one local and one remote measurement".into(),
        ));
    }
    let rho = setup.state.matrix();
    let mut table = Vec::new();
    for a in &setup.local {
        for b in &setup.remote {
            for p in a.projectors() {
                for q in b.projectors() {
                    table.push(trace_product(&kron(p, q), rho).re.max(0.0));
                }
            }
        }
    }
    JointBehavior::from_flat(
        vec![STATE_PREPARATION.to_string()],
        setup.local.iter().map(context).collect(),
        setup.remote.iter().map(context).collect(),
        table,
    )
}

/// Probability of remote outcome `j` of measurement `d`, and the local state
/// `Tr_remote((I ⊗ Q_j) ρ (I ⊗ Q_j)) / c_j` left behind.
pub fn collapsed_remote_state(setup: &BipartiteSetup, d: usize, j: usize) -> Result<(f64, DensityMatrix)> {
    check_index("remote measurement", d, setup.remote.len())?;
    let q = setup.remote[d].projectors();
    check_index("remote outcome", j, q.len())?;
    let (da, db) = setup.dims;
    let full = kron(&CMatrix::identity(da, da), &q[j]);
    let rho = setup.state.matrix();
    let c = trace_product(&full, rho).re;
    if c <= tol::ZERO {
        return Err(Error::ZeroProbability { probability: c });
    }
    let reduced = partial_trace_remote(&(&full * rho * &full), da, db).unscale(c);
    let hermitian = (&reduced + reduced.adjoint()).scale(0.5);
    Ok((c, DensityMatrix::new(hermitian)?))
}

/// Single-region behavior of one state under a list of measurements.
pub fn local_behavior(
    state: &DensityMatrix,
    measurements: &[ProjectiveMeasurement],
    preparation: &str,
) -> Result<Behavior> {
    let mut table = Vec::new();
    for m in measurements {
        if m.dim() != state.dim() {
            return Err(Error::Dimension {
                expected: state.dim(),
                found: m.dim(),
            });
        }
        table.extend(m.projectors().iter().map(|p| state.expectation(p).max(0.0)));
    }
    Behavior::from_flat(
        vec![preparation.to_string()],
        measurements.iter().map(context).collect(),
        table,
    )
}
