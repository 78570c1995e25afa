//! Two successive projective measurements on one system, `A` first.

use super::{max_abs, trace_product, CMatrix, DensityMatrix, ProjectiveMeasurement};
use crate::behavior::check_index;
use crate::error::{Error, Result};
use crate::tol;

fn same_dim(state: &DensityMatrix, m: &ProjectiveMeasurement) -> Result<()> {
    if m.dim() == state.dim() {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: state.dim(),
            found: m.dim(),
        })
    }
}

/// `P(i, j) = Tr(P_i ρ P_i Q_j)`: `A` is measured, the state is projected,
/// then `B` is measured.
pub fn joint_probability(
    state: &DensityMatrix,
    a: &ProjectiveMeasurement,
    b: &ProjectiveMeasurement,
) -> Result<Vec<Vec<f64>>> {
    same_dim(state, a)?;
    same_dim(state, b)?;
    let rho = state.matrix();
    Ok(a.projectors()
        .iter()
        .map(|p| {
            let projected = p * rho * p;
            b.projectors()
                .iter()
                .map(|q| trace_product(&projected, q).re.max(0.0))
                .collect()
        })
        .collect())
}

/// Probability `Tr(P ρ)` of the projector and the state `P ρ P / Tr(P ρ)`
/// prepared by keeping only the runs where it fired.
pub fn pre_condition(state: &DensityMatrix, projector: &CMatrix) -> Result<(f64, DensityMatrix)> {
    if projector.nrows() != state.dim() {
        return Err(Error::Dimension {
            expected: state.dim(),
            found: projector.nrows(),
        });
    }
    let p = state.expectation(projector);
    if p <= tol::ZERO {
        return Err(Error::ZeroProbability { probability: p });
    }
    let projected = (projector * state.matrix() * projector).unscale(p);
    let hermitian = (&projected + projected.adjoint()).scale(0.5);
    Ok((p, DensityMatrix::new(hermitian)?))
}

/// `P(i | j)` for `A` measured before `B`: the earlier outcome conditioned on
/// the later one.
pub fn post_condition(
    state: &DensityMatrix,
    a: &ProjectiveMeasurement,
    b: &ProjectiveMeasurement,
    i: usize,
    j: usize,
) -> Result<f64> {
    check_index("outcome of A", i, a.len())?;
    check_index("outcome of B", j, b.len())?;
    let table = joint_probability(state, a, b)?;
    let denominator: f64 = table.iter().map(|row| row[j]).sum();
    if denominator <= tol::ZERO {
        return Err(Error::ZeroProbability {
            probability: denominator,
        });
    }
    Ok(table[i][j] / denominator)
}

/// How much `P(shared | j)` changes when the projectors measured alongside
/// the shared one are swapped, maximized over outcomes `j` of `B`.
///
/// `shared` indexes the common projector in `a`; the same projector must
/// appear in `a_alt`. A positive value shows that post-conditioned
/// statistics cannot come from any single state depending only on the state
/// and `B`. Outcomes `j` with probability at most `tol::ZERO` under either
/// measurement are skipped.
pub fn post_condition_witness(
    state: &DensityMatrix,
    b: &ProjectiveMeasurement,
    a: &ProjectiveMeasurement,
    a_alt: &ProjectiveMeasurement,
    shared: usize,
) -> Result<f64> {
    check_index("projector of A", shared, a.len())?;
    let target = &a.projectors()[shared];
    let alt = a_alt
        .projectors()
        .iter()
        .position(|p| p.nrows() == target.nrows() && max_abs(&(p - target)) <= tol::QUANTUM)
        .ok_or_else(|| Error::Precondition("the two measurements do not share the projector".into()))?;

    let t = joint_probability(state, a, b)?;
    let t_alt = joint_probability(state, a_alt, b)?;
    let mut deviation: f64 = 0.0;
    for j in 0..b.len() {
        let den: f64 = t.iter().map(|row| row[j]).sum();
        let den_alt: f64 = t_alt.iter().map(|row| row[j]).sum();
        if den <= tol::ZERO || den_alt <= tol::ZERO {
            continue;
        }
        deviation = deviation.max((t[shared][j] / den - t_alt[alt][j] / den_alt).abs());
    }
    Ok(deviation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::bases::*;

    #[test]
    fn same_measurement_twice_is_diagonal() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(9);
        let rho = random_density(&mut rng, 3, 2);
        let a = random_measurement(&mut rng, "A", 3, false);
        let t = joint_probability(&rho, &a, &a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j {
                    rho.expectation(&a.projectors()[i])
                } else {
                    0.0
                };
                assert!((t[i][j] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pure_z_state_measured_twice() {
        let rho = DensityMatrix::pure(&[c(1.0), c(0.0)]).unwrap();
        let z = basis_measurement("z", &z_basis(2)).unwrap();
        let t = joint_probability(&rho, &z, &z).unwrap();
        assert_eq!(t, vec![vec![1.0, 0.0], vec![0.0, 0.0]]);
    }

    #[test]
    fn pre_condition_on_half_identity() {
        let (p, rho0) = pre_condition(&DensityMatrix::maximally_mixed(2), &ket_bra(&z_basis(2), 0)).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!(max_abs(&(rho0.matrix() - ket_bra(&z_basis(2), 0))) < 1e-15);
    }

    #[test]
    fn pre_condition_on_eigenstate_is_identity() {
        let rho = DensityMatrix::pure(&[c(0.0), c(1.0)]).unwrap();
        let (p, out) = pre_condition(&rho, &ket_bra(&z_basis(2), 1)).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!(max_abs(&(out.matrix() - rho.matrix())) < 1e-15);
    }

    #[test]
    fn zero_probability_projector_is_rejected() {
        let rho = DensityMatrix::pure(&[c(1.0), c(0.0)]).unwrap();
        assert!(matches!(
            pre_condition(&rho, &ket_bra(&z_basis(2), 1)),
            Err(Error::ZeroProbability { .. })
        ));
    }

    #[test]
    fn witness_requires_a_shared_projector() {
        let rho = DensityMatrix::maximally_mixed(2);
        let z = basis_measurement("z", &z_basis(2)).unwrap();
        let x = basis_measurement("x", &x_basis()).unwrap();
        assert!(matches!(
            post_condition_witness(&rho, &z, &z, &x, 0),
            Err(Error::Precondition(_))
        ));
        assert_eq!(post_condition_witness(&rho, &x, &z, &z, 0).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let rho = DensityMatrix::maximally_mixed(3);
        let z = basis_measurement("z", &z_basis(2)).unwrap();
        assert!(matches!(joint_probability(&rho, &z, &z), Err(Error::Dimension { .. })));
    }
}
