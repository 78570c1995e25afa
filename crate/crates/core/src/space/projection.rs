//! Euclidean projection onto the theories satisfying an equality family.
//!
//! The feasible set is the intersection of the product of simplices with a
//! linear subspace. Dykstra's method alternates the two exact projections,
//! carrying a correction term for the simplex step so the iterates converge
//! to the nearest point of the intersection (plain alternation only finds
//! some point of it).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{EqualityFamily, MarginalEqualities, TheoryPoint};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionOptions {
    pub max_iterations: usize,
    /// Stop once successive iterates move less than this (sup-norm).
    pub step_tol: f64,
    /// Required violation of the equalities at the returned point.
    pub sig_tol: f64,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            step_tol: 1e-12,
            sig_tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub point: TheoryPoint,
    pub iterations: usize,
    /// Sup-norm gap between the simplex iterate and the subspace iterate,
    /// one entry per iteration.
    pub residuals: Vec<f64>,
}

/// Projects `v` onto `{x ≥ 0, Σx = 1}` in place (sort and threshold).
pub fn project_simplex(v: &mut [f64]) {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumulative += uk;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
}

/// Orthonormal basis of the row space of the equalities, as columns.
fn row_space_basis(rows: &[Vec<(usize, f64)>], n: usize) -> DMatrix<f64> {
    if rows.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    let mut a = DMatrix::<f64>::zeros(rows.len(), n);
    for (r, row) in rows.iter().enumerate() {
        for &(k, coef) in row {
            a[(r, k)] += coef;
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let largest = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 1e-10 * largest)
        .map(|(k, _)| k)
        .collect();
    DMatrix::from_fn(n, keep.len(), |i, c| v_t[(keep[c], i)])
}

pub fn project_no_signaling(p: &TheoryPoint) -> Result<Projection> {
    project_onto(p, &MarginalEqualities::no_signaling(), ProjectionOptions::default())
}

/// Nearest point (Euclidean) to `p` among theories satisfying `family`.
pub fn project_onto(p: &TheoryPoint, family: &dyn EqualityFamily, options: ProjectionOptions) -> Result<Projection> {
    let n = p.table().len();
    let basis = row_space_basis(&family.rows(p.behavior()), n);
    let blocks = p.block_ranges();

    let onto_subspace = |x: &[f64]| -> Vec<f64> {
        let xv = nalgebra::DVector::from_column_slice(x);
        let coeffs = basis.tr_mul(&xv);
        (xv - &basis * coeffs).as_slice().to_vec()
    };
    let onto_simplices = |x: &mut [f64]| {
        for r in &blocks {
            project_simplex(&mut x[r.clone()]);
        }
    };
    let finish = |x: &[f64]| -> Result<(TheoryPoint, f64)> {
        let mut y = x.to_vec();
        onto_simplices(&mut y);
        let q = p.with_table(y)?;
        let sig = family.measure(q.behavior());
        Ok((q, sig))
    };

    let (q0, sig0) = finish(p.table())?;
    if sig0 <= options.sig_tol && super::sup_distance(p, &q0) <= options.step_tol {
        return Ok(Projection {
            point: q0,
            iterations: 0,
            residuals: vec![],
        });
    }

    let mut x = p.table().to_vec();
    let mut correction = vec![0.0; n];
    let mut residuals = Vec::new();
    let mut last_move = f64::INFINITY;
    for iteration in 1..=options.max_iterations {
        let mut y: Vec<f64> = x.iter().zip(&correction).map(|(a, b)| a + b).collect();
        onto_simplices(&mut y);
        for k in 0..n {
            correction[k] += x[k] - y[k];
        }
        let next = onto_subspace(&y);
        last_move = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        residuals.push(next.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        x = next;
        if last_move < options.step_tol {
            let (q, sig) = finish(&x)?;
            if sig <= options.sig_tol {
                return Ok(Projection {
                    point: q,
                    iterations: iteration,
                    residuals,
                });
            }
        }
    }
    let (_, signaling) = finish(&x)?;
    Err(Error::NonConvergence {
        iterations: options.max_iterations,
        last_move,
        signaling,
    })
}
