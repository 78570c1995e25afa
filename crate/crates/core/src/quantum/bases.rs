//! Standard bases, states and seeded random instances for qubits and qutrits.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{BipartiteSetup, CMatrix, DensityMatrix, ProjectiveMeasurement};
use crate::error::Result;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Computational basis as the columns of the identity.
pub fn z_basis(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Qubit `|+>, |->` basis.
pub fn x_basis() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)])
}

/// Real qubit basis rotated by `theta` in the x-z plane (`theta = 0` is z,
/// `theta = pi/2` is x).
pub fn rotated_basis(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    CMatrix::from_row_slice(2, 2, &[c(co), c(-s), c(s), c(co)])
}

/// Qutrit basis `|0>, |+_12>, |-_12>`: keeps `|0>` and rotates the other two.
pub fn qutrit_plus_minus() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(3, 3, &[c(1.0), c(0.0), c(0.0), c(0.0), c(h), c(h), c(0.0), c(h), c(-h)])
}

/// `|v_k><v_k|` for column `k` of `basis`.
pub fn ket_bra(basis: &CMatrix, k: usize) -> CMatrix {
    let v = basis.column(k);
    v * v.adjoint()
}

/// Rank-one measurement in every column of `basis`.
pub fn basis_measurement(name: &str, basis: &CMatrix) -> Result<ProjectiveMeasurement> {
    let groups: Vec<Vec<usize>> = (0..basis.ncols()).map(|k| vec![k]).collect();
    ProjectiveMeasurement::from_basis(name, basis, &groups)
}

/// The two-qubit singlet `(|01> - |10>)/sqrt 2`.
pub fn singlet() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DensityMatrix::pure(&[c(0.0), c(h), c(-h), c(0.0)]).expect("singlet is a valid state")
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let qr = gaussian_matrix(rng, d, d).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let diag = r[(k, k)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { c(1.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityMatrix {
    let psi: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    DensityMatrix::pure(&psi).expect("gaussian vector is non-zero")
}

/// Random mixed state `G G† / Tr(G G†)` with `G` a `d × rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> DensityMatrix {
    let g = gaussian_matrix(rng, d, rank.max(1));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m.unscale(tr);
    let m = (&m + m.adjoint()).scale(0.5);
    DensityMatrix::new(m).expect("Ginibre ensemble yields a valid state")
}

/// Projective measurement in a Haar-random basis. With `coarse` and `d ≥ 3`
/// the last two basis vectors are merged into one rank-two projector.
pub fn random_measurement<R: Rng + ?Sized>(rng: &mut R, name: &str, d: usize, coarse: bool) -> ProjectiveMeasurement {
    let u = random_unitary(rng, d);
    let mut groups: Vec<Vec<usize>> = (0..d).map(|k| vec![k]).collect();
    if coarse && d >= 3 {
        let last = groups.pop().unwrap();
        groups.last_mut().unwrap().extend(last);
    }
    ProjectiveMeasurement::from_basis(name, &u, &groups).expect("unitary columns give a measurement")
}

/// Random bipartite scenario: a Ginibre state of random rank on
/// `d_a · d_b` and two Haar-random measurements per side, the second one
/// coarse-grained where the dimension allows.
pub fn random_bipartite_setup<R: Rng + ?Sized>(rng: &mut R, da: usize, db: usize) -> BipartiteSetup {
    let rank = rng.random_range(1..=da * db);
    let state = random_density(rng, da * db, rank);
    let local = vec![
        random_measurement(rng, "a0", da, false),
        random_measurement(rng, "a1", da, true),
    ];
    let remote = vec![
        random_measurement(rng, "b0", db, false),
        random_measurement(rng, "b1", db, true),
    ];
    BipartiteSetup::new((da, db), state, local, remote).expect("dimensions agree by construction")
}

/// Column vector helper used by tests and fixtures.
pub fn ket(entries: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(entries)
}
