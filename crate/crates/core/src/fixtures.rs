//! Scenario fixtures shipped with the repository.
//!
//! The JSON files under `fixtures/` are generated from these constructors
//! (`spacelike fixtures -o fixtures`) and checked against them in tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::behavior::{Behavior, Context, JointBehavior};
use crate::quantum::bases::{self, c, ket_bra, z_basis};
use crate::quantum::{
    bipartite_behavior, local_behavior, partial_trace_remote, post_condition_witness, BipartiteSetup, CMatrix,
    DensityMatrix, ProjectiveMeasurement, QuantumSetupFile,
};

/// Seed of the search that fixed the qutrit witness state and basis.
pub const WITNESS_SEED: u64 = 7;

/// Deviation the witness search insists on before accepting a candidate.
pub const WITNESS_MARGIN: f64 = 0.05;

fn binary_contexts(prefix: &str) -> Vec<Context> {
    (0..2)
        .map(|k| Context::numbered(format!("{prefix}{k}"), 2).unwrap())
        .collect()
}

/// `P(a, b | x, y) = 1/2` iff `a ⊕ b = x·y`.
pub fn pr_box() -> JointBehavior {
    JointBehavior::from_fn(
        vec!["W".into()],
        binary_contexts("x"),
        binary_contexts("y"),
        |_, x, y, a, b| {
            if (a ^ b) == (x & y) {
                0.5
            } else {
                0.0
            }
        },
    )
    .unwrap()
}

/// The remote outcome copies the local setting, `b = x`; `a` is uniform.
pub fn copy_box() -> JointBehavior {
    JointBehavior::from_fn(
        vec!["W".into()],
        binary_contexts("x"),
        binary_contexts("y"),
        |_, x, _, _, b| {
            if b == x {
                0.5
            } else {
                0.0
            }
        },
    )
    .unwrap()
}

/// Single-region reference over the box contexts `x0, x1` with the given row.
pub fn binary_reference(row: [f64; 2]) -> Behavior {
    Behavior::new(
        vec!["W".into()],
        binary_contexts("x"),
        vec![vec![row.to_vec(), row.to_vec()]],
    )
    .unwrap()
}

pub fn uniform_reference() -> Behavior {
    binary_reference([0.5, 0.5])
}

fn qubit_bases_measurements() -> Vec<ProjectiveMeasurement> {
    vec![
        bases::basis_measurement("z", &z_basis(2)).unwrap(),
        bases::basis_measurement("x", &bases::x_basis()).unwrap(),
    ]
}

/// Singlet with z and x measurements on each side.
pub fn singlet_setup() -> BipartiteSetup {
    BipartiteSetup::new(
        (2, 2),
        bases::singlet(),
        qubit_bases_measurements(),
        qubit_bases_measurements(),
    )
    .unwrap()
}

pub fn singlet_behavior() -> JointBehavior {
    bipartite_behavior(&singlet_setup()).unwrap()
}

/// Local behavior of the reduced state of a setup under its local measurements.
pub fn reduced_reference(setup: &BipartiteSetup) -> Behavior {
    let (da, db) = setup.dims();
    let reduced = partial_trace_remote(setup.state().matrix(), da, db);
    let state = DensityMatrix::new(reduced).unwrap();
    local_behavior(&state, setup.local_measurements(), crate::quantum::STATE_PREPARATION).unwrap()
}

/// Maximally mixed two-qubit state with z and x measurements on each side.
pub fn mixed_qubit_setup() -> BipartiteSetup {
    BipartiteSetup::new(
        (2, 2),
        DensityMatrix::maximally_mixed(4),
        qubit_bases_measurements(),
        qubit_bases_measurements(),
    )
    .unwrap()
}

/// Qutrit scenario for the post-conditioning witness.
///
/// Measurements, in order: `A` (computational basis), `A_alt` (keeps `|0>`,
/// rotates `|1>, |2>` to `|±_12>`), `B` (searched basis), `B_control`
/// (`{|0><0|, 1 - |0><0|}`, commutes with both `A` and `A_alt`). The state
/// and `B` come from the first seeded draw whose witness deviation exceeds
/// [`WITNESS_MARGIN`].
pub fn qutrit_witness_setup(seed: u64) -> BipartiteSetup {
    let a = bases::basis_measurement("A", &z_basis(3)).unwrap();
    let a_alt = bases::basis_measurement("A_alt", &bases::qutrit_plus_minus()).unwrap();
    let p0 = ket_bra(&z_basis(3), 0);
    let control = ProjectiveMeasurement::new("B_control", vec![p0.clone(), CMatrix::identity(3, 3) - p0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let state = bases::random_pure_state(&mut rng, 3);
        let b = bases::random_measurement(&mut rng, "B", 3, false);
        let dev = post_condition_witness(&state, &b, &a, &a_alt, 0).unwrap();
        if dev > WITNESS_MARGIN {
            return BipartiteSetup::new((3, 1), state, vec![a, a_alt, b, control], vec![]).unwrap();
        }
    }
}

/// Three preparations of an unpolarized photon (prism-filtered thermal
/// light, randomly rotated polarizer, one half of a singlet pair), each
/// described by `I/2` and measured in the H/V, D/A and R/L bases.
pub fn photon_equiv() -> Behavior {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let circular = CMatrix::from_row_slice(
        2,
        2,
        &[
            c(h),
            c(h),
            num_complex::Complex64::new(0.0, h),
            num_complex::Complex64::new(0.0, -h),
        ],
    );
    let with_labels = |name: &str, basis: &CMatrix, labels: [&str; 2]| {
        let m = bases::basis_measurement(name, basis).unwrap();
        ProjectiveMeasurement::with_outcomes(
            name,
            crate::behavior::OutcomeSet::new(labels).unwrap(),
            m.projectors().to_vec(),
        )
        .unwrap()
    };
    let measurements = vec![
        with_labels("HV", &z_basis(2), ["H", "V"]),
        with_labels("DA", &bases::x_basis(), ["D", "A"]),
        with_labels("RL", &circular, ["R", "L"]),
    ];
    let photon = DensityMatrix::maximally_mixed(2);
    let rows: Vec<Behavior> = ["W1", "W2", "W3"]
        .iter()
        .map(|w| local_behavior(&photon, &measurements, w).unwrap())
        .collect();
    let table = rows.iter().flat_map(|b| b.table().to_vec()).collect();
    Behavior::from_flat(
        rows.iter().map(|b| b.preparations()[0].clone()).collect(),
        rows[0].contexts().to_vec(),
        table,
    )
    .unwrap()
}

/// Every shipped fixture as `(file name, JSON text)`.
pub fn all() -> Vec<(&'static str, String)> {
    use crate::behavior::BehaviorFile;
    let setup = |s: &BipartiteSetup, description: &str, seed: Option<u64>| {
        let mut f = QuantumSetupFile::from_setup(s);
        f.description = Some(description.to_string());
        f.seed = seed;
        f.to_json()
    };
    vec![
        ("pr_box.json", BehaviorFile::Joint(pr_box()).to_json()),
        ("copy_box.json", BehaviorFile::Joint(copy_box()).to_json()),
        ("uniform_reference.json", BehaviorFile::Single(uniform_reference()).to_json()),
        ("skewed_reference.json", BehaviorFile::Single(binary_reference([0.6, 0.4])).to_json()),
        ("photon_equiv.json", BehaviorFile::Single(photon_equiv()).to_json()),
        (
            "singlet_setup.json",
            setup(&singlet_setup(), "two-qubit singlet, z and x on both sides", None),
        ),
        ("singlet_behavior.json", BehaviorFile::Joint(singlet_behavior()).to_json()),
        (
            "singlet_reference.json",
            BehaviorFile::Single(reduced_reference(&singlet_setup())).to_json(),
        ),
        (
            "mixed_qubit_setup.json",
            setup(&mixed_qubit_setup(), "maximally mixed two-qubit state, z and x on both sides", None),
        ),
        (
            "qutrit_witness_setup.json",
            setup(
                &qutrit_witness_setup(WITNESS_SEED),
                "qutrit post-conditioning witness: measurements A, A_alt share |0><0|; B searched by seed; B_control commutes with both",
                Some(WITNESS_SEED),
            ),
        ),
    ]
}
