use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spacelike_core::behavior::{
    condition, equivalent_observations, marginal_local, marginal_remote, signaling_measure, total_probability_check,
};
use spacelike_core::quantum::{bases, collapsed_remote_state, local_behavior};
use spacelike_core::space::{project_no_signaling, sample_with, Structure};
use spacelike_core::{fixtures, Behavior, Context, JointBehavior, OutcomeSet};

/// Every pair of contexts compared directly, no shortcuts.
fn brute_force_sig(jb: &JointBehavior) -> (f64, f64) {
    let (np, nl, nr) = (
        jb.preparations().len(),
        jb.local_contexts().len(),
        jb.remote_contexts().len(),
    );
    let n = |e: usize| jb.local_contexts()[e].len();
    let m = |d: usize| jb.remote_contexts()[d].len();
    let mut to_remote: f64 = 0.0;
    let mut to_local: f64 = 0.0;
    for w in 0..np {
        for d in 0..nr {
            for j in 0..m(d) {
                for e in 0..nl {
                    for e2 in 0..nl {
                        let a: f64 = (0..n(e)).map(|i| jb.prob(w, e, d, i, j)).sum();
                        let b: f64 = (0..n(e2)).map(|i| jb.prob(w, e2, d, i, j)).sum();
                        to_remote = to_remote.max((a - b).abs());
                    }
                }
            }
        }
        for e in 0..nl {
            for i in 0..n(e) {
                for d in 0..nr {
                    for d2 in 0..nr {
                        let a: f64 = (0..m(d)).map(|j| jb.prob(w, e, d, i, j)).sum();
                        let b: f64 = (0..m(d2)).map(|j| jb.prob(w, e, d2, i, j)).sum();
                        to_local = to_local.max((a - b).abs());
                    }
                }
            }
        }
    }
    (to_remote, to_local)
}

fn random_structure(rng: &mut ChaCha8Rng) -> Structure {
    Structure {
        preparations: rng.random_range(1..=3),
        local_outcomes: (0..rng.random_range(1..=3)).map(|_| rng.random_range(1..=4)).collect(),
        remote_outcomes: (0..rng.random_range(1..=3)).map(|_| rng.random_range(1..=4)).collect(),
    }
}

fn random_joint(seed: u64) -> JointBehavior {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_structure(&mut rng);
    sample_with(&s, &mut rng).unwrap().into_behavior()
}

fn one_block(block: Vec<Vec<f64>>) -> JointBehavior {
    let (n, m) = (block.len(), block[0].len());
    JointBehavior::new(
        vec!["W".into()],
        vec![Context::numbered("E", n).unwrap()],
        vec![Context::numbered("D", m).unwrap()],
        vec![vec![vec![block]]],
    )
    .unwrap()
}

fn product(p: &[f64], q: &[f64]) -> JointBehavior {
    one_block(p.iter().map(|pi| q.iter().map(|qj| pi * qj).collect()).collect())
}

#[test]
fn random_block_marginal_matches_hand_summation() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let raw: Vec<f64> = (0..6).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let block: Vec<Vec<f64>> = raw.chunks(2).map(|r| r.iter().map(|x| x / total).collect()).collect();
    let jb = one_block(block.clone());
    let local = marginal_local(&jb, 0, 0, 0).unwrap();
    let remote = marginal_remote(&jb, 0, 0, 0).unwrap();
    for i in 0..3 {
        assert_eq!(local[i], block[i][0] + block[i][1]);
    }
    for j in 0..2 {
        assert_eq!(remote[j], block[0][j] + block[1][j] + block[2][j]);
    }
}

#[test]
fn product_tables_factorize() {
    let (p, q) = ([0.2, 0.3, 0.5], [0.25, 0.75]);
    let jb = product(&p, &q);
    for (a, b) in marginal_local(&jb, 0, 0, 0).unwrap().iter().zip(p) {
        assert!((a - b).abs() < 1e-15);
    }
    for (a, b) in marginal_remote(&jb, 0, 0, 0).unwrap().iter().zip(q) {
        assert!((a - b).abs() < 1e-15);
    }
    assert_eq!(total_probability_check(&jb, 0, 0, 0).unwrap(), 0.0);
    for j in 0..2 {
        let c = condition(&jb, 0, 0, j).unwrap();
        assert!((c.probability - q[j]).abs() < 1e-15);
        for (a, b) in c.behavior.row(0, 0).iter().zip(p) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}

#[test]
fn perfect_correlation_collapses() {
    let jb = one_block(vec![vec![0.5, 0.0], vec![0.0, 0.5]]);
    let c = condition(&jb, 0, 0, 0).unwrap();
    assert_eq!(c.probability, 0.5);
    assert_eq!(c.behavior.row(0, 0), &[1.0, 0.0]);
}

#[test]
fn marginals_of_the_boxes() {
    let pr = fixtures::pr_box();
    let cb = fixtures::copy_box();
    for e in 0..2 {
        for d in 0..2 {
            assert_eq!(marginal_local(&pr, 0, e, d).unwrap(), vec![0.5, 0.5]);
            assert_eq!(marginal_remote(&pr, 0, e, d).unwrap(), vec![0.5, 0.5]);
            let expected = if e == 0 { vec![1.0, 0.0] } else { vec![0.0, 1.0] };
            assert_eq!(marginal_remote(&cb, 0, e, d).unwrap(), expected);
        }
    }
}

#[test]
fn shifted_pr_box_matches_brute_force() {
    let pr = fixtures::pr_box();
    let mut table = pr.table().to_vec();
    // block (x0, y0): move 0.01 from (a=0, b=0) to (a=0, b=1)
    table[0] -= 0.01;
    table[1] += 0.01;
    let jb = pr.with_table(table).unwrap();
    let report = signaling_measure(&jb, None).unwrap();
    let (to_remote, to_local) = brute_force_sig(&jb);
    assert!((report.sig_to_remote - 0.01).abs() < 1e-15);
    assert_eq!(report.sig_to_remote, to_remote);
    assert_eq!(report.sig_to_local, to_local);
    assert!(report.sig_to_local < 1e-15);
}

#[test]
fn singlet_collapse_on_remote_zero_leaves_the_orthogonal_state() {
    let setup = fixtures::singlet_setup();
    let jb = fixtures::singlet_behavior();
    let c = condition(&jb, 0, 0, 0).unwrap();
    let one = spacelike_core::DensityMatrix::pure(&[bases::c(0.0), bases::c(1.0)]).unwrap();
    let expected = local_behavior(&one, setup.local_measurements(), "rho").unwrap();
    for (a, b) in c.behavior.table().iter().zip(expected.table()) {
        assert!((a - b).abs() < 1e-12);
    }
    let (p, state) = collapsed_remote_state(&setup, 0, 0).unwrap();
    assert!((p - c.probability).abs() < 1e-12);
    assert!((state.expectation(&bases::ket_bra(&bases::z_basis(2), 1)) - 1.0).abs() < 1e-12);
}

#[test]
fn conditioned_states_mix_back_to_the_marginal() {
    for seed in 0..20 {
        let p = sample_with(
            &Structure::parse("2x2x3x3x2").unwrap(),
            &mut ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap();
        let jb = project_no_signaling(&p).unwrap().point.into_behavior();
        for w in 0..2 {
            for d in 0..3 {
                let parts: Vec<_> = (0..2).map(|j| condition(&jb, w, d, j).unwrap()).collect();
                for e in 0..2 {
                    let local = marginal_local(&jb, w, e, d).unwrap();
                    for (i, li) in local.iter().enumerate() {
                        let mixed: f64 = parts.iter().map(|c| c.probability * c.behavior.prob(0, e, i)).sum();
                        assert!((mixed - li).abs() < 1e-9, "seed {seed}");
                    }
                }
            }
        }
    }
}

fn relabel_local(jb: &JointBehavior, e0: usize, perm: &[usize]) -> JointBehavior {
    let mut local = jb.local_contexts().to_vec();
    let labels = local[e0].outcomes.labels();
    let relabeled: Vec<String> = (0..perm.len()).map(|i| labels[perm[i]].clone()).collect();
    local[e0] = Context::new(local[e0].name.clone(), OutcomeSet::new(relabeled).unwrap());
    JointBehavior::from_fn(
        jb.preparations().to_vec(),
        local,
        jb.remote_contexts().to_vec(),
        |w, e, d, i, j| {
            let i = if e == e0 { perm[i] } else { i };
            jb.prob(w, e, d, i, j)
        },
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn total_probability_holds(seed in any::<u64>()) {
        let jb = random_joint(seed);
        for w in 0..jb.preparations().len() {
            for e in 0..jb.local_contexts().len() {
                for d in 0..jb.remote_contexts().len() {
                    prop_assert!(total_probability_check(&jb, w, e, d).unwrap() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn measure_agrees_with_brute_force(seed in any::<u64>()) {
        let jb = random_joint(seed);
        let report = signaling_measure(&jb, None).unwrap();
        let (to_remote, to_local) = brute_force_sig(&jb);
        prop_assert!((report.sig_to_remote - to_remote).abs() < 1e-15);
        prop_assert!((report.sig_to_local - to_local).abs() < 1e-15);
    }

    #[test]
    fn witnesses_reproduce_the_maxima(seed in any::<u64>()) {
        let jb = random_joint(seed);
        let reference = jb.local_behavior(0).unwrap();
        for r in [None, Some(&reference)] {
            let report = signaling_measure(&jb, r).unwrap();
            let (remote, local) = report.witness_values(&jb, r);
            if let Some(v) = remote {
                prop_assert!((v - report.sig_to_remote).abs() < 1e-15);
            }
            if let Some(v) = local {
                prop_assert!((v - report.sig_to_local).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn relabeling_outcomes_leaves_measures_unchanged(seed in any::<u64>()) {
        let jb = random_joint(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let e0 = rng.random_range(0..jb.local_contexts().len());
        let n = jb.local_contexts()[e0].len();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in (1..n).rev() {
            perm.swap(k, rng.random_range(0..=k));
        }
        let before = signaling_measure(&jb, None).unwrap();
        let after = signaling_measure(&relabel_local(&jb, e0, &perm), None).unwrap();
        prop_assert!((before.sig_to_remote - after.sig_to_remote).abs() < 1e-15);
        prop_assert!((before.sig_to_local - after.sig_to_local).abs() < 1e-15);
    }

    #[test]
    fn marginals_and_conditioning_are_normalized(seed in any::<u64>()) {
        let jb = random_joint(seed);
        for w in 0..jb.preparations().len() {
            for e in 0..jb.local_contexts().len() {
                for d in 0..jb.remote_contexts().len() {
                    prop_assert!((marginal_local(&jb, w, e, d).unwrap().iter().sum::<f64>() - 1.0).abs() < 1e-9);
                    prop_assert!((marginal_remote(&jb, w, e, d).unwrap().iter().sum::<f64>() - 1.0).abs() < 1e-9);
                }
            }
        }
        // a single local context cannot signal, so conditioning always applies
        let single = JointBehavior::from_fn(
            jb.preparations().to_vec(),
            jb.local_contexts()[..1].to_vec(),
            jb.remote_contexts().to_vec(),
            |w, e, d, i, j| jb.prob(w, e, d, i, j),
        ).unwrap();
        for d in 0..single.remote_contexts().len() {
            for j in 0..single.remote_contexts()[d].len() {
                if let Ok(c) = condition(&single, 0, d, j) {
                    prop_assert!((c.behavior.row(0, 0).iter().sum::<f64>() - 1.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn returned_permutations_satisfy_the_equalities(seed in any::<u64>(), dup in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=5);
        let np = rng.random_range(1..=3);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in (1..n).rev() {
            perm.swap(k, rng.random_range(0..=k));
        }
        let rows: Vec<Vec<Vec<f64>>> = (0..np)
            .map(|_| {
                let mut r: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                if dup && n > 1 {
                    r[1] = r[0];
                }
                let t: f64 = r.iter().sum();
                let r: Vec<f64> = r.iter().map(|x| x / t).collect();
                let mut s = vec![0.0; n];
                for i in 0..n {
                    s[perm[i]] = r[i];
                }
                vec![r, s]
            })
            .collect();
        let contexts = vec![Context::numbered("E", n).unwrap(), Context::numbered("F", n).unwrap()];
        let b = Behavior::new((0..np).map(|w| format!("W{w}")).collect(), contexts, rows).unwrap();
        let pi = equivalent_observations(&b, 0, 1, 1e-12).unwrap();
        prop_assert!(pi.is_some());
        let pi = pi.unwrap();
        for w in 0..np {
            for i in 0..n {
                prop_assert!((b.prob(w, 0, i) - b.prob(w, 1, pi[i])).abs() <= 1e-12);
            }
        }
        if !dup {
            prop_assert_eq!(pi, perm);
        }
    }
}
