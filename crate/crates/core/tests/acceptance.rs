//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the report is always printed.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spacelike_core::behavior::{
    condition, equivalent_observations, equivalent_preparations, signaling_measure, total_probability_check,
};
use spacelike_core::quantum::bases::random_bipartite_setup;
use spacelike_core::quantum::{
    bipartite_behavior, collapsed_remote_state, local_behavior, post_condition_witness, QuantumSetupFile,
};
use spacelike_core::space::{
    construct_signaling_perturbation, openness_radius, perturb_at_distance, project_no_signaling, sample_theory,
    sample_with, stability_experiment, stream_rng, sup_distance, MarginalEqualities, Structure, TheoryPoint,
};
use spacelike_core::{fixtures, Behavior, Context};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let elapsed = start.elapsed();
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))?;
    Ok(elapsed)
}

fn total_probability() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let structure = Structure {
            preparations: 3,
            local_outcomes: (0..3).map(|_| rng.random_range(1..=4)).collect(),
            remote_outcomes: (0..3).map(|_| rng.random_range(1..=4)).collect(),
        };
        let jb = sample_with(&structure, &mut rng)
            .map_err(|e| e.to_string())?
            .into_behavior();
        for w in 0..3 {
            for e in 0..3 {
                for d in 0..3 {
                    worst = worst.max(total_probability_check(&jb, w, e, d).map_err(|e| e.to_string())?);
                }
            }
        }
    }
    ensure(worst <= 1e-12, || format!("worst reconstruction error {worst:e}"))?;
    let t = within(Duration::from_secs(5), start)?;
    Ok(format!("1000 behaviors, worst error {worst:e}, {t:.2?}"))
}

fn quantum_setups() -> Vec<spacelike_core::BipartiteSetup> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    (0..100)
        .map(|_| {
            let da = rng.random_range(2..=3);
            let db = rng.random_range(2..=3);
            random_bipartite_setup(&mut rng, da, db)
        })
        .collect()
}

fn quantum_no_signaling() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for setup in quantum_setups() {
        let jb = bipartite_behavior(&setup).map_err(|e| e.to_string())?;
        worst = worst.max(signaling_measure(&jb, None).map_err(|e| e.to_string())?.max());
    }
    ensure(worst <= 1e-10, || format!("worst signaling {worst:e}"))?;
    let t = within(Duration::from_secs(10), start)?;
    Ok(format!("100 setups, worst signaling {worst:e}, {t:.2?}"))
}

fn collapse_consistency() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for setup in quantum_setups() {
        let jb = bipartite_behavior(&setup).map_err(|e| e.to_string())?;
        for d in 0..setup.remote_measurements().len() {
            for j in 0..setup.remote_measurements()[d].len() {
                let conditioned = condition(&jb, 0, d, j).map_err(|e| e.to_string())?;
                let (c, state) = collapsed_remote_state(&setup, d, j).map_err(|e| e.to_string())?;
                let direct = local_behavior(&state, setup.local_measurements(), "rho").map_err(|e| e.to_string())?;
                worst = worst.max((conditioned.probability - c).abs());
                for (a, b) in conditioned.behavior.table().iter().zip(direct.table()) {
                    worst = worst.max((a - b).abs());
                }
                compared += 1;
            }
        }
    }
    ensure(worst <= 1e-10, || format!("worst entry deviation {worst:e}"))?;
    Ok(format!("{compared} conditionings, worst deviation {worst:e}"))
}

fn post_conditioning_obstruction() -> Outcome {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/qutrit_witness_setup.json");
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let setup = QuantumSetupFile::from_json(&text)
        .and_then(|f| f.to_setup())
        .map_err(|e| e.to_string())?;
    let m = |name: &str| setup.measurement(name).map_err(|e| e.to_string());
    let (a, a_alt, b, control) = (m("A")?, m("A_alt")?, m("B")?, m("B_control")?);
    let dev = post_condition_witness(setup.state(), b, a, a_alt, 0).map_err(|e| e.to_string())?;
    let ctrl = post_condition_witness(setup.state(), control, a, a_alt, 0).map_err(|e| e.to_string())?;
    ensure(dev > 0.01, || format!("witness deviation {dev:e} not above 0.01"))?;
    ensure(ctrl <= 1e-12, || format!("control deviation {ctrl:e}"))?;
    Ok(format!("witness {dev:.4}, control {ctrl:e}"))
}

fn density() -> Outcome {
    let family = MarginalEqualities::no_signaling();
    let mut points = vec![
        TheoryPoint::new(fixtures::pr_box()).map_err(|e| e.to_string())?,
        TheoryPoint::new(fixtures::singlet_behavior()).map_err(|e| e.to_string())?,
    ];
    let shapes = ["2x2x2x2", "1x3x2x2", "2x2x3x3", "1x2x2x3x2"];
    for k in 0..100u64 {
        let structure = Structure::parse(shapes[k as usize % shapes.len()]).map_err(|e| e.to_string())?;
        let p = sample_theory(&structure, 1000 + k).map_err(|e| e.to_string())?;
        points.push(project_no_signaling(&p).map_err(|e| e.to_string())?.point);
    }
    let mut attempted = 0;
    let mut succeeded = 0;
    let mut min_sig = f64::INFINITY;
    for p in &points {
        for eps in [1e-2, 1e-4] {
            attempted += 1;
            if let Ok(q) = construct_signaling_perturbation(p, eps, &family) {
                let sig = q.sig();
                if sig > 0.0 && sup_distance(p, &q) <= eps {
                    succeeded += 1;
                    min_sig = min_sig.min(sig);
                }
            }
        }
    }
    ensure(succeeded == attempted, || {
        format!("{succeeded}/{attempted} perturbations succeeded")
    })?;
    Ok(format!("{succeeded}/{attempted} perturbations, min sig {min_sig:e}"))
}

fn openness() -> Outcome {
    let family = MarginalEqualities::no_signaling();
    let structure = Structure::parse("2x2x2x2").map_err(|e| e.to_string())?;
    let mut counterexamples = 0;
    let mut min_sig = f64::INFINITY;
    for k in 0..100u64 {
        let mut rng = stream_rng(6, k);
        let p = sample_with(&structure, &mut rng).map_err(|e| e.to_string())?;
        let r = openness_radius(&p, &family);
        ensure(r > 0.0, || format!("sampled point {k} does not signal"))?;
        for _ in 0..1000 {
            let q = perturb_at_distance(&p, 0.9 * r, &mut rng).map_err(|e| e.to_string())?;
            let sig = q.sig();
            min_sig = min_sig.min(sig);
            if sig <= 0.0 {
                counterexamples += 1;
            }
        }
    }
    ensure(counterexamples == 0, || format!("{counterexamples} counterexamples"))?;
    Ok(format!("100000 probes, 0 counterexamples, min sig {min_sig:e}"))
}

fn measure_zero() -> Outcome {
    let start = Instant::now();
    let structure = Structure::parse("2x2x2x2").map_err(|e| e.to_string())?;
    let run = stability_experiment(&structure, 100_000, 1e-6, 42).map_err(|e| e.to_string())?;
    let r = &run.result;
    ensure(r.signaling_fraction == 1.0, || {
        format!("signaling fraction {}", r.signaling_fraction)
    })?;
    let t = within(Duration::from_secs(60), start)?;
    Ok(format!(
        "fraction {}, min sig {:e}, {t:.2?}",
        r.signaling_fraction, r.min_sig
    ))
}

fn projection() -> Outcome {
    let p = TheoryPoint::new(fixtures::copy_box()).map_err(|e| e.to_string())?;
    let once = project_no_signaling(&p).map_err(|e| e.to_string())?;
    let q = &once.point;
    let sig = q.sig();
    let simplex = q
        .table()
        .chunks(4)
        .map(|b| {
            let neg = b.iter().fold(0.0_f64, |m, x| m.max(-x));
            neg.max((b.iter().sum::<f64>() - 1.0).abs())
        })
        .fold(0.0, f64::max);
    let twice = project_no_signaling(q).map_err(|e| e.to_string())?;
    let drift = sup_distance(q, &twice.point);
    ensure(once.iterations <= 10_000, || format!("{} iterations", once.iterations))?;
    ensure(sig <= 1e-9, || format!("sig {sig:e}"))?;
    ensure(simplex <= 1e-12, || format!("simplex violation {simplex:e}"))?;
    ensure(drift <= 1e-9, || format!("second projection moved {drift:e}"))?;
    Ok(format!(
        "{} iterations, sig {sig:e}, simplex violation {simplex:e}, idempotence drift {drift:e}",
        once.iterations
    ))
}

fn equivalence() -> Outcome {
    let shuffle = [2, 0, 1];
    let rows = [[0.5, 0.3, 0.2], [0.1, 0.6, 0.3]];
    let table: Vec<Vec<Vec<f64>>> = rows
        .iter()
        .map(|r| {
            let mut shuffled = [0.0; 3];
            for i in 0..3 {
                shuffled[shuffle[i]] = r[i];
            }
            vec![r.to_vec(), shuffled.to_vec()]
        })
        .collect();
    let contexts = vec![
        Context::numbered("E", 3).map_err(|e| e.to_string())?,
        Context::numbered("F", 3).map_err(|e| e.to_string())?,
    ];
    let b = Behavior::new(vec!["W".into(), "V".into()], contexts, table).map_err(|e| e.to_string())?;
    let pi = equivalent_observations(&b, 0, 1, 1e-12).map_err(|e| e.to_string())?;
    ensure(pi.as_deref() == Some(&shuffle[..]), || format!("recovered {pi:?}"))?;

    let photons = fixtures::photon_equiv();
    for (w, w2) in [(0, 1), (0, 2), (1, 2)] {
        let r = equivalent_preparations(&photons, w, w2, 1e-12).map_err(|e| e.to_string())?;
        ensure(r.equivalent, || {
            format!("photon preparations {w} and {w2} differ by {:e}", r.max_deviation)
        })?;
    }

    let perturbed = Behavior::new(
        vec!["W".into(), "V".into()],
        vec![Context::numbered("E", 2).map_err(|e| e.to_string())?],
        vec![vec![vec![0.5, 0.5]], vec![vec![0.6, 0.4]]],
    )
    .map_err(|e| e.to_string())?;
    let r = equivalent_preparations(&perturbed, 0, 1, 1e-6).map_err(|e| e.to_string())?;
    ensure(!r.equivalent && (r.max_deviation - 0.1).abs() < 1e-12, || {
        format!(
            "perturbed row: equivalent {}, deviation {:e}",
            r.equivalent, r.max_deviation
        )
    })?;
    Ok(format!(
        "shuffle {shuffle:?} recovered, photons pairwise equivalent, 0.1 row rejected"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("total probability", total_probability),
        ("quantum no-signaling", quantum_no_signaling),
        ("collapse consistency", collapse_consistency),
        ("post-conditioning obstruction", post_conditioning_obstruction),
        ("density", density),
        ("openness", openness),
        ("measure zero", measure_zero),
        ("projection", projection),
        ("equivalence", equivalence),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
