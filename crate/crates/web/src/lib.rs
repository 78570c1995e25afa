//! Browser bindings for three interactive views: mixing correlation boxes,
//! rotating singlet measurements, and the stability histogram.
//!
//! Every export returns a JSON string; errors come back as plain messages.
//! The `*_json` functions are the same operations without the wasm layer.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use spacelike_core::behavior::{diagnose_extension, signaling_measure};
use spacelike_core::quantum::bases::{basis_measurement, rotated_basis, singlet};
use spacelike_core::quantum::bipartite_behavior;
use spacelike_core::space::{
    openness_radius, stability_experiment_with, MarginalEqualities, StabilityConfig, StabilityResult,
};
use spacelike_core::{
    fixtures, BipartiteSetup, ExtensionDiagnosis, JointBehavior, SignalingReport, Structure, TheoryPoint,
};

/// Upper bound on trials accepted from the page.
pub const MAX_TRIALS: usize = 200_000;

#[derive(Serialize)]
pub struct BoxMix {
    /// Normalized weights of the PR box, copy box and white noise.
    pub weights: [f64; 3],
    /// Table indexed `[x][y][a][b]`.
    pub table: Vec<Vec<Vec<Vec<f64>>>>,
    pub signaling: SignalingReport,
    pub openness_radius: f64,
    pub diagnosis: ExtensionDiagnosis,
}

#[derive(Serialize)]
pub struct SingletView {
    pub angles: [f64; 4],
    pub table: Vec<Vec<Vec<Vec<f64>>>>,
    /// `E(x, y)`: expectation of the product of the `±1` outcomes.
    pub correlators: Vec<Vec<f64>>,
    /// `E00 + E01 + E10 - E11`.
    pub chsh: f64,
    pub diagnosis: ExtensionDiagnosis,
}

type Result<T> = std::result::Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string(value).map_err(err)
}

fn nested(jb: &JointBehavior) -> Vec<Vec<Vec<Vec<f64>>>> {
    let (nx, ny) = (jb.local_contexts().len(), jb.remote_contexts().len());
    (0..nx)
        .map(|x| {
            (0..ny)
                .map(|y| {
                    let block = jb.block(0, x, y);
                    let nb = jb.remote_contexts()[y].len();
                    block.chunks(nb).map(<[f64]>::to_vec).collect()
                })
                .collect()
        })
        .collect()
}

pub fn mix_boxes(pr: f64, copy: f64, noise: f64) -> Result<BoxMix> {
    let raw = [pr, copy, noise];
    if raw.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err("weights must be finite and non-negative".into());
    }
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Err("at least one weight must be positive".into());
    }
    let weights = raw.map(|w| w / total);
    let (pr_box, copy_box) = (fixtures::pr_box(), fixtures::copy_box());
    let table = pr_box
        .table()
        .iter()
        .zip(copy_box.table())
        .map(|(p, c)| weights[0] * p + weights[1] * c + weights[2] * 0.25)
        .collect();
    let jb = pr_box.with_table(table).map_err(err)?;
    let signaling = signaling_measure(&jb, None).map_err(err)?;
    let diagnosis = diagnose_extension(&jb, &fixtures::uniform_reference()).map_err(err)?;
    let point = TheoryPoint::new(jb).map_err(err)?;
    Ok(BoxMix {
        weights,
        table: nested(point.behavior()),
        signaling,
        openness_radius: openness_radius(&point, &MarginalEqualities::no_signaling()),
        diagnosis,
    })
}

/// Singlet measured in real bases at angles `a0, a1` locally and `b0, b1`
/// remotely (radians in the x-z plane).
pub fn singlet_at(angles: [f64; 4]) -> Result<SingletView> {
    let side = |names: [&str; 2], thetas: [f64; 2]| {
        names
            .iter()
            .zip(thetas)
            .map(|(n, t)| basis_measurement(n, &rotated_basis(t)))
            .collect::<spacelike_core::Result<Vec<_>>>()
    };
    let local = side(["a0", "a1"], [angles[0], angles[1]]).map_err(err)?;
    let remote = side(["b0", "b1"], [angles[2], angles[3]]).map_err(err)?;
    let setup = BipartiteSetup::new((2, 2), singlet(), local, remote).map_err(err)?;
    let jb = bipartite_behavior(&setup).map_err(err)?;
    let diagnosis = diagnose_extension(&jb, &fixtures::reduced_reference(&setup)).map_err(err)?;
    let correlators: Vec<Vec<f64>> = (0..2)
        .map(|x| {
            (0..2)
                .map(|y| {
                    jb.prob(0, x, y, 0, 0) + jb.prob(0, x, y, 1, 1) - jb.prob(0, x, y, 0, 1) - jb.prob(0, x, y, 1, 0)
                })
                .collect()
        })
        .collect();
    let chsh = correlators[0][0] + correlators[0][1] + correlators[1][0] - correlators[1][1];
    Ok(SingletView {
        angles,
        table: nested(&jb),
        correlators,
        chsh,
        diagnosis,
    })
}

pub fn stability(structure: &str, trials: usize, seed: u64) -> Result<StabilityResult> {
    if trials == 0 || trials > MAX_TRIALS {
        return Err(format!("trials must be between 1 and {MAX_TRIALS}"));
    }
    let structure = Structure::parse(structure).map_err(err)?;
    let config = StabilityConfig::new(trials, 1e-6, seed);
    let run = stability_experiment_with(&structure, &config, &MarginalEqualities::no_signaling()).map_err(err)?;
    Ok(run.result)
}

pub fn mix_boxes_json(pr: f64, copy: f64, noise: f64) -> Result<String> {
    to_json(&mix_boxes(pr, copy, noise)?)
}

pub fn singlet_json(a0: f64, a1: f64, b0: f64, b1: f64) -> Result<String> {
    to_json(&singlet_at([a0, a1, b0, b1])?)
}

pub fn stability_json(structure: &str, trials: usize, seed: u64) -> Result<String> {
    to_json(&stability(structure, trials, seed)?)
}

#[wasm_bindgen(js_name = mixBoxes)]
pub fn mix_boxes_js(pr: f64, copy: f64, noise: f64) -> std::result::Result<String, JsValue> {
    mix_boxes_json(pr, copy, noise).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = singletAngles)]
pub fn singlet_js(a0: f64, a1: f64, b0: f64, b1: f64) -> std::result::Result<String, JsValue> {
    singlet_json(a0, a1, b0, b1).map_err(|e| JsValue::from_str(&e))
}

/// `seed` arrives as a JS number; values past 2^53 lose precision.
#[wasm_bindgen(js_name = stabilityHistogram)]
pub fn stability_js(structure: &str, trials: u32, seed: f64) -> std::result::Result<String, JsValue> {
    if !(seed >= 0.0 && seed.fract() == 0.0 && seed <= 9_007_199_254_740_992.0) {
        return Err(JsValue::from_str("seed must be a non-negative integer"));
    }
    stability_json(structure, trials as usize, seed as u64).map_err(|e| JsValue::from_str(&e))
}
