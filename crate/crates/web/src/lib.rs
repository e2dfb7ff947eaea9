//! Browser bindings. Every export returns the case result as JSON.

use hardylab::kernel::HomogeneousIntegrand;
use hardylab::lab::{InequalityCase, ResultId, RunOptions};
use hardylab::recipe::{FieldRecipe, RecipeKind};
use wasm_bindgen::prelude::*;

fn run(case: &InequalityCase, probe: bool) -> Result<String, String> {
    let opts = RunOptions { probe, ..Default::default() };
    let res = case.run(0, &opts).map_err(|e| e.to_string())?;
    serde_json::to_string(&res).map_err(|e| e.to_string())
}

/// Concentrating annulus profiles on an 8-wide box.
pub fn sharpness(ladder: Vec<f64>, points: usize) -> Result<String, String> {
    let mut case = InequalityCase::new(ResultId::T3iiSharpness, 2, 8.0, points);
    case.ladder = Some(ladder);
    case.r_in = Some(0.1);
    case.r_out = Some(1.85);
    run(&case, false)
}

/// Random compactly supported bumps, mean zero.
pub fn t3iii(n: usize, seed: u64) -> Result<String, String> {
    let (box_len, points) = if n == 3 { (12.0, 24) } else { (16.0, 64) };
    let mut case = InequalityCase::new(ResultId::T3iii, n, box_len, points);
    case.seed = Some(seed);
    case.recipe = Some(
        FieldRecipe::new(RecipeKind::RandomBumps)
            .with("count", 4.0)
            .with("spread", 1.5)
            .with("wmin", 0.8)
            .with("wmax", 1.2)
            .seed(seed),
    );
    run(&case, false)
}

/// Dipole pairs under `a |v_1| + b |v_2|`, shrinking width.
pub fn necessity(ladder: Vec<f64>, a: f64, b: f64) -> Result<String, String> {
    let mut case = InequalityCase::new(ResultId::T1Necessity, 2, 6.4, 128);
    case.ladder = Some(ladder);
    case.sep = Some(1.0);
    case.q = Some(1.0);
    case.phi = Some(HomogeneousIntegrand::AbsPowerCombo { coeffs: vec![a, b], q: 1.0 });
    run(&case, false)
}

#[wasm_bindgen]
pub fn sharpness_sweep(ladder: Vec<f64>, points: usize) -> Result<String, JsError> {
    sharpness(ladder, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn t3iii_ratio(n: usize, seed: u32) -> Result<String, JsError> {
    t3iii(n, seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn necessity_curve(ladder: Vec<f64>, a: f64, b: f64) -> Result<String, JsError> {
    necessity(ladder, a, b).map_err(|e| JsError::new(&e))
}
