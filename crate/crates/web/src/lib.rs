//! wasm-bindgen bindings for the static page in `www/`.
//!
//! Every export takes plain numbers/strings and returns a JSON string (or a
//! byte array for CA tapes), so the page needs no generated type glue beyond
//! the function names. The `*_json` functions are the native-testable cores.

use caga_core::bench::{baseline_config, Problem};
use caga_core::elementary::{evolve, random_row, BinaryRule};
use caga_core::truss::{assess, resolve_model, TrussPenalty};
use caga_core::{run, Objective};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct RunView {
    problem: String,
    generations: usize,
    evaluations: usize,
    /// Best-so-far raw objective, one entry per generation.
    history: Vec<f64>,
    best: f64,
    design: Vec<f64>,
    feasible_weight: Option<f64>,
}

#[derive(Serialize)]
struct TrussView {
    weight: f64,
    displacements: Vec<f64>,
    /// MPa.
    stresses: Vec<f64>,
    true_violation: f64,
    feasible: bool,
    nodes: Vec<(f64, f64)>,
    members: Vec<(usize, usize)>,
}

/// Rows of an elementary CA, concatenated; `width * (steps + 1)` bytes of 0/1.
pub fn tape(
    rule: u8,
    width: usize,
    steps: usize,
    perturb: f64,
    seed: u64,
) -> Result<Vec<u8>, String> {
    if width == 0 {
        return Err("width must be at least 1".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let row = random_row(width, &mut rng);
    let h = evolve(
        &BinaryRule::from_wolfram(rule),
        &row,
        steps,
        perturb,
        &mut rng,
    )
    .map_err(|e| e.to_string())?;
    Ok(h.rows().concat())
}

/// One run at the baseline settings of `problem`, with an optional budget.
pub fn run_json(problem: &str, seed: u64, evaluations: usize) -> Result<String, String> {
    let p = Problem::resolve(problem).map_err(|e| e.to_string())?;
    let mut config = baseline_config(problem).map_err(|e| e.to_string())?;
    if evaluations > 0 {
        config.evaluations = evaluations;
    }
    let r = run(&config, &p, seed).map_err(|e| e.to_string())?;
    let view = RunView {
        problem: p.name(),
        generations: r.generations(),
        evaluations: r.evaluations,
        history: r.raw_history().collect(),
        best: r.best.raw,
        design: r.best.design.clone(),
        feasible_weight: match &p {
            Problem::Truss(_) => p.final_value(&r),
            Problem::Function(_) => None,
        },
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

/// Static analysis of `model` with the given member areas (cm^2).
pub fn analyze_json(model: &str, areas: &[f64]) -> Result<String, String> {
    let m = resolve_model(model).map_err(|e| e.to_string())?;
    let a = assess(&m, areas, &TrussPenalty::default(), 1.0).map_err(|e| e.to_string())?;
    let view = TrussView {
        weight: a.analysis.weight,
        displacements: a.analysis.displacements.clone(),
        stresses: a.analysis.stresses.iter().map(|s| s * 10.0).collect(),
        true_violation: a.true_violation,
        feasible: a.feasible(),
        nodes: m.nodes.clone(),
        members: m.members.iter().map(|b| (b.start, b.end)).collect(),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = caTape)]
pub fn ca_tape(
    rule: u8,
    width: usize,
    steps: usize,
    perturb: f64,
    seed: u64,
) -> Result<Vec<u8>, JsError> {
    tape(rule, width, steps, perturb, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = runProblem)]
pub fn run_problem(problem: &str, seed: u64, evaluations: usize) -> Result<String, JsError> {
    run_json(problem, seed, evaluations).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = analyzeTruss)]
pub fn analyze_truss(model: &str, areas: Vec<f64>) -> Result<String, JsError> {
    analyze_json(model, &areas).map_err(|e| JsError::new(&e))
}
