// SPDX-License-Identifier: Apache-2.0

//! WebAssembly bindings for the browser demo. Each export returns JSON; the
//! plain Rust functions underneath are what the tests exercise.

use std::sync::Once;

use serde::Serialize;
use synflow::agent::{run, Agent, Hyperparams, RunEvent};
use synflow::aig::Aig;
use synflow::baselines::parse_script;
use synflow::env::{default_constraint, Env, EnvConfig, Metrics, RewardTable};
use synflow::transforms::apply;
use synflow::transforms::library::NpnLibrary;
use wasm_bindgen::prelude::*;

/// Generated by the native build; loading it avoids regenerating the library
/// on the page's main thread.
pub const LIBRARY_TEXT: &str = include_str!("../assets/npn4.txt");

/// Upper bound on episodes and iterations accepted from the page.
pub const MAX_BUDGET: usize = 200;

fn ensure_library() {
    static INSTALL: Once = Once::new();
    INSTALL.call_once(|| {
        if let Ok(lib) = NpnLibrary::from_text(LIBRARY_TEXT) {
            let _ = NpnLibrary::install(lib);
        }
    });
}

fn design(name: &str) -> Result<Aig, String> {
    synflow::bench::by_name(name).ok_or_else(|| format!("unknown benchmark {name:?}"))
}

#[derive(Debug, Serialize)]
pub struct BenchInfo {
    pub name: &'static str,
    pub inputs: usize,
    pub outputs: usize,
    pub nodes: usize,
    pub levels: u32,
    pub constraint: u32,
}

pub fn benchmark_list() -> Vec<BenchInfo> {
    synflow::bench::all()
        .into_iter()
        .map(|b| {
            let constraint = default_constraint(&b.aig);
            let m = Metrics::of(&b.aig, constraint);
            BenchInfo {
                name: b.name,
                inputs: b.aig.num_inputs(),
                outputs: b.aig.num_outputs(),
                nodes: m.area,
                levels: m.delay,
                constraint,
            }
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct FlowPoint {
    pub action: String,
    pub nodes: usize,
    pub levels: u32,
    pub reward: f64,
    pub constraint_met: bool,
}

#[derive(Debug, Serialize)]
pub struct FlowTrace {
    pub constraint: u32,
    pub initial_nodes: usize,
    pub initial_levels: u32,
    pub steps: Vec<FlowPoint>,
}

/// Applies a flow (one transform name per line) to a benchmark.
pub fn run_flow(name: &str, flow: &str) -> Result<FlowTrace, String> {
    ensure_library();
    let mut g = design(name)?;
    let transforms = parse_script(flow).map_err(|e| e.to_string())?;
    let constraint = default_constraint(&g);
    let table = RewardTable::default();
    let initial = Metrics::of(&g, constraint);
    let mut prev = initial;
    let mut steps = Vec::with_capacity(transforms.len());
    for t in transforms {
        g = apply(&g, t);
        let m = Metrics::of(&g, constraint);
        steps.push(FlowPoint {
            action: t.name().to_string(),
            nodes: m.area,
            levels: m.delay,
            reward: table.reward(&prev, &m),
            constraint_met: m.constraint_met,
        });
        prev = m;
    }
    Ok(FlowTrace { constraint, initial_nodes: initial.area, initial_levels: initial.delay, steps })
}

#[derive(Debug, Serialize)]
pub struct CurvePoint {
    pub episode: usize,
    pub total_reward: f64,
    pub best_nodes: usize,
    pub best_levels: u32,
    pub constraint_met: bool,
}

#[derive(Debug, Serialize)]
pub struct TrainingCurve {
    pub constraint: u32,
    pub initial_nodes: usize,
    pub episodes: Vec<CurvePoint>,
    pub best_nodes: usize,
    pub best_levels: u32,
    pub best_met: bool,
    pub best_flow: Vec<String>,
}

/// Trains a fresh agent with default hyperparameters apart from the budget
/// and seed.
pub fn train_curve(name: &str, episodes: usize, iterations: usize, seed: u64) -> Result<TrainingCurve, String> {
    ensure_library();
    for (what, v) in [("episodes", episodes), ("iterations", iterations)] {
        if v == 0 || v > MAX_BUDGET {
            return Err(format!("{what} must be between 1 and {MAX_BUDGET}, got {v}"));
        }
    }
    let g = design(name)?;
    let constraint = default_constraint(&g);
    let hp = Hyperparams { episodes, iterations, seed, ..Hyperparams::default() };
    let config = EnvConfig { delay_constraint: constraint, max_iterations: iterations };
    let mut env = Env::new(g, config, RewardTable::default()).map_err(|e| e.to_string())?;
    let initial_nodes = env.initial_metrics().area;
    let mut agent = Agent::new(hp).map_err(|e| e.to_string())?;
    let mut points = Vec::with_capacity(episodes);
    let result = run(&mut env, &mut agent, &mut |e| {
        if let RunEvent::Episode(r) = e {
            points.push(CurvePoint {
                episode: r.episode,
                total_reward: r.total_reward,
                best_nodes: r.best_nodes,
                best_levels: r.best_levels,
                constraint_met: r.constraint_met,
            });
        }
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    let best = result.best;
    Ok(TrainingCurve {
        constraint,
        initial_nodes,
        episodes: points,
        best_nodes: best.metrics.area,
        best_levels: best.metrics.delay,
        best_met: best.metrics.constraint_met,
        best_flow: best.flow.iter().map(|t| t.name().to_string()).collect(),
    })
}

fn to_json<T: Serialize>(value: &T) -> Result<String, JsValue> {
    serde_json::to_string(value).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn benchmarks() -> Result<String, JsValue> {
    to_json(&benchmark_list())
}

#[wasm_bindgen(js_name = applyFlow)]
pub fn apply_flow(name: &str, flow: &str) -> Result<String, JsValue> {
    to_json(&run_flow(name, flow).map_err(|e| JsValue::from_str(&e))?)
}

#[wasm_bindgen]
pub fn train(name: &str, episodes: u32, iterations: u32, seed: u32) -> Result<String, JsValue> {
    let curve = train_curve(name, episodes as usize, iterations as usize, u64::from(seed)).map_err(|e| JsValue::from_str(&e))?;
    to_json(&curve)
}
