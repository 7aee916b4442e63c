// SPDX-License-Identifier: Apache-2.0

//! Reference strategies: greedy area descent, fixed scripts and uniformly
//! random flows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agent::{keep_best, AgentError, EpisodeRecord, RunEvent};
use crate::aig::{strash, Aig};
use crate::env::{Env, EnvConfig, EnvError, Metrics, RewardTable, Snapshot, StepRecord};
use crate::transforms::{apply, TransformId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyIteration {
    pub transform: TransformId,
    pub area: usize,
    pub delay: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// Two consecutive iterations adopted designs of equal area.
    AreaUnchanged,
}

#[derive(Debug, Clone)]
pub struct GreedyResult {
    pub history: Vec<GreedyIteration>,
    pub design: Aig,
    pub metrics: Metrics,
    pub stop: StopReason,
}

fn candidates(g: &Aig) -> Vec<Aig> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        TransformId::ALL.par_iter().map(|&t| apply(g, t)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        TransformId::ALL.iter().map(|&t| apply(g, t)).collect()
    }
}

/// Repeatedly adopts the smallest of the seven one-step results (ties go to
/// the shallower design, then to the earlier transform) until two adopted
/// designs in a row have the same area.
pub fn greedy(design: &Aig, delay_constraint: u32) -> GreedyResult {
    let mut current = strash(design);
    let mut history: Vec<GreedyIteration> = Vec::new();
    loop {
        let results = candidates(&current);
        let (i, best) = results
            .into_iter()
            .enumerate()
            .map(|(i, g)| (i, Metrics::of(&g, delay_constraint), g))
            .min_by_key(|(i, m, _)| (m.area, m.delay, *i))
            .map(|(i, _, g)| (i, g))
            .expect("seven candidates");
        let m = Metrics::of(&best, delay_constraint);
        let repeated = history.last().is_some_and(|h| h.area == m.area);
        history.push(GreedyIteration { transform: TransformId::ALL[i], area: m.area, delay: m.delay });
        current = best;
        if repeated {
            return GreedyResult { history, metrics: m, design: current, stop: StopReason::AreaUnchanged };
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: unknown transform `{name}`")]
pub struct ScriptError {
    pub line: usize,
    pub name: String,
}

/// Parses one transform per line; blank lines and `#` comments are skipped.
pub fn parse_script(text: &str) -> Result<Vec<TransformId>, ScriptError> {
    let mut flow = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let t = line.parse().map_err(|_| ScriptError { line: i + 1, name: line.to_string() })?;
        flow.push(t);
    }
    Ok(flow)
}

pub fn run_script(design: &Aig, flow: &[TransformId], delay_constraint: u32) -> (Aig, Metrics) {
    let mut g = strash(design);
    for &t in flow {
        g = apply(&g, t);
    }
    let m = Metrics::of(&g, delay_constraint);
    (g, m)
}

pub struct RandomSearchResult {
    pub best: Snapshot,
    pub episodes: Vec<EpisodeRecord>,
}

/// `episodes` episodes of uniformly random actions, each starting from the
/// original design, sharing the agent's environment and best-design rule.
pub fn random_search(
    design: &Aig,
    config: EnvConfig,
    table: RewardTable,
    episodes: usize,
    seed: u64,
) -> Result<RandomSearchResult, AgentError> {
    random_search_with(design, config, table, episodes, seed, &mut |_| Ok(()))
}

/// [`random_search`] reporting every step and episode to `observe`, like the
/// agent's training loop.
pub fn random_search_with(
    design: &Aig,
    config: EnvConfig,
    table: RewardTable,
    episodes: usize,
    seed: u64,
    observe: &mut dyn FnMut(RunEvent<'_>) -> Result<(), String>,
) -> Result<RandomSearchResult, AgentError> {
    if episodes == 0 {
        return Err(EnvError::Config("random search needs at least one episode".into()).into());
    }
    let mut env = Env::new(design.clone(), config, table)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Snapshot> = None;
    let mut records = Vec::with_capacity(episodes);
    for episode in 0..episodes {
        env.reset();
        let mut total = 0.0;
        for iteration in 0..config.max_iterations {
            let action = TransformId::ALL[rng.gen_range(0..TransformId::COUNT)];
            let step = env.step(action)?;
            observe(RunEvent::Step(&StepRecord::new(episode, iteration, action, &step))).map_err(AgentError::Observer)?;
            total += step.reward;
        }
        let b = env.best_design()?;
        keep_best(&mut best, b);
        let record = EpisodeRecord {
            episode,
            total_reward: total,
            best_nodes: b.metrics.area,
            best_levels: b.metrics.delay,
            constraint_met: b.metrics.constraint_met,
        };
        observe(RunEvent::Episode(&record)).map_err(AgentError::Observer)?;
        records.push(record);
    }
    Ok(RandomSearchResult { best: best.expect("at least one episode"), episodes: records })
}
