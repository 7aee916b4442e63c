// SPDX-License-Identifier: Apache-2.0

//! The synthesis environment: current design, normalized state, actions and
//! the area/delay reward.

use std::cmp::Ordering;
use std::io::Write;
use std::path::Path;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::aig::{extract_stats, parse_aiger, strash, Aig, AigError, AigStats};
use crate::transforms::{apply, TransformId};

pub const STATE_DIM: usize = 7;

/// Normalized features: PIs+POs, nodes, edges, levels, latches, AND share,
/// complemented-edge share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateVector(pub [f64; STATE_DIM]);

impl StateVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    /// AND-node count.
    pub area: usize,
    /// Maximum logic level.
    pub delay: u32,
    pub constraint_met: bool,
}

impl Metrics {
    pub fn of(g: &Aig, delay_constraint: u32) -> Metrics {
        let delay = crate::aig::levels(g).1;
        Metrics { area: g.num_ands(), delay, constraint_met: delay <= delay_constraint }
    }

    /// Selection order for best designs: meeting the constraint first, then
    /// smaller area; among designs that miss it, smaller delay then area.
    pub fn better_than(&self, other: &Metrics) -> bool {
        match (self.constraint_met, other.constraint_met) {
            (true, false) => true,
            (false, true) => false,
            (true, true) => self.area < other.area,
            (false, false) => (self.delay, self.area) < (other.delay, other.area),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvConfig {
    /// Level budget standing in for a timing constraint.
    pub delay_constraint: u32,
    /// Steps per episode.
    pub max_iterations: usize,
}

impl EnvConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        if self.max_iterations == 0 {
            return Err(EnvError::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

pub fn state_of(g: &Aig, basis: &AigStats) -> StateVector {
    let s = extract_stats(g);
    let ratio = |raw: f64, base: f64| if base == 0.0 { 0.0 } else { raw / base };
    StateVector([
        ratio((s.num_pi + s.num_po) as f64, (basis.num_pi + basis.num_po) as f64),
        ratio(s.num_nodes as f64, basis.num_nodes as f64),
        ratio(s.num_edges as f64, basis.num_edges as f64),
        ratio(s.num_levels as f64, basis.num_levels as f64),
        ratio(s.num_latches as f64, basis.num_latches as f64),
        ratio(s.pct_ands, basis.pct_ands),
        ratio(s.pct_nots, basis.pct_nots),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Decrease,
    None,
    Increase,
}

impl Direction {
    pub fn between<T: Ord>(prev: T, next: T) -> Direction {
        match next.cmp(&prev) {
            Ordering::Less => Direction::Decrease,
            Ordering::Equal => Direction::None,
            Ordering::Greater => Direction::Increase,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DelayStatus {
    Met,
    NotMet(Direction),
}

/// Symbolic reward grades from `+++` down to `---`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Grade {
    P3,
    P2,
    P1,
    Zero,
    M1,
    M2,
    M3,
}

impl Grade {
    fn rank(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> &'static str {
        ["+++", "++", "+", "0", "-", "--", "---"][self.rank()]
    }
}

/// Grade for a step given its area direction and delay status.
pub fn grade(area: Direction, delay: DelayStatus) -> Grade {
    use Direction::*;
    use Grade::*;
    match (delay, area) {
        (DelayStatus::Met, Decrease) => P3,
        (DelayStatus::Met, None) => Zero,
        (DelayStatus::Met, Increase) => M1,
        (DelayStatus::NotMet(Decrease), Decrease) => P3,
        (DelayStatus::NotMet(Decrease), None) => P2,
        (DelayStatus::NotMet(Decrease), Increase) => P1,
        (DelayStatus::NotMet(None), Decrease) => P2,
        (DelayStatus::NotMet(None), None) => Zero,
        (DelayStatus::NotMet(None), Increase) => M2,
        (DelayStatus::NotMet(Increase), Decrease) => M1,
        (DelayStatus::NotMet(Increase), None) => M2,
        (DelayStatus::NotMet(Increase), Increase) => M3,
    }
}

/// Numeric values for the seven grades, highest first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardTable {
    pub ladder: [f64; 7],
}

impl Default for RewardTable {
    fn default() -> RewardTable {
        RewardTable { ladder: [3.0, 2.0, 1.0, 0.0, -1.0, -2.0, -3.0] }
    }
}

impl RewardTable {
    /// Requires finite, strictly decreasing values so the grade order holds.
    pub fn new(ladder: [f64; 7]) -> Result<RewardTable, EnvError> {
        if ladder.iter().any(|v| !v.is_finite()) || ladder.windows(2).any(|w| w[0] <= w[1]) {
            return Err(EnvError::Config(format!("reward ladder must be finite and strictly decreasing: {ladder:?}")));
        }
        Ok(RewardTable { ladder })
    }

    pub fn value(&self, g: Grade) -> f64 {
        self.ladder[g.rank()]
    }

    pub fn reward(&self, prev: &Metrics, next: &Metrics) -> f64 {
        self.value(grade(Direction::between(prev.area, next.area), delay_status(prev, next)))
    }
}

pub fn delay_status(prev: &Metrics, next: &Metrics) -> DelayStatus {
    if next.constraint_met {
        DelayStatus::Met
    } else {
        DelayStatus::NotMet(Direction::between(prev.delay, next.delay))
    }
}

pub fn reward(prev: &Metrics, next: &Metrics, table: &RewardTable) -> f64 {
    table.reward(prev, next)
}

#[derive(Debug, thiserror::Error)]
pub enum EnvError {
    #[error("episode finished after {0} steps; call reset")]
    EpisodeFinished(usize),
    #[error("environment used before reset")]
    NotReset,
    #[error("no step taken yet, so there is no best design")]
    NoSteps,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Aig(#[from] AigError),
    #[error("cannot write step log: {0}")]
    Log(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub state: StateVector,
    pub reward: f64,
    pub metrics: Metrics,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub design: Aig,
    pub metrics: Metrics,
    pub flow: Vec<TransformId>,
}

/// Results of applying a transform to a design, keyed by both. Transforms
/// are pure, so repeated states across episodes reuse earlier work.
struct Memo {
    map: FxHashMap<(Aig, TransformId), Aig>,
    capacity: usize,
}

impl Memo {
    fn apply(&mut self, g: &Aig, t: TransformId) -> Aig {
        if let Some(r) = self.map.get(&(g.clone(), t)) {
            return r.clone();
        }
        let r = apply(g, t);
        if self.map.len() >= self.capacity {
            self.map.clear();
        }
        self.map.insert((g.clone(), t), r.clone());
        r
    }
}

pub struct Env {
    original: Aig,
    basis: AigStats,
    config: EnvConfig,
    table: RewardTable,
    current: Option<Aig>,
    metrics: Metrics,
    flow: Vec<TransformId>,
    best: Option<Snapshot>,
    memo: Memo,
}

impl Env {
    /// Wraps a design; it is strashed once here and again on every reset.
    pub fn new(design: Aig, config: EnvConfig, table: RewardTable) -> Result<Env, EnvError> {
        config.validate()?;
        let original = strash(&design);
        let basis = extract_stats(&original);
        let metrics = Metrics::of(&original, config.delay_constraint);
        Ok(Env {
            original,
            basis,
            config,
            table,
            current: None,
            metrics,
            flow: Vec::new(),
            best: None,
            memo: Memo { map: FxHashMap::default(), capacity: 4096 },
        })
    }

    pub fn open(path: &Path, config: EnvConfig, table: RewardTable) -> Result<Env, EnvError> {
        let bytes = std::fs::read(path).map_err(|source| EnvError::Io { path: path.display().to_string(), source })?;
        Env::new(parse_aiger(&bytes)?, config, table)
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn basis(&self) -> &AigStats {
        &self.basis
    }

    pub fn original(&self) -> &Aig {
        &self.original
    }

    pub fn initial_metrics(&self) -> Metrics {
        Metrics::of(&self.original, self.config.delay_constraint)
    }

    pub fn reset(&mut self) -> StateVector {
        let design = strash(&self.original);
        let state = state_of(&design, &self.basis);
        self.metrics = Metrics::of(&design, self.config.delay_constraint);
        self.current = Some(design);
        self.flow.clear();
        self.best = None;
        state
    }

    pub fn steps_taken(&self) -> usize {
        self.flow.len()
    }

    pub fn is_done(&self) -> bool {
        self.flow.len() >= self.config.max_iterations
    }

    pub fn current(&self) -> Option<&Aig> {
        self.current.as_ref()
    }

    pub fn metrics(&self) -> Metrics {
        self.metrics
    }

    pub fn step(&mut self, action: TransformId) -> Result<Step, EnvError> {
        let current = self.current.as_ref().ok_or(EnvError::NotReset)?;
        if self.is_done() {
            return Err(EnvError::EpisodeFinished(self.flow.len()));
        }
        let next = self.memo.apply(current, action);
        let metrics = Metrics::of(&next, self.config.delay_constraint);
        let reward = self.table.reward(&self.metrics, &metrics);
        let state = state_of(&next, &self.basis);
        self.flow.push(action);
        if self.best.as_ref().is_none_or(|b| metrics.better_than(&b.metrics)) {
            self.best = Some(Snapshot { design: next.clone(), metrics, flow: self.flow.clone() });
        }
        self.metrics = metrics;
        self.current = Some(next);
        Ok(Step { state, reward, metrics })
    }

    /// Best design of the current episode and the actions that produced it.
    pub fn best_design(&self) -> Result<&Snapshot, EnvError> {
        self.best.as_ref().ok_or(EnvError::NoSteps)
    }
}

/// One row of the per-step log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub episode: usize,
    pub iteration: usize,
    pub action: String,
    pub nodes: usize,
    pub levels: u32,
    pub reward: f64,
    pub constraint_met: bool,
}

impl StepRecord {
    pub fn new(episode: usize, iteration: usize, action: TransformId, step: &Step) -> StepRecord {
        StepRecord {
            episode,
            iteration,
            action: action.name().to_string(),
            nodes: step.metrics.area,
            levels: step.metrics.delay,
            reward: step.reward,
            constraint_met: step.metrics.constraint_met,
        }
    }
}

/// CSV writer for [`StepRecord`]s.
pub struct StepLog<W: Write> {
    writer: csv::Writer<W>,
}

impl<W: Write> StepLog<W> {
    pub fn new(out: W) -> StepLog<W> {
        StepLog { writer: csv::Writer::from_writer(out) }
    }

    pub fn write(&mut self, record: &StepRecord) -> Result<(), EnvError> {
        self.writer.serialize(record)?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), EnvError> {
        self.writer.flush().map_err(|e| EnvError::Log(e.into()))
    }
}

/// The delay constraint used for the desk benchmarks: the depth reached by a
/// single balance pass over the initial design.
pub fn default_constraint(design: &Aig) -> u32 {
    crate::aig::levels(&apply(&strash(design), TransformId::Balance)).1
}
