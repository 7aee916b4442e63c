// SPDX-License-Identifier: Apache-2.0

//! Advantage actor-critic over the synthesis environment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::{Env, EnvError, Snapshot, StateVector, StepRecord, STATE_DIM};
use crate::nn::{Activation, Adam, Checkpoint, Gradients, Mlp, NnError};
use crate::transforms::TransformId;

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("trajectory is incomplete: {0}")]
    Incomplete(String),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("{0}")]
    Observer(String),
}

/// How the per-step advantage is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AdvantageMode {
    /// Discounted return minus the critic's value.
    #[default]
    Return,
    /// One-step temporal-difference error.
    TemporalDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    pub episodes: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub gamma: f64,
    pub actor_hidden: Vec<usize>,
    pub critic_hidden: Vec<usize>,
    pub advantage: AdvantageMode,
    pub clip_norm: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Hyperparams {
        Hyperparams {
            episodes: 50,
            iterations: 50,
            learning_rate: 0.01,
            gamma: 0.99,
            actor_hidden: vec![20, 20],
            critic_hidden: vec![10],
            advantage: AdvantageMode::Return,
            clip_norm: 5.0,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), AgentError> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(AgentError::Argument(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(AgentError::Argument(format!("learning rate {} must be positive", self.learning_rate)));
        }
        if self.episodes == 0 || self.iterations == 0 {
            return Err(AgentError::Argument("episodes and iterations must be at least 1".into()));
        }
        if self.clip_norm.is_nan() || self.clip_norm <= 0.0 {
            return Err(AgentError::Argument("clip norm must be positive".into()));
        }
        Ok(())
    }
}

/// One episode of experience.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub states: Vec<StateVector>,
    pub actions: Vec<TransformId>,
    pub rewards: Vec<f64>,
}

impl Trajectory {
    pub fn push(&mut self, state: StateVector, action: TransformId, reward: f64) {
        self.states.push(state);
        self.actions.push(action);
        self.rewards.push(reward);
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }

    pub fn total_reward(&self) -> f64 {
        self.rewards.iter().sum()
    }
}

/// Draws an action from a categorical distribution over the seven transforms.
pub fn sample_action<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> Result<TransformId, AgentError> {
    if probs.len() != TransformId::COUNT {
        return Err(AgentError::Argument(format!("expected {} probabilities, got {}", TransformId::COUNT, probs.len())));
    }
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(AgentError::Argument(format!("probabilities must be finite and non-negative: {probs:?}")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(AgentError::Argument(format!("probabilities sum to {sum}")));
    }
    let u: f64 = rng.gen::<f64>() * sum;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return Ok(TransformId::ALL[i]);
            }
        }
    }
    Ok(TransformId::ALL[last])
}

/// `G_t = r_t + gamma * G_{t+1}`, with the last return equal to the last reward.
pub fn discount_rewards(rewards: &[f64], gamma: f64) -> Result<Vec<f64>, AgentError> {
    if rewards.is_empty() {
        return Err(AgentError::Argument("no rewards to discount".into()));
    }
    let mut out = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for (t, r) in rewards.iter().enumerate().rev() {
        acc = r + gamma * acc;
        out[t] = acc;
    }
    Ok(out)
}

/// `r + gamma * v_next - v`; pass `v_next = 0` at the terminal step.
pub fn advantage(r: f64, v_next: f64, v: f64, gamma: f64) -> f64 {
    r + gamma * v_next - v
}

/// The temporal-difference error; same arithmetic as [`advantage`].
pub fn td_error(r: f64, v_next: f64, v: f64, gamma: f64) -> f64 {
    advantage(r, v_next, v, gamma)
}

fn same_lengths(n: usize, others: &[usize]) -> Result<(), AgentError> {
    if n == 0 || others.iter().any(|&m| m != n) {
        return Err(AgentError::Argument(format!("batch lengths disagree or are empty: {n} vs {others:?}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub actor: f64,
    pub critic: f64,
}

pub struct Agent {
    pub actor: Mlp,
    pub critic: Mlp,
    pub actor_opt: Adam,
    pub critic_opt: Adam,
    hp: Hyperparams,
    rng: ChaCha8Rng,
}

impl Agent {
    /// Networks are initialized from `hp.seed`, actor first; the same stream
    /// then drives action sampling.
    pub fn new(hp: Hyperparams) -> Result<Agent, AgentError> {
        hp.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
        let sizes = |hidden: &[usize], out: usize| {
            let mut s = vec![STATE_DIM];
            s.extend_from_slice(hidden);
            s.push(out);
            s
        };
        let actor = Mlp::new(&sizes(&hp.actor_hidden, TransformId::COUNT), Activation::Softmax, &mut rng)?;
        let critic = Mlp::new(&sizes(&hp.critic_hidden, 1), Activation::Identity, &mut rng)?;
        Ok(Agent { actor_opt: Adam::new(&actor), critic_opt: Adam::new(&critic), actor, critic, hp, rng })
    }

    /// Restores networks and optimizer state from checkpoints.
    pub fn with_checkpoints(hp: Hyperparams, actor: Checkpoint, critic: Checkpoint) -> Result<Agent, AgentError> {
        let mut agent = Agent::new(hp)?;
        if actor.network.input_dim() != STATE_DIM
            || actor.network.output_dim() != TransformId::COUNT
            || critic.network.input_dim() != STATE_DIM
            || critic.network.output_dim() != 1
        {
            return Err(AgentError::Argument("checkpoint shapes do not fit the state and action spaces".into()));
        }
        agent.actor = actor.network;
        agent.actor_opt = actor.optimizer;
        agent.critic = critic.network;
        agent.critic_opt = critic.optimizer;
        Ok(agent)
    }

    pub fn hyperparams(&self) -> &Hyperparams {
        &self.hp
    }

    pub fn policy(&self, state: &StateVector) -> Result<Vec<f64>, AgentError> {
        Ok(self.actor.predict(state.as_slice())?)
    }

    pub fn value(&self, state: &StateVector) -> Result<f64, AgentError> {
        Ok(self.critic.predict(state.as_slice())?[0])
    }

    pub fn act(&mut self, state: &StateVector) -> Result<TransformId, AgentError> {
        let probs = self.policy(state)?;
        sample_action(&probs, &mut self.rng)
    }

    /// Per-step advantages under the configured estimator, using the current critic.
    pub fn advantages(&self, traj: &Trajectory) -> Result<Vec<f64>, AgentError> {
        let values: Vec<f64> = traj.states.iter().map(|s| self.value(s)).collect::<Result<_, _>>()?;
        let gamma = self.hp.gamma;
        Ok(match self.hp.advantage {
            AdvantageMode::Return => {
                let returns = discount_rewards(&traj.rewards, gamma)?;
                returns.iter().zip(&values).map(|(g, v)| g - v).collect()
            }
            AdvantageMode::TemporalDifference => (0..traj.len())
                .map(|t| {
                    let v_next = values.get(t + 1).copied().unwrap_or(0.0);
                    td_error(traj.rewards[t], v_next, values[t], gamma)
                })
                .collect(),
        })
    }

    /// Policy-gradient step on `-mean(log pi(a|s) * adv)`; returns the loss.
    pub fn update_actor(&mut self, states: &[StateVector], actions: &[TransformId], adv: &[f64]) -> Result<f64, AgentError> {
        same_lengths(states.len(), &[actions.len(), adv.len()])?;
        let n = states.len() as f64;
        let mut total = Gradients::zeros_like(&self.actor);
        let mut loss = 0.0;
        for ((s, a), &adv) in states.iter().zip(actions).zip(adv) {
            let (p, cache) = self.actor.forward(s.as_slice())?;
            let pa = p[a.index()];
            loss -= pa.ln() * adv / n;
            let mut g = vec![0.0; p.len()];
            g[a.index()] = -adv / pa;
            total.add_scaled(&self.actor.backward(&cache, &g)?, 1.0 / n);
        }
        total.clip(self.hp.clip_norm);
        self.actor_opt.update(&mut self.actor, &total, self.hp.learning_rate)?;
        Ok(loss)
    }

    /// Regression step on `mean(0.5 * (target - V(s))^2)`; returns the loss.
    pub fn update_critic(&mut self, states: &[StateVector], targets: &[f64]) -> Result<f64, AgentError> {
        same_lengths(states.len(), &[targets.len()])?;
        let n = states.len() as f64;
        let mut total = Gradients::zeros_like(&self.critic);
        let mut loss = 0.0;
        for (s, &target) in states.iter().zip(targets) {
            let (v, cache) = self.critic.forward(s.as_slice())?;
            let err = target - v[0];
            loss += 0.5 * err * err / n;
            total.add_scaled(&self.critic.backward(&cache, &[-err])?, 1.0 / n);
        }
        total.clip(self.hp.clip_norm);
        self.critic_opt.update(&mut self.critic, &total, self.hp.learning_rate)?;
        Ok(loss)
    }

    /// One update of both networks from a full episode.
    pub fn train_episode(&mut self, traj: &Trajectory) -> Result<LossReport, AgentError> {
        if traj.is_empty() || traj.states.len() != traj.len() || traj.actions.len() != traj.len() {
            return Err(AgentError::Incomplete(format!(
                "{} states, {} actions, {} rewards",
                traj.states.len(),
                traj.actions.len(),
                traj.rewards.len()
            )));
        }
        let adv = self.advantages(traj)?;
        // The critic's regression target is its current value plus the advantage.
        let values: Vec<f64> = traj.states.iter().map(|s| self.value(s)).collect::<Result<_, _>>()?;
        let targets: Vec<f64> = values.iter().zip(&adv).map(|(v, a)| v + a).collect();
        let critic = self.update_critic(&traj.states, &targets)?;
        let actor = self.update_actor(&traj.states, &traj.actions, &adv)?;
        Ok(LossReport { actor, critic })
    }

    pub fn checkpoints(&self) -> (Checkpoint, Checkpoint) {
        (
            Checkpoint::new(self.actor.clone(), self.actor_opt.clone()),
            Checkpoint::new(self.critic.clone(), self.critic_opt.clone()),
        )
    }
}

/// One row of the per-episode log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub total_reward: f64,
    pub best_nodes: usize,
    pub best_levels: u32,
    pub constraint_met: bool,
}

pub enum RunEvent<'a> {
    Step(&'a StepRecord),
    Episode(&'a EpisodeRecord),
}

pub struct RunResult {
    pub best: Snapshot,
    pub episodes: Vec<EpisodeRecord>,
    pub losses: Vec<LossReport>,
}

/// Keeps `candidate` if it beats `best`; earlier snapshots win ties.
pub fn keep_best(best: &mut Option<Snapshot>, candidate: &Snapshot) {
    if best.as_ref().is_none_or(|b| candidate.metrics.better_than(&b.metrics)) {
        *best = Some(candidate.clone());
    }
}

/// The full training loop: `hp.episodes` episodes of `hp.iterations` steps,
/// one update per episode. `observe` sees every step and episode record as
/// it is produced; an error from it aborts the run.
pub fn run(
    env: &mut Env,
    agent: &mut Agent,
    observe: &mut dyn FnMut(RunEvent<'_>) -> Result<(), String>,
) -> Result<RunResult, AgentError> {
    let hp = agent.hyperparams().clone();
    if env.config().max_iterations != hp.iterations {
        return Err(AgentError::Argument(format!(
            "environment allows {} steps per episode but {} iterations were requested",
            env.config().max_iterations,
            hp.iterations
        )));
    }
    let mut best: Option<Snapshot> = None;
    let mut episodes = Vec::with_capacity(hp.episodes);
    let mut losses = Vec::with_capacity(hp.episodes);
    for episode in 0..hp.episodes {
        let mut state = env.reset();
        let mut traj = Trajectory::default();
        for iteration in 0..hp.iterations {
            let action = agent.act(&state)?;
            let step = env.step(action)?;
            observe(RunEvent::Step(&StepRecord::new(episode, iteration, action, &step))).map_err(AgentError::Observer)?;
            traj.push(state, action, step.reward);
            state = step.state;
        }
        losses.push(agent.train_episode(&traj)?);
        let episode_best = env.best_design()?;
        keep_best(&mut best, episode_best);
        let record = EpisodeRecord {
            episode,
            total_reward: traj.total_reward(),
            best_nodes: episode_best.metrics.area,
            best_levels: episode_best.metrics.delay,
            constraint_met: episode_best.metrics.constraint_met,
        };
        observe(RunEvent::Episode(&record)).map_err(AgentError::Observer)?;
        episodes.push(record);
    }
    Ok(RunResult { best: best.expect("at least one episode"), episodes, losses })
}
