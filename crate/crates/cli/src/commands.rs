// SPDX-License-Identifier: Apache-2.0

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use synflow::agent::{run, Agent, RunEvent};
use synflow::aig::{extract_stats, strash, write_aiger, Aig};
use synflow::baselines::{greedy, parse_script, random_search_with};
use synflow::env::{default_constraint, EnvConfig, Metrics, RewardTable, StepLog, StepRecord};
use synflow::transforms::{apply, TransformId};

use crate::config::{load_design, output_dir, Design, FileConfig, RunArgs};
use crate::error::{CliError, Result};

/// Written as `summary.json` by every run; `compare` reads these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub method: String,
    pub benchmark: String,
    pub source: String,
    pub constraint_levels: u32,
    pub initial_nodes: usize,
    pub initial_levels: u32,
    pub best_nodes: usize,
    pub best_levels: u32,
    pub constraint_met: bool,
    pub flow: Vec<String>,
    pub seed: Option<u64>,
    pub seconds: f64,
}

pub const SUMMARY_FILE: &str = "summary.json";
pub const STEPS_FILE: &str = "steps.csv";

/// A prepared run: resolved settings, the design and a fresh output directory.
struct Run {
    cfg: FileConfig,
    design: Design,
    constraint: u32,
    dir: PathBuf,
    started: Instant,
}

impl Run {
    fn prepare(args: &RunArgs, command: &str) -> Result<Run> {
        let cfg = FileConfig::resolve(args)?;
        let design = load_design(cfg.benchmark.as_deref())?;
        let design = Design { aig: strash(&design.aig), ..design };
        let constraint = cfg.constraint_levels.unwrap_or_else(|| default_constraint(&design.aig));
        let dir = output_dir(cfg.output.as_deref(), command, &design.name);
        fs::create_dir_all(&dir).map_err(|e| CliError::output(&dir, e))?;
        Ok(Run { cfg, design, constraint, dir, started: Instant::now() })
    }

    fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }

    fn create(&self, file: &str) -> Result<BufWriter<File>> {
        let path = self.path(file);
        File::create(&path).map(BufWriter::new).map_err(|e| CliError::output(&path, e))
    }

    fn write(&self, file: &str, bytes: &[u8]) -> Result<()> {
        let path = self.path(file);
        fs::write(&path, bytes).map_err(|e| CliError::output(&path, e))
    }

    /// Stores the fully resolved settings so the run can be repeated with
    /// `--config <dir>/config.toml`.
    fn save_config(&self, hp: Option<&synflow::agent::Hyperparams>, table: &RewardTable) -> Result<()> {
        let mut saved = FileConfig {
            benchmark: Some(self.design.source.clone()),
            constraint_levels: Some(self.constraint),
            output: None,
            script: self.cfg.script.as_ref().map(|p| fs::canonicalize(p).unwrap_or_else(|_| p.clone())),
            reward_ladder: Some(table.ladder),
            ..self.cfg.clone()
        };
        if let Some(hp) = hp {
            saved.seed = Some(hp.seed);
            saved.episodes = Some(hp.episodes);
            saved.iterations = Some(hp.iterations);
            saved.gamma = Some(hp.gamma);
            saved.lr = Some(hp.learning_rate);
            saved.clip_norm = Some(hp.clip_norm);
            saved.advantage = Some(hp.advantage);
            saved.actor_hidden = Some(hp.actor_hidden.clone());
            saved.critic_hidden = Some(hp.critic_hidden.clone());
        }
        let text = toml::to_string(&saved).map_err(|e| CliError::Internal(e.to_string()))?;
        self.write("config.toml", text.as_bytes())
    }

    fn finish(&self, method: &str, best: &Aig, metrics: Metrics, flow: &[TransformId], seed: Option<u64>) -> Result<Summary> {
        self.write("best.aig", &write_aiger(best, false))?;
        let flow_text: String = flow.iter().map(|t| format!("{}\n", t.name())).collect();
        self.write("best.flow", flow_text.as_bytes())?;
        let initial = Metrics::of(&self.design.aig, self.constraint);
        let summary = Summary {
            method: method.to_string(),
            benchmark: self.design.name.clone(),
            source: self.design.source.clone(),
            constraint_levels: self.constraint,
            initial_nodes: initial.area,
            initial_levels: initial.delay,
            best_nodes: metrics.area,
            best_levels: metrics.delay,
            constraint_met: metrics.constraint_met,
            flow: flow.iter().map(|t| t.name().to_string()).collect(),
            seed,
            seconds: self.started.elapsed().as_secs_f64(),
        };
        let json = serde_json::to_vec_pretty(&summary).map_err(|e| CliError::Internal(e.to_string()))?;
        self.write(SUMMARY_FILE, &json)?;
        println!(
            "benchmark={} method={method} nodes={} levels={} constraint_met={} (initial {} nodes, {} levels; budget {}) -> {}",
            summary.benchmark,
            summary.best_nodes,
            summary.best_levels,
            summary.constraint_met,
            summary.initial_nodes,
            summary.initial_levels,
            summary.constraint_levels,
            self.dir.display()
        );
        Ok(summary)
    }
}

fn csv_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::output(path, e)
}

/// Step and episode CSV writers shared by the agent and random search.
struct Logs {
    steps: StepLog<BufWriter<File>>,
    episodes: csv::Writer<BufWriter<File>>,
    quiet_episodes: bool,
}

impl Logs {
    fn open(run: &Run) -> Result<Logs> {
        Ok(Logs {
            steps: StepLog::new(run.create(STEPS_FILE)?),
            episodes: csv::Writer::from_writer(run.create("episodes.csv")?),
            quiet_episodes: false,
        })
    }

    fn observe(&mut self, event: RunEvent<'_>) -> std::result::Result<(), String> {
        match event {
            RunEvent::Step(r) => self.steps.write(r).map_err(|e| e.to_string()),
            RunEvent::Episode(r) => {
                if !self.quiet_episodes {
                    eprintln!(
                        "episode {:>3}: reward {:>7.1}  best {} nodes / {} levels{}",
                        r.episode,
                        r.total_reward,
                        r.best_nodes,
                        r.best_levels,
                        if r.constraint_met { "" } else { " (constraint missed)" }
                    );
                }
                self.episodes.serialize(r).map_err(|e| e.to_string())
            }
        }
    }

    fn close(mut self, run: &Run) -> Result<()> {
        self.steps.flush().map_err(|e| csv_error(&run.path(STEPS_FILE), e))?;
        self.episodes.flush().map_err(|e| csv_error(&run.path("episodes.csv"), e))
    }
}

pub fn train(args: &RunArgs) -> Result<()> {
    let seed = FileConfig::resolve(args)?.require_seed("train")?;
    let run_ = Run::prepare(args, "train")?;
    let hp = run_.cfg.hyperparams(seed)?;
    let table = run_.cfg.reward_table()?;
    run_.save_config(Some(&hp), &table)?;
    let config = EnvConfig { delay_constraint: run_.constraint, max_iterations: hp.iterations };
    let mut env = synflow::env::Env::new(run_.design.aig.clone(), config, table)?;
    let mut agent = Agent::new(hp)?;
    let mut logs = Logs::open(&run_)?;
    let result = run(&mut env, &mut agent, &mut |e| logs.observe(e));
    logs.close(&run_)?;
    let result = result?;
    let (actor, critic) = agent.checkpoints();
    for (ckpt, file) in [(actor, "actor.json"), (critic, "critic.json")] {
        let path = run_.path(file);
        ckpt.save(&path).map_err(|e| CliError::output(&path, e))?;
    }
    let losses: String = result
        .losses
        .iter()
        .enumerate()
        .map(|(i, l)| format!("{i},{},{}\n", l.actor, l.critic))
        .collect();
    run_.write("losses.csv", format!("episode,actor_loss,critic_loss\n{losses}").as_bytes())?;
    let best = &result.best;
    run_.finish("agent", &best.design, best.metrics, &best.flow, Some(seed))?;
    Ok(())
}

pub fn random(args: &RunArgs) -> Result<()> {
    let seed = FileConfig::resolve(args)?.require_seed("random")?;
    let run_ = Run::prepare(args, "random")?;
    let hp = run_.cfg.hyperparams(seed)?;
    let table = run_.cfg.reward_table()?;
    run_.save_config(Some(&hp), &table)?;
    let config = EnvConfig { delay_constraint: run_.constraint, max_iterations: hp.iterations };
    let mut logs = Logs::open(&run_)?;
    logs.quiet_episodes = true;
    let result = random_search_with(&run_.design.aig, config, table, hp.episodes, seed, &mut |e| logs.observe(e));
    logs.close(&run_)?;
    let result = result?;
    run_.finish("random", &result.best.design, result.best.metrics, &result.best.flow, Some(seed))?;
    Ok(())
}

/// Writes one trace row per applied transform, with rewards from `table`.
fn trace_rows(run: &Run, table: &RewardTable, rows: &[(TransformId, Aig)]) -> Result<()> {
    let path = run.path(STEPS_FILE);
    let mut log = StepLog::new(run.create(STEPS_FILE)?);
    let mut prev = Metrics::of(&run.design.aig, run.constraint);
    for (i, (t, g)) in rows.iter().enumerate() {
        let m = Metrics::of(g, run.constraint);
        let record = StepRecord {
            episode: 0,
            iteration: i,
            action: t.name().to_string(),
            nodes: m.area,
            levels: m.delay,
            reward: table.reward(&prev, &m),
            constraint_met: m.constraint_met,
        };
        log.write(&record).map_err(|e| csv_error(&path, e))?;
        prev = m;
    }
    log.flush().map_err(|e| csv_error(&path, e))
}

pub fn greedy_cmd(args: &RunArgs) -> Result<()> {
    let run_ = Run::prepare(args, "greedy")?;
    let table = run_.cfg.reward_table()?;
    run_.save_config(None, &table)?;
    let result = greedy(&run_.design.aig, run_.constraint);
    // Replaying the adopted transforms reproduces each intermediate design.
    let mut rows = Vec::with_capacity(result.history.len());
    let mut g = run_.design.aig.clone();
    for h in &result.history {
        g = apply(&g, h.transform);
        rows.push((h.transform, g.clone()));
    }
    trace_rows(&run_, &table, &rows)?;
    let flow: Vec<TransformId> = result.history.iter().map(|h| h.transform).collect();
    run_.finish("greedy", &result.design, result.metrics, &flow, None)?;
    Ok(())
}

pub fn script(args: &RunArgs) -> Result<()> {
    let run_ = Run::prepare(args, "script")?;
    let path = run_.cfg.script.clone().ok_or_else(|| CliError::Usage("`script` needs --script <file>".into()))?;
    let text = fs::read_to_string(&path).map_err(|e| CliError::input(&path, e))?;
    let flow = parse_script(&text).map_err(|e| CliError::input(&path, e))?;
    let table = run_.cfg.reward_table()?;
    run_.save_config(None, &table)?;
    let mut rows = Vec::with_capacity(flow.len());
    let mut g = run_.design.aig.clone();
    for &t in &flow {
        g = apply(&g, t);
        rows.push((t, g.clone()));
    }
    trace_rows(&run_, &table, &rows)?;
    let metrics = Metrics::of(&g, run_.constraint);
    run_.finish("script", &g, metrics, &flow, None)?;
    Ok(())
}

pub fn stats(args: &RunArgs) -> Result<()> {
    let cfg = FileConfig::resolve(args)?;
    let design = load_design(cfg.benchmark.as_deref())?;
    let s = extract_stats(&design.aig);
    let rows: [(&str, String); 10] = [
        ("inputs", s.num_pi.to_string()),
        ("outputs", s.num_po.to_string()),
        ("latches", s.num_latches.to_string()),
        ("nodes", s.num_nodes.to_string()),
        ("edges", s.num_edges.to_string()),
        ("levels", s.num_levels.to_string()),
        ("pct_ands", format!("{:.6}", s.pct_ands)),
        ("pct_nots", format!("{:.6}", s.pct_nots)),
        ("balanced_levels", default_constraint(&design.aig).to_string()),
        ("strashed_nodes", strash(&design.aig).num_ands().to_string()),
    ];
    let mut out = std::io::stdout().lock();
    let write = |out: &mut dyn Write, text: String| out.write_all(text.as_bytes()).map_err(|e| CliError::Internal(e.to_string()));
    write(&mut out, format!("{}\n", design.name))?;
    for (k, v) in &rows {
        write(&mut out, format!("  {k:<16} {v:>10}\n"))?;
    }
    let header: Vec<&str> = std::iter::once("benchmark").chain(rows.iter().map(|(k, _)| *k)).collect();
    let values: Vec<String> = std::iter::once(design.name.clone()).chain(rows.iter().map(|(_, v)| v.clone())).collect();
    write(&mut out, format!("{}\n{}\n", header.join(","), values.join(",")))
}

pub fn gen_bench(output: &Path) -> Result<()> {
    fs::create_dir_all(output).map_err(|e| CliError::output(output, e))?;
    for b in synflow::bench::all() {
        let path = output.join(format!("{}.aig", b.name));
        fs::write(&path, write_aiger(&b.aig, false)).map_err(|e| CliError::output(&path, e))?;
        println!("{}: {} inputs, {} outputs, {} nodes -> {}", b.name, b.aig.num_inputs(), b.aig.num_outputs(), b.aig.num_ands(), path.display());
    }
    Ok(())
}
