// SPDX-License-Identifier: Apache-2.0

//! Run configuration: command-line flags over a TOML file over defaults.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use synflow::agent::{AdvantageMode, Hyperparams};
use synflow::aig::{parse_aiger, Aig};
use synflow::env::RewardTable;

use crate::error::{CliError, Result};

/// Environment variable naming the root under which default output
/// directories are created.
pub const OUTPUT_ROOT_VAR: &str = "SYNFLOW_OUTPUT";

/// Prefix selecting a generated benchmark instead of a file.
pub const BUILTIN_PREFIX: &str = "bench:";

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// AIGER file, or `bench:<name>` for a generated benchmark.
    #[arg(long)]
    pub benchmark: Option<String>,
    /// Level budget; defaults to the depth after one balance pass.
    #[arg(long)]
    pub constraint_levels: Option<u32>,
    /// Training episodes, or random flows tried [default: 50].
    #[arg(long)]
    pub episodes: Option<usize>,
    /// Transforms per episode [default: 50].
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Required by `train` and `random`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory [default: <root>/<command>-<benchmark>, where <root>
    /// is $SYNFLOW_OUTPUT or ./runs].
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// TOML file with any of the settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Flow file for the `script` command, one transform per line.
    #[arg(long)]
    pub script: Option<PathBuf>,
    /// Discount factor [default: 0.99].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Adam learning rate [default: 0.01].
    #[arg(long)]
    pub lr: Option<f64>,
}

/// Everything a run can be configured with. The copy written next to the
/// results has every field filled in.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraint_levels: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub script: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub episodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clip_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub advantage: Option<AdvantageMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actor_hidden: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critic_hidden: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reward_ladder: Option<[f64; 7]>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
        let mut cfg: FileConfig = toml::from_str(&text).map_err(|e| CliError::input(path, e))?;
        // Relative paths inside a config file are relative to the file.
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(b) = &cfg.benchmark {
            if !b.starts_with(BUILTIN_PREFIX) && Path::new(b).is_relative() {
                cfg.benchmark = Some(base.join(b).display().to_string());
            }
        }
        for p in [&mut cfg.output, &mut cfg.script].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Flags override the file; the file overrides defaults applied later.
    pub fn resolve(args: &RunArgs) -> Result<FileConfig> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Ok(FileConfig {
            benchmark: args.benchmark.clone().or(file.benchmark),
            constraint_levels: args.constraint_levels.or(file.constraint_levels),
            output: args.output.clone().or(file.output),
            script: args.script.clone().or(file.script),
            seed: args.seed.or(file.seed),
            episodes: args.episodes.or(file.episodes),
            iterations: args.iterations.or(file.iterations),
            gamma: args.gamma.or(file.gamma),
            lr: args.lr.or(file.lr),
            ..file
        })
    }

    pub fn hyperparams(&self, seed: u64) -> Result<Hyperparams> {
        let d = Hyperparams::default();
        let hp = Hyperparams {
            episodes: self.episodes.unwrap_or(d.episodes),
            iterations: self.iterations.unwrap_or(d.iterations),
            learning_rate: self.lr.unwrap_or(d.learning_rate),
            gamma: self.gamma.unwrap_or(d.gamma),
            actor_hidden: self.actor_hidden.clone().unwrap_or(d.actor_hidden),
            critic_hidden: self.critic_hidden.clone().unwrap_or(d.critic_hidden),
            advantage: self.advantage.unwrap_or(d.advantage),
            clip_norm: self.clip_norm.unwrap_or(d.clip_norm),
            seed,
        };
        hp.validate().map_err(|e| CliError::Input(e.to_string()))?;
        Ok(hp)
    }

    pub fn reward_table(&self) -> Result<RewardTable> {
        match self.reward_ladder {
            Some(ladder) => RewardTable::new(ladder).map_err(|e| CliError::Input(e.to_string())),
            None => Ok(RewardTable::default()),
        }
    }

    pub fn require_seed(&self, command: &str) -> Result<u64> {
        self.seed.ok_or_else(|| CliError::Usage(format!("`{command}` needs --seed (or `seed` in the config file)")))
    }
}

pub struct Design {
    pub name: String,
    /// Absolute path, or the `bench:` spelling for generated designs.
    pub source: String,
    pub aig: Aig,
}

pub fn load_design(spec: Option<&str>) -> Result<Design> {
    let spec = spec.ok_or_else(|| CliError::Usage("--benchmark is required".into()))?;
    if let Some(name) = spec.strip_prefix(BUILTIN_PREFIX) {
        let aig = synflow::bench::by_name(name).ok_or_else(|| {
            CliError::Input(format!("unknown generated benchmark `{name}` (known: {})", synflow::bench::NAMES.join(", ")))
        })?;
        return Ok(Design { name: name.to_string(), source: spec.to_string(), aig });
    }
    let path = Path::new(spec);
    let bytes = std::fs::read(path).map_err(|e| CliError::input(path, e))?;
    let aig = parse_aiger(&bytes).map_err(|e| CliError::input(path, e))?;
    let name = path.file_stem().map_or_else(|| "design".to_string(), |s| s.to_string_lossy().into_owned());
    let source = std::fs::canonicalize(path).map_or_else(|_| spec.to_string(), |p| p.display().to_string());
    Ok(Design { name, source, aig })
}

/// The explicit directory if given, else `<root>/<command>-<name>` where the
/// root comes from the environment or defaults to `runs`.
pub fn output_dir(explicit: Option<&Path>, command: &str, name: &str) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => {
            let root = std::env::var_os(OUTPUT_ROOT_VAR).map_or_else(|| PathBuf::from("runs"), PathBuf::from);
            root.join(format!("{command}-{name}"))
        }
    }
}
