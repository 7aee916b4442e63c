// SPDX-License-Identifier: Apache-2.0

//! Side-by-side tables of finished runs plus a long-format trace file for
//! plotting.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use synflow::env::StepRecord;

use crate::commands::{Summary, STEPS_FILE, SUMMARY_FILE};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub benchmark: String,
    pub method: String,
    pub nodes: Option<usize>,
    pub levels: Option<u32>,
    pub constraint_levels: Option<u32>,
    pub constraint_met: Option<bool>,
    pub improvement_pct: f64,
}

#[derive(Debug, Serialize)]
struct TraceRow<'a> {
    benchmark: &'a str,
    method: &'a str,
    run: &'a str,
    episode: usize,
    iteration: usize,
    action: String,
    nodes: usize,
    levels: u32,
    reward: f64,
    constraint_met: bool,
}

/// Run directories named directly, or found one level below a named
/// directory that has no summary of its own.
fn collect_runs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut runs = Vec::new();
    let mut missing = Vec::new();
    for input in inputs {
        if input.join(SUMMARY_FILE).is_file() {
            runs.push(input.clone());
            continue;
        }
        let mut children: Vec<PathBuf> = fs::read_dir(input)
            .map(|rd| rd.flatten().map(|e| e.path()).filter(|p| p.join(SUMMARY_FILE).is_file()).collect())
            .unwrap_or_default();
        if children.is_empty() {
            missing.push(input.join(SUMMARY_FILE).display().to_string());
        }
        children.sort();
        runs.extend(children);
    }
    if !missing.is_empty() {
        return Err(CliError::Input(format!("missing run artifacts:\n  {}", missing.join("\n  "))));
    }
    if runs.is_empty() {
        return Err(CliError::Usage("compare needs at least one run directory".into()));
    }
    Ok(runs)
}

fn read_summary(dir: &Path) -> Result<Summary> {
    let path = dir.join(SUMMARY_FILE);
    let bytes = fs::read(&path).map_err(|e| CliError::input(&path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::input(&path, e))
}

fn improvement(initial: usize, now: usize) -> f64 {
    if initial == 0 {
        0.0
    } else {
        100.0 * (initial as f64 - now as f64) / initial as f64
    }
}

/// One `initial` row per benchmark followed by its runs in input order, then
/// one `average` row per method.
pub fn table(summaries: &[Summary]) -> Vec<Row> {
    let mut benchmarks: Vec<&str> = Vec::new();
    for s in summaries {
        if !benchmarks.contains(&s.benchmark.as_str()) {
            benchmarks.push(&s.benchmark);
        }
    }
    let mut rows = Vec::new();
    for b in &benchmarks {
        let runs: Vec<&Summary> = summaries.iter().filter(|s| s.benchmark == *b).collect();
        let first = runs[0];
        rows.push(Row {
            benchmark: b.to_string(),
            method: "initial".into(),
            nodes: Some(first.initial_nodes),
            levels: Some(first.initial_levels),
            constraint_levels: Some(first.constraint_levels),
            constraint_met: Some(first.initial_levels <= first.constraint_levels),
            improvement_pct: 0.0,
        });
        for s in runs {
            rows.push(Row {
                benchmark: b.to_string(),
                method: s.method.clone(),
                nodes: Some(s.best_nodes),
                levels: Some(s.best_levels),
                constraint_levels: Some(s.constraint_levels),
                constraint_met: Some(s.constraint_met),
                improvement_pct: improvement(s.initial_nodes, s.best_nodes),
            });
        }
    }
    let mut methods: Vec<String> = Vec::new();
    for r in &rows {
        if !methods.contains(&r.method) {
            methods.push(r.method.clone());
        }
    }
    for m in methods {
        let values: Vec<f64> = rows.iter().filter(|r| r.method == m).map(|r| r.improvement_pct).collect();
        rows.push(Row {
            benchmark: "average".into(),
            method: m,
            nodes: None,
            levels: None,
            constraint_levels: None,
            constraint_met: None,
            improvement_pct: values.iter().sum::<f64>() / values.len() as f64,
        });
    }
    rows
}

fn render(rows: &[Row]) -> String {
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    let mut out = format!(
        "{:<12} {:<8} {:>7} {:>7} {:>7} {:>5} {:>9}\n",
        "benchmark", "method", "nodes", "levels", "budget", "met", "impr. %"
    );
    for r in rows {
        out += &format!(
            "{:<12} {:<8} {:>7} {:>7} {:>7} {:>5} {:>9.2}\n",
            r.benchmark,
            r.method,
            opt(r.nodes.map(|v| v.to_string())),
            opt(r.levels.map(|v| v.to_string())),
            opt(r.constraint_levels.map(|v| v.to_string())),
            opt(r.constraint_met.map(|v| if v { "yes" } else { "no" }.to_string())),
            r.improvement_pct
        );
    }
    out
}

pub fn compare(inputs: &[PathBuf], output: &Path) -> Result<()> {
    let runs = collect_runs(inputs)?;
    let summaries: Vec<Summary> = runs.iter().map(|d| read_summary(d)).collect::<Result<_>>()?;
    let absent: Vec<String> = runs
        .iter()
        .map(|d| d.join(STEPS_FILE))
        .filter(|p| !p.is_file())
        .map(|p| p.display().to_string())
        .collect();
    if !absent.is_empty() {
        return Err(CliError::Input(format!("missing run artifacts:\n  {}", absent.join("\n  "))));
    }
    fs::create_dir_all(output).map_err(|e| CliError::output(output, e))?;

    let rows = table(&summaries);
    let table_path = output.join("comparison.csv");
    let mut w = csv::Writer::from_path(&table_path).map_err(|e| CliError::output(&table_path, e))?;
    for r in &rows {
        w.serialize(r).map_err(|e| CliError::output(&table_path, e))?;
    }
    w.flush().map_err(|e| CliError::output(&table_path, e))?;

    let trace_path = output.join("traces.csv");
    let mut w = csv::Writer::from_path(&trace_path).map_err(|e| CliError::output(&trace_path, e))?;
    for (dir, s) in runs.iter().zip(&summaries) {
        let steps = dir.join(STEPS_FILE);
        let mut reader = csv::Reader::from_path(&steps).map_err(|e| CliError::input(&steps, e))?;
        let run = dir.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
        for record in reader.deserialize::<StepRecord>() {
            let step = record.map_err(|e| CliError::input(&steps, e))?;
            let row = TraceRow {
                benchmark: &s.benchmark,
                method: &s.method,
                run: &run,
                episode: step.episode,
                iteration: step.iteration,
                action: step.action,
                nodes: step.nodes,
                levels: step.levels,
                reward: step.reward,
                constraint_met: step.constraint_met,
            };
            w.serialize(row).map_err(|e| CliError::output(&trace_path, e))?;
        }
    }
    w.flush().map_err(|e| CliError::output(&trace_path, e))?;

    print!("{}", render(&rows));
    println!("wrote {} and {}", table_path.display(), trace_path.display());
    Ok(())
}
