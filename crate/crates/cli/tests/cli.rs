// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use synflow::aig::{equivalent, parse_aiger};

const SINGLE_AND: &str = "aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n";

fn synflow(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_synflow"))
        .args(args)
        .current_dir(dir)
        .env_remove("SYNFLOW_OUTPUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn lines(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn stats_of_a_single_and() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("and.aag"), SINGLE_AND).unwrap();
    let out = synflow(dir.path(), &["stats", "--benchmark", "and.aag"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let csv: Vec<&str> = text.lines().rev().take(2).collect();
    let header: Vec<&str> = csv[1].split(',').collect();
    let row: Vec<&str> = csv[0].split(',').collect();
    let field = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(field("nodes"), "1");
    assert_eq!(field("levels"), "1");
    assert_eq!(field("latches"), "0");
}

#[test]
fn corrupt_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.aag"), "aag 3 2 0 1\n").unwrap();
    let out = synflow(dir.path(), &["stats", "--benchmark", "bad.aag"]);
    assert_eq!(out.status.code(), Some(2));
    let out = synflow(dir.path(), &["train", "--benchmark", "absent.aig", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("absent.aig"));
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(synflow(dir.path(), &["frobnicate"]).status.code(), Some(1));
    let out = synflow(dir.path(), &["train", "--benchmark", "bench:max"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--seed"));
    assert_eq!(synflow(dir.path(), &["script", "--benchmark", "bench:max"]).status.code(), Some(1));
    assert!(synflow(dir.path(), &["--help"]).status.success());
}

#[test]
fn one_step_training_run_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("and.aag"), SINGLE_AND).unwrap();
    let args = ["train", "--benchmark", "and.aag", "--constraint-levels", "1", "--seed", "3"];
    let out = synflow(dir.path(), &[&args[..], &["--episodes", "1", "--iterations", "1", "--output", "run"]].concat());
    assert!(out.status.success(), "{}", stderr(&out));
    let run = dir.path().join("run");
    for f in ["steps.csv", "episodes.csv", "best.aig", "best.flow", "actor.json", "critic.json", "config.toml", "summary.json"] {
        assert!(run.join(f).is_file(), "{f} missing");
    }
    assert_eq!(lines(&run.join("steps.csv")), 2);
    assert_eq!(lines(&run.join("best.flow")), 1);
    let summary = stdout(&out);
    assert!(summary.contains("benchmark=and") && summary.contains("nodes=1") && summary.contains("constraint_met=true"));
    let original = parse_aiger(SINGLE_AND.as_bytes()).unwrap();
    let best = parse_aiger(&fs::read(run.join("best.aig")).unwrap()).unwrap();
    assert!(equivalent(&original, &best, 0).unwrap().is_equivalent());
}

#[test]
fn training_is_reproducible_from_flags_and_saved_config() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["train", "--benchmark", "bench:max", "--episodes", "3", "--iterations", "6", "--seed", "9"];
    for name in ["a", "b"] {
        let out = synflow(dir.path(), &[&base[..], &["--output", name]].concat());
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let out = synflow(dir.path(), &["train", "--config", "a/config.toml", "--output", "c"]);
    assert!(out.status.success(), "{}", stderr(&out));
    for f in ["steps.csv", "episodes.csv", "best.flow"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        assert_eq!(a, fs::read(dir.path().join("b").join(f)).unwrap(), "{f}");
        assert_eq!(a, fs::read(dir.path().join("c").join(f)).unwrap(), "{f} from config");
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), "benchmark = \"bench:max\"\nepisodes = 4\niterations = 2\nseed = 5\n").unwrap();
    let out = synflow(dir.path(), &["train", "--config", "run.toml", "--episodes", "1", "--output", "o"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(lines(&dir.path().join("o/episodes.csv")), 2);
    assert_eq!(lines(&dir.path().join("o/steps.csv")), 3);

    fs::write(dir.path().join("typo.toml"), "episods = 4\n").unwrap();
    let out = synflow(dir.path(), &["train", "--config", "typo.toml", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_root_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_synflow"))
        .args(["greedy", "--benchmark", "bench:max"])
        .current_dir(dir.path())
        .env("SYNFLOW_OUTPUT", dir.path().join("root"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("root/greedy-max/summary.json").is_file());
}

#[test]
fn script_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("flow.txt"), "balance\nrewrite -z\nmap\n").unwrap();
    let out = synflow(dir.path(), &["script", "--benchmark", "bench:max", "--script", "flow.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn compare_tabulates_initial_and_methods() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("flow.txt"), "balance\nrewrite\n").unwrap();
    let runs = [
        vec!["greedy", "--benchmark", "bench:bar", "--output", "runs/greedy"],
        vec!["script", "--benchmark", "bench:bar", "--script", "flow.txt", "--output", "runs/script"],
        vec!["random", "--benchmark", "bench:bar", "--seed", "1", "--episodes", "2", "--iterations", "4", "--output", "runs/random"],
    ];
    for r in &runs {
        let out = synflow(d, r);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let out = synflow(d, &["compare", "runs", "--output", "cmp"]);
    assert!(out.status.success(), "{}", stderr(&out));

    let mut reader = csv::Reader::from_path(d.join("cmp/comparison.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    let methods: Vec<(&str, &str)> = rows.iter().map(|r| (&r[0], &r[1])).collect();
    assert_eq!(&methods[..4], &[("bar", "initial"), ("bar", "greedy"), ("bar", "random"), ("bar", "script")]);
    assert_eq!(rows[0][6].parse::<f64>().unwrap(), 0.0);
    let initial: f64 = rows[0][2].parse().unwrap();
    let greedy: f64 = rows[1][2].parse().unwrap();
    let pct: f64 = rows[1][6].parse().unwrap();
    assert!((pct - 100.0 * (initial - greedy) / initial).abs() < 1e-9);
    let avg = rows.iter().find(|r| &r[0] == "average" && &r[1] == "greedy").unwrap();
    assert!((avg[6].parse::<f64>().unwrap() - pct).abs() < 1e-9);

    let traces = lines(&d.join("cmp/traces.csv"));
    let expected = (lines(&d.join("runs/greedy/steps.csv")) - 1) + 2 + 8 + 1;
    assert_eq!(traces, expected);
}

#[test]
fn compare_lists_missing_runs() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("empty")).unwrap();
    let out = synflow(dir.path(), &["compare", "empty", "gone"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("empty") && err.contains("gone"), "{err}");
}

#[test]
fn gen_bench_writes_parseable_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = synflow(dir.path(), &["gen-bench", "--output", "b"]);
    assert!(out.status.success());
    for name in synflow::bench::NAMES {
        let bytes = fs::read(dir.path().join("b").join(format!("{name}.aig"))).unwrap();
        assert_eq!(parse_aiger(&bytes).unwrap(), synflow::bench::by_name(name).unwrap());
    }
}
