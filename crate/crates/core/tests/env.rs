// SPDX-License-Identifier: Apache-2.0

use synflow::aig::{equivalent, extract_stats, Aig, AigBuilder};
use synflow::bench;
use synflow::env::{
    default_constraint, grade, state_of, DelayStatus, Direction, Env, EnvConfig, EnvError, Grade, Metrics, RewardTable,
    StepLog, StepRecord,
};
use synflow::transforms::TransformId;

fn metrics(area: usize, delay: u32, constraint: u32) -> Metrics {
    Metrics { area, delay, constraint_met: delay <= constraint }
}

/// a & b & c & d built as a chain, three levels deep.
fn chain() -> Aig {
    let mut b = AigBuilder::new(4);
    let x = b.inputs();
    let t = b.and(x[0], x[1]);
    let t = b.and(t, x[2]);
    let t = b.and(t, x[3]);
    b.add_output(t);
    b.finish()
}

fn env_for(g: Aig, constraint: u32, k: usize) -> Env {
    Env::new(g, EnvConfig { delay_constraint: constraint, max_iterations: k }, RewardTable::default()).unwrap()
}

#[test]
fn table_cells_match_the_published_symbols() {
    use Direction::*;
    let nm = DelayStatus::NotMet;
    let expected = [
        (Decrease, DelayStatus::Met, "+++"),
        (None, DelayStatus::Met, "0"),
        (Increase, DelayStatus::Met, "-"),
        (Decrease, nm(Decrease), "+++"),
        (None, nm(Decrease), "++"),
        (Increase, nm(Decrease), "+"),
        (Decrease, nm(None), "++"),
        (None, nm(None), "0"),
        (Increase, nm(None), "--"),
        (Decrease, nm(Increase), "-"),
        (None, nm(Increase), "--"),
        (Increase, nm(Increase), "---"),
    ];
    for (area, delay, symbol) in expected {
        assert_eq!(grade(area, delay).symbol(), symbol, "{area:?} {delay:?}");
    }
}

#[test]
fn reward_examples() {
    let t = RewardTable::default();
    assert_eq!(t.reward(&metrics(10, 5, 5), &metrics(9, 5, 5)), 3.0);
    assert_eq!(t.reward(&metrics(10, 5, 5), &metrics(10, 4, 5)), 0.0);
    assert_eq!(t.reward(&metrics(10, 6, 5), &metrics(11, 7, 5)), -3.0);
    // Met row ignores the delay direction.
    assert_eq!(t.reward(&metrics(10, 2, 5), &metrics(11, 5, 5)), -1.0);
    assert_eq!(t.value(Grade::P1), 1.0);
}

#[test]
fn ladder_must_be_strictly_decreasing_and_finite() {
    assert!(RewardTable::new([5.0, 2.0, 1.0, 0.0, -0.5, -2.0, -9.0]).is_ok());
    assert!(RewardTable::new([3.0, 2.0, 2.0, 0.0, -1.0, -2.0, -3.0]).is_err());
    assert!(RewardTable::new([f64::NAN, 2.0, 1.0, 0.0, -1.0, -2.0, -3.0]).is_err());
}

#[test]
fn reset_state_is_self_normalized() {
    for b in bench::all() {
        let mut env = env_for(b.aig, 1, 5);
        let s = env.reset();
        assert_eq!(s.0, [1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0], "{}", b.name);
        assert_eq!(env.reset(), s);
    }
}

#[test]
fn state_of_divides_by_the_basis() {
    let g = chain();
    let basis = extract_stats(&g);
    let mut b = AigBuilder::new(4);
    let x = b.inputs();
    let t = b.and(x[0], x[1]);
    let u = b.and(x[2], x[3]);
    let r = b.and(t, u);
    b.add_output(r);
    let s = state_of(&b.finish(), &basis);
    assert_eq!(s.0[1], 1.0);
    assert!((s.0[3] - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(s.0[4], 0.0);
}

#[test]
fn step_after_the_cap_is_rejected() {
    let mut env = env_for(chain(), 3, 2);
    assert!(matches!(env.step(TransformId::Balance), Err(EnvError::NotReset)));
    env.reset();
    assert!(matches!(env.best_design(), Err(EnvError::NoSteps)));
    env.step(TransformId::Rewrite).unwrap();
    env.step(TransformId::Rewrite).unwrap();
    assert!(env.is_done());
    assert!(matches!(env.step(TransformId::Rewrite), Err(EnvError::EpisodeFinished(2))));
    env.reset();
    assert_eq!(env.steps_taken(), 0);
}

#[test]
fn balance_that_only_reaches_the_constraint_scores_zero() {
    let mut env = env_for(chain(), 2, 4);
    env.reset();
    let step = env.step(TransformId::Balance).unwrap();
    assert_eq!(step.metrics, Metrics { area: 3, delay: 2, constraint_met: true });
    assert_eq!(step.reward, 0.0);
    let again = env.step(TransformId::Balance).unwrap();
    assert_eq!(again.reward, 0.0);
}

#[test]
fn best_design_prefers_the_first_of_equal_steps() {
    let mut env = env_for(chain(), 2, 4);
    env.reset();
    env.step(TransformId::Rewrite).unwrap();
    env.step(TransformId::Balance).unwrap();
    env.step(TransformId::Balance).unwrap();
    let best = env.best_design().unwrap();
    assert_eq!(best.flow, vec![TransformId::Rewrite, TransformId::Balance]);
    assert!(best.metrics.constraint_met);
}

#[test]
fn unmet_episode_falls_back_to_minimum_delay() {
    let mut env = env_for(chain(), 0, 3);
    env.reset();
    env.step(TransformId::Rewrite).unwrap();
    env.step(TransformId::Balance).unwrap();
    env.step(TransformId::Resub).unwrap();
    let best = env.best_design().unwrap();
    assert!(!best.metrics.constraint_met);
    assert_eq!(best.metrics.delay, 2);
    assert_eq!(best.flow.len(), 2);
}

#[test]
fn better_than_orders_met_before_unmet() {
    let met_big = metrics(100, 5, 5);
    let unmet_small = metrics(10, 6, 5);
    assert!(met_big.better_than(&unmet_small));
    assert!(metrics(10, 6, 5).better_than(&metrics(5, 7, 5)));
    assert!(!metrics(10, 5, 5).better_than(&metrics(10, 4, 5)));
}

#[test]
fn episodes_preserve_function_and_replay_identically() {
    let design = bench::by_name("square").unwrap();
    let c = default_constraint(&design);
    let actions = [
        TransformId::Rewrite,
        TransformId::Balance,
        TransformId::ResubZ,
        TransformId::Refactor,
        TransformId::RewriteZ,
        TransformId::RefactorZ,
        TransformId::Resub,
    ];
    let trace = |env: &mut Env| -> Vec<(Vec<f64>, f64)> {
        env.reset();
        actions.iter().map(|&a| env.step(a).unwrap()).map(|s| (s.state.0.to_vec(), s.reward)).collect()
    };
    let mut env = env_for(design.clone(), c, actions.len());
    let first = trace(&mut env);
    let last = env.current().unwrap().clone();
    assert!(equivalent(&design, &last, 0).unwrap().is_equivalent());
    let mut fresh = env_for(design, c, actions.len());
    assert_eq!(trace(&mut fresh), first);
}

#[test]
fn step_log_header_and_rows() {
    let mut env = env_for(chain(), 2, 1);
    env.reset();
    let step = env.step(TransformId::Rewrite).unwrap();
    let mut out = Vec::new();
    {
        let mut log = StepLog::new(&mut out);
        log.write(&StepRecord::new(0, 0, TransformId::Rewrite, &step)).unwrap();
        log.flush().unwrap();
    }
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text, "episode,iteration,action,nodes,levels,reward,constraint_met\n0,0,rewrite,3,3,0.0,false\n");
}

#[test]
fn zero_iterations_is_a_config_error() {
    let r = Env::new(chain(), EnvConfig { delay_constraint: 1, max_iterations: 0 }, RewardTable::default());
    assert!(matches!(r, Err(EnvError::Config(_))));
}
