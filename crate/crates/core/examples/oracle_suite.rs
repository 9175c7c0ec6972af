//! Runs every scripted oracle on a few seeds and prints a pass/fail line
//! per task. Pass a task name to trace that one step by step.
//!
//!     cargo run --example oracle_suite [task [seed]]

use std::sync::Arc;
use valleybench::content::Content;
use valleybench::env::{Env, EnvConfig};
use valleybench::harness::OracleBook;
use valleybench::observation::{Modality, ObsConfig};
use valleybench::tasks::TaskSuite;

fn main() {
    let trace = std::env::args().nth(1);
    let trace_seed: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let book = OracleBook::bundled();
    let cfg = EnvConfig {
        observation: ObsConfig {
            modality: Modality::TextOnly,
            ..Default::default()
        },
        ..Default::default()
    };
    let mut env = Env::new(Content::shared(), Arc::new(TaskSuite::bundled().clone()), cfg);
    let mut failed = 0;
    for task in book.tasks() {
        if trace.as_deref().is_some_and(|t| t != task) {
            continue;
        }
        let script = book.get(task).unwrap();
        let mut ok_seeds = 0;
        for seed in 1..=3u64 {
            let mut out = env.reset(task, seed).expect("reset");
            for step in script {
                if out.done {
                    break;
                }
                out = env.step(step).expect("step");
                if trace.is_some() && seed == trace_seed {
                    for r in &out.results {
                        println!("  {:<48} ok={} {}", r.action, r.ok, r.message);
                    }
                    let t = out.observation.text.as_ref().unwrap();
                    println!(
                        "    -> {} {:?} {} q={}",
                        t.location, t.position, t.current_time, out.eval.current_quantity
                    );
                }
            }
            if out.eval.completed {
                ok_seeds += 1;
            }
        }
        let steps = script.len();
        let max = env.episode().unwrap().task.max_steps();
        let pass = ok_seeds == 3;
        failed += !pass as usize;
        println!(
            "{} {task} ({ok_seeds}/3 seeds, {steps}/{max} steps)",
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!("{} oracles, {failed} failing", book.len());
}
