//! Paused versus real-time play. A chasing agent that needs five seconds
//! per decision hunts a fast bug; with the world paused between steps it
//! catches it, with the clock running the bug wanders off first.
//!
//!     cargo run --example realtime_ablation [think_ms]

use std::sync::Arc;
use std::time::Duration;
use valleybench::content::Content;
use valleybench::env::EnvConfig;
use valleybench::harness::{run_suite, ChaserAgent, RunConfig};
use valleybench::observation::{Modality, ObsConfig};
use valleybench::tasks::TaskSuite;

const TASK: &str = "kill_1_bug_with_rusty_sword";

fn main() {
    let think: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5000);
    let content = Content::shared();
    let suite = Arc::new(TaskSuite::bundled().clone());
    let task = suite.get(TASK).expect("bundled task").clone();
    for realtime in [false, true] {
        let cfg = RunConfig {
            env: EnvConfig {
                observation: ObsConfig {
                    modality: Modality::TextOnly,
                    window: 10,
                    ..Default::default()
                },
                navigate: false,
                realtime,
            },
            think_time: Duration::from_millis(think),
            ..Default::default()
        };
        let runs = run_suite(
            &content,
            &suite,
            std::slice::from_ref(&task),
            &|| Box::new(ChaserAgent::default()),
            &cfg,
        );
        let wins = runs.iter().filter(|r| r.record.completed).count();
        let mode = if realtime { "realtime" } else { "paused" };
        println!("{mode:>8}: {wins}/{} runs completed", runs.len());
        for r in &runs {
            println!(
                "          seed {} steps {} completed {}",
                r.record.seed, r.record.steps_used, r.record.completed
            );
        }
    }
}
