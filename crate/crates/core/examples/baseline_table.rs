//! Random and scripted agents over the shipped pack, reported as a
//! success-rate table with a row per difficulty.
//!
//!     cargo run --release --example baseline_table [repeats]

use std::sync::Arc;
use valleybench::content::Content;
use valleybench::env::EnvConfig;
use valleybench::harness::report::ResultsTable;
use valleybench::harness::{run_suite, Agent, OracleAgent, OracleBook, RandomAgent, RunConfig};
use valleybench::observation::{Modality, ObsConfig};
use valleybench::tasks::TaskSuite;

fn main() {
    let repeats = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let content = Content::shared();
    let suite = Arc::new(TaskSuite::bundled().clone());
    let cfg = RunConfig {
        repeats,
        parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
        env: EnvConfig {
            observation: ObsConfig {
                modality: Modality::TextOnly,
                ..Default::default()
            },
            ..Default::default()
        },
        ..Default::default()
    };
    let mut records = Vec::new();
    let random = || -> Box<dyn Agent> { Box::new(RandomAgent::default()) };
    let oracle = || -> Box<dyn Agent> { Box::new(OracleAgent::new(OracleBook::bundled().clone())) };
    for agent in [&random as &(dyn Fn() -> Box<dyn Agent> + Sync), &oracle] {
        records.extend(run_suite(&content, &suite, &suite.tasks, agent, &cfg).into_iter().map(|r| r.record));
    }
    print!("{}", ResultsTable::from_records(&records).to_markdown());
    let unscripted: Vec<&str> = suite
        .tasks
        .iter()
        .map(|t| t.name.as_str())
        .filter(|t| OracleBook::bundled().get(t).is_none())
        .collect();
    println!("\ntasks without an oracle script: {unscripted:?}");
}
