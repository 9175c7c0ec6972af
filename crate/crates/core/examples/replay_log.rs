//! Logs a run to disk, then re-executes the logged actions and checks
//! every observation digest.
//!
//!     cargo run --example replay_log

use std::sync::Arc;
use valleybench::content::Content;
use valleybench::harness::trajectory::Trajectory;
use valleybench::harness::{replay, run_suite, OracleAgent, OracleBook, RunConfig};
use valleybench::tasks::TaskSuite;

fn main() {
    let dir = std::env::temp_dir().join("valleybench-replay");
    let content = Content::shared();
    let suite = Arc::new(TaskSuite::bundled().clone());
    let task = suite.get("harvest_1_egg").unwrap().clone();
    let cfg = RunConfig {
        repeats: 2,
        log_dir: Some(dir.clone()),
        ..Default::default()
    };
    let runs = run_suite(
        &content,
        &suite,
        &[task],
        &|| Box::new(OracleAgent::new(OracleBook::bundled().clone())),
        &cfg,
    );
    for r in &runs {
        let path = r.record.trajectory.as_ref().unwrap();
        let log = Trajectory::load(path.as_ref()).unwrap();
        let rep = replay(&content, &suite, &log).unwrap();
        println!(
            "{path}: {} steps, completed={}, first divergence {:?}",
            rep.steps, rep.completed, rep.divergence
        );
        for s in &log.steps {
            println!("  {:>2} {:<60} {}", s.step, s.actions.join("; "), &s.obs_digest[..16]);
        }
    }
}
