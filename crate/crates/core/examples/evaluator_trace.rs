//! How progress is scored. The world is projected after every step and the
//! task's rule compares each projection with the one before; the running
//! sum is the task's current quantity.
//!
//!     cargo run --example evaluator_trace [task]

use std::sync::Arc;
use valleybench::content::Content;
use valleybench::env::Env;
use valleybench::evaluator::{compare, project, Registry};
use valleybench::harness::OracleBook;
use valleybench::tasks::TaskSuite;

fn main() {
    let task = std::env::args().nth(1).unwrap_or_else(|| "clear_10_weeds_with_scythe".into());
    let content = Content::shared();
    let suite = Arc::new(TaskSuite::bundled().clone());
    let spec = suite.get(&task).expect("unknown task").clone();
    let rule = Registry::builtin().get(&spec.evaluator).unwrap();
    println!("{task}: {} {} ({}, {:?} diff)", spec.quantity, spec.object, rule.rule, rule.diff);

    let mut env = Env::new(content.clone(), suite, Default::default());
    env.reset(&task, 1).unwrap();
    let mut last = project(env.world().unwrap(), &content.pack);
    let mut total = 0;
    for step in OracleBook::bundled().get(&task).expect("no oracle for this task") {
        let out = env.step(step).unwrap();
        let now = project(env.world().unwrap(), &content.pack);
        let delta = compare(&spec.evaluator, &spec.object, &now, &last).unwrap();
        total += delta;
        last = now;
        println!("{:>3} {:<55} +{delta} = {total}", out.steps_used, step.join("; "));
        assert_eq!(total, out.eval.current_quantity);
        if out.done {
            println!("completed={}", out.eval.completed);
            break;
        }
    }
}
