//! Load a task, take a few steps in-process and watch the evaluator.
//!
//!     cargo run --example quickstart

use std::sync::Arc;
use valleybench::content::Content;
use valleybench::env::{Env, EnvConfig};
use valleybench::observation::{Modality, ObsConfig};
use valleybench::tasks::TaskSuite;

fn main() {
    let cfg = EnvConfig {
        observation: ObsConfig {
            modality: Modality::TextOnly,
            ..Default::default()
        },
        ..Default::default()
    };
    let mut env = Env::new(Content::shared(), Arc::new(TaskSuite::bundled().clone()), cfg);
    let out = env.reset("till_5_tile_with_hoe", 1).expect("bundled task");
    let t = out.observation.text.as_ref().unwrap();
    println!("{} at {:?}, {} on {} {}", t.location, t.position, t.current_time, t.season, t.day);

    let steps: [&[&str]; 4] = [
        &["move(x=5, y=7)", "interact(direction=\"down\")"],
        &["choose_item(slot_index=1)"],
        &["move(x=16, y=9)", "use(direction=\"down\")"],
        &["move(x=17, y=9)", "use(direction=\"down\")"],
    ];
    for actions in steps {
        let out = env.step(actions).unwrap();
        for r in &out.results {
            println!("  {:<32} ok={} {}", r.action, r.ok, r.message);
        }
        let t = out.observation.text.as_ref().unwrap();
        println!(
            "step {}/{}: {} {:?} holding {} | tilled {} done={}",
            out.steps_used, out.max_steps, t.location, t.position, t.item_in_hand.currentitem, out.eval.current_quantity, out.done
        );
    }
}
