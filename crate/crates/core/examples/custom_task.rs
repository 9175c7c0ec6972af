//! Tasks are data. This defines a new one in YAML, adds it to the suite
//! and solves it with a hand-written script.
//!
//!     cargo run --example custom_task

use std::sync::Arc;
use valleybench::content::Content;
use valleybench::env::{Env, EnvConfig};
use valleybench::tasks::{parse_task_suite, TaskSuite};

const TASK: &str = r#"
Farming:
  water_2_crop_after_a_rainless_night:
    id: 900
    object: Crop
    quantity: 2
    tool: Watering Can
    save: save_new
    init_commands:
      - 'warp("Farm", 20, 10)'
      - 'place_crop("Parsnip Seeds", 21, 10)'
      - 'place_crop("Parsnip Seeds", 22, 10)'
      - 'warp_home()'
    evaluator: water
    difficulty: easy
"#;

fn main() {
    let mut suite = TaskSuite::bundled().clone();
    match parse_task_suite(TASK) {
        Ok(extra) => suite.merge(extra).unwrap(),
        Err(e) => {
            eprintln!("task file rejected: {e}");
            std::process::exit(1);
        }
    }
    let mut env = Env::new(Content::shared(), Arc::new(suite), EnvConfig::default());
    let out = env.reset("water_2_crop_after_a_rainless_night", 5).unwrap();
    println!(
        "{} tasks loaded; starting in {}",
        env.suite().len(),
        out.observation.text.unwrap().location
    );
    let script: [&[&str]; 4] = [
        &["move(x=5, y=7)", "interact(direction=\"down\")"],
        &["choose_item(slot_index=2)"],
        &["move(x=21, y=11)", "use(direction=\"up\")"],
        &["move(x=22, y=11)", "use(direction=\"up\")"],
    ];
    for actions in script {
        let out = env.step(actions).unwrap();
        let said: Vec<&str> = out.results.iter().map(|r| r.message.as_str()).collect();
        println!(
            "{:<45} {:<28} watered {}",
            actions.join("; "),
            said.join(", "),
            out.eval.current_quantity
        );
        if out.done {
            println!("completed={}", out.eval.completed);
            break;
        }
    }
}
