//! Interactive play from a terminal, mostly for checking that tasks are
//! solvable. Each input line is one step; separate two actions with `;`.

use crate::env::{Env, StepOutcome, MAX_ACTIONS};
use crate::mechanics::action::Action;
use crate::observation::text::TextObservation;
use std::io::{self, BufRead, Write};

/// Attributes every tile has; the screen only lists tiles with more.
fn boring(attr: &str) -> bool {
    attr.starts_with("Type:") || attr.starts_with("Passable:") || attr.starts_with("Diggable:")
}

pub fn render(t: &TextObservation) -> String {
    let mut s = format!(
        "{} {} day {} year {} | {} | {}\n",
        t.current_time, t.season, t.day, t.year, t.weather, t.location
    );
    s += &format!(
        "at ({}, {}) facing {} | health {} energy {} money {}\n",
        t.position.0, t.position.1, t.facing, t.health, t.energy, t.money
    );
    s += &format!("holding [{}] {}\n", t.item_in_hand.index, t.item_in_hand.currentitem);
    for slot in t.toolbar.iter().filter(|l| !l.ends_with("No item")) {
        s += &format!("  {slot}\n");
    }
    if t.current_menu.kind != "none" || !t.current_menu.options.is_empty() {
        s += &format!("menu {}: {}\n", t.current_menu.kind, t.current_menu.message);
        for o in &t.current_menu.options {
            s += &format!("  {o}\n");
        }
    }
    for b in &t.surrounding_blocks {
        let extra: Vec<&str> = b.object.iter().map(String::as_str).filter(|a| !boring(a)).collect();
        if extra.is_empty() && b.npc.is_none() {
            continue;
        }
        let abs = (t.position.0 + b.position.0, t.position.1 + b.position.1);
        s += &format!("  ({:>3}, {:>3}) {}", abs.0, abs.1, extra.join(", "));
        if let Some(n) = &b.npc {
            s += &format!(" [{} friendship {}]", n.name, n.friendship);
        }
        s.push('\n');
    }
    s
}

/// Splits on `;` outside quotes.
pub fn split_actions(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for c in line.chars() {
        match c {
            '"' => {
                quoted = !quoted;
                cur.push(c);
            }
            ';' if !quoted => out.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    out.push(cur);
    out.into_iter().map(|a| a.trim().to_string()).filter(|a| !a.is_empty()).collect()
}

fn show<W: Write>(out: &mut W, o: &StepOutcome) -> io::Result<()> {
    for r in &o.results {
        writeln!(out, "> {} -> {} {}", r.action, if r.ok { "ok" } else { "failed" }, r.message)?;
    }
    if let Some(t) = &o.observation.text {
        write!(out, "{}", render(t))?;
    }
    writeln!(out, "progress {} | step {}/{}", o.eval.current_quantity, o.steps_used, o.max_steps)
}

/// Runs a session until the episode ends, the input ends or the player
/// types `quit`. Returns whether the task was completed.
pub fn play<R: BufRead, W: Write>(env: &mut Env, task: &str, seed: u64, input: R, mut out: W) -> io::Result<bool> {
    let mut o = env
        .reset(task, seed)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))?;
    writeln!(out, "task: {task} (seed {seed})")?;
    show(&mut out, &o)?;
    let mut lines = input.lines();
    while !o.done {
        write!(out, "action> ")?;
        out.flush()?;
        let Some(line) = lines.next().transpose()? else { break };
        let line = line.trim();
        if line == "quit" {
            break;
        }
        let actions = split_actions(line);
        if actions.is_empty() {
            continue;
        }
        if actions.len() > MAX_ACTIONS {
            writeln!(out, "at most {MAX_ACTIONS} actions per step")?;
            continue;
        }
        if let Some(e) = actions.iter().find_map(|a| Action::parse(a).err()) {
            writeln!(out, "parse error: {e}")?;
            continue;
        }
        o = env.step(&actions).map_err(|e| io::Error::other(e.to_string()))?;
        show(&mut out, &o)?;
    }
    let done = o.eval.completed;
    writeln!(out, "completed={}", if done { "True" } else { "False" })?;
    Ok(done)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::Content;
    use crate::env::EnvConfig;
    use crate::observation::{Modality, ObsConfig};
    use crate::tasks::TaskSuite;
    use std::sync::Arc;

    fn env() -> Env {
        let cfg = EnvConfig {
            observation: ObsConfig {
                modality: Modality::TextOnly,
                ..Default::default()
            },
            ..Default::default()
        };
        Env::new(Content::shared(), Arc::new(TaskSuite::bundled().clone()), cfg)
    }

    #[test]
    fn splits_outside_quotes() {
        assert_eq!(
            split_actions(r#"craft(item="a;b") ; use(direction="up")"#),
            vec![r#"craft(item="a;b")"#, r#"use(direction="up")"#]
        );
    }

    #[test]
    fn bad_action_reprompts_without_stepping() {
        let mut e = env();
        let mut out = Vec::new();
        let done = play(&mut e, "go_to_bus_stop", 1, "fly()\nquit\n".as_bytes(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(!done);
        assert!(text.contains("parse error"));
        assert_eq!(e.episode().unwrap().steps_used, 0);
    }

    #[test]
    fn finishing_prints_completed() {
        let mut e = env();
        let book = crate::harness::OracleBook::bundled();
        let script: String = book.get("go_to_coop").unwrap().iter().map(|step| step.join("; ") + "\n").collect();
        let mut out = Vec::new();
        assert!(play(&mut e, "go_to_coop", 1, script.as_bytes(), &mut out).unwrap());
        assert!(String::from_utf8(out).unwrap().trim_end().ends_with("completed=True"));
    }
}
