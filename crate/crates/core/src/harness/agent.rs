//! Agents the harness can drive: scripted oracles, a uniform random
//! baseline and a reactive monster chaser.

use super::oracle::OracleBook;
use crate::env::StepOutcome;
use crate::mechanics::monsters::manhattan;
use crate::observation::text::Block;
use crate::observation::TextObservation;
use crate::tasks::TaskSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub trait Agent: Send {
    fn name(&self) -> &str;
    fn reset(&mut self, task: &TaskSpec, seed: u64);
    /// Next step's actions, or `None` to give up.
    fn act(&mut self, last: &StepOutcome) -> Option<Vec<String>>;
}

/// Replays a stored script.
pub struct OracleAgent {
    book: OracleBook,
    script: Vec<Vec<String>>,
    next: usize,
}

impl OracleAgent {
    pub fn new(book: OracleBook) -> OracleAgent {
        OracleAgent {
            book,
            script: Vec::new(),
            next: 0,
        }
    }
}

impl Agent for OracleAgent {
    fn name(&self) -> &str {
        "oracle"
    }

    fn reset(&mut self, task: &TaskSpec, _seed: u64) {
        self.script = self.book.get(&task.name).map(|s| s.to_vec()).unwrap_or_default();
        self.next = 0;
    }

    fn act(&mut self, _last: &StepOutcome) -> Option<Vec<String>> {
        let s = self.script.get(self.next)?.clone();
        self.next += 1;
        Some(s)
    }
}

const DIRS: [&str; 4] = ["up", "down", "left", "right"];

/// Uniform over a small action vocabulary around the player.
pub struct RandomAgent {
    rng: ChaCha8Rng,
}

impl Default for RandomAgent {
    fn default() -> Self {
        RandomAgent {
            rng: ChaCha8Rng::seed_from_u64(0),
        }
    }
}

impl RandomAgent {
    fn one(&mut self, pos: (i32, i32)) -> String {
        let d = DIRS[self.rng.gen_range(0..4)];
        match self.rng.gen_range(0..5) {
            0 => {
                let x = pos.0 + self.rng.gen_range(-5..=5);
                let y = pos.1 + self.rng.gen_range(-5..=5);
                format!("move(x={}, y={})", x.max(0), y.max(0))
            }
            1 => format!("use(direction=\"{d}\")"),
            2 => format!("interact(direction=\"{d}\")"),
            3 => format!("choose_item(slot_index={})", self.rng.gen_range(0..12)),
            _ => format!("choose_option(option_index={})", self.rng.gen_range(0..4)),
        }
    }
}

impl Agent for RandomAgent {
    fn name(&self) -> &str {
        "random"
    }

    fn reset(&mut self, _task: &TaskSpec, seed: u64) {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }

    fn act(&mut self, last: &StepOutcome) -> Option<Vec<String>> {
        let pos = last.observation.text.as_ref().map(|t| t.position).unwrap_or((0, 0));
        let n = self.rng.gen_range(1..=2);
        Some((0..n).map(|_| self.one(pos)).collect())
    }
}

/// Steps next to the nearest visible monster and swings in the same step.
/// Needs the text modality; a wider observation window helps it spot
/// targets.
#[derive(Default)]
pub struct ChaserAgent {
    armed: bool,
}

fn has_monster(b: &Block) -> bool {
    b.object.iter().any(|o| o.starts_with("Monster:"))
}

fn standable(b: &Block) -> bool {
    b.npc.is_none()
        && b.object.iter().any(|o| o == "Passable: True")
        && !b.object.iter().any(|o| o.starts_with("Monster:") || o.starts_with("Animal:"))
}

/// Nearest hittable monster and the tile to hit it from, both relative to
/// the player.
fn plan(t: &TextObservation) -> Option<((i32, i32), (i32, i32))> {
    let at: BTreeMap<(i32, i32), &Block> = t.surrounding_blocks.iter().map(|b| (b.position, b)).collect();
    let mut targets: Vec<(i32, i32)> = t
        .surrounding_blocks
        .iter()
        .filter(|b| has_monster(b) && !b.object.iter().any(|o| o.contains("shelled")))
        .map(|b| b.position)
        .collect();
    targets.sort_by_key(|&p| (manhattan(p, (0, 0)), p));
    targets.into_iter().find_map(|m| {
        [(0, -1), (0, 1), (-1, 0), (1, 0)]
            .iter()
            .map(|d| (m.0 + d.0, m.1 + d.1))
            .filter(|p| *p == (0, 0) || at.get(p).is_some_and(|b| standable(b)))
            .min_by_key(|&p| (manhattan(p, (0, 0)), p))
            .map(|stand| (m, stand))
    })
}

fn facing(d: (i32, i32)) -> &'static str {
    match d {
        (0, -1) => "up",
        (0, 1) => "down",
        (-1, 0) => "left",
        _ => "right",
    }
}

impl Agent for ChaserAgent {
    fn name(&self) -> &str {
        "chaser"
    }

    fn reset(&mut self, _task: &TaskSpec, _seed: u64) {
        self.armed = false;
    }

    fn act(&mut self, last: &StepOutcome) -> Option<Vec<String>> {
        let t = last.observation.text.as_ref()?;
        if !self.armed {
            self.armed = true;
            if let Some(i) = t.toolbar.iter().position(|s| s.contains("Sword")) {
                return Some(vec![format!("choose_item(slot_index={i})")]);
            }
        }
        let Some((m, stand)) = plan(t) else {
            // Nothing in reach: swing in place, which lets time pass.
            return Some(vec![format!("use(direction=\"{}\")", t.facing)]);
        };
        let swing = format!("use(direction=\"{}\")", facing((m.0 - stand.0, m.1 - stand.1)));
        if stand == (0, 0) {
            return Some(vec![swing]);
        }
        let (x, y) = (t.position.0 + stand.0, t.position.1 + stand.1);
        Some(vec![format!("move(x={x}, y={y})"), swing])
    }
}
