//! Scripted solutions. Each task maps to a list of steps; a step is one
//! action, a pair, or a repeated block.

use crate::tasks::TaskSuite;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::sync::OnceLock;

pub const BUNDLED: [&str; 5] = [
    include_str!("../../data/oracles/farming.yaml"),
    include_str!("../../data/oracles/crafting.yaml"),
    include_str!("../../data/oracles/exploration.yaml"),
    include_str!("../../data/oracles/combat.yaml"),
    include_str!("../../data/oracles/social.yaml"),
];

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum RawStep {
    One(String),
    Pair(Vec<String>),
    Repeat { repeat: u32, step: Vec<String> },
}

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("oracle yaml: {0}")]
    Yaml(#[from] serde_yaml::Error),
    #[error("oracle for {0} appears twice")]
    Duplicate(String),
    #[error("oracle for unknown task {0}")]
    UnknownTask(String),
    #[error("oracle {task}: step {index} has {n} actions")]
    StepSize { task: String, index: usize, n: usize },
}

/// Task name to expanded steps.
#[derive(Clone, Debug, Default)]
pub struct OracleBook {
    scripts: BTreeMap<String, Vec<Vec<String>>>,
}

impl OracleBook {
    pub fn parse(sources: &[&str]) -> Result<OracleBook, OracleError> {
        let mut scripts = BTreeMap::new();
        for src in sources {
            let doc: BTreeMap<String, BTreeMap<String, Vec<RawStep>>> = serde_yaml::from_str(src)?;
            for (task, raw) in doc.into_values().flatten() {
                let mut steps = Vec::new();
                for r in raw {
                    let (n, step) = match r {
                        RawStep::One(a) => (1, vec![a]),
                        RawStep::Pair(v) => (1, v),
                        RawStep::Repeat { repeat, step } => (repeat, step),
                    };
                    if step.is_empty() || step.len() > crate::env::MAX_ACTIONS {
                        return Err(OracleError::StepSize {
                            task,
                            index: steps.len(),
                            n: step.len(),
                        });
                    }
                    steps.extend(std::iter::repeat_n(step, n as usize));
                }
                if scripts.insert(task.clone(), steps).is_some() {
                    return Err(OracleError::Duplicate(task));
                }
            }
        }
        Ok(OracleBook { scripts })
    }

    pub fn bundled() -> &'static OracleBook {
        static B: OnceLock<OracleBook> = OnceLock::new();
        B.get_or_init(|| OracleBook::parse(&BUNDLED).expect("bundled oracles parse"))
    }

    /// Every script must name a task in `suite`.
    pub fn check(&self, suite: &TaskSuite) -> Result<(), OracleError> {
        match self.scripts.keys().find(|t| suite.get(t).is_none()) {
            Some(t) => Err(OracleError::UnknownTask(t.clone())),
            None => Ok(()),
        }
    }

    pub fn get(&self, task: &str) -> Option<&[Vec<String>]> {
        self.scripts.get(task).map(|v| v.as_slice())
    }

    pub fn tasks(&self) -> impl Iterator<Item = &str> {
        self.scripts.keys().map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.scripts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scripts.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expands_repeats() {
        let b = OracleBook::parse(&[r#"
Combat:
  t:
    - 'choose_item(slot_index=6)'
    - ['use(direction="down")', 'use(direction="down")']
    - repeat: 3
      step: ['use(direction="up")']
"#])
        .unwrap();
        let s = b.get("t").unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s[1].len(), 2);
        assert_eq!(s[4], vec![r#"use(direction="up")"#.to_string()]);
    }

    #[test]
    fn rejects_three_action_steps() {
        let r = OracleBook::parse(&["X:\n  t:\n    - [a, b, c]\n"]);
        assert!(matches!(r, Err(OracleError::StepSize { .. })));
    }
}
