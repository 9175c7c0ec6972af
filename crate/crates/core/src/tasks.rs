//! Task suites. One YAML document per category: the top-level key is the
//! category, each entry below it is a task keyed by its name.
//!
//! ```yaml
//! Farming:
//!   clear_10_weeds_with_scythe:
//!     id: 0
//!     object: Weeds
//!     quantity: 10
//!     tool: Scythe
//!     save: save_new
//!     init_commands: []
//!     evaluator: clear
//!     difficulty: easy
//! ```

use crate::content::Content;
use crate::evaluator::{EvalConfig, Registry};
use crate::world::commands::{apply, SimCommand};
use crate::world::{init_world, WorldError, WorldState};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

pub const BUNDLED: [(&str, &str); 5] = [
    ("farming", include_str!("../data/tasks/farming.yaml")),
    ("crafting", include_str!("../data/tasks/crafting.yaml")),
    ("exploration", include_str!("../data/tasks/exploration.yaml")),
    ("combat", include_str!("../data/tasks/combat.yaml")),
    ("social", include_str!("../data/tasks/social.yaml")),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Farming,
    Crafting,
    Exploration,
    Combat,
    Social,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Farming,
        Category::Crafting,
        Category::Exploration,
        Category::Combat,
        Category::Social,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Farming => "Farming",
            Category::Crafting => "Crafting",
            Category::Exploration => "Exploration",
            Category::Combat => "Combat",
            Category::Social => "Social",
        }
    }

    pub fn parse(s: &str) -> Option<Category> {
        Category::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [Difficulty::Easy, Difficulty::Medium, Difficulty::Hard];

    pub fn max_steps(self) -> u32 {
        match self {
            Difficulty::Easy => 30,
            Difficulty::Medium => 50,
            Difficulty::Hard => 150,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Difficulty::Easy => "Easy",
            Difficulty::Medium => "Medium",
            Difficulty::Hard => "Hard",
        }
    }

    pub fn parse(s: &str) -> Option<Difficulty> {
        Difficulty::ALL.into_iter().find(|d| d.name().eq_ignore_ascii_case(s))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    /// Also the prompt text.
    pub name: String,
    pub category: Category,
    pub id: u32,
    pub object: String,
    pub quantity: u32,
    pub tool: Vec<String>,
    pub save: String,
    pub init_commands: Vec<SimCommand>,
    pub evaluator: String,
    pub difficulty: Difficulty,
}

impl TaskSpec {
    pub fn max_steps(&self) -> u32 {
        self.difficulty.max_steps()
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            evaluator: self.evaluator.clone(),
            object: self.object.clone(),
            quantity: self.quantity,
            max_steps: self.max_steps(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSuite {
    /// In file order within each category; categories in canonical order.
    pub tasks: Vec<TaskSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaskError {
    #[error("yaml: {0}")]
    Yaml(String),
    #[error("unknown category {0:?}")]
    UnknownCategory(String),
    #[error("task {task}: {msg}")]
    Field { task: String, msg: String },
    #[error("duplicate id {id} in {category}")]
    DuplicateId { category: Category, id: u32 },
    #[error("duplicate task name {0:?}")]
    DuplicateName(String),
    #[error("task {task}: unknown evaluator {evaluator:?}")]
    UnknownEvaluator { task: String, evaluator: String },
    #[error("task {task}: unknown save {save:?}")]
    UnknownSave { task: String, save: String },
    #[error("task {task}: bad init command {command:?}: {source}")]
    Command { task: String, command: String, source: WorldError },
    #[error("task {task}: init command #{index} `{command}` failed: {source}")]
    Setup {
        task: String,
        index: usize,
        command: String,
        source: WorldError,
    },
    #[error("unknown task {0:?}")]
    UnknownTask(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    id: u32,
    object: serde_yaml::Value,
    quantity: u32,
    #[serde(default)]
    tool: Option<serde_yaml::Value>,
    save: String,
    #[serde(default)]
    init_commands: Vec<String>,
    evaluator: String,
    difficulty: String,
}

fn scalar_string(v: &serde_yaml::Value) -> Option<String> {
    match v {
        serde_yaml::Value::String(s) => Some(s.clone()),
        serde_yaml::Value::Number(n) => Some(n.to_string()),
        serde_yaml::Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn tools(v: Option<serde_yaml::Value>) -> Result<Vec<String>, String> {
    match v {
        None | Some(serde_yaml::Value::Null) => Ok(vec![]),
        Some(serde_yaml::Value::Sequence(items)) => items
            .iter()
            .map(|i| scalar_string(i).ok_or_else(|| "tool entries must be strings".to_string()))
            .collect(),
        Some(v) => {
            let s = scalar_string(&v).ok_or("tool must be a string or list")?;
            Ok(s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect())
        }
    }
}

/// Parses a suite document. Saves are checked against `saves`.
pub fn parse_task_suite_with(src: &str, saves: &BTreeSet<String>) -> Result<TaskSuite, TaskError> {
    let doc: serde_yaml::Mapping = serde_yaml::from_str(src).map_err(|e| TaskError::Yaml(e.to_string()))?;
    let mut suite = TaskSuite::default();
    for (k, entries) in doc {
        let cat_name = scalar_string(&k).unwrap_or_default();
        let category = Category::parse(&cat_name).ok_or(TaskError::UnknownCategory(cat_name))?;
        let entries = match entries {
            serde_yaml::Value::Mapping(m) => m,
            serde_yaml::Value::Null => Default::default(),
            _ => return Err(TaskError::Yaml(format!("{category} must map task names to tasks"))),
        };
        for (name, body) in entries {
            let name = scalar_string(&name).ok_or_else(|| TaskError::Yaml("task names must be strings".into()))?;
            let field = |msg: String| TaskError::Field { task: name.clone(), msg };
            let raw: RawTask = serde_yaml::from_value(body).map_err(|e| field(e.to_string()))?;
            let object = scalar_string(&raw.object).ok_or_else(|| field("object must be a scalar".into()))?;
            if raw.quantity == 0 {
                return Err(field("quantity must be at least 1".into()));
            }
            let difficulty = Difficulty::parse(&raw.difficulty).ok_or_else(|| field(format!("unknown difficulty {:?}", raw.difficulty)))?;
            if !Registry::builtin().contains(&raw.evaluator) {
                return Err(TaskError::UnknownEvaluator {
                    task: name,
                    evaluator: raw.evaluator,
                });
            }
            if !saves.contains(&raw.save) {
                return Err(TaskError::UnknownSave {
                    task: name,
                    save: raw.save,
                });
            }
            let mut init_commands = Vec::with_capacity(raw.init_commands.len());
            for c in &raw.init_commands {
                let cmd = SimCommand::parse(c).map_err(|source| TaskError::Command {
                    task: name.clone(),
                    command: c.clone(),
                    source,
                })?;
                init_commands.push(cmd);
            }
            suite.tasks.push(TaskSpec {
                tool: tools(raw.tool).map_err(field)?,
                name,
                category,
                id: raw.id,
                object,
                quantity: raw.quantity,
                save: raw.save,
                init_commands,
                evaluator: raw.evaluator,
                difficulty,
            });
        }
    }
    suite.check_unique()?;
    Ok(suite)
}

/// Parses against the bundled saves.
pub fn parse_task_suite(src: &str) -> Result<TaskSuite, TaskError> {
    let saves = Content::shared().saves.keys().cloned().collect();
    parse_task_suite_with(src, &saves)
}

impl TaskSuite {
    /// The shipped suite.
    pub fn bundled() -> &'static TaskSuite {
        static S: std::sync::OnceLock<TaskSuite> = std::sync::OnceLock::new();
        S.get_or_init(|| {
            let mut suite = TaskSuite::default();
            for (file, src) in BUNDLED {
                let part = parse_task_suite(src).unwrap_or_else(|e| panic!("bundled {file}.yaml: {e}"));
                suite.merge(part).expect("bundled tasks are unique");
            }
            suite
        })
    }

    pub fn merge(&mut self, other: TaskSuite) -> Result<(), TaskError> {
        self.tasks.extend(other.tasks);
        self.tasks.sort_by_key(|t| t.category);
        self.check_unique()
    }

    fn check_unique(&self) -> Result<(), TaskError> {
        let mut ids = BTreeSet::new();
        let mut names = BTreeSet::new();
        for t in &self.tasks {
            if !ids.insert((t.category, t.id)) {
                return Err(TaskError::DuplicateId {
                    category: t.category,
                    id: t.id,
                });
            }
            if !names.insert(t.name.as_str()) {
                return Err(TaskError::DuplicateName(t.name.clone()));
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&TaskSpec> {
        self.tasks.iter().find(|t| t.name == name)
    }

    pub fn category(&self, c: Category) -> impl Iterator<Item = &TaskSpec> {
        self.tasks.iter().filter(move |t| t.category == c)
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }
}

/// Loads the save, reseeds it and runs the init commands in order.
pub fn setup_task(content: &Content, spec: &TaskSpec, seed: u64) -> Result<(WorldState, EvalConfig), TaskError> {
    let mut world = init_world(content, &spec.save, seed).map_err(|_| TaskError::UnknownSave {
        task: spec.name.clone(),
        save: spec.save.clone(),
    })?;
    for (index, cmd) in spec.init_commands.iter().enumerate() {
        apply(&mut world, content, cmd).map_err(|source| TaskError::Setup {
            task: spec.name.clone(),
            index,
            command: cmd.to_string(),
            source,
        })?;
    }
    Ok((world, spec.eval_config()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: &str = r#"
Farming:
  clear_10_weeds_with_scythe:
    id: 0
    object: Weeds
    quantity: 10
    tool: Scythe
    save: save_new
    evaluator: clear
    difficulty: easy
"#;

    #[test]
    fn parses_entry_with_defaults() {
        let s = parse_task_suite(ONE).unwrap();
        let t = &s.tasks[0];
        assert_eq!(t.name, "clear_10_weeds_with_scythe");
        assert_eq!(t.tool, vec!["Scythe"]);
        assert!(t.init_commands.is_empty());
        assert_eq!(t.max_steps(), 30);
    }

    #[test]
    fn rejects_unknown_evaluator_and_duplicates() {
        let bad = ONE.replace("evaluator: clear", "evaluator: teleport");
        assert!(matches!(parse_task_suite(&bad), Err(TaskError::UnknownEvaluator { .. })));
        let dup = format!("{ONE}  other:\n    id: 0\n    object: Stone\n    quantity: 1\n    save: save_new\n    evaluator: clear\n    difficulty: easy\n");
        assert!(matches!(parse_task_suite(&dup), Err(TaskError::DuplicateId { .. })));
        let save = ONE.replace("save_new", "save_moon");
        assert!(matches!(parse_task_suite(&save), Err(TaskError::UnknownSave { .. })));
        let cmd = ONE.replace("difficulty: easy", "difficulty: easy\n    init_commands: [\"fly(1)\"]");
        assert!(matches!(parse_task_suite(&cmd), Err(TaskError::Command { .. })));
    }

    #[test]
    fn empty_init_matches_bare_save() {
        let c = Content::shared();
        let s = parse_task_suite(ONE).unwrap();
        let (w, cfg) = setup_task(&c, &s.tasks[0], 7).unwrap();
        assert_eq!(w, init_world(&c, "save_new", 7).unwrap());
        assert_eq!(cfg.max_steps, 30);
    }

    #[test]
    fn bundled_suite_covers_every_evaluator() {
        let s = TaskSuite::bundled();
        let used: BTreeSet<&str> = s.tasks.iter().map(|t| t.evaluator.as_str()).collect();
        for k in Registry::builtin().keys() {
            assert!(used.contains(k), "no task uses {k}");
        }
        for c in Category::ALL {
            assert!(s.category(c).count() >= 2, "{c}");
        }
    }

    #[test]
    fn bundled_tasks_set_up() {
        let c = Content::shared();
        for t in &TaskSuite::bundled().tasks {
            setup_task(&c, t, 1).unwrap_or_else(|e| panic!("{e}"));
        }
    }
}
