//! One environment instance: a loaded task, its world and evaluator. The
//! server wraps this behind a socket; the harness can also drive it
//! in-process.

use crate::content::Content;
use crate::evaluator::{project, EvalResult, EvalState};
use crate::mechanics::action::Action;
use crate::mechanics::execute::{execute, ExecConfig};
use crate::observation::{observe, ObsConfig, ObservationPayload, ObserveError};
use crate::tasks::{setup_task, TaskError, TaskSpec, TaskSuite};
use crate::world::day::advance_minutes;
use crate::world::events::Event;
use crate::world::WorldState;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::{Duration, Instant};

/// Most actions one step may carry.
pub const MAX_ACTIONS: usize = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    pub observation: ObsConfig,
    pub navigate: bool,
    /// Let wall-clock time drive the in-game clock between requests.
    pub realtime: bool,
}

/// Wall-clock source for real-time mode. Tests substitute a manual clock.
pub trait TimeSource: Send {
    fn now(&self) -> Duration;
}

pub struct SystemTime(Instant);

impl Default for SystemTime {
    fn default() -> Self {
        SystemTime(Instant::now())
    }
}

impl TimeSource for SystemTime {
    fn now(&self) -> Duration {
        self.0.elapsed()
    }
}

/// A clock that only moves when told to.
#[derive(Clone, Default)]
pub struct ManualTime(Arc<std::sync::Mutex<Duration>>);

impl ManualTime {
    pub fn advance(&self, d: Duration) {
        *self.0.lock().unwrap() += d;
    }
}

impl TimeSource for ManualTime {
    fn now(&self) -> Duration {
        *self.0.lock().unwrap()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionReport {
    pub action: String,
    pub ok: bool,
    pub message: String,
    pub ticks_consumed: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<Event>,
    /// The action string did not parse; later actions in the step were skipped.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub parse_error: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub observation: ObservationPayload,
    pub results: Vec<ActionReport>,
    pub eval: EvalResult,
    pub steps_used: u32,
    pub max_steps: u32,
    pub done: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum EnvError {
    #[error("no task loaded")]
    NoTask,
    #[error("a step carries at most {MAX_ACTIONS} actions, got {0}")]
    TooManyActions(usize),
    #[error("a step needs at least one action")]
    NoActions,
    #[error("episode is over")]
    Done,
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Observe(#[from] ObserveError),
}

#[derive(Clone, Debug)]
pub struct Episode {
    pub task: TaskSpec,
    pub seed: u64,
    pub world: WorldState,
    pub eval: EvalState,
    pub steps_used: u32,
    pub done: bool,
}

pub struct Env {
    content: Arc<Content>,
    suite: Arc<TaskSuite>,
    pub config: EnvConfig,
    episode: Option<Episode>,
    time: Box<dyn TimeSource>,
    /// Wall time already turned into in-game minutes, and the leftover.
    synced: Duration,
    frozen: bool,
}

impl Env {
    pub fn new(content: Arc<Content>, suite: Arc<TaskSuite>, config: EnvConfig) -> Env {
        Env::with_time(content, suite, config, Box::new(SystemTime::default()))
    }

    pub fn with_time(content: Arc<Content>, suite: Arc<TaskSuite>, config: EnvConfig, time: Box<dyn TimeSource>) -> Env {
        let synced = time.now();
        Env {
            content,
            suite,
            config,
            episode: None,
            time,
            synced,
            frozen: false,
        }
    }

    pub fn suite(&self) -> &TaskSuite {
        &self.suite
    }

    pub fn content(&self) -> &Content {
        &self.content
    }

    pub fn episode(&self) -> Option<&Episode> {
        self.episode.as_ref()
    }

    pub fn world(&self) -> Option<&WorldState> {
        self.episode.as_ref().map(|e| &e.world)
    }

    /// Applies a new configuration. Switching real-time on starts the clock
    /// from now.
    pub fn configure(&mut self, config: EnvConfig) {
        self.catch_up();
        self.config = config;
        self.synced = self.time.now();
    }

    /// Stops wall time from reaching the world until [`Env::resume`].
    pub fn pause(&mut self) {
        self.catch_up();
        self.frozen = true;
    }

    pub fn resume(&mut self) {
        self.frozen = false;
        self.synced = self.time.now();
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    /// Runs the world forward by the wall time elapsed since the last sync,
    /// when real-time mode is on and not paused.
    pub fn catch_up(&mut self) {
        let now = self.time.now();
        if !self.config.realtime || self.frozen {
            self.synced = now;
            return;
        }
        let ms_per_min = self.content.pack.constants.realtime_ms_per_minute as u128;
        let elapsed = now.saturating_sub(self.synced).as_millis();
        let minutes = (elapsed / ms_per_min) as u32;
        if minutes == 0 {
            return;
        }
        self.synced += Duration::from_millis((minutes as u128 * ms_per_min) as u64);
        if let Some(ep) = self.episode.as_mut() {
            advance_minutes(&mut ep.world, &self.content.pack, minutes);
        }
    }

    pub fn reset(&mut self, task: &str, seed: u64) -> Result<StepOutcome, EnvError> {
        let spec = self
            .suite
            .get(task)
            .ok_or_else(|| TaskError::UnknownTask(task.to_string()))?
            .clone();
        let (world, cfg) = setup_task(&self.content, &spec, seed)?;
        let mut eval = EvalState::new(cfg).expect("suite evaluators are registered");
        eval.evaluate(project(&world, &self.content.pack));
        self.episode = Some(Episode {
            task: spec,
            seed,
            world,
            eval,
            steps_used: 0,
            done: false,
        });
        self.synced = self.time.now();
        self.outcome(vec![])
    }

    /// Current observation without stepping.
    pub fn observe(&mut self) -> Result<StepOutcome, EnvError> {
        if self.episode.is_none() {
            return Err(EnvError::NoTask);
        }
        self.catch_up();
        self.outcome(vec![])
    }

    pub fn step<S: AsRef<str>>(&mut self, actions: &[S]) -> Result<StepOutcome, EnvError> {
        if actions.len() > MAX_ACTIONS {
            return Err(EnvError::TooManyActions(actions.len()));
        }
        if actions.is_empty() {
            return Err(EnvError::NoActions);
        }
        match &self.episode {
            None => return Err(EnvError::NoTask),
            Some(e) if e.done => return Err(EnvError::Done),
            _ => {}
        }
        self.catch_up();
        let exec = ExecConfig {
            navigate_enabled: self.config.navigate,
        };
        let pack = &self.content.pack;
        let ep = self.episode.as_mut().unwrap();
        let mut results = Vec::with_capacity(actions.len());
        for a in actions {
            let a = a.as_ref();
            match Action::parse(a) {
                Ok(action) => {
                    let r = execute(&mut ep.world, pack, &action, &exec);
                    results.push(ActionReport {
                        action: action.to_string(),
                        ok: r.ok,
                        message: r.message,
                        ticks_consumed: r.ticks_consumed,
                        events: r.events,
                        parse_error: false,
                    });
                }
                Err(e) => {
                    results.push(ActionReport {
                        action: a.to_string(),
                        ok: false,
                        message: e.to_string(),
                        ticks_consumed: 0,
                        events: vec![],
                        parse_error: true,
                    });
                    break;
                }
            }
        }
        ep.steps_used += 1;
        let r = ep.eval.evaluate(project(&ep.world, pack));
        ep.eval.steps_used = ep.steps_used;
        ep.done = r.completed || ep.steps_used >= ep.task.max_steps();
        self.outcome(results)
    }

    fn outcome(&self, results: Vec<ActionReport>) -> Result<StepOutcome, EnvError> {
        let ep = self.episode.as_ref().ok_or(EnvError::NoTask)?;
        let observation = observe(&ep.world, &self.content.pack, &self.config.observation)?;
        Ok(StepOutcome {
            observation,
            results,
            eval: ep.eval.result(),
            steps_used: ep.steps_used,
            max_steps: ep.task.max_steps(),
            done: ep.done,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observation::Modality;

    fn env(realtime: bool, time: ManualTime) -> Env {
        let cfg = EnvConfig {
            observation: ObsConfig {
                modality: Modality::TextOnly,
                ..Default::default()
            },
            navigate: false,
            realtime,
        };
        Env::with_time(Content::shared(), Arc::new(TaskSuite::bundled().clone()), cfg, Box::new(time))
    }

    fn minutes(e: &Env) -> u32 {
        e.world().unwrap().clock.minutes_since_6am
    }

    #[test]
    fn paused_world_ignores_wall_time() {
        let t = ManualTime::default();
        let mut e = env(false, t.clone());
        e.reset("go_to_bus_stop", 1).unwrap();
        let before = minutes(&e);
        t.advance(Duration::from_secs(60));
        e.observe().unwrap();
        assert_eq!(minutes(&e), before);
    }

    #[test]
    fn realtime_world_follows_wall_time() {
        let t = ManualTime::default();
        let mut e = env(true, t.clone());
        e.reset("go_to_bus_stop", 1).unwrap();
        let before = minutes(&e);
        t.advance(Duration::from_secs(7));
        e.observe().unwrap();
        assert_eq!(minutes(&e), before + 10);
        e.pause();
        t.advance(Duration::from_secs(7));
        e.observe().unwrap();
        assert_eq!(minutes(&e), before + 10);
    }

    #[test]
    fn three_actions_leave_the_world_alone() {
        let mut e = env(false, ManualTime::default());
        e.reset("go_to_bus_stop", 1).unwrap();
        let w = e.world().unwrap().clone();
        let a = "move(x=5, y=7)";
        assert!(matches!(e.step(&[a, a, a]), Err(EnvError::TooManyActions(3))));
        assert_eq!(e.world().unwrap(), &w);
        assert_eq!(e.episode().unwrap().steps_used, 0);
    }

    #[test]
    fn bad_action_skips_the_rest() {
        let mut e = env(false, ManualTime::default());
        e.reset("go_to_bus_stop", 1).unwrap();
        let out = e.step(&["fly()", "move(x=5, y=7)"]).unwrap();
        assert_eq!(out.results.len(), 1);
        assert!(out.results[0].parse_error);
        assert_eq!(e.world().unwrap().player.pos(), (9, 3));
    }

    #[test]
    fn unknown_task_is_an_error() {
        let mut e = env(false, ManualTime::default());
        assert!(matches!(
            e.reset("fly_to_the_moon", 1),
            Err(EnvError::Task(TaskError::UnknownTask(_)))
        ));
        assert!(matches!(e.observe(), Err(EnvError::NoTask)));
    }
}
