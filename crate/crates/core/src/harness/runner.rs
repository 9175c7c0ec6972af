//! Batch runs: every task × repeat, spread over worker instances, with
//! per-run records and trajectory logs.

use super::agent::Agent;
use super::trajectory::{Header, StepLog, Trajectory};
use crate::content::Content;
use crate::env::{Env, EnvConfig, ManualTime, StepOutcome};
use crate::protocol::{Client, Server};
use crate::tasks::{Category, Difficulty, TaskSpec, TaskSuite};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

/// Something the runner can drive: an in-process environment or a
/// connection to a server.
pub trait Instance: Send {
    fn reset(&mut self, task: &str, seed: u64) -> Result<StepOutcome, String>;
    fn step(&mut self, actions: &[String]) -> Result<StepOutcome, String>;
    /// Lets `d` of agent thinking time pass.
    fn think(&mut self, d: Duration);
}

/// In-process environment on a simulated wall clock, so real-time runs
/// stay reproducible.
pub struct LocalInstance {
    pub env: Env,
    pub time: ManualTime,
}

impl LocalInstance {
    pub fn new(content: Arc<Content>, suite: Arc<TaskSuite>, config: EnvConfig) -> LocalInstance {
        let time = ManualTime::default();
        LocalInstance {
            env: Env::with_time(content, suite, config, Box::new(time.clone())),
            time,
        }
    }
}

impl Instance for LocalInstance {
    fn reset(&mut self, task: &str, seed: u64) -> Result<StepOutcome, String> {
        self.env.reset(task, seed).map_err(|e| e.to_string())
    }

    fn step(&mut self, actions: &[String]) -> Result<StepOutcome, String> {
        self.env.step(actions).map_err(|e| e.to_string())
    }

    fn think(&mut self, d: Duration) {
        self.time.advance(d);
    }
}

/// A server on its own port plus the client that controls it.
pub struct RemoteInstance {
    client: Option<Client>,
    server: Option<crate::protocol::ServerHandle>,
}

impl RemoteInstance {
    pub fn spawn(content: Arc<Content>, suite: Arc<TaskSuite>, config: EnvConfig) -> Result<RemoteInstance, String> {
        let env = Env::new(content, suite, config);
        let server = Server::bind("127.0.0.1:0", env).map_err(|e| e.to_string())?.spawn();
        let client = Client::connect(server.addr).map_err(|e| e.to_string())?;
        Ok(RemoteInstance {
            client: Some(client),
            server: Some(server),
        })
    }

    fn client(&mut self) -> &mut Client {
        self.client.as_mut().expect("client lives until drop")
    }
}

impl Drop for RemoteInstance {
    fn drop(&mut self) {
        if let Some(c) = self.client.take() {
            let _ = c.shutdown();
        }
        if let Some(s) = self.server.take() {
            let _ = s.join();
        }
    }
}

impl Instance for RemoteInstance {
    fn reset(&mut self, task: &str, seed: u64) -> Result<StepOutcome, String> {
        self.client().reset(task, seed).map_err(|e| e.to_string())
    }

    fn step(&mut self, actions: &[String]) -> Result<StepOutcome, String> {
        self.client().step(actions).map_err(|e| e.to_string())
    }

    fn think(&mut self, d: Duration) {
        if !d.is_zero() {
            std::thread::sleep(d);
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transport {
    #[default]
    InProcess,
    /// One TCP server per worker on an ephemeral local port.
    Tcp,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub repeats: u32,
    /// Repeat r runs with seed `base_seed + r`.
    pub base_seed: u64,
    pub parallelism: usize,
    pub env: EnvConfig,
    pub transport: Transport,
    /// Agent latency charged before every step.
    pub think_time: Duration,
    pub log_dir: Option<PathBuf>,
    pub full_images: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            repeats: 3,
            base_seed: 1,
            parallelism: 1,
            env: EnvConfig::default(),
            transport: Transport::InProcess,
            think_time: Duration::ZERO,
            log_dir: None,
            full_images: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub task: String,
    pub category: Category,
    pub difficulty: Difficulty,
    pub agent: String,
    pub seed: u64,
    pub steps_used: u32,
    pub max_steps: u32,
    pub completed: bool,
    pub current_quantity: u32,
    pub wall_time_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunRecord {
    /// The record without its wall time, which is the one field that
    /// legitimately varies between identical runs.
    pub fn timeless(&self) -> RunRecord {
        RunRecord {
            wall_time_ms: 0,
            ..self.clone()
        }
    }
}

pub struct Run {
    pub record: RunRecord,
    pub trajectory: Trajectory,
}

pub type AgentFactory<'a> = dyn Fn() -> Box<dyn Agent> + Sync + 'a;

/// Plays one episode to completion or budget.
pub fn run_episode(inst: &mut dyn Instance, agent: &mut dyn Agent, spec: &TaskSpec, seed: u64, cfg: &RunConfig) -> Run {
    let start = Instant::now();
    let mut record = RunRecord {
        task: spec.name.clone(),
        category: spec.category,
        difficulty: spec.difficulty,
        agent: agent.name().to_string(),
        seed,
        steps_used: 0,
        max_steps: spec.max_steps(),
        completed: false,
        current_quantity: 0,
        wall_time_ms: 0,
        trajectory: None,
        error: None,
    };
    let mut traj = Trajectory {
        header: Some(Header {
            task: spec.name.clone(),
            seed,
            agent: agent.name().to_string(),
            config: cfg.env,
        }),
        steps: Vec::new(),
    };
    agent.reset(spec, seed);
    let mut out = match inst.reset(&spec.name, seed) {
        Ok(o) => o,
        Err(e) => {
            record.error = Some(e);
            return Run { record, trajectory: traj };
        }
    };
    traj.steps.push(StepLog::new(0, vec![], &out, cfg.full_images));
    while !out.done {
        inst.think(cfg.think_time);
        let Some(actions) = agent.act(&out) else { break };
        out = match inst.step(&actions) {
            Ok(o) => o,
            Err(e) => {
                record.error = Some(e);
                break;
            }
        };
        traj.steps.push(StepLog::new(out.steps_used, actions, &out, cfg.full_images));
    }
    record.steps_used = out.steps_used;
    record.completed = out.eval.completed;
    record.current_quantity = out.eval.current_quantity;
    record.wall_time_ms = start.elapsed().as_millis() as u64;
    Run { record, trajectory: traj }
}

pub fn log_file_name(task: &str, seed: u64) -> String {
    let safe: String = task
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '-' })
        .collect();
    format!("{safe}__seed{seed}.jsonl")
}

fn new_instance(content: &Arc<Content>, suite: &Arc<TaskSuite>, cfg: &RunConfig) -> Result<Box<dyn Instance>, String> {
    Ok(match cfg.transport {
        Transport::InProcess => Box::new(LocalInstance::new(content.clone(), suite.clone(), cfg.env)),
        Transport::Tcp => Box::new(RemoteInstance::spawn(content.clone(), suite.clone(), cfg.env)?),
    })
}

/// Runs `tasks` × `repeats`. Results come back in (task, repeat) order no
/// matter how many workers ran them.
pub fn run_suite(content: &Arc<Content>, suite: &Arc<TaskSuite>, tasks: &[TaskSpec], agent: &AgentFactory, cfg: &RunConfig) -> Vec<Run> {
    let jobs: Vec<(usize, u64)> = (0..tasks.len())
        .flat_map(|t| (0..cfg.repeats as u64).map(move |r| (t, cfg.base_seed + r)))
        .collect();
    if let Some(dir) = &cfg.log_dir {
        let _ = std::fs::create_dir_all(dir);
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Run>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    let workers = cfg.parallelism.clamp(1, jobs.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| {
                let mut inst: Option<Box<dyn Instance>> = None;
                loop {
                    let j = next.fetch_add(1, Ordering::SeqCst);
                    let Some(&(t, seed)) = jobs.get(j) else { break };
                    let spec = &tasks[t];
                    if inst.is_none() {
                        match new_instance(content, suite, cfg) {
                            Ok(i) => inst = Some(i),
                            Err(e) => {
                                slots.lock().unwrap()[j] = Some(failed(spec, seed, e));
                                continue;
                            }
                        }
                    }
                    let mut a = agent();
                    let mut run = run_episode(inst.as_mut().unwrap().as_mut(), a.as_mut(), spec, seed, cfg);
                    if let Some(dir) = &cfg.log_dir {
                        let path = dir.join(log_file_name(&spec.name, seed));
                        match run.trajectory.save(&path) {
                            Ok(()) => run.record.trajectory = Some(path.display().to_string()),
                            Err(e) => {
                                run.record.error.get_or_insert(format!("log: {e}"));
                            }
                        }
                    }
                    slots.lock().unwrap()[j] = Some(run);
                }
            });
        }
    });
    slots.into_inner().unwrap().into_iter().map(|r| r.expect("every job ran")).collect()
}

fn failed(spec: &TaskSpec, seed: u64, e: String) -> Run {
    Run {
        record: RunRecord {
            task: spec.name.clone(),
            category: spec.category,
            difficulty: spec.difficulty,
            agent: String::new(),
            seed,
            steps_used: 0,
            max_steps: spec.max_steps(),
            completed: false,
            current_quantity: 0,
            wall_time_ms: 0,
            trajectory: None,
            error: Some(format!("instance: {e}")),
        },
        trajectory: Trajectory::default(),
    }
}

/// Result of checking a logged trajectory against a fresh run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayReport {
    pub steps: u32,
    /// First step whose digest, results or evaluation differed.
    pub divergence: Option<u32>,
    pub completed: bool,
}

/// Re-executes the logged actions on the same task and seed.
pub fn replay(content: &Arc<Content>, suite: &Arc<TaskSuite>, traj: &Trajectory) -> Result<ReplayReport, String> {
    let h = traj.header.as_ref().ok_or("log has no header")?;
    let mut inst = LocalInstance::new(content.clone(), suite.clone(), h.config);
    let mut out = inst.reset(&h.task, h.seed)?;
    let mut divergence = None;
    let full = traj.steps.iter().any(|s| s.observation.is_some());
    let mut check = |logged: &StepLog, actions: Vec<String>, out: &StepOutcome| {
        let fresh = StepLog::new(logged.step, actions, out, full);
        if divergence.is_none() && &fresh != logged {
            divergence = Some(logged.step);
        }
    };
    let mut logged = traj.steps.iter();
    if let Some(first) = logged.next() {
        check(first, vec![], &out);
    }
    for s in logged {
        out = inst.step(&s.actions)?;
        check(s, s.actions.clone(), &out);
    }
    Ok(ReplayReport {
        steps: out.steps_used,
        divergence,
        completed: out.eval.completed,
    })
}

pub fn write_records(path: &Path, records: &[RunRecord]) -> std::io::Result<()> {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).expect("records serialize"));
        s.push('\n');
    }
    std::fs::write(path, s)
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("line {}: {e}", i + 1)))
        .collect()
}
