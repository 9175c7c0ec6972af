use std::sync::Arc;
use valleybench::content::Content;
use valleybench::env::EnvConfig;
use valleybench::harness::report::ResultsTable;
use valleybench::harness::runner::log_file_name;
use valleybench::harness::trajectory::Trajectory;
use valleybench::harness::{replay, run_suite, Agent, OracleAgent, OracleBook, RandomAgent, RunConfig, Transport};
use valleybench::observation::{Modality, ObsConfig};
use valleybench::tasks::{Category, Difficulty, TaskSpec, TaskSuite};

fn suite() -> Arc<TaskSuite> {
    Arc::new(TaskSuite::bundled().clone())
}

fn text_cfg() -> RunConfig {
    RunConfig {
        env: EnvConfig {
            observation: ObsConfig {
                modality: Modality::TextOnly,
                ..Default::default()
            },
            ..Default::default()
        },
        ..Default::default()
    }
}

fn oracle() -> Box<dyn Agent> {
    Box::new(OracleAgent::new(OracleBook::bundled().clone()))
}

fn random() -> Box<dyn Agent> {
    Box::new(RandomAgent::default())
}

#[test]
fn oracle_tills_every_time() {
    let s = suite();
    let t = s.get("till_5_tile_with_hoe").unwrap().clone();
    let runs = run_suite(&Content::shared(), &s, &[t], &oracle, &text_cfg());
    let seeds: Vec<u64> = runs.iter().map(|r| r.record.seed).collect();
    assert_eq!(seeds, vec![1, 2, 3]);
    let table = ResultsTable::from_records(&runs.into_iter().map(|r| r.record).collect::<Vec<_>>());
    let total = table.agents[0].cells[&(None, None)];
    assert_eq!((total.mean, total.std), (100.0, 0.0));
}

#[test]
fn random_agent_rarely_wins_hard_combat() {
    let s = suite();
    let hard: Vec<TaskSpec> = s
        .tasks
        .iter()
        .filter(|t| t.category == Category::Combat && t.difficulty == Difficulty::Hard)
        .cloned()
        .collect();
    assert!(!hard.is_empty());
    let runs = run_suite(&Content::shared(), &s, &hard, &random, &text_cfg());
    for r in &runs {
        assert!(r.record.steps_used <= 150);
        assert!(!r.record.completed, "{} won at seed {}", r.record.task, r.record.seed);
    }
}

#[test]
fn tcp_and_in_process_runs_agree() {
    let s = suite();
    let tasks: Vec<TaskSpec> = ["go_to_coop", "clear_10_weeds_with_scythe", "kill_1_green_slime_with_rusty_sword"]
        .iter()
        .map(|n| s.get(n).unwrap().clone())
        .collect();
    let local = run_suite(&Content::shared(), &s, &tasks, &oracle, &text_cfg());
    let remote = run_suite(
        &Content::shared(),
        &s,
        &tasks,
        &oracle,
        &RunConfig {
            transport: Transport::Tcp,
            parallelism: 2,
            ..text_cfg()
        },
    );
    for (l, r) in local.iter().zip(&remote) {
        assert_eq!(l.record.timeless(), r.record.timeless());
        assert_eq!(l.trajectory, r.trajectory);
    }
    assert!(local.iter().all(|r| r.record.completed));
}

#[test]
fn a_broken_task_does_not_stop_the_suite() {
    let s = suite();
    let mut ghost = s.get("go_to_coop").unwrap().clone();
    ghost.name = "go_to_the_moon".into();
    let tasks = vec![ghost, s.get("go_to_coop").unwrap().clone()];
    let runs = run_suite(&Content::shared(), &s, &tasks, &oracle, &RunConfig { repeats: 1, ..text_cfg() });
    assert!(runs[0].record.error.as_deref().unwrap().contains("go_to_the_moon"));
    assert!(runs[1].record.completed);
}

#[test]
fn logs_on_disk_replay_and_catch_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let s = suite();
    let t = s.get("clear_10_weeds_with_scythe").unwrap().clone();
    let cfg = RunConfig {
        repeats: 1,
        log_dir: Some(dir.path().to_path_buf()),
        ..text_cfg()
    };
    let runs = run_suite(&Content::shared(), &s, std::slice::from_ref(&t), &oracle, &cfg);
    let path = dir.path().join(log_file_name(&t.name, 1));
    assert_eq!(runs[0].record.trajectory.as_deref(), Some(path.to_str().unwrap()));
    let log = Trajectory::load(&path).unwrap();
    assert_eq!(log, runs[0].trajectory);
    let r = replay(&Content::shared(), &s, &log).unwrap();
    assert_eq!((r.divergence, r.steps, r.completed), (None, runs[0].record.steps_used, true));

    let mut bad = log.clone();
    let last = bad.steps.len() - 1;
    bad.steps[2].actions = vec!["use(direction=\"up\")".into()];
    bad.steps[last].actions = bad.steps[2].actions.clone();
    let r = replay(&Content::shared(), &s, &bad).unwrap();
    assert_eq!(r.divergence, Some(2));
}

#[test]
fn full_logs_keep_observations() {
    let s = suite();
    let t = s.get("go_to_coop").unwrap().clone();
    let cfg = RunConfig {
        repeats: 1,
        full_images: true,
        ..text_cfg()
    };
    let runs = run_suite(&Content::shared(), &s, &[t], &oracle, &cfg);
    let traj = &runs[0].trajectory;
    assert!(traj.steps.iter().all(|st| st.observation.is_some()));
    let bytes = traj.to_bytes();
    assert_eq!(&Trajectory::read(bytes.as_slice()).unwrap(), traj);
}
