use proptest::prelude::*;
use std::sync::Arc;
use valleybench::content::Content;
use valleybench::env::EnvConfig;
use valleybench::harness::report::{mean_std, ResultsTable};
use valleybench::harness::runner::{replay, run_episode, LocalInstance, RunRecord};
use valleybench::harness::{RandomAgent, RunConfig};
use valleybench::mechanics::action::{Action, Flow, MenuOp, MENU_NAMES};
use valleybench::observation::{Modality, ObsConfig};
use valleybench::protocol::frame::{read_frame, write_frame};
use valleybench::tasks::{Category, Difficulty, TaskSuite};
use valleybench::world::state::Direction;

fn direction() -> impl Strategy<Value = Direction> {
    prop_oneof![
        Just(Direction::Up),
        Just(Direction::Right),
        Just(Direction::Down),
        Just(Direction::Left)
    ]
}

fn action() -> impl Strategy<Value = Action> {
    let text = "[ -~]{0,24}";
    prop_oneof![
        (any::<i32>(), any::<i32>()).prop_map(|(x, y)| Action::Move { x, y }),
        direction().prop_map(|direction| Action::Use { direction }),
        direction().prop_map(|direction| Action::Interact { direction }),
        (0usize..=35).prop_map(|slot_index| Action::ChooseItem { slot_index }),
        (0usize..=35).prop_map(|slot_index| Action::AttachItem { slot_index }),
        Just(Action::DetachItem),
        text.prop_map(|item| Action::Craft { item }),
        (
            0usize..1000,
            proptest::option::of(1u32..10_000),
            proptest::option::of(prop_oneof![Just(Flow::In), Just(Flow::Out)])
        )
            .prop_map(|(option_index, quantity, direction)| Action::ChooseOption {
                option_index,
                quantity,
                direction
            }),
        (prop_oneof![Just(MenuOp::Open), Just(MenuOp::Close)], 0usize..MENU_NAMES.len()).prop_map(|(option, i)| Action::Menu {
            option,
            menu_name: MENU_NAMES[i]
        }),
        text.prop_map(|name| Action::Navigate { name }),
    ]
}

fn text_env() -> EnvConfig {
    EnvConfig {
        observation: ObsConfig {
            modality: Modality::TextOnly,
            ..Default::default()
        },
        ..Default::default()
    }
}

fn record(cat: usize, diff: usize, seed: u64, completed: bool) -> RunRecord {
    let difficulty = Difficulty::ALL[diff];
    RunRecord {
        task: format!("t{cat}{diff}"),
        category: Category::ALL[cat],
        difficulty,
        agent: "a".into(),
        seed,
        steps_used: 0,
        max_steps: difficulty.max_steps(),
        completed,
        current_quantity: 0,
        wall_time_ms: 0,
        trajectory: None,
        error: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_identity(a in action()) {
        let text = a.to_string();
        let back = Action::parse(&text).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn parser_never_panics(s in "\\PC{0,40}") {
        let _ = Action::parse(&s);
    }

    #[test]
    fn frames_round_trip(bodies in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 0..300), 0..5)) {
        let mut buf = Vec::new();
        for b in &bodies {
            write_frame(&mut buf, b).unwrap();
        }
        let mut r = buf.as_slice();
        for b in &bodies {
            prop_assert_eq!(read_frame(&mut r).unwrap().unwrap(), b.clone());
        }
        prop_assert!(read_frame(&mut r).unwrap().is_none());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rates_stay_in_range(outcomes in proptest::collection::vec((0usize..5, 0usize..3, 0u64..4, any::<bool>()), 0..60)) {
        let recs: Vec<RunRecord> = outcomes.iter().map(|&(c, d, s, ok)| record(c, d, s, ok)).collect();
        let t = ResultsTable::from_records(&recs);
        for a in &t.agents {
            prop_assert!(a.repeats >= 1);
            for st in a.cells.values() {
                prop_assert!((0.0..=100.0).contains(&st.mean));
                prop_assert!(st.std >= 0.0 && st.std <= 100.0);
            }
        }
        prop_assert_eq!(ResultsTable::from_csv(&t.to_csv()).unwrap(), t);
    }

    #[test]
    fn mean_lies_between_extremes(xs in proptest::collection::vec(0.0f64..100.0, 1..10)) {
        let s = mean_std(&xs);
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(s.mean >= lo - 1e-9 && s.mean <= hi + 1e-9);
        prop_assert!(s.std >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Random play never overruns the budget, progress never goes down, and
    /// the log replays exactly.
    #[test]
    fn random_episodes_are_well_behaved(task in 0usize..83, seed in 0u64..1000) {
        let suite = Arc::new(TaskSuite::bundled().clone());
        let spec = suite.tasks[task % suite.tasks.len()].clone();
        let content = Content::shared();
        let cfg = RunConfig { env: text_env(), ..Default::default() };
        let mut inst = LocalInstance::new(content.clone(), suite.clone(), cfg.env);
        let run = run_episode(&mut inst, &mut RandomAgent::default(), &spec, seed, &cfg);
        let r = &run.record;
        prop_assert!(r.steps_used <= spec.max_steps());
        prop_assert!(!r.completed || r.current_quantity >= spec.quantity);
        let q: Vec<u32> = run.trajectory.steps.iter().map(|s| s.eval.current_quantity).collect();
        prop_assert!(q.windows(2).all(|w| w[0] <= w[1]));
        let rep = replay(&content, &suite, &run.trajectory).unwrap();
        prop_assert_eq!(rep.divergence, None);
        prop_assert_eq!(rep.steps, r.steps_used);
    }
}
