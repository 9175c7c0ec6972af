//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufReader;
use std::net::TcpStream;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};
use valleybench::content::Content;
use valleybench::env::{Env, EnvConfig, StepOutcome};
use valleybench::evaluator::{compare, project, EvalResult, EvalState, Registry};
use valleybench::harness::report::ResultsTable;
use valleybench::harness::runner::{read_records, write_records, Run};
use valleybench::harness::trajectory::digest;
use valleybench::harness::{run_suite, Agent, ChaserAgent, OracleAgent, OracleBook, RandomAgent, RunConfig};
use valleybench::mechanics::action::{Action, Flow, MenuOp, MENU_NAMES};
use valleybench::observation::{Modality, ObsConfig};
use valleybench::protocol::frame::{read_frame, write_frame};
use valleybench::protocol::{Body, Client, Message, Server, ServerHandle};
use valleybench::tasks::{Category, Difficulty, TaskSpec, TaskSuite};
use valleybench::world::state::Direction;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn suite() -> Arc<TaskSuite> {
    Arc::new(TaskSuite::bundled().clone())
}

fn text_cfg() -> EnvConfig {
    EnvConfig {
        observation: ObsConfig {
            modality: Modality::TextOnly,
            ..Default::default()
        },
        ..Default::default()
    }
}

fn with_modality(m: Modality) -> EnvConfig {
    EnvConfig {
        observation: ObsConfig {
            modality: m,
            ..Default::default()
        },
        ..Default::default()
    }
}

fn oracle_tasks() -> Vec<TaskSpec> {
    let book = OracleBook::bundled();
    TaskSuite::bundled()
        .tasks
        .iter()
        .filter(|t| book.get(&t.name).is_some())
        .cloned()
        .collect()
}

fn oracle_factory() -> impl Fn() -> Box<dyn Agent> + Sync {
    || Box::new(OracleAgent::new(OracleBook::bundled().clone()))
}

fn serve(cfg: EnvConfig) -> ServerHandle {
    let env = Env::new(Content::shared(), suite(), cfg);
    Server::bind("127.0.0.1:0", env).expect("bind").spawn()
}

fn oracle_suite() -> Outcome {
    let book = OracleBook::bundled();
    book.check(TaskSuite::bundled()).map_err(|e| e.to_string())?;
    let tasks = oracle_tasks();
    let cfg = RunConfig {
        env: text_cfg(),
        ..Default::default()
    };
    let start = Instant::now();
    let runs = run_suite(&Content::shared(), &suite(), &tasks, &oracle_factory(), &cfg);
    let secs = start.elapsed().as_secs_f64();
    let mut failing = BTreeSet::new();
    for r in &runs {
        let rec = &r.record;
        if !rec.completed || rec.steps_used > rec.difficulty.max_steps() || rec.error.is_some() {
            failing.insert(format!("{}@{}", rec.task, rec.seed));
        }
    }
    let passing: Vec<&TaskSpec> = tasks
        .iter()
        .filter(|t| runs.iter().filter(|r| r.record.task == t.name).all(|r| r.record.completed))
        .collect();
    let mut per_cat = BTreeMap::new();
    for t in &passing {
        *per_cat.entry(t.category).or_insert(0) += 1;
    }
    let diffs: BTreeSet<Difficulty> = passing.iter().map(|t| t.difficulty).collect();
    let evals: BTreeSet<&str> = passing.iter().map(|t| t.evaluator.as_str()).collect();
    let missing: Vec<&str> = Registry::builtin().keys().filter(|k| !evals.contains(k)).collect();
    let detail = format!(
        "{} tasks x 3 seeds, {} at 100%, {} failing runs, {:.1}s",
        tasks.len(),
        passing.len(),
        failing.len(),
        secs
    );
    if !failing.is_empty() {
        return Err(format!("{detail}; failing: {failing:?}"));
    }
    if passing.len() < 20 || Category::ALL.iter().any(|c| per_cat.get(c).copied().unwrap_or(0) < 2) {
        return Err(format!("{detail}; per category {per_cat:?}"));
    }
    if diffs.len() < 3 || !missing.is_empty() {
        return Err(format!("{detail}; difficulties {diffs:?}, evaluators without oracle {missing:?}"));
    }
    if secs >= 120.0 {
        return Err(format!("{detail}; over the 2 minute budget"));
    }
    Ok(format!("{detail}, all {} evaluator types covered", evals.len()))
}

fn algorithm_one() -> Outcome {
    let content = Content::shared();
    let book = OracleBook::bundled();
    let mut env = Env::new(content.clone(), suite(), text_cfg());
    let mut checked = 0;
    for t in oracle_tasks() {
        for seed in 1..=3 {
            let first = env.reset(&t.name, seed).map_err(|e| e.to_string())?;
            if first.eval != EvalResult::default() {
                return Err(format!("{} reset eval {:?}", t.name, first.eval));
            }
            let obs0 = project(env.world().unwrap(), &content.pack);
            let mut fresh = EvalState::new(t.eval_config()).unwrap();
            let r = fresh.evaluate(obs0.clone());
            if r.completed || r.current_quantity != 0 {
                return Err(format!("{} first evaluate returned {r:?}", t.name));
            }
            let mut last = obs0.clone();
            let mut sum = 0u32;
            let mut out = first;
            for step in book.get(&t.name).unwrap() {
                if out.done {
                    break;
                }
                out = env.step(step).map_err(|e| e.to_string())?;
                let now = project(env.world().unwrap(), &content.pack);
                sum += compare(&t.evaluator, &t.object, &now, &last).unwrap();
                last = now;
            }
            let whole = compare(&t.evaluator, &t.object, &last, &obs0).unwrap();
            if sum != whole || sum != out.eval.current_quantity {
                return Err(format!(
                    "{} seed {seed}: per-step sum {sum}, whole-run diff {whole}, reported {}",
                    t.name, out.eval.current_quantity
                ));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} golden trajectories, per-step sums equal whole-run diffs"))
}

fn streams(runs: &[Run]) -> Vec<Vec<u8>> {
    runs.iter().map(|r| r.trajectory.to_bytes()).collect()
}

fn determinism() -> Outcome {
    let content = Content::shared();
    let s = suite();
    let random = || -> Box<dyn Agent> { Box::new(RandomAgent::default()) };
    let mut checked = 0;
    // Every task with full text observations logged, and a handful with
    // rendered images, which the digests cover.
    let image_tasks: Vec<TaskSpec> = ["till_5_tile_with_hoe", "kill_1_green_slime_with_rusty_sword", "go_to_bus_stop"]
        .iter()
        .map(|n| s.get(n).unwrap().clone())
        .collect();
    for (tasks, env, full) in [
        (s.tasks.clone(), text_cfg(), true),
        (image_tasks, with_modality(Modality::Both), false),
    ] {
        let cfg = |parallelism| RunConfig {
            repeats: 1,
            base_seed: 7,
            parallelism,
            env,
            full_images: full,
            ..Default::default()
        };
        let base = run_suite(&content, &s, &tasks, &random, &cfg(1));
        let want_streams = streams(&base);
        let want_records: Vec<_> = base.iter().map(|r| r.record.timeless()).collect();
        let mut again: Vec<(usize, Vec<Run>)> = (0..4).map(|_| (1, run_suite(&content, &s, &tasks, &random, &cfg(1)))).collect();
        again.push((8, run_suite(&content, &s, &tasks, &random, &cfg(8))));
        for (p, runs) in &again {
            if streams(runs) != want_streams {
                return Err(format!("observation streams differ (parallelism {p})"));
            }
            let recs: Vec<_> = runs.iter().map(|r| r.record.timeless()).collect();
            if recs != want_records {
                return Err(format!("records differ (parallelism {p})"));
            }
        }
        checked += tasks.len();
    }
    Ok(format!(
        "{checked} task streams byte-identical over 5 repeats and parallelism 1 vs 8"
    ))
}

fn digests(outs: &[StepOutcome]) -> Vec<(String, EvalResult)> {
    outs.iter().map(|o| (digest(&o.observation), o.eval)).collect()
}

fn isolation() -> Outcome {
    let book = OracleBook::bundled();
    let picks: Vec<TaskSpec> = {
        let all = oracle_tasks();
        let stride = all.len() / 8;
        (0..8).map(|i| all[i * stride].clone()).collect()
    };
    let cfg = with_modality(Modality::Both);
    let serial: Vec<Vec<(String, EvalResult)>> = picks
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut env = Env::new(Content::shared(), suite(), cfg);
            let mut outs = vec![env.reset(&t.name, i as u64 + 1).unwrap()];
            for step in book.get(&t.name).unwrap() {
                if outs.last().unwrap().done {
                    break;
                }
                outs.push(env.step(step).unwrap());
            }
            digests(&outs)
        })
        .collect();

    let servers: Vec<ServerHandle> = (0..8).map(|_| serve(cfg)).collect();
    // Round robin over 8 connections from one thread.
    let mut clients: Vec<Client> = servers.iter().map(|s| Client::connect(s.addr).unwrap()).collect();
    let mut outs: Vec<Vec<StepOutcome>> = picks
        .iter()
        .zip(clients.iter_mut())
        .enumerate()
        .map(|(i, (t, c))| vec![c.reset(&t.name, i as u64 + 1).unwrap()])
        .collect();
    let mut cursor = [0usize; 8];
    loop {
        let mut any = false;
        for i in 0..8 {
            let script = book.get(&picks[i].name).unwrap();
            if outs[i].last().unwrap().done || cursor[i] >= script.len() {
                continue;
            }
            any = true;
            outs[i].push(clients[i].step(&script[cursor[i]]).unwrap());
            cursor[i] += 1;
        }
        if !any {
            break;
        }
    }
    for i in 0..8 {
        if digests(&outs[i]) != serial[i] {
            return Err(format!("{} diverged under round-robin interleaving", picks[i].name));
        }
    }
    // Then all eight at once from their own threads.
    let threaded: Vec<Vec<(String, EvalResult)>> = std::thread::scope(|sc| {
        let hs: Vec<_> = clients
            .iter_mut()
            .zip(&picks)
            .enumerate()
            .map(|(i, (c, t))| {
                sc.spawn(move || {
                    let mut o = vec![c.reset(&t.name, i as u64 + 1).unwrap()];
                    for step in book.get(&t.name).unwrap() {
                        if o.last().unwrap().done {
                            break;
                        }
                        o.push(c.step(step).unwrap());
                    }
                    digests(&o)
                })
            })
            .collect();
        hs.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for c in clients {
        c.shutdown().map_err(|e| e.to_string())?;
    }
    for s in servers {
        s.join().map_err(|e| e.to_string())?;
    }
    for i in 0..8 {
        if threaded[i] != serial[i] {
            return Err(format!("{} diverged when run concurrently", picks[i].name));
        }
    }
    let steps: usize = serial.iter().map(|s| s.len()).sum();
    Ok(format!(
        "8 tcp instances, {steps} observations match serial runs (round robin and threaded)"
    ))
}

fn clock_minutes(o: &StepOutcome) -> i64 {
    let t = &o.observation.text.as_ref().expect("text observation").current_time;
    let (hm, half) = t.split_once(' ').unwrap();
    let (h, m) = hm.split_once(':').unwrap();
    let h: i64 = h.parse::<i64>().unwrap() % 12 + if half == "PM" { 12 } else { 0 };
    h * 60 + m.parse::<i64>().unwrap()
}

fn pause_semantics() -> Outcome {
    let mut rt = text_cfg();
    rt.realtime = true;
    let servers = [serve(text_cfg()), serve(rt), serve(rt)];
    let mut c: Vec<Client> = servers.iter().map(|s| Client::connect(s.addr).unwrap()).collect();
    let before: Vec<i64> = c
        .iter_mut()
        .map(|c| clock_minutes(&c.reset("go_to_bus_stop", 1).unwrap()))
        .collect();
    c[2].pause().map_err(|e| e.to_string())?;
    std::thread::sleep(Duration::from_secs(10));
    let after: Vec<i64> = c.iter_mut().map(|c| clock_minutes(&c.observe().unwrap())).collect();
    for c in c {
        let _ = c.shutdown();
    }
    for s in servers {
        let _ = s.join();
    }
    let d: Vec<i64> = after.iter().zip(&before).map(|(a, b)| a - b).collect();
    let msg = format!(
        "10 s idle: paused mode +{}, real-time +{}, real-time paused +{} minutes",
        d[0], d[1], d[2]
    );
    if d[0] == 0 && (13..=15).contains(&d[1]) && d[2] == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn realtime_ablation() -> Outcome {
    let s = suite();
    let task = s.get("kill_1_bug_with_rusty_sword").unwrap().clone();
    let mut wins = Vec::new();
    for realtime in [false, true] {
        let cfg = RunConfig {
            env: EnvConfig {
                observation: ObsConfig {
                    modality: Modality::TextOnly,
                    window: 10,
                    ..Default::default()
                },
                navigate: false,
                realtime,
            },
            think_time: Duration::from_secs(5),
            ..Default::default()
        };
        let runs = run_suite(
            &Content::shared(),
            &s,
            std::slice::from_ref(&task),
            &|| Box::new(ChaserAgent::default()),
            &cfg,
        );
        wins.push(runs.iter().filter(|r| r.record.completed).count());
    }
    let msg = format!("chaser with 5 s latency on the bug: paused {}/3, real-time {}/3", wins[0], wins[1]);
    if wins[0] >= 2 && wins[1] <= 1 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn raw_reply(stream: &mut TcpStream, reader: &mut BufReader<TcpStream>, id: u64, body: Body) -> Vec<u8> {
    let bytes = serde_json::to_vec(&Message { request_id: id, body }).unwrap();
    write_frame(stream, &bytes).unwrap();
    read_frame(reader).unwrap().unwrap()
}

fn contains(hay: &[u8], needle: &str) -> bool {
    hay.windows(needle.len()).any(|w| w == needle.as_bytes())
}

fn modality_purity() -> Outcome {
    let server = serve(EnvConfig::default());
    let mut stream = TcpStream::connect(server.addr).unwrap();
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let png_magic = "iVBORw0KGgo";
    let text_keys = ["\"text\"", "surrounding_blocks", "toolbar", "current_time", "item_in_hand"];
    let mut id = 1;
    let mut frames = 0;
    for task in ["till_5_tile_with_hoe", "go_to_bus_stop", "kill_1_green_slime_with_rusty_sword"] {
        for m in [Modality::ImageOnly, Modality::TextOnly, Modality::Both] {
            raw_reply(&mut stream, &mut reader, id, Body::Configure(with_modality(m)));
            id += 1;
            let mut replies = vec![raw_reply(
                &mut stream,
                &mut reader,
                id,
                Body::Reset {
                    task: task.into(),
                    seed: 1,
                },
            )];
            id += 1;
            replies.push(raw_reply(
                &mut stream,
                &mut reader,
                id,
                Body::Step {
                    actions: vec!["use(direction=\"down\")".into()],
                },
            ));
            id += 1;
            replies.push(raw_reply(&mut stream, &mut reader, id, Body::Observe));
            id += 1;
            for r in replies {
                frames += 1;
                let has_text = text_keys.iter().any(|k| contains(&r, k));
                let has_image = contains(&r, "\"image\"") || contains(&r, "\"png\"") || contains(&r, png_magic);
                let ok = match m {
                    Modality::ImageOnly => !has_text && has_image,
                    Modality::TextOnly => has_text && !has_image,
                    Modality::Both => has_text && has_image,
                };
                if !ok {
                    return Err(format!("{task} {m:?}: text={has_text} image={has_image}"));
                }
            }
        }
    }
    raw_reply(&mut stream, &mut reader, id, Body::Shutdown);
    server.join().map_err(|e| e.to_string())?;
    Ok(format!(
        "{frames} raw reply frames: image_only carry no text record, text_only no image bytes"
    ))
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

/// Two standable tiles near the start for a cheap back-and-forth walk.
fn shuttle(o: &StepOutcome) -> Vec<String> {
    let t = o.observation.text.as_ref().unwrap();
    let far = t
        .surrounding_blocks
        .iter()
        .filter(|b| b.position != (0, 0) && b.object.iter().any(|a| a == "Passable: True"))
        .max_by_key(|b| (b.position.0.abs() + b.position.1.abs(), b.position))
        .map(|b| b.position)
        .unwrap_or((0, 0));
    let (x, y) = t.position;
    vec![format!("move(x={}, y={})", x + far.0, y + far.1), format!("move(x={x}, y={y})")]
}

fn timed_steps(c: &mut Client, task: &str, n: usize) -> Vec<Duration> {
    let first = c.reset(task, 1).unwrap();
    let moves = shuttle(&first);
    let mut times = Vec::with_capacity(n);
    for i in 0..n {
        let actions = [moves[i % 2].clone(), format!("choose_item(slot_index={})", i % 4)];
        let t0 = Instant::now();
        let out = c.step(&actions).unwrap();
        times.push(t0.elapsed());
        if out.done {
            c.reset(task, 1).unwrap();
        }
    }
    times
}

fn performance() -> Outcome {
    let server = serve(text_cfg());
    let mut c = Client::connect(server.addr).unwrap();
    let task = "cultivate_and_harvest_1_garlic";
    let text = median(timed_steps(&mut c, task, 200));
    c.configure(with_modality(Modality::Both)).map_err(|e| e.to_string())?;
    let full = median(timed_steps(&mut c, task, 40));
    c.shutdown().map_err(|e| e.to_string())?;
    server.join().map_err(|e| e.to_string())?;
    let msg = format!(
        "median step round trip: text-only 7x7 {:.2} ms, full 1280x720 render {:.2} ms",
        text.as_secs_f64() * 1e3,
        full.as_secs_f64() * 1e3
    );
    if text <= Duration::from_millis(30) && full <= Duration::from_millis(100) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn action_corpus() -> Vec<Action> {
    let dirs = [Direction::Up, Direction::Right, Direction::Down, Direction::Left];
    let mut v = Vec::new();
    for x in -10..20 {
        for y in -10..20 {
            v.push(Action::Move { x, y });
        }
    }
    for d in dirs {
        v.push(Action::Use { direction: d });
        v.push(Action::Interact { direction: d });
    }
    for s in 0..=35 {
        v.push(Action::ChooseItem { slot_index: s });
        v.push(Action::AttachItem { slot_index: s });
    }
    v.push(Action::DetachItem);
    let pack = &Content::shared().pack;
    let odd = ["Pierre's \"Best\" Seeds", "back\\slash", "", "two  spaces", "naïve"];
    for item in pack.recipes.keys().map(String::as_str).chain(odd) {
        v.push(Action::Craft { item: item.to_string() });
    }
    for option_index in 0..10 {
        for quantity in [None, Some(1), Some(5), Some(99)] {
            for direction in [None, Some(Flow::In), Some(Flow::Out)] {
                v.push(Action::ChooseOption {
                    option_index,
                    quantity,
                    direction,
                });
            }
        }
    }
    for option in [MenuOp::Open, MenuOp::Close] {
        for menu_name in MENU_NAMES {
            v.push(Action::Menu { option, menu_name });
        }
    }
    for name in pack.maps.keys().map(String::as_str).chain(odd) {
        v.push(Action::Navigate { name: name.to_string() });
    }
    v
}

fn action_conformance() -> Outcome {
    let corpus = action_corpus();
    let kinds: BTreeSet<&str> = corpus.iter().map(|a| a.kind()).collect();
    for a in &corpus {
        let text = a.to_string();
        let back = Action::parse(&text).map_err(|e| format!("{text}: {e}"))?;
        if &back != a || back.to_string() != text {
            return Err(format!("{text} came back as {back}"));
        }
    }
    if corpus.len() < 1000 || kinds.len() != 10 {
        return Err(format!("{} cases over {} kinds", corpus.len(), kinds.len()));
    }
    Ok(format!("parse(print(a)) == a for {} cases over all 10 kinds", corpus.len()))
}

fn table_shape() -> Outcome {
    let s = suite();
    let cfg = RunConfig {
        parallelism: 4,
        env: text_cfg(),
        ..Default::default()
    };
    let runs = run_suite(&Content::shared(), &s, &s.tasks, &|| Box::new(RandomAgent::default()), &cfg);
    let records: Vec<_> = runs.into_iter().map(|r| r.record).collect();
    if let Some(r) = records.iter().find(|r| r.steps_used > r.difficulty.max_steps()) {
        return Err(format!("{} used {} steps", r.task, r.steps_used));
    }
    let table = ResultsTable::from_records(&records);
    let md = table.to_markdown();
    let lines: Vec<&str> = md.lines().collect();
    let header = "| Agent | Task | Farming | Crafting | Exploration | Combat | Social | Total |";
    if lines.len() != 6 || lines[0] != header {
        return Err(format!("unexpected layout:\n{md}"));
    }
    for (line, row) in lines[2..].iter().zip(["Easy", "Medium", "Hard", "Total"]) {
        let cells: Vec<&str> = line.split('|').map(str::trim).collect();
        // Leading and trailing pipes give empty first and last pieces.
        if cells.len() != 10 || cells[2] != row {
            return Err(format!("bad row {line:?}"));
        }
        for c in &cells[3..9] {
            let (m, sd) = c.split_once(" ± ").ok_or(format!("cell {c:?}"))?;
            let (m, sd): (f64, f64) = (m.parse().map_err(|_| c.to_string())?, sd.parse().map_err(|_| c.to_string())?);
            if !(0.0..=100.0).contains(&m) || sd < 0.0 {
                return Err(format!("cell {c:?} out of range"));
            }
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.jsonl");
    write_records(&path, &records).map_err(|e| e.to_string())?;
    let reread = ResultsTable::from_records(&read_records(&path)?);
    if reread != table || ResultsTable::from_csv(&table.to_csv()).map_err(|e| e.to_string())? != table {
        return Err("table does not survive records or csv round trip".into());
    }
    Ok(format!(
        "random agent, {} runs: 5 categories + Total by Easy/Medium/Hard/Total, mean ± std over {} repeats",
        records.len(),
        table.agents[0].repeats
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("oracle suite", oracle_suite),
        ("incremental evaluation equivalence", algorithm_one),
        ("determinism", determinism),
        ("isolation", isolation),
        ("pause/real-time semantics", pause_semantics),
        ("real-time ablation", realtime_ablation),
        ("modality purity", modality_purity),
        ("performance budget", performance),
        ("action-space conformance", action_conformance),
        ("table shape", table_shape),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, f) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let t0 = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t0.elapsed().as_secs_f64();
        match r {
            Ok(d) => println!("PASS {name}: {d} [{secs:.1}s]"),
            Err(d) => {
                failed += 1;
                println!("FAIL {name}: {d} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
