use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;
use valleybench::content::Content;
use valleybench::env::{Env, EnvConfig};
use valleybench::harness::report::ResultsTable;
use valleybench::harness::runner::{read_records, write_records};
use valleybench::harness::{
    play, replay, run_suite, Agent, ChaserAgent, OracleAgent, OracleBook, RandomAgent, RunConfig, Trajectory, Transport,
};
use valleybench::observation::{Modality, ObsConfig};
use valleybench::protocol::Server;
use valleybench::tasks::{parse_task_suite, Category, Difficulty, TaskSuite};

#[derive(Parser)]
#[command(name = "valley", version, about = "ValleyBench environment server and evaluation harness")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Serve one environment instance over TCP.
    Serve {
        #[arg(long, default_value = "127.0.0.1:7878")]
        addr: String,
        #[command(flatten)]
        env: EnvArgs,
    },
    /// Run a suite with a built-in agent and write records, logs and tables.
    Run(RunArgs),
    /// Re-execute trajectory logs and check they reproduce.
    Replay {
        logs: Vec<PathBuf>,
        #[arg(long)]
        suite: Option<PathBuf>,
    },
    /// Play a task by hand.
    Play {
        task: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        env: EnvArgs,
    },
    /// Rebuild the results table from a records file.
    Report {
        records: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Markdown,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Paused,
    Realtime,
}

#[derive(Clone, Copy, ValueEnum)]
enum AgentKind {
    Random,
    Oracle,
    Chaser,
}

#[derive(Args)]
struct EnvArgs {
    /// Task suite: a yaml file or a directory of them. Defaults to the bundled pack.
    #[arg(long)]
    suite: Option<PathBuf>,
    #[arg(long, value_parser = ["both", "image_only", "text_only"], default_value = "both")]
    modality: String,
    /// Half-width of the text window.
    #[arg(long, default_value_t = 3)]
    window: u32,
    #[arg(long, default_value_t = 1280)]
    width: u32,
    #[arg(long, default_value_t = 720)]
    height: u32,
    #[arg(long)]
    map_info: bool,
    /// Enable the navigate() action.
    #[arg(long)]
    navigate: bool,
    #[arg(long, value_enum, default_value_t = Mode::Paused)]
    mode: Mode,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    env: EnvArgs,
    #[arg(long, value_enum, default_value_t = AgentKind::Random)]
    agent: AgentKind,
    /// Only these tasks (repeatable).
    #[arg(long = "task")]
    tasks: Vec<String>,
    #[arg(long)]
    category: Option<String>,
    #[arg(long)]
    difficulty: Option<String>,
    #[arg(long, default_value_t = 3)]
    repeats: u32,
    #[arg(long, default_value_t = 1)]
    base_seed: u64,
    #[arg(long, default_value_t = 1)]
    parallelism: usize,
    /// Drive instances over local TCP servers instead of in-process.
    #[arg(long)]
    tcp: bool,
    /// Simulated agent latency per step, in milliseconds.
    #[arg(long, default_value_t = 0)]
    think_ms: u64,
    /// Keep whole observations in trajectory logs.
    #[arg(long)]
    full_images: bool,
    #[arg(long, default_value = "runs")]
    out: PathBuf,
}

fn load_suite(path: Option<&Path>) -> Result<Arc<TaskSuite>, String> {
    let Some(path) = path else {
        return Ok(Arc::new(TaskSuite::bundled().clone()));
    };
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut v: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| format!("{}: {e}", path.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "yaml" || x == "yml"))
            .collect();
        v.sort();
        v
    } else {
        vec![path.to_path_buf()]
    };
    let mut suite = TaskSuite::default();
    for f in files {
        let src = std::fs::read_to_string(&f).map_err(|e| format!("{}: {e}", f.display()))?;
        let part = parse_task_suite(&src).map_err(|e| format!("{}: {e}", f.display()))?;
        suite.merge(part).map_err(|e| e.to_string())?;
    }
    Ok(Arc::new(suite))
}

impl EnvArgs {
    fn config(&self) -> EnvConfig {
        EnvConfig {
            observation: ObsConfig {
                modality: Modality::parse(&self.modality).expect("checked by clap"),
                window: self.window,
                width: self.width,
                height: self.height,
                map_info: self.map_info,
                ..Default::default()
            },
            navigate: self.navigate,
            realtime: self.mode == Mode::Realtime,
        }
    }
}

fn run(a: RunArgs) -> Result<ExitCode, String> {
    let content = Content::shared();
    let suite = load_suite(a.env.suite.as_deref())?;
    let category = a
        .category
        .as_deref()
        .map(|c| Category::parse(c).ok_or(format!("unknown category {c}")))
        .transpose()?;
    let difficulty = a
        .difficulty
        .as_deref()
        .map(|d| Difficulty::parse(d).ok_or(format!("unknown difficulty {d}")))
        .transpose()?;
    for t in &a.tasks {
        if suite.get(t).is_none() {
            return Err(format!("unknown task {t}"));
        }
    }
    let book = OracleBook::bundled();
    let tasks: Vec<_> = suite
        .tasks
        .iter()
        .filter(|t| a.tasks.is_empty() || a.tasks.contains(&t.name))
        .filter(|t| category.is_none_or(|c| t.category == c))
        .filter(|t| difficulty.is_none_or(|d| t.difficulty == d))
        .filter(|t| !matches!(a.agent, AgentKind::Oracle) || book.get(&t.name).is_some())
        .cloned()
        .collect();
    let cfg = RunConfig {
        repeats: a.repeats.max(1),
        base_seed: a.base_seed,
        parallelism: a.parallelism,
        env: a.env.config(),
        transport: if a.tcp { Transport::Tcp } else { Transport::InProcess },
        think_time: Duration::from_millis(a.think_ms),
        log_dir: Some(a.out.join("logs")),
        full_images: a.full_images,
    };
    let kind = a.agent;
    let factory = move || -> Box<dyn Agent> {
        match kind {
            AgentKind::Random => Box::new(RandomAgent::default()),
            AgentKind::Oracle => Box::new(OracleAgent::new(book.clone())),
            AgentKind::Chaser => Box::new(ChaserAgent::default()),
        }
    };
    eprintln!("running {} tasks x {} repeats", tasks.len(), cfg.repeats);
    let runs = run_suite(&content, &suite, &tasks, &factory, &cfg);
    let records: Vec<_> = runs.into_iter().map(|r| r.record).collect();
    for r in records.iter().filter(|r| r.error.is_some()) {
        eprintln!("{} seed {}: {}", r.task, r.seed, r.error.as_deref().unwrap_or_default());
    }
    let table = ResultsTable::from_records(&records);
    let io = |e: std::io::Error| e.to_string();
    write_records(&a.out.join("records.jsonl"), &records).map_err(io)?;
    std::fs::write(a.out.join("table.md"), table.to_markdown()).map_err(io)?;
    std::fs::write(a.out.join("table.csv"), table.to_csv()).map_err(io)?;
    print!("{}", table.to_markdown());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let result = match Cli::parse().cmd {
        Cmd::Serve { addr, env } => (|| {
            let suite = load_suite(env.suite.as_deref())?;
            let e = Env::new(Content::shared(), suite, env.config());
            let server = Server::bind(addr.as_str(), e).map_err(|e| e.to_string())?;
            eprintln!("listening on {}", server.local_addr());
            server.run().map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        })(),
        Cmd::Run(a) => run(a),
        Cmd::Replay { logs, suite } => (|| {
            let suite = load_suite(suite.as_deref())?;
            let mut bad = 0;
            for p in &logs {
                let t = Trajectory::load(p).map_err(|e| format!("{}: {e}", p.display()))?;
                let r = replay(&Content::shared(), &suite, &t)?;
                match r.divergence {
                    None => println!("ok       {} ({} steps, completed={})", p.display(), r.steps, r.completed),
                    Some(s) => {
                        bad += 1;
                        println!("DIVERGED {} at step {s}", p.display());
                    }
                }
            }
            Ok(if bad == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        })(),
        Cmd::Play { task, seed, env } => (|| {
            let suite = load_suite(env.suite.as_deref())?;
            let mut e = Env::new(Content::shared(), suite, env.config());
            let stdin = std::io::stdin();
            let done = play::play(&mut e, &task, seed, stdin.lock(), std::io::stdout()).map_err(|e| e.to_string())?;
            Ok(if done { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        })(),
        Cmd::Report { records, format } => (|| {
            let rs = read_records(&records)?;
            let t = ResultsTable::from_records(&rs);
            match format {
                Format::Markdown => print!("{}", t.to_markdown()),
                Format::Csv => print!("{}", t.to_csv()),
            }
            Ok(ExitCode::SUCCESS)
        })(),
    };
    result.unwrap_or_else(|e: String| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
