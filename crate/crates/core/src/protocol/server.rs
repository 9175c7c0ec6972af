//! One environment instance behind a TCP port. A single client controls
//! the instance at a time; others are turned away with a `busy` error
//! until it disconnects.

use super::frame::{read_frame, write_frame, FrameError};
use super::message::{Body, ErrorCode, ErrorPayload, Message, Reply, Status};
use crate::env::{Env, EnvError, StepOutcome};
use crate::tasks::TaskError;
use std::io::{self, BufReader, BufWriter};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("port {0} is already in use")]
    PortInUse(u16),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: String, source: io::Error },
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

pub struct Server {
    listener: TcpListener,
    addr: SocketAddr,
    env: Arc<Mutex<Env>>,
    busy: Arc<AtomicBool>,
    stop: Arc<AtomicBool>,
}

pub struct ServerHandle {
    pub addr: SocketAddr,
    join: JoinHandle<Result<(), ServeError>>,
}

impl ServerHandle {
    pub fn join(self) -> Result<(), ServeError> {
        self.join.join().expect("server thread panicked")
    }
}

impl Server {
    pub fn bind<A: ToSocketAddrs + std::fmt::Display>(addr: A, env: Env) -> Result<Server, ServeError> {
        let listener = TcpListener::bind(&addr).map_err(|e| {
            if e.kind() == io::ErrorKind::AddrInUse {
                let port = addr
                    .to_socket_addrs()
                    .ok()
                    .and_then(|mut a| a.next())
                    .map(|a| a.port())
                    .unwrap_or(0);
                ServeError::PortInUse(port)
            } else {
                ServeError::Bind {
                    addr: addr.to_string(),
                    source: e,
                }
            }
        })?;
        let addr = listener.local_addr()?;
        Ok(Server {
            listener,
            addr,
            env: Arc::new(Mutex::new(env)),
            busy: Arc::new(AtomicBool::new(false)),
            stop: Arc::new(AtomicBool::new(false)),
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Serves until a client sends `shutdown`.
    pub fn run(self) -> Result<(), ServeError> {
        let mut workers = Vec::new();
        for stream in self.listener.incoming() {
            if self.stop.load(Ordering::SeqCst) {
                break;
            }
            let stream = match stream {
                Ok(s) => s,
                Err(_) => continue,
            };
            let _ = stream.set_nodelay(true);
            if self.busy.swap(true, Ordering::SeqCst) {
                let mut w = BufWriter::new(&stream);
                let _ = send(&mut w, 0, error(ErrorCode::Busy, "another client controls this instance"));
                continue;
            }
            let (env, busy, stop, addr) = (self.env.clone(), self.busy.clone(), self.stop.clone(), self.addr);
            workers.push(std::thread::spawn(move || {
                let shutdown = serve_connection(stream, &env);
                busy.store(false, Ordering::SeqCst);
                if shutdown {
                    stop.store(true, Ordering::SeqCst);
                    // Wake the accept loop.
                    let _ = TcpStream::connect(addr);
                }
            }));
        }
        for w in workers {
            let _ = w.join();
        }
        Ok(())
    }

    pub fn spawn(self) -> ServerHandle {
        let addr = self.addr;
        ServerHandle {
            addr,
            join: std::thread::spawn(move || self.run()),
        }
    }
}

fn error(code: ErrorCode, message: impl Into<String>) -> Body {
    Body::Error(ErrorPayload {
        code,
        message: message.into(),
    })
}

fn send<W: io::Write>(w: &mut W, request_id: u64, body: Body) -> Result<(), FrameError> {
    let bytes = serde_json::to_vec(&Message { request_id, body }).expect("messages serialize");
    write_frame(w, &bytes)
}

/// Returns true when the client asked the instance to shut down.
fn serve_connection(stream: TcpStream, env: &Mutex<Env>) -> bool {
    let mut r = BufReader::new(&stream);
    let mut w = BufWriter::new(&stream);
    loop {
        let frame = match read_frame(&mut r) {
            Ok(Some(f)) => f,
            Ok(None) | Err(_) => return false,
        };
        let (id, body) = match serde_json::from_slice::<Message>(&frame) {
            Ok(m) => (m.request_id, m.body),
            Err(e) => {
                // Echo the id when at least that much is readable.
                let id = serde_json::from_slice::<serde_json::Value>(&frame)
                    .ok()
                    .and_then(|v| v.get("request_id").and_then(|i| i.as_u64()))
                    .unwrap_or(0);
                if send(&mut w, id, error(ErrorCode::BadMessage, e.to_string())).is_err() {
                    return false;
                }
                continue;
            }
        };
        let shutdown = body == Body::Shutdown;
        let reply = handle(&mut env.lock().unwrap(), body);
        if send(&mut w, id, reply).is_err() || shutdown {
            return shutdown;
        }
    }
}

fn status(env: &Env) -> Status {
    Status {
        task: env.episode().map(|e| e.task.name.clone()),
        paused: env.is_frozen(),
        config: env.config,
    }
}

fn env_error(e: EnvError) -> Body {
    let code = match &e {
        EnvError::NoTask => ErrorCode::NoTask,
        EnvError::TooManyActions(_) => ErrorCode::TooManyActions,
        EnvError::NoActions => ErrorCode::NoActions,
        EnvError::Done => ErrorCode::EpisodeDone,
        EnvError::Task(TaskError::UnknownTask(_)) => ErrorCode::UnknownTask,
        EnvError::Task(_) | EnvError::Observe(_) => ErrorCode::Internal,
    };
    error(code, e.to_string())
}

/// Applies one request to the instance.
pub fn handle(env: &mut Env, body: Body) -> Body {
    let outcome: Result<Option<StepOutcome>, EnvError> = match body {
        Body::Reset { task, seed } => env.reset(&task, seed).map(Some),
        Body::Step { actions } => env.step(&actions).map(Some),
        Body::Observe => env.observe().map(Some),
        Body::Pause => {
            env.pause();
            Ok(None)
        }
        Body::Resume => {
            env.resume();
            Ok(None)
        }
        Body::Configure(c) => {
            env.configure(c);
            Ok(None)
        }
        Body::Shutdown => Ok(None),
        Body::Response(_) | Body::Error(_) => {
            return error(ErrorCode::NotARequest, "responses cannot be sent to the server");
        }
    };
    match outcome {
        Ok(outcome) => Body::Response(Box::new(Reply {
            outcome,
            status: status(env),
        })),
        Err(e) => env_error(e),
    }
}
