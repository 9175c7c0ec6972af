//! Blocking client for one instance.

use super::frame::{read_frame, write_frame, FrameError};
use super::message::{Body, ErrorCode, Message, Reply};
use crate::env::{EnvConfig, StepOutcome};
use std::io::{BufReader, BufWriter};
use std::net::{TcpStream, ToSocketAddrs};

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("connect: {0}")]
    Connect(std::io::Error),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("server closed the connection")]
    Closed,
    #[error("malformed reply: {0}")]
    Malformed(String),
    #[error("reply to request {got} while waiting for {want}")]
    IdMismatch { want: u64, got: u64 },
    #[error("{code:?}: {message}")]
    Remote { code: ErrorCode, message: String },
}

pub struct Client {
    r: BufReader<TcpStream>,
    w: BufWriter<TcpStream>,
    next_id: u64,
}

impl Client {
    pub fn connect<A: ToSocketAddrs>(addr: A) -> Result<Client, ClientError> {
        let s = TcpStream::connect(addr).map_err(ClientError::Connect)?;
        let _ = s.set_nodelay(true);
        let r = BufReader::new(s.try_clone().map_err(ClientError::Connect)?);
        Ok(Client {
            r,
            w: BufWriter::new(s),
            next_id: 1,
        })
    }

    /// Sends raw bytes as one frame and reads one reply. For probing the
    /// server with malformed input.
    pub fn raw(&mut self, body: &[u8]) -> Result<Message, ClientError> {
        write_frame(&mut self.w, body)?;
        self.read()
    }

    fn read(&mut self) -> Result<Message, ClientError> {
        let bytes = read_frame(&mut self.r)?.ok_or(ClientError::Closed)?;
        serde_json::from_slice(&bytes).map_err(|e| ClientError::Malformed(e.to_string()))
    }

    pub fn request(&mut self, body: Body) -> Result<Reply, ClientError> {
        let id = self.next_id;
        self.next_id += 1;
        let bytes = serde_json::to_vec(&Message { request_id: id, body }).expect("messages serialize");
        write_frame(&mut self.w, &bytes)?;
        let m = self.read()?;
        match m.body {
            Body::Error(e) => Err(ClientError::Remote {
                code: e.code,
                message: e.message,
            }),
            _ if m.request_id != id => Err(ClientError::IdMismatch {
                want: id,
                got: m.request_id,
            }),
            Body::Response(r) => Ok(*r),
            other => Err(ClientError::Malformed(format!("unexpected {} message", other.kind()))),
        }
    }

    fn outcome(&mut self, body: Body) -> Result<StepOutcome, ClientError> {
        self.request(body)?
            .outcome
            .ok_or_else(|| ClientError::Malformed("response without an observation".into()))
    }

    pub fn reset(&mut self, task: &str, seed: u64) -> Result<StepOutcome, ClientError> {
        self.outcome(Body::Reset {
            task: task.to_string(),
            seed,
        })
    }

    pub fn step<S: AsRef<str>>(&mut self, actions: &[S]) -> Result<StepOutcome, ClientError> {
        self.outcome(Body::Step {
            actions: actions.iter().map(|a| a.as_ref().to_string()).collect(),
        })
    }

    pub fn observe(&mut self) -> Result<StepOutcome, ClientError> {
        self.outcome(Body::Observe)
    }

    pub fn pause(&mut self) -> Result<Reply, ClientError> {
        self.request(Body::Pause)
    }

    pub fn resume(&mut self) -> Result<Reply, ClientError> {
        self.request(Body::Resume)
    }

    pub fn configure(&mut self, config: EnvConfig) -> Result<Reply, ClientError> {
        self.request(Body::Configure(config))
    }

    pub fn shutdown(mut self) -> Result<(), ClientError> {
        self.request(Body::Shutdown).map(|_| ())
    }
}
