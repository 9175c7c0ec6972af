//! Trajectory logs: JSON lines, a header then one record per step. Each
//! observation is kept as a SHA-256 digest unless full images are asked
//! for.

use crate::env::{ActionReport, EnvConfig, StepOutcome};
use crate::evaluator::EvalResult;
use crate::observation::ObservationPayload;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::{self, BufRead, Write};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub task: String,
    pub seed: u64,
    pub agent: String,
    pub config: EnvConfig,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepLog {
    /// 0 for the observation returned by reset.
    pub step: u32,
    pub actions: Vec<String>,
    pub results: Vec<ActionReport>,
    pub obs_digest: String,
    pub eval: EvalResult,
    pub done: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observation: Option<ObservationPayload>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub header: Option<Header>,
    pub steps: Vec<StepLog>,
}

pub fn digest(obs: &ObservationPayload) -> String {
    let bytes = serde_json::to_vec(obs).expect("observations serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl StepLog {
    pub fn new(step: u32, actions: Vec<String>, out: &StepOutcome, full: bool) -> StepLog {
        StepLog {
            step,
            actions,
            results: out.results.clone(),
            obs_digest: digest(&out.observation),
            eval: out.eval,
            done: out.done,
            observation: full.then(|| out.observation.clone()),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TrajectoryError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("log has no header")]
    NoHeader,
}

impl Trajectory {
    pub fn actions(&self) -> impl Iterator<Item = &Vec<String>> {
        self.steps.iter().filter(|s| s.step > 0).map(|s| &s.actions)
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<(), TrajectoryError> {
        if let Some(h) = &self.header {
            serde_json::to_writer(&mut w, h).map_err(|e| TrajectoryError::Json { line: 1, source: e })?;
            writeln!(w)?;
        }
        for (i, s) in self.steps.iter().enumerate() {
            serde_json::to_writer(&mut w, s).map_err(|e| TrajectoryError::Json { line: i + 2, source: e })?;
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = Vec::new();
        self.write(&mut v).expect("writing to memory");
        v
    }

    pub fn read<R: BufRead>(r: R) -> Result<Trajectory, TrajectoryError> {
        let mut t = Trajectory::default();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let json = |e| TrajectoryError::Json { line: i + 1, source: e };
            if i == 0 {
                t.header = Some(serde_json::from_str(&line).map_err(json)?);
            } else {
                t.steps.push(serde_json::from_str(&line).map_err(json)?);
            }
        }
        if t.header.is_none() {
            return Err(TrajectoryError::NoHeader);
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Trajectory, TrajectoryError> {
        Trajectory::read(io::BufReader::new(std::fs::File::open(path)?))
    }

    pub fn save(&self, path: &Path) -> Result<(), TrajectoryError> {
        let f = std::fs::File::create(path)?;
        let mut w = io::BufWriter::new(f);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }
}
