//! Evaluation harness: agents, batch runs, trajectories and reports.

pub mod agent;
pub mod oracle;
pub mod play;
pub mod report;
pub mod runner;
pub mod trajectory;

pub use agent::{Agent, ChaserAgent, OracleAgent, RandomAgent};
pub use oracle::OracleBook;
pub use report::ResultsTable;
pub use runner::{replay, run_episode, run_suite, RunConfig, RunRecord, Transport};
pub use trajectory::Trajectory;
