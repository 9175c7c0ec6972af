//! World state, content-driven construction, and the simulator command set.

pub mod clock;
pub mod commands;
pub mod day;
pub mod events;
pub mod grid;
pub mod inventory;
pub mod mine;
pub mod saves;
pub mod state;

use crate::content::Content;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use state::WorldState;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WorldError {
    #[error("unknown save {0:?}")]
    UnknownSave(String),
    #[error("unknown command {0:?}")]
    UnknownCommand(String),
    #[error("malformed call: {0}")]
    Malformed(String),
    #[error("{command} takes {expected} argument(s), got {found}")]
    BadArity { command: String, expected: usize, found: usize },
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error("unknown item {0:?}")]
    UnknownItem(String),
    #[error("unknown location {0:?}")]
    UnknownLocation(String),
    #[error("unknown npc {0:?}")]
    UnknownNpc(String),
    #[error("{0}")]
    Invalid(String),
}

/// Loads a save and reseeds its RNG. Same save and seed give the same world.
pub fn init_world(content: &Content, save_id: &str, seed: u64) -> Result<WorldState, WorldError> {
    let mut w = content
        .saves
        .get(save_id)
        .ok_or_else(|| WorldError::UnknownSave(save_id.to_string()))?
        .clone();
    w.seed = seed;
    w.save_id = save_id.to_string();
    w.rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(w)
}
