//! What the agent sees: a text record and a schematic raster.

pub mod payload;
pub mod text;
pub mod visual;

pub use payload::{deserialize_observation, serialize_observation, Modality, ObservationPayload};
pub use text::{text_observation, TextObservation};
pub use visual::{render_visual, VisualObservation};

use crate::content::ContentPack;
use crate::world::WorldState;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObsConfig {
    pub modality: Modality,
    /// Half-width of the surrounding window; 3 gives 7x7.
    pub window: u32,
    pub width: u32,
    pub height: u32,
    pub tile_size: u32,
    pub map_info: bool,
}

impl Default for ObsConfig {
    fn default() -> Self {
        ObsConfig {
            modality: Modality::Both,
            window: 3,
            width: visual::DEFAULT_WIDTH,
            height: visual::DEFAULT_HEIGHT,
            tile_size: visual::DEFAULT_TILE,
            map_info: false,
        }
    }
}

/// Builds the payload for the configured modalities, skipping the render
/// entirely for text-only.
pub fn observe(world: &WorldState, pack: &ContentPack, cfg: &ObsConfig) -> Result<ObservationPayload, ObserveError> {
    let text = text_observation(world, pack, cfg.window, cfg.map_info);
    let visual = if cfg.modality.wants_image() {
        Some(render_visual(world, pack, cfg.width, cfg.height, cfg.tile_size)?)
    } else {
        None
    };
    Ok(serialize_observation(&text, visual.as_ref(), cfg.modality)?)
}

#[derive(Debug, thiserror::Error)]
pub enum ObserveError {
    #[error(transparent)]
    Render(#[from] visual::RenderError),
    #[error(transparent)]
    Payload(#[from] payload::PayloadError),
}
