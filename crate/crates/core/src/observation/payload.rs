//! Observation payloads as sent over the wire. The image travels as a
//! base64 PNG; each modality is left out entirely when not selected.

use super::text::TextObservation;
use super::visual::VisualObservation;
use base64::Engine;
use serde::{Deserialize, Serialize};
use std::io::Cursor;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    #[default]
    Both,
    ImageOnly,
    TextOnly,
}

impl Modality {
    pub fn wants_text(self) -> bool {
        self != Modality::ImageOnly
    }

    pub fn wants_image(self) -> bool {
        self != Modality::TextOnly
    }

    pub fn parse(s: &str) -> Option<Modality> {
        match s {
            "both" => Some(Modality::Both),
            "image_only" => Some(Modality::ImageOnly),
            "text_only" => Some(Modality::TextOnly),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImagePayload {
    pub width: u32,
    pub height: u32,
    pub tile_size: u32,
    /// Base64 (standard alphabet) PNG, 8-bit RGB.
    pub png: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationPayload {
    pub modality: Modality,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<TextObservation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<ImagePayload>,
}

#[derive(Debug, thiserror::Error)]
pub enum PayloadError {
    #[error("png encode: {0}")]
    Encode(#[from] png::EncodingError),
    #[error("png decode: {0}")]
    Decode(#[from] png::DecodingError),
    #[error("base64: {0}")]
    Base64(#[from] base64::DecodeError),
    #[error("image is not 8-bit RGB")]
    Format,
}

pub fn encode_png(v: &VisualObservation) -> Result<Vec<u8>, PayloadError> {
    let mut out = Vec::with_capacity(v.pixels.len() / 8);
    {
        let mut enc = png::Encoder::new(&mut out, v.width, v.height);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_compression(png::Compression::Fast);
        let mut w = enc.write_header()?;
        w.write_image_data(&v.pixels)?;
    }
    Ok(out)
}

pub fn decode_png(bytes: &[u8], tile_size: u32) -> Result<VisualObservation, PayloadError> {
    let mut reader = png::Decoder::new(Cursor::new(bytes)).read_info()?;
    let mut buf = vec![0; reader.output_buffer_size().ok_or(PayloadError::Format)?];
    let info = reader.next_frame(&mut buf)?;
    if info.color_type != png::ColorType::Rgb || info.bit_depth != png::BitDepth::Eight {
        return Err(PayloadError::Format);
    }
    buf.truncate(info.buffer_size());
    Ok(VisualObservation {
        width: info.width,
        height: info.height,
        tile_size,
        pixels: buf,
    })
}

/// Packs the selected modalities. `visual` may be `None` only when the
/// modality does not want an image.
pub fn serialize_observation(
    text: &TextObservation,
    visual: Option<&VisualObservation>,
    mode: Modality,
) -> Result<ObservationPayload, PayloadError> {
    let image = match (mode.wants_image(), visual) {
        (true, Some(v)) => Some(ImagePayload {
            width: v.width,
            height: v.height,
            tile_size: v.tile_size,
            png: base64::engine::general_purpose::STANDARD.encode(encode_png(v)?),
        }),
        _ => None,
    };
    Ok(ObservationPayload {
        modality: mode,
        text: mode.wants_text().then(|| text.clone()),
        image,
    })
}

impl ImagePayload {
    pub fn decode(&self) -> Result<VisualObservation, PayloadError> {
        let bytes = base64::engine::general_purpose::STANDARD.decode(&self.png)?;
        decode_png(&bytes, self.tile_size)
    }
}

/// Inverse of [`serialize_observation`].
pub fn deserialize_observation(p: &ObservationPayload) -> Result<(Option<TextObservation>, Option<VisualObservation>), PayloadError> {
    let visual = p.image.as_ref().map(|i| i.decode()).transpose()?;
    Ok((p.text.clone(), visual))
}
