//! Schematic top-down raster. One square per tile: terrain fill, then
//! soil, features, crops, objects, buildings, exits and creatures layered
//! on top. Colors are listed in docs/legend.md.

use crate::content::ContentPack;
use crate::world::grid::Feature;
use crate::world::state::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_WIDTH: u32 = 1280;
pub const DEFAULT_HEIGHT: u32 = 720;
pub const DEFAULT_TILE: u32 = 32;
pub const MIN_WIDTH: u32 = 640;
pub const MIN_HEIGHT: u32 = 360;
pub const MAX_WIDTH: u32 = 3840;
pub const MAX_HEIGHT: u32 = 2160;

type Rgb = [u8; 3];

pub const VOID: Rgb = [0, 0, 0];
pub const GRASS: Rgb = [106, 170, 76];
pub const DIRT: Rgb = [181, 143, 96];
pub const PATH: Rgb = [200, 190, 160];
pub const FLOOR: Rgb = [170, 130, 90];
pub const WALL: Rgb = [70, 70, 80];
pub const WATER: Rgb = [60, 110, 200];
pub const SAND: Rgb = [230, 215, 150];
pub const MINE_FLOOR: Rgb = [120, 100, 80];
pub const TILLED: Rgb = [120, 80, 45];
pub const WATERED: Rgb = [80, 50, 30];
pub const WEEDS: Rgb = [40, 110, 40];
pub const STONE: Rgb = [150, 150, 150];
pub const TWIG: Rgb = [140, 90, 40];
pub const TREE: Rgb = [20, 80, 20];
pub const TALL_GRASS: Rgb = [150, 210, 90];
pub const NODE: Rgb = [200, 120, 60];
pub const DIG_SPOT: Rgb = [90, 60, 40];
pub const CROP_GROWING: Rgb = [60, 200, 60];
pub const CROP_READY: Rgb = [250, 210, 40];
pub const OBJECT: Rgb = [230, 120, 200];
pub const FORAGE: Rgb = [250, 250, 120];
pub const BUILDING: Rgb = [160, 60, 50];
pub const DOOR: Rgb = [90, 30, 20];
pub const EXIT: Rgb = [255, 0, 255];
pub const NPC: Rgb = [40, 60, 220];
pub const ANIMAL: Rgb = [255, 255, 255];
pub const MONSTER: Rgb = [220, 20, 20];
pub const PLAYER: Rgb = [255, 140, 0];

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RenderError {
    #[error("unsupported size {width}x{height}: must be within {MIN_WIDTH}x{MIN_HEIGHT}..={MAX_WIDTH}x{MAX_HEIGHT}")]
    Size { width: u32, height: u32 },
    #[error("tile size must be at least 4 pixels")]
    TileSize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisualObservation {
    pub width: u32,
    pub height: u32,
    pub tile_size: u32,
    /// Row-major RGB, 3 bytes per pixel.
    pub pixels: Vec<u8>,
}

/// Whole tiles visible at a given resolution. Leftover pixels form a black
/// margin split evenly around the grid.
pub fn field_of_view(width: u32, height: u32, tile: u32) -> (u32, u32) {
    (width / tile, height / tile)
}

struct Canvas {
    w: i64,
    h: i64,
    px: Vec<u8>,
}

impl Canvas {
    fn rect(&mut self, x: i64, y: i64, w: i64, h: i64, c: Rgb) {
        let (x0, y0) = (x.max(0), y.max(0));
        let (x1, y1) = ((x + w).min(self.w), (y + h).min(self.h));
        if x0 >= x1 || y0 >= y1 {
            return;
        }
        for yy in y0..y1 {
            let row = (yy * self.w) as usize * 3;
            for xx in x0..x1 {
                let i = row + xx as usize * 3;
                self.px[i..i + 3].copy_from_slice(&c);
            }
        }
    }

    fn frame(&mut self, x: i64, y: i64, s: i64, t: i64, c: Rgb) {
        self.rect(x, y, s, t, c);
        self.rect(x, y + s - t, s, t, c);
        self.rect(x, y, t, s, c);
        self.rect(x + s - t, y, t, s, c);
    }

    /// Square inset by `inset` pixels on every side.
    fn inset(&mut self, x: i64, y: i64, s: i64, inset: i64, c: Rgb) {
        self.rect(x + inset, y + inset, s - 2 * inset, s - 2 * inset, c);
    }
}

fn terrain_color(t: crate::world::grid::Terrain) -> Rgb {
    use crate::world::grid::Terrain::*;
    match t {
        Grass => GRASS,
        Dirt => DIRT,
        Path => PATH,
        Floor => FLOOR,
        Wall => WALL,
        Water => WATER,
        Sand => SAND,
        MineFloor => MINE_FLOOR,
    }
}

fn feature_color(f: &Feature) -> Rgb {
    match f {
        Feature::Weeds => WEEDS,
        Feature::Stone => STONE,
        Feature::Twig => TWIG,
        Feature::Tree { .. } => TREE,
        Feature::TallGrass => TALL_GRASS,
        Feature::Node { .. } => NODE,
        Feature::DigSpot { .. } => DIG_SPOT,
    }
}

pub fn render_visual(world: &WorldState, pack: &ContentPack, width: u32, height: u32, tile: u32) -> Result<VisualObservation, RenderError> {
    if !(MIN_WIDTH..=MAX_WIDTH).contains(&width) || !(MIN_HEIGHT..=MAX_HEIGHT).contains(&height) {
        return Err(RenderError::Size { width, height });
    }
    if tile < 4 {
        return Err(RenderError::TileSize);
    }
    let (cols, rows) = field_of_view(width, height, tile);
    let (px, py) = world.player.pos();
    let ox = px - (cols / 2) as i32;
    let oy = py - (rows / 2) as i32;
    let s = tile as i64;
    let mut cv = Canvas {
        w: width as i64,
        h: height as i64,
        px: vec![0; (width * height * 3) as usize],
    };
    let map_id = world.player.map.as_str();
    let m = world.player_map();
    let mx = (width - cols * tile) as i64 / 2;
    let my = (height - rows * tile) as i64 / 2;
    let at = |x: i32, y: i32| (mx + ((x - ox) as i64) * s, my + ((y - oy) as i64) * s);

    for r in 0..rows as i32 {
        for c in 0..cols as i32 {
            let (x, y) = (ox + c, oy + r);
            let (sx, sy) = at(x, y);
            let Some(t) = m.grid.get(x, y) else {
                cv.rect(sx, sy, s, s, VOID);
                continue;
            };
            cv.rect(sx, sy, s, s, terrain_color(t.terrain));
            if let Some(soil) = &t.soil {
                cv.inset(sx, sy, s, 1, if soil.watered { WATERED } else { TILLED });
                if let Some(crop) = &soil.crop {
                    let grown = pack.crop_for_seed(&crop.seed).map(|d| crop.days >= d.growth_days).unwrap_or(false);
                    let inset = if grown { s / 6 } else { s / 3 };
                    cv.inset(sx, sy, s, inset, if grown { CROP_READY } else { CROP_GROWING });
                }
            }
            if let Some(f) = &t.feature {
                cv.inset(sx, sy, s, s / 5, feature_color(f));
            }
        }
    }
    let visible = |x: i32, y: i32| x >= ox && y >= oy && x < ox + cols as i32 && y < oy + rows as i32;
    for b in &m.buildings {
        let def = &pack.buildings[&b.kind];
        for y in b.y..b.y + def.height {
            for x in b.x..b.x + def.width {
                if visible(x, y) {
                    let (sx, sy) = at(x, y);
                    cv.rect(sx, sy, s, s, BUILDING);
                    let rel = (x - b.x, y - b.y);
                    if def.door == Some(rel) || def.animal_door == Some(rel) {
                        cv.inset(sx, sy, s, s / 4, DOOR);
                    }
                }
            }
        }
    }
    for o in m.objects.iter().filter(|o| visible(o.x, o.y)) {
        let (sx, sy) = at(o.x, o.y);
        match &o.object {
            Object::Forage { .. } => cv.inset(sx, sy, s, s / 3, FORAGE),
            _ => {
                cv.inset(sx, sy, s, s / 6, OBJECT);
                cv.inset(sx, sy, s, s / 3, WALL);
            }
        }
    }
    for e in m.exits.iter().filter(|e| visible(e.x, e.y)) {
        let (sx, sy) = at(e.x, e.y);
        cv.frame(sx, sy, s, (s / 8).max(1), EXIT);
    }
    for a in world.animals.iter().filter(|a| a.map == map_id && visible(a.x, a.y)) {
        let (sx, sy) = at(a.x, a.y);
        cv.inset(sx, sy, s, s / 4, ANIMAL);
    }
    for n in world.npcs.iter().filter(|n| n.map == map_id && visible(n.x, n.y)) {
        let (sx, sy) = at(n.x, n.y);
        cv.inset(sx, sy, s, s / 6, NPC);
    }
    for mo in world
        .monsters
        .iter()
        .filter(|mo| mo.map == map_id && !mo.burrowed && visible(mo.x, mo.y))
    {
        let (sx, sy) = at(mo.x, mo.y);
        cv.inset(sx, sy, s, s / 6, MONSTER);
        if mo.shelled {
            cv.inset(sx, sy, s, s / 3, STONE);
        }
    }
    let (sx, sy) = at(px, py);
    cv.inset(sx, sy, s, s / 8, PLAYER);
    // Facing notch on the edge the player looks toward.
    let q = s / 4;
    let (nx, ny) = match world.player.facing {
        Direction::Up => (sx + s / 2 - q / 2, sy + s / 8),
        Direction::Down => (sx + s / 2 - q / 2, sy + s - s / 8 - q),
        Direction::Left => (sx + s / 8, sy + s / 2 - q / 2),
        Direction::Right => (sx + s - s / 8 - q, sy + s / 2 - q / 2),
    };
    cv.rect(nx, ny, q, q, VOID);

    Ok(VisualObservation {
        width,
        height,
        tile_size: tile,
        pixels: cv.px,
    })
}

impl VisualObservation {
    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = ((y * self.width + x) * 3) as usize;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::Content;
    use crate::world::init_world;

    #[test]
    fn higher_resolution_shows_more_tiles() {
        assert_eq!(field_of_view(1280, 720, 32), (40, 22));
        assert_eq!(field_of_view(1920, 1080, 32), (60, 33));
        assert_eq!(field_of_view(640, 360, 32), (20, 11));
    }

    #[test]
    fn rejects_tiny_frames() {
        let c = Content::shared();
        let w = init_world(&c, "save_new", 1).unwrap();
        assert!(render_visual(&w, &c.pack, 320, 200, 32).is_err());
    }

    #[test]
    fn player_tile_is_centered() {
        let c = Content::shared();
        let w = init_world(&c, "save_new", 1).unwrap();
        let v = render_visual(&w, &c.pack, 1280, 720, 32).unwrap();
        // Player occupies column 20, row 11 below a 16px top margin.
        assert_eq!(v.pixel(20 * 32 + 5, 16 + 11 * 32 + 16), PLAYER);
        assert_eq!(v.pixel(0, 0), VOID);
    }
}
