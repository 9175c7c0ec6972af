use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terrain {
    Grass,
    Dirt,
    Path,
    Floor,
    Wall,
    Water,
    Sand,
    MineFloor,
}

impl Terrain {
    const GLYPHS: [(Terrain, char); 8] = [
        (Terrain::Grass, '.'),
        (Terrain::Dirt, ','),
        (Terrain::Path, '='),
        (Terrain::Floor, '_'),
        (Terrain::Wall, '#'),
        (Terrain::Water, '~'),
        (Terrain::Sand, ':'),
        (Terrain::MineFloor, 'm'),
    ];

    pub fn glyph(self) -> char {
        Self::GLYPHS.iter().find(|(t, _)| *t == self).unwrap().1
    }

    pub fn from_glyph(c: char) -> Option<Terrain> {
        Self::GLYPHS.iter().find(|(_, g)| *g == c).map(|(t, _)| *t)
    }

    pub fn passable(self) -> bool {
        !matches!(self, Terrain::Wall | Terrain::Water)
    }

    pub fn diggable(self) -> bool {
        matches!(self, Terrain::Dirt | Terrain::MineFloor | Terrain::Sand)
    }

    pub fn label(self) -> &'static str {
        match self {
            Terrain::Grass => "Grass",
            Terrain::Dirt => "Dirt",
            Terrain::Path => "Path",
            Terrain::Floor => "Floor",
            Terrain::Wall => "Wall",
            Terrain::Water => "Water",
            Terrain::Sand => "Sand",
            Terrain::MineFloor => "Mine Floor",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Weeds,
    Stone,
    Twig,
    Tree,
    TallGrass,
    Node,
    DigSpot,
}

/// Something sitting on a tile that a tool can clear.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Feature {
    Weeds,
    Stone,
    Twig,
    Tree {
        species: String,
        stage: u32,
    },
    TallGrass,
    /// Ore or rock node; `item` is what breaking it yields.
    Node {
        item: String,
    },
    DigSpot {
        item: String,
    },
}

pub const TREE_MATURE_STAGE: u32 = 5;

impl Feature {
    pub fn kind(&self) -> FeatureKind {
        match self {
            Feature::Weeds => FeatureKind::Weeds,
            Feature::Stone => FeatureKind::Stone,
            Feature::Twig => FeatureKind::Twig,
            Feature::Tree { .. } => FeatureKind::Tree,
            Feature::TallGrass => FeatureKind::TallGrass,
            Feature::Node { .. } => FeatureKind::Node,
            Feature::DigSpot { .. } => FeatureKind::DigSpot,
        }
    }

    /// Dig spots lie flat; everything else blocks movement.
    pub fn blocks(&self) -> bool {
        !matches!(self, Feature::DigSpot { .. })
    }

    /// Name used by clear-type tallies.
    pub fn tally_name(&self) -> &str {
        match self {
            Feature::Weeds => "Weeds",
            Feature::Stone => "Stone",
            Feature::Twig => "Twig",
            Feature::Tree { .. } => "Tree",
            Feature::TallGrass => "Grass",
            Feature::Node { item } if item == "Stone" => "Stone",
            Feature::Node { .. } => "Ore",
            Feature::DigSpot { .. } => "Dig Spot",
        }
    }

    pub fn is_debris(&self) -> bool {
        matches!(self, Feature::Weeds | Feature::Stone | Feature::Twig)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crop {
    pub seed: String,
    pub days: u32,
}

/// Present only on tilled tiles.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Soil {
    #[serde(default)]
    pub watered: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fertilizer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crop: Option<Crop>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tile {
    pub terrain: Terrain,
    pub feature: Option<Feature>,
    pub soil: Option<Soil>,
}

impl Tile {
    pub fn bare(terrain: Terrain) -> Tile {
        Tile {
            terrain,
            feature: None,
            soil: None,
        }
    }
}

/// Row-major tile storage. Serialized as terrain glyph rows plus sparse
/// feature and soil lists, which keeps save files readable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "GridRepr", try_from = "GridRepr")]
pub struct TileGrid {
    width: i32,
    height: i32,
    tiles: Vec<Tile>,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    width: i32,
    height: i32,
    terrain: Vec<String>,
    #[serde(default)]
    features: Vec<(i32, i32, Feature)>,
    #[serde(default)]
    soil: Vec<(i32, i32, Soil)>,
}

impl From<TileGrid> for GridRepr {
    fn from(g: TileGrid) -> GridRepr {
        let mut terrain = Vec::with_capacity(g.height as usize);
        let mut features = Vec::new();
        let mut soil = Vec::new();
        for y in 0..g.height {
            let mut row = String::with_capacity(g.width as usize);
            for x in 0..g.width {
                let t = &g.tiles[(y * g.width + x) as usize];
                row.push(t.terrain.glyph());
                if let Some(f) = &t.feature {
                    features.push((x, y, f.clone()));
                }
                if let Some(s) = &t.soil {
                    soil.push((x, y, s.clone()));
                }
            }
            terrain.push(row);
        }
        GridRepr {
            width: g.width,
            height: g.height,
            terrain,
            features,
            soil,
        }
    }
}

impl TryFrom<GridRepr> for TileGrid {
    type Error = String;

    fn try_from(r: GridRepr) -> Result<TileGrid, String> {
        if r.terrain.len() != r.height as usize {
            return Err(format!("expected {} terrain rows, got {}", r.height, r.terrain.len()));
        }
        let mut tiles = Vec::with_capacity((r.width * r.height) as usize);
        for (y, row) in r.terrain.iter().enumerate() {
            if row.chars().count() != r.width as usize {
                return Err(format!("terrain row {y} has wrong width"));
            }
            for c in row.chars() {
                let t = Terrain::from_glyph(c).ok_or_else(|| format!("unknown terrain glyph {c:?}"))?;
                tiles.push(Tile::bare(t));
            }
        }
        let mut g = TileGrid {
            width: r.width,
            height: r.height,
            tiles,
        };
        for (x, y, f) in r.features {
            g.get_mut(x, y).ok_or("feature out of bounds")?.feature = Some(f);
        }
        for (x, y, s) in r.soil {
            g.get_mut(x, y).ok_or("soil out of bounds")?.soil = Some(s);
        }
        Ok(g)
    }
}

impl TileGrid {
    pub fn filled(width: i32, height: i32, terrain: Terrain) -> TileGrid {
        TileGrid {
            width,
            height,
            tiles: vec![Tile::bare(terrain); (width * height) as usize],
        }
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    pub fn in_bounds(&self, x: i32, y: i32) -> bool {
        x >= 0 && y >= 0 && x < self.width && y < self.height
    }

    pub fn get(&self, x: i32, y: i32) -> Option<&Tile> {
        if self.in_bounds(x, y) {
            Some(&self.tiles[(y * self.width + x) as usize])
        } else {
            None
        }
    }

    pub fn get_mut(&mut self, x: i32, y: i32) -> Option<&mut Tile> {
        if self.in_bounds(x, y) {
            Some(&mut self.tiles[(y * self.width + x) as usize])
        } else {
            None
        }
    }

    /// Iterate `(x, y, tile)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (i32, i32, &Tile)> + '_ {
        let w = self.width;
        self.tiles.iter().enumerate().map(move |(i, t)| (i as i32 % w, i as i32 / w, t))
    }

    pub fn tiles_mut(&mut self) -> impl Iterator<Item = &mut Tile> + '_ {
        self.tiles.iter_mut()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repr_round_trip() {
        let mut g = TileGrid::filled(4, 3, Terrain::Grass);
        g.get_mut(1, 1).unwrap().feature = Some(Feature::Tree {
            species: "oak".into(),
            stage: 5,
        });
        g.get_mut(2, 2).unwrap().terrain = Terrain::Dirt;
        g.get_mut(2, 2).unwrap().soil = Some(Soil {
            watered: true,
            fertilizer: None,
            crop: Some(Crop {
                seed: "Parsnip Seeds".into(),
                days: 2,
            }),
        });
        let json = serde_json::to_string(&g).unwrap();
        let back: TileGrid = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn rejects_ragged_rows() {
        let bad = r#"{"width":3,"height":2,"terrain":["...",".."]}"#;
        assert!(serde_json::from_str::<TileGrid>(bad).is_err());
    }
}
