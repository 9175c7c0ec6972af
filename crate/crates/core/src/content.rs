//! The ValleyLite content pack: every map, item, recipe, price and schedule
//! the engine knows about. Loaded from YAML and cross-checked before use.

use crate::world::clock::{Season, DAYS_PER_SEASON, DAY_MINUTES};
use crate::world::grid::{Feature, FeatureKind, Terrain, TileGrid, TREE_MATURE_STAGE};
use crate::world::state::{Category, Exit, ExitTarget, MapState, Object, PlacedObject, Species, WorldState};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

pub const PACK_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_PACK: &str = include_str!("../data/content/valleylite.yaml");

#[derive(Debug, thiserror::Error)]
pub enum ContentError {
    #[error("content pack does not parse: {0}")]
    Parse(#[from] serde_yaml::Error),
    #[error("content pack schema version {0} is not supported")]
    Schema(u32),
    #[error("constant {name} must be {expected}, pack says {found}")]
    Constant { name: &'static str, expected: i64, found: i64 },
    #[error("{context}: undefined item {item:?}")]
    UndefinedItem { context: String, item: String },
    #[error("{context}: undefined map {map:?}")]
    UndefinedMap { context: String, map: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Constants {
    pub base_energy: i32,
    pub base_health: i32,
    pub max_overdraft: i32,
    pub days_per_season: u32,
    pub day_start: u32,
    pub day_end: u32,
    pub minutes_per_tick: u32,
    pub realtime_ms_per_minute: u64,
    pub post_midnight_energy_factor: f64,
    pub passout_fee: i64,
    pub move_free_tiles: u32,
    pub move_tiles_per_tick: u32,
    pub talk_friendship: i32,
    pub pet_friendship: i32,
    pub gift_loved: i32,
    pub gift_liked: i32,
    pub gift_neutral: i32,
    pub gift_disliked: i32,
    pub gift_hated: i32,
    pub watering_can_capacity: u32,
    pub inventory_slots: usize,
    pub default_inventory_capacity: usize,
    pub station_radius: i32,
    pub incubation_days: u32,
    pub egg_laying_age: u32,
    pub tool_upgrade_days: u32,
    pub pet_bowl_friendship: i32,
    pub silo_capacity: u32,
    pub animal_sell_factor: f64,
    pub nightfall: BTreeMap<Season, u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeatherWeights {
    pub sunny: u32,
    pub rainy: u32,
    pub stormy: u32,
    pub snowy: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LegendEntry {
    pub terrain: Terrain,
    #[serde(default)]
    pub feature: Option<FeatureKind>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placeable {
    Object,
    Station,
    Furnace,
    Incubator,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ItemDef {
    pub id: String,
    pub category: Category,
    pub price: i64,
    #[serde(default)]
    pub energy_cost: i32,
    #[serde(default)]
    pub damage: i32,
    #[serde(default)]
    pub range: i32,
    /// Items that may be attached to this one (slingshot ammo).
    #[serde(default)]
    pub accepts: Vec<String>,
    #[serde(default)]
    pub edible: Option<i32>,
    #[serde(default)]
    pub fertilizer: bool,
    #[serde(default)]
    pub placeable: Option<Placeable>,
}

impl ItemDef {
    pub fn attachable(&self) -> bool {
        !self.accepts.is_empty()
    }

    pub fn stackable(&self) -> bool {
        !matches!(self.category, Category::Tool | Category::Weapon)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CropDef {
    pub produce: String,
    pub growth_days: u32,
    pub seasons: Vec<Season>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecipeKind {
    Crafting,
    Cooking,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecipeDef {
    pub kind: RecipeKind,
    #[serde(default)]
    pub station: Option<String>,
    pub ingredients: BTreeMap<String, u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmeltDef {
    pub output: String,
    pub count: u32,
    pub minutes: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BuildingDef {
    pub width: i32,
    pub height: i32,
    #[serde(default)]
    pub door: Option<(i32, i32)>,
    #[serde(default)]
    pub animal_door: Option<(i32, i32)>,
    #[serde(default)]
    pub interior: Option<String>,
    #[serde(default)]
    pub capacity: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnimalDef {
    pub home: String,
    #[serde(default)]
    pub produce: Option<String>,
    pub price: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonsterDef {
    pub species: Species,
    pub hp: i32,
    pub damage: i32,
    pub speed: u32,
    pub aggro_radius: i32,
    #[serde(default)]
    pub shell_minutes: u32,
    #[serde(default)]
    pub walk_minutes: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MineLevelDef {
    pub alcove_node: String,
    #[serde(default)]
    pub nodes: Vec<(i32, i32, String)>,
    #[serde(default)]
    pub dig_spots: Vec<(i32, i32, String)>,
    #[serde(default)]
    pub monsters: BTreeMap<String, u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapPoint {
    pub map: String,
    pub x: i32,
    pub y: i32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MineDef {
    pub template: String,
    pub arrival: (i32, i32),
    pub alcove_node: (i32, i32),
    pub ladder_down: (i32, i32),
    pub entrance: MapPoint,
    pub entrance_ladder: (i32, i32),
    pub up_ladder: (i32, i32),
    pub min_spawn_distance: i32,
    pub levels: BTreeMap<u32, MineLevelDef>,
    pub default_level: MineLevelDef,
}

impl MineDef {
    pub fn level(&self, n: u32) -> &MineLevelDef {
        self.levels.get(&n).unwrap_or(&self.default_level)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NpcDef {
    /// (HHMM, map, x, y), sorted by time.
    pub schedule: Vec<(u32, String, i32, i32)>,
    #[serde(default)]
    pub loved: Vec<String>,
    #[serde(default)]
    pub liked: Vec<String>,
    #[serde(default)]
    pub disliked: Vec<String>,
    #[serde(default)]
    pub hated: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Taste {
    Loved,
    Liked,
    Neutral,
    Disliked,
    Hated,
}

impl NpcDef {
    pub fn taste(&self, item: &str) -> Taste {
        let has = |v: &Vec<String>| v.iter().any(|i| i == item);
        if has(&self.loved) {
            Taste::Loved
        } else if has(&self.liked) {
            Taste::Liked
        } else if has(&self.hated) {
            Taste::Hated
        } else if has(&self.disliked) {
            Taste::Disliked
        } else {
            Taste::Neutral
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum StockEntry {
    Item {
        item: String,
        price: i64,
    },
    Backpack {
        backpack: String,
        capacity: usize,
        price: i64,
    },
    ToolUpgrade {
        tool_upgrade: String,
        from: String,
        price: i64,
        materials: BTreeMap<String, u32>,
    },
    GeodeService {
        geode_service: String,
        price: i64,
    },
    Blueprint {
        blueprint: String,
        price: i64,
        materials: BTreeMap<String, u32>,
    },
    HouseUpgrade {
        house_upgrade: u32,
        price: i64,
        materials: BTreeMap<String, u32>,
    },
    BuildingService {
        building_service: String,
    },
    Animal {
        animal: String,
        price: i64,
    },
    Membership {
        membership: String,
        price: i64,
    },
    Project {
        project: String,
        price: i64,
        requires: String,
    },
}

impl StockEntry {
    pub fn label(&self) -> String {
        match self {
            StockEntry::Item { item, price } => format!("{item} ({price}g)"),
            StockEntry::Backpack { backpack, price, .. } => format!("{backpack} ({price}g)"),
            StockEntry::ToolUpgrade {
                tool_upgrade,
                price,
                materials,
                ..
            } => {
                format!("Upgrade to {tool_upgrade} ({price}g{})", materials_suffix(materials))
            }
            StockEntry::GeodeService { geode_service, price } => format!("Break {geode_service} ({price}g each)"),
            StockEntry::Blueprint {
                blueprint,
                price,
                materials,
            } => {
                format!("Build {blueprint} ({price}g{})", materials_suffix(materials))
            }
            StockEntry::HouseUpgrade {
                house_upgrade,
                price,
                materials,
            } => {
                format!("Farmhouse level {house_upgrade} ({price}g{})", materials_suffix(materials))
            }
            StockEntry::BuildingService { building_service } => format!("{} a building", capitalize(building_service)),
            StockEntry::Animal { animal, price } => format!("{animal} ({price}g)"),
            StockEntry::Membership { membership, price } => format!("{membership} ({price}g)"),
            StockEntry::Project { project, price, .. } => format!("{project} ({price}g)"),
        }
    }
}

fn materials_suffix(m: &BTreeMap<String, u32>) -> String {
    m.iter().map(|(k, v)| format!(", {v} {k}")).collect()
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().collect::<String>() + c.as_str(),
        None => String::new(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShopDef {
    pub map: String,
    pub counter: (i32, i32),
    pub stand: (i32, i32),
    pub stock: Vec<StockEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Objective {
    Harvest { harvest: String, count: u32 },
    TalkTo { talk_to: Vec<String> },
    Deliver { deliver: String, count: u32, to: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuestDef {
    pub name: String,
    pub kind: String,
    #[serde(default)]
    pub cancellable: bool,
    pub objective: Objective,
    pub reward: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HelpQuestDef {
    pub deliver: String,
    pub count: u32,
    pub to: String,
    pub reward: i64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ProgressionIds {
    pub bundles: Vec<String>,
    pub rooms: Vec<String>,
    pub events: Vec<String>,
    pub mail: Vec<String>,
    pub junimo_notes: Vec<String>,
    pub projects: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeatureDef {
    pub tool: String,
    #[serde(default)]
    pub drops: BTreeMap<String, u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapDef {
    pub outdoor: bool,
    #[serde(default)]
    pub objects: Vec<(i32, i32, String)>,
    #[serde(default)]
    pub forage: Vec<(i32, i32, String)>,
    pub rows: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinkSide(pub String, pub i32, pub i32, pub i32, pub i32);

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinkDef {
    pub a: LinkSide,
    pub b: LinkSide,
    #[serde(default)]
    pub hours: Option<(u32, u32)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContentPack {
    pub schema_version: u32,
    pub name: String,
    pub version: String,
    pub constants: Constants,
    pub quality_multipliers: BTreeMap<u32, f64>,
    pub weather: BTreeMap<Season, WeatherWeights>,
    pub legend: BTreeMap<String, LegendEntry>,
    pub items: BTreeMap<String, ItemDef>,
    pub crops: BTreeMap<String, CropDef>,
    pub recipes: BTreeMap<String, RecipeDef>,
    pub default_recipes: Vec<String>,
    pub smelting: BTreeMap<String, SmeltDef>,
    pub geode_drops: Vec<String>,
    pub buildings: BTreeMap<String, BuildingDef>,
    pub building_sites: Vec<(i32, i32)>,
    pub animals: BTreeMap<String, AnimalDef>,
    pub monsters: BTreeMap<String, MonsterDef>,
    pub mine: MineDef,
    pub npcs: BTreeMap<String, NpcDef>,
    pub shops: BTreeMap<String, ShopDef>,
    pub shopkeepers: BTreeMap<String, String>,
    pub quests: BTreeMap<String, QuestDef>,
    pub help_quests: Vec<HelpQuestDef>,
    pub progression: ProgressionIds,
    pub features: BTreeMap<FeatureKind, FeatureDef>,
    pub maps: BTreeMap<String, MapDef>,
    pub links: Vec<LinkDef>,
}

impl ContentPack {
    pub fn parse(src: &str) -> Result<ContentPack, ContentError> {
        let pack: ContentPack = serde_yaml::from_str(src)?;
        pack.validate()?;
        Ok(pack)
    }

    pub fn item(&self, name: &str) -> Option<&ItemDef> {
        self.items.get(name)
    }

    pub fn item_by_id(&self, id: &str) -> Option<(&str, &ItemDef)> {
        self.items.iter().find(|(_, d)| d.id == id).map(|(n, d)| (n.as_str(), d))
    }

    pub fn quality_multiplier(&self, quality: u32) -> f64 {
        self.quality_multipliers
            .range(..=quality)
            .next_back()
            .map(|(_, m)| *m)
            .unwrap_or(1.0)
    }

    pub fn gift_delta(&self, taste: Taste) -> i32 {
        let c = &self.constants;
        match taste {
            Taste::Loved => c.gift_loved,
            Taste::Liked => c.gift_liked,
            Taste::Neutral => c.gift_neutral,
            Taste::Disliked => c.gift_disliked,
            Taste::Hated => c.gift_hated,
        }
    }

    /// Resolve a shopkeeper name or shop id, case-insensitively.
    pub fn shop_id(&self, who: &str) -> Option<&str> {
        let w = who.trim();
        if let Some((id, _)) = self.shops.iter().find(|(id, _)| id.eq_ignore_ascii_case(w)) {
            return Some(id);
        }
        self.shopkeepers
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(w))
            .map(|(_, id)| id.as_str())
    }

    pub fn crop_for_seed(&self, seed: &str) -> Option<&CropDef> {
        self.crops.get(seed)
    }

    fn validate(&self) -> Result<(), ContentError> {
        if self.schema_version != PACK_SCHEMA_VERSION {
            return Err(ContentError::Schema(self.schema_version));
        }
        let c = &self.constants;
        let fixed: [(&'static str, i64, i64); 5] = [
            ("base_energy", 270, c.base_energy as i64),
            ("days_per_season", DAYS_PER_SEASON as i64, c.days_per_season as i64),
            ("day_start", 600, c.day_start as i64),
            ("day_end", 2600, c.day_end as i64),
            ("minutes_per_tick", 10, c.minutes_per_tick as i64),
        ];
        for (name, expected, found) in fixed {
            if expected != found {
                return Err(ContentError::Constant { name, expected, found });
            }
        }
        if c.inventory_slots != crate::world::state::INVENTORY_SLOTS {
            return Err(ContentError::Invalid("inventory_slots must be 36".into()));
        }
        if c.day_end - c.day_start != 2000 || DAY_MINUTES != 1200 {
            return Err(ContentError::Invalid("day length mismatch".into()));
        }
        for s in Season::ALL {
            if !self.weather.contains_key(&s) || !c.nightfall.contains_key(&s) {
                return Err(ContentError::Invalid(format!("season {s} lacks weather or nightfall")));
            }
        }

        let item = |ctx: &str, name: &str| -> Result<(), ContentError> {
            if self.items.contains_key(name) {
                Ok(())
            } else {
                Err(ContentError::UndefinedItem {
                    context: ctx.to_string(),
                    item: name.to_string(),
                })
            }
        };
        let map = |ctx: &str, name: &str| -> Result<(), ContentError> {
            if self.maps.contains_key(name) {
                Ok(())
            } else {
                Err(ContentError::UndefinedMap {
                    context: ctx.to_string(),
                    map: name.to_string(),
                })
            }
        };

        for (name, def) in &self.items {
            for a in &def.accepts {
                item(&format!("item {name} accepts"), a)?;
            }
        }
        for (seed, crop) in &self.crops {
            item("crop seed", seed)?;
            item(&format!("crop {seed}"), &crop.produce)?;
        }
        for (name, r) in &self.recipes {
            item("recipe product", name)?;
            for ing in r.ingredients.keys() {
                item(&format!("recipe {name}"), ing)?;
            }
        }
        for r in &self.default_recipes {
            if !self.recipes.contains_key(r) {
                return Err(ContentError::Invalid(format!("default recipe {r} is not a recipe")));
            }
        }
        for (input, s) in &self.smelting {
            item("smelting input", input)?;
            item("smelting output", &s.output)?;
        }
        for g in &self.geode_drops {
            item("geode drop", g)?;
        }
        for (kind, f) in &self.features {
            item(&format!("feature {kind:?} tool"), &f.tool)?;
            for d in f.drops.keys() {
                item(&format!("feature {kind:?} drop"), d)?;
            }
        }
        for (name, b) in &self.buildings {
            if let Some(i) = &b.interior {
                map(&format!("building {name}"), i)?;
            }
        }
        for (name, a) in &self.animals {
            if let Some(p) = &a.produce {
                item(&format!("animal {name}"), p)?;
            }
        }
        for (name, npc) in &self.npcs {
            if npc.schedule.is_empty() {
                return Err(ContentError::Invalid(format!("npc {name} has no schedule")));
            }
            for w in npc.schedule.windows(2) {
                if w[0].0 >= w[1].0 {
                    return Err(ContentError::Invalid(format!("npc {name} schedule not sorted")));
                }
            }
            for (_, m, x, y) in &npc.schedule {
                map(&format!("npc {name}"), m)?;
                self.check_open_tile(m, *x, *y, &format!("npc {name}"))?;
            }
            for i in npc.loved.iter().chain(&npc.liked).chain(&npc.disliked).chain(&npc.hated) {
                item(&format!("npc {name} tastes"), i)?;
            }
        }
        for (id, shop) in &self.shops {
            map(&format!("shop {id}"), &shop.map)?;
            for e in &shop.stock {
                match e {
                    StockEntry::Item { item: i, .. } => item(&format!("shop {id}"), i)?,
                    StockEntry::ToolUpgrade {
                        tool_upgrade,
                        from,
                        materials,
                        ..
                    } => {
                        item(&format!("shop {id}"), tool_upgrade)?;
                        item(&format!("shop {id}"), from)?;
                        for m in materials.keys() {
                            item(&format!("shop {id}"), m)?;
                        }
                    }
                    StockEntry::GeodeService { geode_service, .. } => item(&format!("shop {id}"), geode_service)?,
                    StockEntry::Blueprint { blueprint, materials, .. } => {
                        if !self.buildings.contains_key(blueprint) {
                            return Err(ContentError::Invalid(format!("shop {id}: unknown building {blueprint}")));
                        }
                        for m in materials.keys() {
                            item(&format!("shop {id}"), m)?;
                        }
                    }
                    StockEntry::HouseUpgrade { materials, .. } => {
                        for m in materials.keys() {
                            item(&format!("shop {id}"), m)?;
                        }
                    }
                    StockEntry::Animal { animal, .. } => {
                        if !self.animals.contains_key(animal) {
                            return Err(ContentError::Invalid(format!("shop {id}: unknown animal {animal}")));
                        }
                    }
                    StockEntry::BuildingService { building_service } => {
                        if building_service != "move" && building_service != "demolish" {
                            return Err(ContentError::Invalid(format!("shop {id}: unknown service {building_service}")));
                        }
                    }
                    StockEntry::Backpack { .. } | StockEntry::Membership { .. } | StockEntry::Project { .. } => {}
                }
            }
        }
        for (npc, shop) in &self.shopkeepers {
            if !self.npcs.contains_key(npc) || !self.shops.contains_key(shop) {
                return Err(ContentError::Invalid(format!("shopkeeper {npc} -> {shop} is dangling")));
            }
        }
        for (id, q) in &self.quests {
            match &q.objective {
                Objective::Harvest { harvest, .. } => item(&format!("quest {id}"), harvest)?,
                Objective::TalkTo { talk_to } => {
                    for n in talk_to {
                        if !self.npcs.contains_key(n) {
                            return Err(ContentError::Invalid(format!("quest {id}: unknown npc {n}")));
                        }
                    }
                }
                Objective::Deliver { deliver, to, .. } => {
                    item(&format!("quest {id}"), deliver)?;
                    if !self.npcs.contains_key(to) {
                        return Err(ContentError::Invalid(format!("quest {id}: unknown npc {to}")));
                    }
                }
            }
        }
        for h in &self.help_quests {
            item("help quest", &h.deliver)?;
            if !self.npcs.contains_key(&h.to) {
                return Err(ContentError::Invalid(format!("help quest: unknown npc {}", h.to)));
            }
        }
        for (name, def) in &self.monsters {
            if def.hp <= 0 {
                return Err(ContentError::Invalid(format!("monster {name} needs hp > 0")));
            }
        }
        map("mine template", &self.mine.template)?;
        map("mine entrance", &self.mine.entrance.map)?;
        for lvl in self.mine.levels.values().chain([&self.mine.default_level]) {
            item("mine node", &lvl.alcove_node)?;
            for (_, _, i) in lvl.nodes.iter().chain(&lvl.dig_spots) {
                item("mine node", i)?;
            }
            for m in lvl.monsters.keys() {
                if !self.monsters.contains_key(m) {
                    return Err(ContentError::Invalid(format!("mine level: unknown monster {m}")));
                }
            }
        }

        for (name, def) in &self.maps {
            let w = def.rows.first().map(|r| r.chars().count()).unwrap_or(0);
            if w == 0 {
                return Err(ContentError::Invalid(format!("map {name} is empty")));
            }
            for r in &def.rows {
                if r.chars().count() != w {
                    return Err(ContentError::Invalid(format!("map {name} has ragged rows")));
                }
                for ch in r.chars() {
                    if !self.legend.contains_key(&ch.to_string()) {
                        return Err(ContentError::Invalid(format!("map {name}: glyph {ch:?} not in legend")));
                    }
                }
            }
            for (_, _, i) in &def.forage {
                item(&format!("map {name} forage"), i)?;
            }
            for (_, _, o) in &def.objects {
                if !matches!(o.as_str(), "bed" | "quest_board" | "stove") {
                    return Err(ContentError::Invalid(format!("map {name}: unknown object {o}")));
                }
            }
        }
        for l in &self.links {
            for side in [&l.a, &l.b] {
                map("link", &side.0)?;
                self.check_open_tile(&side.0, side.3, side.4, "link arrival")?;
            }
        }
        Ok(())
    }

    fn check_open_tile(&self, map: &str, x: i32, y: i32, ctx: &str) -> Result<(), ContentError> {
        let def = &self.maps[map];
        let ch = def
            .rows
            .get(y as usize)
            .and_then(|r| r.chars().nth(x as usize))
            .ok_or_else(|| ContentError::Invalid(format!("{ctx}: ({x},{y}) outside {map}")))?;
        let entry = &self.legend[&ch.to_string()];
        if !entry.terrain.passable() || entry.feature.is_some() {
            return Err(ContentError::Invalid(format!("{ctx}: ({x},{y}) on {map} is not walkable")));
        }
        Ok(())
    }

    /// Fresh map state from its definition: terrain, features, forage,
    /// fixed objects, and exits from the link table.
    pub fn build_map(&self, name: &str) -> Option<MapState> {
        let def = self.maps.get(name)?;
        let h = def.rows.len() as i32;
        let w = def.rows[0].chars().count() as i32;
        let mut grid = TileGrid::filled(w, h, Terrain::Grass);
        for (y, row) in def.rows.iter().enumerate() {
            for (x, ch) in row.chars().enumerate() {
                let e = &self.legend[&ch.to_string()];
                let t = grid.get_mut(x as i32, y as i32).unwrap();
                t.terrain = e.terrain;
                t.feature = e.feature.map(|k| match k {
                    FeatureKind::Weeds => Feature::Weeds,
                    FeatureKind::Stone => Feature::Stone,
                    FeatureKind::Twig => Feature::Twig,
                    FeatureKind::Tree => Feature::Tree {
                        species: "oak".into(),
                        stage: TREE_MATURE_STAGE,
                    },
                    FeatureKind::TallGrass => Feature::TallGrass,
                    FeatureKind::Node => Feature::Node { item: "Stone".into() },
                    FeatureKind::DigSpot => Feature::DigSpot { item: "Clay".into() },
                });
            }
        }
        let mut objects = Vec::new();
        for (x, y, o) in &def.objects {
            let object = match o.as_str() {
                "bed" => Object::Bed,
                "quest_board" => Object::QuestBoard,
                _ => Object::Stove,
            };
            objects.push(PlacedObject { x: *x, y: *y, object });
        }
        for (x, y, item) in &def.forage {
            objects.push(PlacedObject {
                x: *x,
                y: *y,
                object: Object::Forage { item: item.clone() },
            });
        }
        for (id, shop) in &self.shops {
            if shop.map == name {
                objects.push(PlacedObject {
                    x: shop.counter.0,
                    y: shop.counter.1,
                    object: Object::Counter { shop: id.clone() },
                });
            }
        }
        let mut exits = Vec::new();
        for l in &self.links {
            if l.a.0 == name {
                exits.push(Exit {
                    x: l.a.1,
                    y: l.a.2,
                    to: ExitTarget::Map {
                        map: l.b.0.clone(),
                        x: l.b.3,
                        y: l.b.4,
                    },
                    hours: l.hours,
                });
            }
            if l.b.0 == name {
                exits.push(Exit {
                    x: l.b.1,
                    y: l.b.2,
                    to: ExitTarget::Map {
                        map: l.a.0.clone(),
                        x: l.a.3,
                        y: l.a.4,
                    },
                    hours: None,
                });
            }
        }
        if name == self.mine.entrance.map {
            let (lx, ly) = self.mine.entrance_ladder;
            objects.push(PlacedObject {
                x: lx,
                y: ly,
                object: Object::Ladder,
            });
            exits.push(Exit {
                x: lx,
                y: ly,
                to: ExitTarget::MineLevel { level: 1 },
                hours: None,
            });
        }
        Some(MapState {
            outdoor: def.outdoor,
            grid,
            objects,
            exits,
            buildings: Vec::new(),
        })
    }

    /// The `D` glyph in an interior's bottom row: its way out.
    pub fn door_glyph(&self, map: &str) -> Option<(i32, i32)> {
        let rows = &self.maps.get(map)?.rows;
        let y = rows.len() - 1;
        let x = rows[y].chars().position(|c| c == 'D')?;
        Some((x as i32, y as i32))
    }

    /// Default landing tile for warps that omit coordinates: the first
    /// link arrival on that map.
    pub fn default_arrival(&self, map: &str) -> Option<(i32, i32)> {
        for l in &self.links {
            if l.a.0 == map {
                return Some((l.a.3, l.a.4));
            }
            if l.b.0 == map {
                return Some((l.b.3, l.b.4));
            }
        }
        None
    }

    /// Case-insensitive map lookup plus a few friendly aliases.
    pub fn resolve_map(&self, name: &str) -> Option<String> {
        let n = name.trim();
        let alias = match n.to_ascii_lowercase().as_str() {
            "joja" | "jojamart" => Some("JojaMart"),
            "farmhouse" | "home" => Some("FarmHouse"),
            "busstop" | "bus_stop" | "bus stop" => Some("BusStop"),
            "seedshop" | "pierre" | "pierre's general store" => Some("SeedShop"),
            "sciencehouse" | "carpenter" => Some("ScienceHouse"),
            "animalshop" | "ranch" => Some("AnimalShop"),
            _ => None,
        };
        if let Some(a) = alias {
            return Some(a.to_string());
        }
        if let Some(level) = n.strip_prefix("UndergroundMine").and_then(|s| s.parse::<u32>().ok()) {
            if level >= 1 {
                return Some(format!("UndergroundMine{level}"));
            }
        }
        self.maps.keys().find(|k| !k.starts_with('@') && k.eq_ignore_ascii_case(n)).cloned()
    }
}

pub const SAVE_NEW: &str = include_str!("../data/saves/save_new.json");
pub const SAVE_FARMING: &str = include_str!("../data/saves/save_farming.json");
pub const SAVE_QUESTS: &str = include_str!("../data/saves/save_quests.json");

/// Pack plus the save registry. Cheap to share across instances.
#[derive(Debug)]
pub struct Content {
    pub pack: ContentPack,
    pub saves: BTreeMap<String, WorldState>,
}

impl Content {
    pub fn new(pack: ContentPack) -> Content {
        Content {
            pack,
            saves: BTreeMap::new(),
        }
    }

    pub fn add_save(&mut self, id: &str, json: &str) -> Result<(), ContentError> {
        let w = WorldState::from_json(json).map_err(|e| ContentError::Invalid(format!("save {id}: {e}")))?;
        if w.schema_version != crate::world::state::SAVE_SCHEMA_VERSION {
            return Err(ContentError::Invalid(format!("save {id}: schema {}", w.schema_version)));
        }
        self.saves.insert(id.to_string(), w);
        Ok(())
    }

    /// The bundled pack and the three shipped saves.
    pub fn load_default() -> Result<Content, ContentError> {
        let mut c = Content::new(ContentPack::parse(DEFAULT_PACK)?);
        c.add_save("save_new", SAVE_NEW)?;
        c.add_save("save_farming", SAVE_FARMING)?;
        c.add_save("save_quests", SAVE_QUESTS)?;
        Ok(c)
    }

    /// Process-wide shared copy of the default content.
    pub fn shared() -> Arc<Content> {
        static SHARED: OnceLock<Arc<Content>> = OnceLock::new();
        SHARED
            .get_or_init(|| Arc::new(Content::load_default().expect("bundled content is valid")))
            .clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_pack_validates() {
        let p = ContentPack::parse(DEFAULT_PACK).unwrap();
        assert_eq!(p.constants.base_energy, 270);
        assert!(p.maps.contains_key("Farm"));
    }

    #[test]
    fn constants_are_checked() {
        let bad = DEFAULT_PACK.replace("base_energy: 270", "base_energy: 300");
        assert!(matches!(
            ContentPack::parse(&bad),
            Err(ContentError::Constant { name: "base_energy", .. })
        ));
        let bad = DEFAULT_PACK.replace("days_per_season: 28", "days_per_season: 30");
        assert!(ContentPack::parse(&bad).is_err());
    }

    #[test]
    fn undefined_items_are_rejected() {
        let bad = DEFAULT_PACK.replace("loved: [Coffee]", "loved: [Hot Pepper]");
        assert!(matches!(ContentPack::parse(&bad), Err(ContentError::UndefinedItem { .. })));
    }

    #[test]
    fn quality_multiplier_steps() {
        let p = ContentPack::parse(DEFAULT_PACK).unwrap();
        assert_eq!(p.quality_multiplier(0), 1.0);
        assert_eq!(p.quality_multiplier(3), 1.25);
        assert_eq!(p.quality_multiplier(4), 1.5);
    }
}
