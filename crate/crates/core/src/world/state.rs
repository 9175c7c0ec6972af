use super::clock::GameClock;
use super::grid::TileGrid;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const SAVE_SCHEMA_VERSION: u32 = 1;
pub const INVENTORY_SLOTS: usize = 36;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Right,
    Down,
    Left,
}

impl Direction {
    /// Neighbour order used everywhere ties need breaking.
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Right, Direction::Down, Direction::Left];

    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::Up => (0, -1),
            Direction::Right => (1, 0),
            Direction::Down => (0, 1),
            Direction::Left => (-1, 0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Right => "right",
            Direction::Down => "down",
            Direction::Left => "left",
        }
    }

    pub fn parse(s: &str) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| d.name() == s)
    }

    pub fn from_delta(dx: i32, dy: i32) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| d.delta() == (dx, dy))
    }

    pub fn step(self, (x, y): (i32, i32)) -> (i32, i32) {
        let (dx, dy) = self.delta();
        (x + dx, y + dy)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weather {
    Sunny,
    Rainy,
    Stormy,
    Snowy,
}

impl Weather {
    pub fn waters_crops(self) -> bool {
        matches!(self, Weather::Rainy | Weather::Stormy)
    }

    pub fn name(self) -> &'static str {
        match self {
            Weather::Sunny => "sunny",
            Weather::Rainy => "rainy",
            Weather::Stormy => "stormy",
            Weather::Snowy => "snowy",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Paused,
    Realtime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Tool,
    Weapon,
    Seed,
    Crop,
    Resource,
    Craftable,
    Food,
    Misc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemStack {
    pub name: String,
    pub quantity: u32,
    #[serde(default)]
    pub quality: u32,
    pub category: Category,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attachment: Option<Box<ItemStack>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Player {
    pub map: String,
    pub x: i32,
    pub y: i32,
    pub facing: Direction,
    pub health: i32,
    pub max_health: i32,
    pub energy: i32,
    pub base_energy: i32,
    pub money: i64,
    pub inventory: Vec<Option<ItemStack>>,
    /// Slots below this index are usable.
    pub capacity: usize,
    pub chosen_slot: usize,
    pub water: u32,
    pub skills: BTreeMap<String, u32>,
    pub friendships: BTreeMap<String, i32>,
    pub recipes_known: BTreeSet<String>,
    pub luck: i32,
    pub house_level: u32,
    #[serde(default)]
    pub dating: BTreeSet<String>,
}

impl Player {
    pub fn pos(&self) -> (i32, i32) {
        (self.x, self.y)
    }

    pub fn facing_tile(&self) -> (i32, i32) {
        self.facing.step(self.pos())
    }

    pub fn chosen(&self) -> Option<&ItemStack> {
        self.inventory.get(self.chosen_slot).and_then(|s| s.as_ref())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExitTarget {
    Map {
        map: String,
        x: i32,
        y: i32,
    },
    /// Leave an interior through the door of the building that owns it.
    Building {
        id: u32,
    },
    MineLevel {
        level: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exit {
    pub x: i32,
    pub y: i32,
    pub to: ExitTarget,
    /// `[open, close)` in HHMM; entry is refused outside it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hours: Option<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Object {
    Bed,
    Counter {
        shop: String,
    },
    QuestBoard,
    PetBowl {
        filled: bool,
    },
    Forage {
        item: String,
    },
    Placed {
        item: String,
    },
    Stove,
    CookoutKit,
    Ladder,
    Furnace {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        output: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ready_at: Option<u64>,
    },
    Incubator {
        egg: bool,
        days: u32,
    },
}

impl Object {
    pub fn label(&self) -> String {
        match self {
            Object::Bed => "Bed".into(),
            Object::Counter { shop } => format!("Shop Counter: {shop}"),
            Object::QuestBoard => "Quest Board".into(),
            Object::PetBowl { .. } => "Pet Bowl".into(),
            Object::Forage { item } => item.clone(),
            Object::Placed { item } => item.clone(),
            Object::Stove => "Stove".into(),
            Object::CookoutKit => "Cookout Kit".into(),
            Object::Ladder => "Ladder".into(),
            Object::Furnace { .. } => "Furnace".into(),
            Object::Incubator { .. } => "Incubator".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedObject {
    pub x: i32,
    pub y: i32,
    pub object: Object,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Building {
    pub id: u32,
    pub kind: String,
    pub x: i32,
    pub y: i32,
    #[serde(default)]
    pub animal_door_open: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapState {
    pub outdoor: bool,
    pub grid: TileGrid,
    #[serde(default)]
    pub objects: Vec<PlacedObject>,
    #[serde(default)]
    pub exits: Vec<Exit>,
    #[serde(default)]
    pub buildings: Vec<Building>,
}

impl MapState {
    pub fn object_at(&self, x: i32, y: i32) -> Option<&PlacedObject> {
        self.objects.iter().find(|o| o.x == x && o.y == y)
    }

    pub fn object_at_mut(&mut self, x: i32, y: i32) -> Option<&mut PlacedObject> {
        self.objects.iter_mut().find(|o| o.x == x && o.y == y)
    }

    pub fn exit_at(&self, x: i32, y: i32) -> Option<&Exit> {
        self.exits.iter().find(|e| e.x == x && e.y == y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Npc {
    pub name: String,
    pub map: String,
    pub x: i32,
    pub y: i32,
    pub facing: Direction,
    /// Schedule entry last applied; a manual warp holds until the next entry.
    pub slot: Option<usize>,
    #[serde(default)]
    pub talked_today: bool,
    #[serde(default)]
    pub gifted_today: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Animal {
    pub id: u32,
    pub kind: String,
    pub name: String,
    pub map: String,
    pub x: i32,
    pub y: i32,
    pub age_days: u32,
    pub friendship: i32,
    #[serde(default)]
    pub petted_today: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Species {
    GreenSlime,
    Bug,
    Grub,
    Fly,
    Duggy,
    RockCrab,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monster {
    pub id: u32,
    pub name: String,
    pub species: Species,
    pub map: String,
    pub x: i32,
    pub y: i32,
    pub hp: i32,
    /// Movement accumulator; one tile per 10 points.
    pub acc: u32,
    pub cooldown: u32,
    /// Heading for momentum movers.
    pub heading: (i32, i32),
    /// Minutes spent in the current phase (shell/walk, burrow/surface).
    pub phase: u32,
    #[serde(default)]
    pub shelled: bool,
    #[serde(default)]
    pub burrowed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestStatus {
    Active,
    Completed,
    Claimed,
    Quit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Delivery {
    pub item: String,
    pub count: u32,
    pub to: String,
    pub reward: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestState {
    pub id: String,
    pub name: String,
    pub help: bool,
    pub status: QuestStatus,
    #[serde(default)]
    pub cancellable: bool,
    pub reward: i64,
    #[serde(default)]
    pub talked: BTreeSet<String>,
    /// Items gathered toward a harvest objective.
    #[serde(default)]
    pub progress: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delivery: Option<Delivery>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MenuKind {
    None,
    Dialogue,
    Shop,
    Crafting,
    Animals,
    Building,
    QuestLog,
    Map,
    Shipping,
}

impl MenuKind {
    pub fn name(self) -> &'static str {
        match self {
            MenuKind::None => "none",
            MenuKind::Dialogue => "dialogue",
            MenuKind::Shop => "shop",
            MenuKind::Crafting => "crafting",
            MenuKind::Animals => "animals",
            MenuKind::Building => "building",
            MenuKind::QuestLog => "quest_log",
            MenuKind::Map => "map",
            MenuKind::Shipping => "shipping",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OptionPayload {
    Close,
    Sleep,
    AcceptHelp,
    Stock { index: usize },
    MoveBuilding { id: u32 },
    DemolishBuilding { id: u32 },
    Animal { id: u32 },
    Quest { id: String },
    Recipe { name: String },
    Location { name: String },
    Slot { index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MenuOption {
    pub label: String,
    pub payload: OptionPayload,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MenuState {
    pub kind: MenuKind,
    pub message: String,
    pub options: Vec<MenuOption>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shop: Option<String>,
}

impl MenuState {
    pub fn none() -> MenuState {
        MenuState {
            kind: MenuKind::None,
            message: String::new(),
            options: Vec::new(),
            shop: None,
        }
    }

    pub fn is_open(&self) -> bool {
        self.kind != MenuKind::None
    }
}

/// Cumulative counters. Only ever increase during play; the evaluator
/// diffs them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ledger {
    pub sold: BTreeMap<String, u32>,
    pub purchased: BTreeMap<String, u32>,
    pub crafted: BTreeMap<String, u32>,
    pub gathered: BTreeMap<String, u32>,
    pub gifted: BTreeMap<String, u32>,
    pub talked: BTreeMap<String, u32>,
    pub pets: BTreeMap<String, u32>,
    pub animals_purchased: BTreeMap<String, u32>,
    pub animals_sold: BTreeMap<String, u32>,
    pub built: BTreeMap<String, u32>,
    pub moved: BTreeMap<String, u32>,
    pub demolished: BTreeMap<String, u32>,
    pub tools_upgraded: BTreeMap<String, u32>,
    pub doors_opened: BTreeMap<String, u32>,
    pub filled: BTreeMap<String, u32>,
    pub hatched: BTreeMap<String, u32>,
    pub times_slept: u32,
    pub rewards_claimed: u32,
    pub quests_quit: u32,
    pub help_completed: u32,
    pub geodes_processed: u32,
    pub backpack_upgrades: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progression {
    pub deepest_mine_level: u32,
    pub bundles: BTreeSet<String>,
    pub rooms: BTreeSet<String>,
    pub junimo_notes: BTreeSet<String>,
    pub projects: BTreeSet<String>,
    pub mail: BTreeSet<String>,
    pub events_seen: BTreeSet<String>,
    /// Memberships and other purchased unlocks, e.g. "Joja Membership".
    pub flags: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendingUpgrade {
    pub tool: String,
    pub shop: String,
    pub ready_day: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldState {
    pub schema_version: u32,
    pub save_id: String,
    pub seed: u64,
    pub clock: GameClock,
    pub weather: Weather,
    pub mode: Mode,
    pub maps: BTreeMap<String, MapState>,
    pub player: Player,
    pub npcs: Vec<Npc>,
    pub animals: Vec<Animal>,
    pub monsters: Vec<Monster>,
    pub quests: Vec<QuestState>,
    pub kill_stats: BTreeMap<String, u32>,
    pub shipped: BTreeMap<String, u32>,
    pub ledger: Ledger,
    pub progression: Progression,
    pub menu: MenuState,
    pub silo_hay: u32,
    /// Value of today's shipments, paid out at end of day.
    pub pending_payout: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pending_upgrade: Option<PendingUpgrade>,
    /// Help-wanted quest already taken from the board today.
    #[serde(default)]
    pub help_taken_today: bool,
    pub next_id: u32,
    pub rng: ChaCha8Rng,
}

impl WorldState {
    pub fn alloc_id(&mut self) -> u32 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    pub fn player_map(&self) -> &MapState {
        &self.maps[&self.player.map]
    }

    pub fn player_map_mut(&mut self) -> &mut MapState {
        self.maps.get_mut(&self.player.map).expect("player map exists")
    }

    pub fn building_by_id(&self, id: u32) -> Option<(&str, &Building)> {
        self.maps
            .iter()
            .find_map(|(m, ms)| ms.buildings.iter().find(|b| b.id == id).map(|b| (m.as_str(), b)))
    }

    pub fn npc(&self, name: &str) -> Option<&Npc> {
        self.npcs.iter().find(|n| n.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("world serializes")
    }

    pub fn from_json(s: &str) -> Result<WorldState, serde_json::Error> {
        serde_json::from_str(s)
    }
}
