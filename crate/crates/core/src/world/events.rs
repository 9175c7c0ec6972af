use serde::{Deserialize, Serialize};

/// Typed record of something that happened while executing an action or
/// advancing time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    TileCleared { map: String, x: i32, y: i32, what: String },
    Tilled { map: String, x: i32, y: i32 },
    Watered { map: String, x: i32, y: i32 },
    Sown { map: String, x: i32, y: i32, seed: String },
    Fertilized { map: String, x: i32, y: i32, fertilizer: String },
    CropHarvested { map: String, x: i32, y: i32, item: String },
    ItemGathered { item: String, count: u32 },
    MonsterKilled { name: String, x: i32, y: i32 },
    MonsterHit { name: String, damage: i32 },
    PlayerDamaged { by: String, amount: i32 },
    ItemShipped { item: String, count: u32 },
    ItemSold { item: String, count: u32, money: i64 },
    ItemPurchased { item: String, count: u32, money: i64 },
    ItemCrafted { item: String, count: u32 },
    ItemEaten { item: String },
    FriendshipChanged { name: String, delta: i32 },
    MapChanged { from: String, to: String },
    MenuOpened { kind: String },
    MenuClosed,
    BuildingChanged { kind: String, change: String },
    QuestChanged { id: String, status: String },
    Nightfall,
    Midnight,
    PassedOut,
    DayEnded { slept: bool },
}
