//! Builders for the shipped saves. The JSON files under `data/saves` are
//! generated from these; a test fails if they drift.

use super::clock::{GameClock, Season};
use super::commands::{apply, build, SimCommand};
use super::day::{HOME_MAP, HOME_POS};
use super::inventory;
use super::state::*;
use crate::content::{Content, ContentPack};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

pub const SAVE_IDS: [&str; 3] = ["save_new", "save_farming", "save_quests"];

pub const FARMHOUSE_AT: (i32, i32) = (3, 2);
pub const SHIPPING_BIN_AT: (i32, i32) = (9, 4);
pub const PET_BOWL_AT: (i32, i32) = (11, 6);

/// Starting toolbar, slot by slot.
pub const STARTER_KIT: [(&str, u32); 7] = [
    ("Axe", 1),
    ("Hoe", 1),
    ("Watering Can", 1),
    ("Pickaxe", 1),
    ("Scythe", 1),
    ("Parsnip Seeds", 15),
    ("Rusty Sword", 1),
];

/// Day one, spring, year one. Player wakes up at home with the starter kit.
pub fn fresh_world(pack: &ContentPack) -> WorldState {
    let interiors: BTreeSet<&str> = pack.buildings.values().filter_map(|b| b.interior.as_deref()).collect();
    let maps = pack
        .maps
        .keys()
        .filter(|k| !k.starts_with('@') && !interiors.contains(k.as_str()))
        .map(|k| (k.clone(), pack.build_map(k).unwrap()))
        .collect();
    let npcs = pack
        .npcs
        .iter()
        .map(|(name, def)| {
            let (_, map, x, y) = &def.schedule[0];
            Npc {
                name: name.clone(),
                map: map.clone(),
                x: *x,
                y: *y,
                facing: Direction::Down,
                slot: Some(0),
                talked_today: false,
                gifted_today: false,
            }
        })
        .collect();
    let c = &pack.constants;
    let mut player = Player {
        map: HOME_MAP.into(),
        x: HOME_POS.0,
        y: HOME_POS.1,
        facing: Direction::Up,
        health: c.base_health,
        max_health: c.base_health,
        energy: c.base_energy,
        base_energy: c.base_energy,
        money: 500,
        inventory: vec![None; INVENTORY_SLOTS],
        capacity: c.default_inventory_capacity,
        chosen_slot: 0,
        water: c.watering_can_capacity,
        skills: ["farming", "mining", "foraging", "fishing", "combat"]
            .into_iter()
            .map(|s| (s.to_string(), 0))
            .collect(),
        friendships: pack.npcs.keys().map(|n| (n.clone(), 0)).collect(),
        recipes_known: pack.default_recipes.iter().cloned().collect(),
        luck: 0,
        house_level: 0,
        dating: BTreeSet::new(),
    };
    for (i, (name, n)) in STARTER_KIT.iter().enumerate() {
        player.inventory[i] = inventory::make_stack(pack, name, *n, 0);
    }
    let mut w = WorldState {
        schema_version: SAVE_SCHEMA_VERSION,
        save_id: String::new(),
        seed: 0,
        clock: GameClock::new(1, Season::Spring, 1),
        weather: Weather::Sunny,
        mode: Mode::Paused,
        maps,
        player,
        npcs,
        animals: Vec::new(),
        monsters: Vec::new(),
        quests: Vec::new(),
        kill_stats: Default::default(),
        shipped: Default::default(),
        ledger: Ledger::default(),
        progression: Progression::default(),
        menu: MenuState::none(),
        silo_hay: 0,
        pending_payout: 0,
        pending_upgrade: None,
        help_taken_today: false,
        next_id: 1,
        rng: ChaCha8Rng::seed_from_u64(0),
    };
    build(&mut w, pack, "FarmHouse", false, FARMHOUSE_AT.0, FARMHOUSE_AT.1).expect("farmhouse fits");
    build(&mut w, pack, "Shipping Bin", false, SHIPPING_BIN_AT.0, SHIPPING_BIN_AT.1).expect("bin fits");
    w.maps.get_mut("Farm").unwrap().objects.push(PlacedObject {
        x: PET_BOWL_AT.0,
        y: PET_BOWL_AT.1,
        object: Object::PetBowl { filled: false },
    });
    w
}

fn run(w: &mut WorldState, content: &Content, script: &[&str]) {
    for line in script {
        let cmd = SimCommand::parse(line).unwrap_or_else(|e| panic!("{line}: {e}"));
        apply(w, content, &cmd).unwrap_or_else(|e| panic!("{line}: {e}"));
    }
}

/// A farm a few days in: a coop with two hens, a cat, a planted field.
const FARMING_SCRIPT: &[&str] = &[
    "set_date(1, \"spring\", 5)",
    "set_money(2500)",
    "build(\"Coop\", false, 14, 2)",
    "spawn_animal(\"chicken\", \"Henny\")",
    "spawn_animal(\"chicken\", \"Penny\")",
    "spawn_pet(\"cat\", \"0\", \"Mittens\", 12, 7)",
    "warp(\"Farm\", 16, 9)",
    "place_crop(\"Parsnip Seeds\", 16, 11)",
    "place_crop(\"Parsnip Seeds\", 17, 11)",
    "place_crop(\"Parsnip Seeds\", 18, 11)",
    "place_crop(\"Potato Seeds\", 19, 11)",
    "place_crop(\"Potato Seeds\", 20, 11)",
    "grow_crop(4, 16, 11)",
    "grow_crop(4, 17, 11)",
    "grow_crop(2, 18, 11)",
    "grow_crop(3, 19, 11)",
    "set_terrain(\"hoedirt\", \"0\", 16, 13)",
    "set_terrain(\"hoedirt\", \"0\", 17, 13)",
    "set_terrain(\"hoedirt\", \"0\", 18, 13)",
    "add_item_by_name(\"Potato Seeds\", 5)",
    "add_item_by_name(\"Basic Retaining Soil\", 5)",
    "warp_home()",
];

/// Early game with the three story quests in the log.
const QUESTS_SCRIPT: &[&str] = &[
    "set_date(1, \"spring\", 3)",
    "set_money(1000)",
    "start_quest(\"6\")",
    "start_quest(\"9\")",
    "start_quest(\"21\")",
    "warp(\"Forest\", 20, 1)",
    "place_item(\"Lost Axe\", \"forage\", 24, 6)",
    "warp_home()",
];

pub fn build_save(pack: &ContentPack, id: &str) -> Option<WorldState> {
    let content = Content::new(pack.clone());
    let mut w = fresh_world(pack);
    match id {
        "save_new" => {}
        "save_farming" => run(&mut w, &content, FARMING_SCRIPT),
        "save_quests" => run(&mut w, &content, QUESTS_SCRIPT),
        _ => return None,
    }
    w.save_id = id.to_string();
    Some(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::DEFAULT_PACK;

    /// Set VALLEY_REGEN_SAVES=1 to rewrite the bundled saves.
    #[test]
    fn bundled_saves_match_builders() {
        let pack = ContentPack::parse(DEFAULT_PACK).unwrap();
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/saves");
        let regen = std::env::var_os("VALLEY_REGEN_SAVES").is_some();
        for id in SAVE_IDS {
            let built = build_save(&pack, id).unwrap();
            let path = dir.join(format!("{id}.json"));
            if regen {
                let json = serde_json::to_string_pretty(&built).unwrap();
                std::fs::write(&path, json + "\n").unwrap();
                continue;
            }
            let on_disk = std::fs::read_to_string(&path).unwrap();
            let parsed = WorldState::from_json(&on_disk).unwrap();
            assert!(parsed == built, "{id}.json is stale; rerun with VALLEY_REGEN_SAVES=1");
        }
    }
}
