//! The structured text record. Surrounding tiles are described with a
//! fixed attribute vocabulary (see docs/attributes.md); positions are
//! offsets from the player, who is always at (0, 0).

use crate::content::ContentPack;
use crate::world::commands::building_at;
use crate::world::grid::Feature;
use crate::world::mine;
use crate::world::state::*;
use serde::{Deserialize, Serialize};

pub const TOOLBAR_SLOTS: usize = 36;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemInHand {
    pub index: usize,
    pub currentitem: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MenuRecord {
    #[serde(rename = "type")]
    pub kind: String,
    pub message: String,
    /// `"N: label"` per option, N being the `option_index` to pass.
    pub options: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shop: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NpcRecord {
    pub name: String,
    pub friendship: i32,
    pub talked_today: bool,
    pub gifted_today: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub position: (i32, i32),
    pub object: Vec<String>,
    #[serde(default, rename = "npc_on_this_tile", skip_serializing_if = "Option::is_none")]
    pub npc: Option<NpcRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Located {
    pub position: (i32, i32),
    pub what: String,
}

/// Whole-map listing, absolute coordinates. Off unless configured.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapInfo {
    pub width: i32,
    pub height: i32,
    pub crops: Vec<Located>,
    pub exits: Vec<Located>,
    pub npcs: Vec<Located>,
    pub buildings: Vec<Located>,
    pub objects: Vec<Located>,
    pub animals: Vec<Located>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextObservation {
    pub health: i32,
    pub energy: i32,
    pub money: i64,
    pub current_time: String,
    pub day: u32,
    pub season: String,
    pub year: u32,
    pub weather: String,
    pub location: String,
    pub position: (i32, i32),
    pub facing: String,
    pub item_in_hand: ItemInHand,
    pub toolbar: Vec<String>,
    pub current_menu: MenuRecord,
    pub surrounding_blocks: Vec<Block>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map_info: Option<MapInfo>,
}

fn tf(b: bool) -> &'static str {
    if b {
        "True"
    } else {
        "False"
    }
}

fn slot_line(i: usize, s: Option<&ItemStack>) -> String {
    match s {
        None => format!("slot_index {i}: No item"),
        Some(s) => {
            let mut line = format!("slot_index {i}: {} (quantity: {})", s.name, s.quantity);
            if s.quality > 0 {
                line.push_str(&format!(" (quality: {})", s.quality));
            }
            if let Some(a) = &s.attachment {
                line.push_str(&format!(" (attached: {} x{})", a.name, a.quantity));
            }
            line
        }
    }
}

pub fn toolbar(p: &Player) -> Vec<String> {
    (0..TOOLBAR_SLOTS)
        .map(|i| slot_line(i, p.inventory.get(i).and_then(|s| s.as_ref())))
        .collect()
}

pub fn menu_record(m: &MenuState) -> MenuRecord {
    MenuRecord {
        kind: m.kind.name().to_string(),
        message: m.message.clone(),
        options: m.options.iter().enumerate().map(|(i, o)| format!("{i}: {}", o.label)).collect(),
        shop: m.shop.clone(),
    }
}

fn exit_label(world: &WorldState, e: &Exit) -> String {
    let to = match &e.to {
        ExitTarget::Map { map, .. } => map.clone(),
        ExitTarget::Building { .. } => "Farm".into(),
        ExitTarget::MineLevel { level } => mine::level_map_id(*level),
    };
    match e.hours {
        Some((open, close)) => {
            let now = world.clock.hhmm();
            let state = if now >= open && now < close { "Open" } else { "Closed" };
            format!("Exit: {to} ({state}, {open:04}-{close:04})")
        }
        None => format!("Exit: {to}"),
    }
}

/// Attribute strings for one tile. Every string corresponds to a checkable
/// fact about the world.
pub fn tile_attributes(world: &WorldState, pack: &ContentPack, map_id: &str, x: i32, y: i32) -> Vec<String> {
    let Some(map) = world.maps.get(map_id) else { return Vec::new() };
    let Some(t) = map.grid.get(x, y) else { return Vec::new() };
    let mut a = vec![format!("Type: {}", t.terrain.label())];
    let blocked = crate::mechanics::path::blocked_static(pack, map, x, y);
    a.push(format!("Passable: {}", tf(!blocked)));
    let diggable = t.terrain.diggable() && t.feature.is_none() && t.soil.is_none() && map.object_at(x, y).is_none();
    a.push(format!("Diggable: {}", tf(diggable)));
    match &t.feature {
        Some(Feature::Weeds) => a.push("Debris: Weeds".into()),
        Some(Feature::Stone) => a.push("Debris: Stone".into()),
        Some(Feature::Twig) => a.push("Debris: Twig".into()),
        Some(Feature::Tree { species, stage }) => a.push(format!("Tree: {species} (stage: {stage})")),
        Some(Feature::TallGrass) => a.push("Tall Grass".into()),
        Some(Feature::Node { item }) => a.push(format!("Node: {item}")),
        Some(Feature::DigSpot { .. }) => a.push("Dig Spot".into()),
        None => {}
    }
    if let Some(s) = &t.soil {
        a.push("Tilled: True".into());
        a.push(format!("Watered: {}", tf(s.watered)));
        if let Some(f) = &s.fertilizer {
            a.push(format!("Fertilizer: {f}"));
        }
        if let Some(c) = &s.crop {
            if let Some(def) = pack.crop_for_seed(&c.seed) {
                a.push(format!(
                    "Crop: {} (day {} of {})",
                    def.produce,
                    c.days.min(def.growth_days),
                    def.growth_days
                ));
                a.push(format!("Ready for Harvest: {}", tf(c.days >= def.growth_days)));
            }
        }
    }
    if let Some(o) = map.object_at(x, y) {
        a.push(format!("Object: {}", o.object.label()));
        match &o.object {
            Object::PetBowl { filled } => a.push(format!("Filled: {}", tf(*filled))),
            Object::Furnace { output, ready_at } => match output {
                Some(out) => {
                    let ready = ready_at.is_none_or(|r| r <= world.clock.absolute_minutes());
                    a.push(format!("Smelting: {out}"));
                    a.push(format!("Ready: {}", tf(ready)));
                }
                None => a.push("Smelting: Nothing".into()),
            },
            Object::Incubator { egg, .. } => a.push(format!("Egg: {}", tf(*egg))),
            _ => {}
        }
    }
    if let Some(e) = map.exit_at(x, y) {
        a.push(exit_label(world, e));
    }
    if map_id == "Farm" {
        if let Some(id) = building_at(world, pack, x, y) {
            let b = map.buildings.iter().find(|b| b.id == id).unwrap();
            let def = &pack.buildings[&b.kind];
            a.push(format!("Building: {}", b.kind));
            let rel = (x - b.x, y - b.y);
            if def.door == Some(rel) {
                a.push("Door: True".into());
            }
            if def.animal_door == Some(rel) {
                a.push(format!("Animal Door: {}", if b.animal_door_open { "Open" } else { "Closed" }));
            }
        }
    }
    for an in world.animals.iter().filter(|an| an.map == map_id && (an.x, an.y) == (x, y)) {
        a.push(format!("Animal: {} ({})", an.name, an.kind));
    }
    for m in world
        .monsters
        .iter()
        .filter(|m| m.map == map_id && (m.x, m.y) == (x, y) && !m.burrowed)
    {
        let shell = if m.shelled { ", shelled" } else { "" };
        a.push(format!("Monster: {} (hp: {}{shell})", m.name, m.hp));
    }
    if world.player.map == map_id && world.player.pos() == (x, y) {
        a.push(format!("Player: facing {}", world.player.facing.name()));
    }
    a
}

fn npc_record(world: &WorldState, n: &Npc) -> NpcRecord {
    NpcRecord {
        name: n.name.clone(),
        friendship: world.player.friendships.get(&n.name).copied().unwrap_or(0),
        talked_today: n.talked_today,
        gifted_today: n.gifted_today,
    }
}

/// The (2n+1)x(2n+1) window around the player, row by row. Tiles outside
/// the map are left out.
pub fn surrounding_blocks(world: &WorldState, pack: &ContentPack, n: u32) -> Vec<Block> {
    let n = n as i32;
    let (px, py) = world.player.pos();
    let map_id = world.player.map.as_str();
    let grid = &world.player_map().grid;
    let mut out = Vec::with_capacity(((2 * n + 1) * (2 * n + 1)) as usize);
    for dy in -n..=n {
        for dx in -n..=n {
            let (x, y) = (px + dx, py + dy);
            if !grid.in_bounds(x, y) {
                continue;
            }
            let npc = world
                .npcs
                .iter()
                .find(|np| np.map == map_id && (np.x, np.y) == (x, y))
                .map(|np| npc_record(world, np));
            out.push(Block {
                position: (dx, dy),
                object: tile_attributes(world, pack, map_id, x, y),
                npc,
            });
        }
    }
    out
}

pub fn map_info(world: &WorldState, pack: &ContentPack) -> MapInfo {
    let map_id = world.player.map.as_str();
    let m = world.player_map();
    let mut info = MapInfo {
        width: m.grid.width(),
        height: m.grid.height(),
        ..Default::default()
    };
    for (x, y, t) in m.grid.iter() {
        if let Some(c) = t.soil.as_ref().and_then(|s| s.crop.as_ref()) {
            let name = pack
                .crop_for_seed(&c.seed)
                .map(|d| d.produce.clone())
                .unwrap_or_else(|| c.seed.clone());
            info.crops.push(Located {
                position: (x, y),
                what: name,
            });
        }
    }
    for e in &m.exits {
        info.exits.push(Located {
            position: (e.x, e.y),
            what: exit_label(world, e),
        });
    }
    for n in world.npcs.iter().filter(|n| n.map == map_id) {
        info.npcs.push(Located {
            position: (n.x, n.y),
            what: n.name.clone(),
        });
    }
    for b in &m.buildings {
        info.buildings.push(Located {
            position: (b.x, b.y),
            what: b.kind.clone(),
        });
    }
    for o in &m.objects {
        info.objects.push(Located {
            position: (o.x, o.y),
            what: o.object.label(),
        });
    }
    for a in world.animals.iter().filter(|a| a.map == map_id) {
        info.animals.push(Located {
            position: (a.x, a.y),
            what: format!("{} ({})", a.name, a.kind),
        });
    }
    info
}

pub fn text_observation(world: &WorldState, pack: &ContentPack, n: u32, with_map_info: bool) -> TextObservation {
    let p = &world.player;
    TextObservation {
        health: p.health,
        energy: p.energy,
        money: p.money,
        current_time: world.clock.time_string(),
        day: world.clock.day_of_season,
        season: world.clock.season.name().to_string(),
        year: world.clock.year,
        weather: world.weather.name().to_string(),
        location: p.map.clone(),
        position: p.pos(),
        facing: p.facing.name().to_string(),
        item_in_hand: ItemInHand {
            index: p.chosen_slot,
            currentitem: p.chosen().map(|s| s.name.clone()).unwrap_or_else(|| "No item".into()),
        },
        toolbar: toolbar(p),
        current_menu: menu_record(&world.menu),
        surrounding_blocks: surrounding_blocks(world, pack, n),
        map_info: with_map_info.then(|| map_info(world, pack)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::Content;
    use crate::world::init_world;

    #[test]
    fn day_start_and_empty_slots() {
        let c = Content::shared();
        let w = init_world(&c, "save_new", 1).unwrap();
        let t = text_observation(&w, &c.pack, 3, false);
        assert_eq!(t.current_time, "06:00 AM");
        assert_eq!(t.toolbar.len(), 36);
        assert_eq!(t.toolbar[7], "slot_index 7: No item");
        assert_eq!(t.toolbar[0], "slot_index 0: Axe (quantity: 1)");
        assert!(t.map_info.is_none());
        assert!(t.surrounding_blocks.len() <= 49);
        assert!(t.surrounding_blocks.iter().any(|b| b.position == (0, 0)));
    }
}
