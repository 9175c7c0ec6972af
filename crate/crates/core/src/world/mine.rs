//! Mine levels are generated on entry from a fixed template. Layout is a
//! function of the level number alone; only monster placement draws from
//! the world RNG.

use super::grid::{Feature, Terrain};
use super::state::{Exit, ExitTarget, Monster, Object, PlacedObject, WorldState};
use crate::content::ContentPack;
use rand::Rng;

pub fn level_map_id(level: u32) -> String {
    format!("UndergroundMine{level}")
}

pub fn level_of(map_id: &str) -> Option<u32> {
    map_id.strip_prefix("UndergroundMine")?.parse().ok()
}

/// Makes sure the level exists and returns its id and arrival tile.
pub fn ensure_level(world: &mut WorldState, pack: &ContentPack, level: u32) -> (String, (i32, i32)) {
    let id = level_map_id(level);
    let mine = &pack.mine;
    if !world.maps.contains_key(&id) {
        let mut map = pack.build_map(&mine.template).expect("mine template exists");
        let def = mine.level(level);
        let (ax, ay) = mine.alcove_node;
        let t = map.grid.get_mut(ax, ay).unwrap();
        t.terrain = Terrain::MineFloor;
        t.feature = Some(Feature::Node {
            item: def.alcove_node.clone(),
        });
        for (x, y, item) in &def.nodes {
            if let Some(t) = map.grid.get_mut(*x, *y) {
                t.feature = Some(Feature::Node { item: item.clone() });
            }
        }
        for (x, y, item) in &def.dig_spots {
            if let Some(t) = map.grid.get_mut(*x, *y) {
                t.feature = Some(Feature::DigSpot { item: item.clone() });
            }
        }
        let (ux, uy) = mine.up_ladder;
        map.exits.push(Exit {
            x: ux,
            y: uy,
            to: ExitTarget::Map {
                map: mine.entrance.map.clone(),
                x: mine.entrance.x,
                y: mine.entrance.y,
            },
            hours: None,
        });
        let (dx, dy) = mine.ladder_down;
        map.objects.push(PlacedObject {
            x: dx,
            y: dy,
            object: Object::Ladder,
        });
        map.exits.push(Exit {
            x: dx,
            y: dy,
            to: ExitTarget::MineLevel { level: level + 1 },
            hours: None,
        });

        // Candidate spawn tiles: open floor far enough from the arrival.
        let (rx, ry) = mine.arrival;
        let mut open: Vec<(i32, i32)> = map
            .grid
            .iter()
            .filter(|(x, y, t)| {
                t.terrain.passable()
                    && t.feature.is_none()
                    && (x - rx).abs() + (y - ry).abs() >= mine.min_spawn_distance
                    && map.object_at(*x, *y).is_none()
                    && map.exit_at(*x, *y).is_none()
            })
            .map(|(x, y, _)| (x, y))
            .collect();
        world.maps.insert(id.clone(), map);
        for (name, count) in &def.monsters {
            let mdef = &pack.monsters[name];
            for _ in 0..*count {
                if open.is_empty() {
                    break;
                }
                let i = world.rng.gen_range(0..open.len());
                let (x, y) = open.swap_remove(i);
                let heading = match world.rng.gen_range(0..4) {
                    0 => (1, 1),
                    1 => (1, -1),
                    2 => (-1, 1),
                    _ => (-1, -1),
                };
                let mid = world.alloc_id();
                world.monsters.push(Monster {
                    id: mid,
                    name: name.clone(),
                    species: mdef.species,
                    map: id.clone(),
                    x,
                    y,
                    hp: mdef.hp,
                    acc: 0,
                    cooldown: 0,
                    heading,
                    phase: 0,
                    shelled: false,
                    burrowed: mdef.species == super::state::Species::Duggy,
                });
            }
        }
        world.progression.deepest_mine_level = world.progression.deepest_mine_level.max(level);
    }
    (id, mine.arrival)
}

/// Drops every generated level and its monsters (done overnight).
pub fn clear_levels(world: &mut WorldState) {
    world.maps.retain(|k, _| level_of(k).is_none());
    world.monsters.retain(|m| level_of(&m.map).is_none());
}
