//! Clock advancement and the overnight rollover.

use super::clock::{minutes_to_hhmm, DAY_MINUTES, MIDNIGHT, MINUTES_PER_TICK};
use super::events::Event;
use super::grid::{Feature, TREE_MATURE_STAGE};
use super::inventory;
use super::state::{MenuState, Object, PlacedObject, Weather, WorldState};
use crate::content::ContentPack;
use crate::mechanics::{monsters, npc};
use rand::Rng;

pub const HOME_MAP: &str = "FarmHouse";
pub const HOME_POS: (i32, i32) = (9, 3);

pub fn advance_clock(world: &mut WorldState, pack: &ContentPack, ticks: u32) -> Vec<Event> {
    advance_minutes(world, pack, ticks * MINUTES_PER_TICK)
}

/// Runs the world forward minute by minute: monster beats, nightfall and
/// midnight notices, and the forced pass-out at 2:00 AM.
pub fn advance_minutes(world: &mut WorldState, pack: &ContentPack, minutes: u32) -> Vec<Event> {
    let mut events = Vec::new();
    for _ in 0..minutes {
        world.clock.minutes_since_6am += 1;
        let now = world.clock.minutes_since_6am;
        let nightfall = pack.constants.nightfall[&world.clock.season];
        if minutes_to_hhmm(now) == nightfall {
            events.push(Event::Nightfall);
        }
        if now == MIDNIGHT {
            events.push(Event::Midnight);
        }
        monsters::beat(world, pack, &mut events);
        if now >= DAY_MINUTES || world.player.health <= 0 {
            events.push(Event::PassedOut);
            events.extend(end_of_day(world, pack, false));
        }
    }
    npc::update_schedules(world, pack);
    events
}

/// Overnight processing. `slept` is false for a pass-out (exhaustion,
/// 2:00 AM, or zero health).
pub fn end_of_day(world: &mut WorldState, pack: &ContentPack, slept: bool) -> Vec<Event> {
    let c = &pack.constants;
    let went_down_at = world.clock.minutes_since_6am;

    // Energy and money.
    let base = world.player.base_energy;
    world.player.energy = if slept && went_down_at <= MIDNIGHT {
        base
    } else {
        (c.post_midnight_energy_factor * base as f64).round() as i32
    };
    if !slept {
        let fee = world.player.money.min(c.passout_fee);
        world.player.money -= fee;
    } else {
        world.ledger.times_slept += 1;
    }
    world.player.health = world.player.max_health;
    world.player.money += world.pending_payout;
    world.pending_payout = 0;

    // Crops grow where watered; then every plot dries out.
    for map in world.maps.values_mut() {
        for tile in map.grid.tiles_mut() {
            if let Some(soil) = tile.soil.as_mut() {
                if soil.watered {
                    if let Some(crop) = soil.crop.as_mut() {
                        crop.days += 1;
                    }
                }
                soil.watered = false;
            }
            if let Some(Feature::Tree { stage, .. }) = tile.feature.as_mut() {
                *stage = (*stage + 1).min(TREE_MATURE_STAGE);
            }
        }
    }

    // Machines finish overnight.
    let today_end = world.clock.absolute_minutes();
    let mut hatches = 0;
    for map in world.maps.values_mut() {
        for o in map.objects.iter_mut() {
            match &mut o.object {
                Object::Furnace { ready_at, .. } => {
                    if ready_at.is_some_and(|r| r > today_end) {
                        *ready_at = Some(today_end);
                    }
                }
                Object::Incubator { egg, days } if *egg => {
                    *days += 1;
                    if *days >= c.incubation_days {
                        *egg = false;
                        *days = 0;
                        hatches += 1;
                    }
                }
                _ => {}
            }
        }
    }
    for _ in 0..hatches {
        if spawn_in_home(world, pack, "Chicken", "Chick").is_ok() {
            *world.ledger.hatched.entry("Chicken".into()).or_default() += 1;
        }
    }

    // Animals age and produce; pets with a full bowl gain friendship.
    let bowl_full = world
        .maps
        .values()
        .flat_map(|m| m.objects.iter())
        .any(|o| matches!(o.object, Object::PetBowl { filled: true }));
    let mut lays = Vec::new();
    for a in world.animals.iter_mut() {
        a.age_days += 1;
        a.petted_today = false;
        let def = &pack.animals[&a.kind];
        if def.home == "farm" && bowl_full {
            a.friendship = (a.friendship + c.pet_bowl_friendship).min(1000);
        }
        if let Some(p) = &def.produce {
            if a.age_days >= c.egg_laying_age {
                lays.push((a.map.clone(), p.clone()));
            }
        }
    }
    for (map, item) in lays {
        if let Some(m) = world.maps.get_mut(&map) {
            if let Some((x, y)) = free_floor(m, &world.animals, &map) {
                m.objects.push(PlacedObject {
                    x,
                    y,
                    object: Object::Forage { item },
                });
            }
        }
    }
    for m in world.maps.values_mut() {
        for o in m.objects.iter_mut() {
            if let Object::PetBowl { filled } = &mut o.object {
                *filled = false;
            }
        }
    }
    for n in world.npcs.iter_mut() {
        n.talked_today = false;
        n.gifted_today = false;
        n.slot = None;
    }

    super::mine::clear_levels(world);

    world.clock.next_day();
    world.help_taken_today = false;
    world.weather = draw_weather(world, pack);
    if world.weather.waters_crops() {
        water_outdoors(world);
    }
    world.player.luck = world.rng.gen_range(-100..=100);

    world.player.map = HOME_MAP.into();
    (world.player.x, world.player.y) = HOME_POS;
    world.player.facing = super::state::Direction::Up;
    world.menu = MenuState::none();
    npc::update_schedules(world, pack);
    vec![Event::DayEnded { slept }]
}

fn draw_weather(world: &mut WorldState, pack: &ContentPack) -> Weather {
    let w = &pack.weather[&world.clock.season];
    let table = [
        (Weather::Sunny, w.sunny),
        (Weather::Rainy, w.rainy),
        (Weather::Stormy, w.stormy),
        (Weather::Snowy, w.snowy),
    ];
    let total: u32 = table.iter().map(|(_, n)| n).sum();
    let mut roll = world.rng.gen_range(0..total.max(1));
    for (kind, n) in table {
        if roll < n {
            return kind;
        }
        roll -= n;
    }
    Weather::Sunny
}

pub fn water_outdoors(world: &mut WorldState) {
    for map in world.maps.values_mut().filter(|m| m.outdoor) {
        for tile in map.grid.tiles_mut() {
            if let Some(s) = tile.soil.as_mut() {
                s.watered = true;
            }
        }
    }
}

/// First free floor tile in an interior, scanning from the bottom rows up
/// so produce lands away from the animals' sleeping row.
fn free_floor(map: &super::state::MapState, animals: &[super::state::Animal], id: &str) -> Option<(i32, i32)> {
    let g = &map.grid;
    for y in (0..g.height()).rev() {
        for x in 0..g.width() {
            let t = g.get(x, y).unwrap();
            if t.terrain.passable()
                && t.feature.is_none()
                && map.object_at(x, y).is_none()
                && map.exit_at(x, y).is_none()
                && !animals.iter().any(|a| a.map == id && a.x == x && a.y == y)
                && y < g.height() - 2
            {
                return Some((x, y));
            }
        }
    }
    None
}

/// Puts a new animal of `kind` in a building that houses it. Errors when no
/// such building has room.
pub fn spawn_in_home(world: &mut WorldState, pack: &ContentPack, kind: &str, name: &str) -> Result<u32, String> {
    let def = pack.animals.get(kind).ok_or_else(|| format!("unknown animal {kind}"))?;
    let home = def.home.to_ascii_lowercase();
    let mut target = None;
    for b in world.maps.values().flat_map(|m| m.buildings.iter()) {
        let bdef = &pack.buildings[&b.kind];
        let (Some(interior), Some(cap)) = (&b.interior, bdef.capacity) else {
            continue;
        };
        if !b.kind.to_ascii_lowercase().contains(&home) {
            continue;
        }
        let n = world.animals.iter().filter(|a| &a.map == interior).count() as u32;
        if n < cap {
            target = Some(interior.clone());
            break;
        }
    }
    let interior = target.ok_or_else(|| format!("no {home} with room for a {kind}"))?;
    let map = &world.maps[&interior];
    let mut spot = None;
    'scan: for y in 1..map.grid.height() - 1 {
        for x in 1..map.grid.width() - 1 {
            let t = map.grid.get(x, y).unwrap();
            let taken = world.animals.iter().any(|a| a.map == interior && a.x == x && a.y == y)
                || (world.player.map == interior && world.player.pos() == (x, y));
            if t.terrain.passable() && t.feature.is_none() && map.object_at(x, y).is_none() && !taken {
                spot = Some((x, y));
                break 'scan;
            }
        }
    }
    let (x, y) = spot.ok_or("animal house is full")?;
    let id = world.alloc_id();
    world.animals.push(super::state::Animal {
        id,
        kind: kind.to_string(),
        name: name.to_string(),
        map: interior,
        x,
        y,
        age_days: 0,
        friendship: 0,
        petted_today: false,
    });
    Ok(id)
}

/// Used by tests and commands that want a quick inventory grant.
pub fn grant(world: &mut WorldState, pack: &ContentPack, item: &str, n: u32) -> bool {
    inventory::add(pack, &mut world.player, item, n, 0)
}
