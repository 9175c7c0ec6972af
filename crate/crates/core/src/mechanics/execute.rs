//! Action execution. Each handler either succeeds with a message and tick
//! cost, or fails; a failed action is rolled back and only its ticks stick.

use super::action::Action;
use super::{menus, path};
use crate::content::{ContentPack, Objective, Placeable, RecipeKind};
use crate::world::clock::{format_time, hhmm_to_minutes};
use crate::world::day::advance_clock;
use crate::world::events::Event;
use crate::world::grid::{Crop, Feature, FeatureKind, Soil, Terrain};
use crate::world::inventory;
use crate::world::mine;
use crate::world::state::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

pub const USE_TICKS: u32 = 1;
pub const FRIENDSHIP_CAP: i32 = 2500;
pub const ANIMAL_FRIENDSHIP_CAP: i32 = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionResult {
    pub ok: bool,
    pub message: String,
    pub ticks_consumed: u32,
    pub events: Vec<Event>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecConfig {
    pub navigate_enabled: bool,
}

pub(crate) struct Done {
    pub msg: String,
    pub ticks: u32,
    pub events: Vec<Event>,
}

pub(crate) struct Fail {
    pub msg: String,
    pub ticks: u32,
}

pub(crate) type Outcome = Result<Done, Fail>;

pub(crate) fn done(msg: impl Into<String>, ticks: u32, events: Vec<Event>) -> Outcome {
    Ok(Done {
        msg: msg.into(),
        ticks,
        events,
    })
}

pub(crate) fn fail<T>(msg: impl Into<String>, ticks: u32) -> Result<T, Fail> {
    Err(Fail { msg: msg.into(), ticks })
}

/// Runs one action, then advances the clock (monsters and schedules
/// included) by the ticks it consumed.
pub fn execute(world: &mut WorldState, pack: &ContentPack, action: &Action, cfg: &ExecConfig) -> ActionResult {
    let snapshot = world.clone();
    match dispatch(world, pack, action, cfg) {
        Ok(d) => {
            let mut events = d.events;
            events.extend(advance_clock(world, pack, d.ticks));
            ActionResult {
                ok: true,
                message: d.msg,
                ticks_consumed: d.ticks,
                events,
            }
        }
        Err(f) => {
            *world = snapshot;
            let events = advance_clock(world, pack, f.ticks);
            ActionResult {
                ok: false,
                message: f.msg,
                ticks_consumed: f.ticks,
                events,
            }
        }
    }
}

fn dispatch(w: &mut WorldState, pack: &ContentPack, action: &Action, cfg: &ExecConfig) -> Outcome {
    if matches!(action, Action::Move { .. } | Action::Use { .. } | Action::Interact { .. }) {
        w.menu = MenuState::none();
    }
    match action {
        Action::Move { x, y } => do_move(w, pack, *x, *y),
        Action::Use { direction } => do_use(w, pack, *direction),
        Action::Interact { direction } => do_interact(w, pack, *direction),
        Action::ChooseItem { slot_index } => do_choose_item(w, *slot_index),
        Action::AttachItem { slot_index } => do_attach(w, pack, *slot_index),
        Action::DetachItem => do_detach(w, pack),
        Action::Craft { item } => do_craft(w, pack, item),
        Action::ChooseOption {
            option_index,
            quantity,
            direction,
        } => menus::choose_option(w, pack, *option_index, *quantity, *direction),
        Action::Menu { option, menu_name } => menus::menu(w, pack, *option, *menu_name),
        Action::Navigate { name } => do_navigate(w, pack, name, cfg),
    }
}

/// Ticks charged for walking `len` tiles.
pub fn move_ticks(pack: &ContentPack, len: usize) -> u32 {
    let free = pack.constants.move_free_tiles as usize;
    let per = pack.constants.move_tiles_per_tick as usize;
    if len <= free {
        0
    } else {
        (len - free).div_ceil(per) as u32
    }
}

fn do_move(w: &mut WorldState, pack: &ContentPack, x: i32, y: i32) -> Outcome {
    let m = w.player_map();
    if !m.grid.in_bounds(x, y) {
        return fail(format!("({x}, {y}) is outside {}", w.player.map), 0);
    }
    let from = w.player.pos();
    if from == (x, y) {
        return done("already there", 0, vec![]);
    }
    let (width, height) = (m.grid.width(), m.grid.height());
    let open = path::player_open(w, pack);
    let (steps, adjacent) = if open(x, y) {
        match path::bfs(width, height, from, (x, y), &open) {
            Some(p) => (p, false),
            None => return fail(format!("no path to ({x}, {y})"), 0),
        }
    } else {
        let dist = path::distances(width, height, from, &open);
        let best = Direction::ALL
            .iter()
            .map(|d| d.step((x, y)))
            .filter(|&(nx, ny)| nx >= 0 && ny >= 0 && nx < width && ny < height)
            .filter_map(|(nx, ny)| dist[(ny * width + nx) as usize].map(|d| (d, (nx, ny))))
            .min_by_key(|(d, _)| *d);
        let Some((_, stop)) = best else {
            return fail(format!("({x}, {y}) is blocked and nothing next to it is reachable"), 0);
        };
        (path::bfs(width, height, from, stop, &open).unwrap_or_default(), true)
    };
    drop(open);
    let mut prev = from;
    for &s in &steps {
        if let Some(d) = Direction::from_delta(s.0 - prev.0, s.1 - prev.1) {
            w.player.facing = d;
        }
        prev = s;
    }
    (w.player.x, w.player.y) = prev;
    let ticks = move_ticks(pack, steps.len());
    let msg = if adjacent { "stopped adjacent" } else { "moved" };
    done(msg, ticks, vec![])
}

fn tool_kind(name: &str) -> &str {
    for base in ["Pickaxe", "Axe", "Hoe", "Watering Can", "Scythe", "Milk Pail"] {
        if name.ends_with(base) {
            return base;
        }
    }
    name
}

/// Adds drops to the inventory, counting what fit toward the gathered
/// ledger. Returns the items that did not fit.
pub(crate) fn gather(w: &mut WorldState, pack: &ContentPack, drops: &BTreeMap<String, u32>, events: &mut Vec<Event>) -> Vec<String> {
    let mut lost = Vec::new();
    for (item, n) in drops {
        if inventory::add(pack, &mut w.player, item, *n, 0) {
            note_gathered(w, pack, item, *n);
            events.push(Event::ItemGathered {
                item: item.clone(),
                count: *n,
            });
        } else {
            lost.push(item.clone());
        }
    }
    lost
}

pub(crate) fn note_gathered(w: &mut WorldState, pack: &ContentPack, item: &str, n: u32) {
    *w.ledger.gathered.entry(item.to_string()).or_default() += n;
    for q in w.quests.iter_mut().filter(|q| q.status == QuestStatus::Active) {
        if let Some(def) = pack.quests.get(&q.id) {
            if let Objective::Harvest { harvest, count } = &def.objective {
                if harvest == item {
                    q.progress += n;
                    if q.progress >= *count {
                        q.status = QuestStatus::Completed;
                    }
                }
            }
        }
    }
}

fn drops_for(pack: &ContentPack, kind: FeatureKind) -> BTreeMap<String, u32> {
    pack.features.get(&kind).map(|f| f.drops.clone()).unwrap_or_default()
}

fn do_use(w: &mut WorldState, pack: &ContentPack, dir: Direction) -> Outcome {
    w.player.facing = dir;
    let Some(stack) = w.player.chosen().cloned() else {
        return fail("no item chosen", USE_TICKS);
    };
    let def = pack.item(&stack.name).expect("inventory items are in the pack");
    match def.category {
        Category::Tool => use_tool(w, pack, &stack),
        Category::Weapon => use_weapon(w, pack, &stack),
        _ if def.edible.is_some() => {
            let gain = def.edible.unwrap();
            let p = &mut w.player;
            p.energy = (p.energy + gain).min(p.base_energy);
            p.health = (p.health + (gain * 9 + 10) / 20).min(p.max_health);
            inventory::remove_from_slot(p, p.chosen_slot, 1);
            done(
                format!("ate {}", stack.name),
                USE_TICKS,
                vec![Event::ItemEaten { item: stack.name }],
            )
        }
        Category::Seed => fail("plant seeds with interact", USE_TICKS),
        _ if def.fertilizer => fail("apply fertilizer with interact", USE_TICKS),
        _ => fail(format!("{} cannot be used", stack.name), USE_TICKS),
    }
}

fn use_tool(w: &mut WorldState, pack: &ContentPack, stack: &ItemStack) -> Outcome {
    let def = pack.item(&stack.name).unwrap();
    let cost = def.energy_cost;
    if w.player.energy - cost < -pack.constants.max_overdraft {
        return fail("too exhausted to use tools", USE_TICKS);
    }
    let (tx, ty) = w.player.facing_tile();
    let map_id = w.player.map.clone();
    if !w.player_map().grid.in_bounds(tx, ty) {
        return fail("nothing there", USE_TICKS);
    }
    let mut events = Vec::new();
    let kind = tool_kind(&stack.name);
    let msg = match kind {
        "Scythe" | "Axe" | "Pickaxe" => {
            let feature = w.player_map().grid.get(tx, ty).unwrap().feature.clone();
            let Some(f) = feature else {
                return fail(format!("nothing for the {kind} at that tile"), USE_TICKS);
            };
            let fk = f.kind();
            let tool = pack.features.get(&fk).map(|d| tool_kind(&d.tool).to_string());
            if tool.as_deref() != Some(kind) {
                return fail(format!("the {kind} does nothing to {}", f.tally_name()), USE_TICKS);
            }
            w.player_map_mut().grid.get_mut(tx, ty).unwrap().feature = None;
            events.push(Event::TileCleared {
                map: map_id.clone(),
                x: tx,
                y: ty,
                what: f.tally_name().to_string(),
            });
            let mut drops = drops_for(pack, fk);
            if let Feature::Node { item } = &f {
                *drops.entry(item.clone()).or_default() += 1;
            }
            if let Feature::TallGrass = f {
                let silos = w
                    .maps
                    .get("Farm")
                    .map(|m| m.buildings.iter().filter(|b| b.kind == "Silo").count() as u32)
                    .unwrap_or(0);
                if w.silo_hay < silos * pack.constants.silo_capacity {
                    w.silo_hay += 1;
                }
            }
            let lost = gather(w, pack, &drops, &mut events);
            if lost.is_empty() {
                format!("cleared {}", f.tally_name())
            } else {
                format!("cleared {}; inventory full, lost {}", f.tally_name(), lost.join(", "))
            }
        }
        "Hoe" => {
            let blocked = path::occupant(w, &map_id, tx, ty, false);
            let t = w.player_map().grid.get(tx, ty).unwrap().clone();
            let has_object = w.player_map().object_at(tx, ty).is_some();
            if let Some(Feature::DigSpot { item }) = &t.feature {
                w.player_map_mut().grid.get_mut(tx, ty).unwrap().feature = None;
                events.push(Event::TileCleared {
                    map: map_id.clone(),
                    x: tx,
                    y: ty,
                    what: "Dig Spot".into(),
                });
                let drops = BTreeMap::from([(item.clone(), 1)]);
                let lost = gather(w, pack, &drops, &mut events);
                if lost.is_empty() {
                    format!("dug up {item}")
                } else {
                    format!("dug up {item} but the inventory is full")
                }
            } else if t.terrain == Terrain::Dirt && t.feature.is_none() && t.soil.is_none() && !has_object && !blocked {
                w.player_map_mut().grid.get_mut(tx, ty).unwrap().soil = Some(Soil::default());
                events.push(Event::Tilled { map: map_id, x: tx, y: ty });
                "tilled".into()
            } else {
                return fail("cannot till that tile", USE_TICKS);
            }
        }
        "Watering Can" => {
            let cap = pack.constants.watering_can_capacity;
            let m = w.player_map();
            let t = m.grid.get(tx, ty).unwrap();
            if t.terrain == Terrain::Water {
                if w.player.water == cap {
                    return fail("the watering can is already full", USE_TICKS);
                }
                w.player.water = cap;
                "refilled the watering can".into()
            } else if matches!(m.object_at(tx, ty).map(|o| &o.object), Some(Object::PetBowl { .. })) {
                fill_bowl(w, tx, ty)?
            } else if let Some(soil) = &t.soil {
                if soil.watered {
                    return fail("already watered", USE_TICKS);
                }
                if w.player.water == 0 {
                    return fail("the watering can is empty", USE_TICKS);
                }
                w.player.water -= 1;
                w.player_map_mut().grid.get_mut(tx, ty).unwrap().soil.as_mut().unwrap().watered = true;
                events.push(Event::Watered { map: map_id, x: tx, y: ty });
                "watered".into()
            } else {
                return fail("nothing to water there", USE_TICKS);
            }
        }
        "Milk Pail" => return fail("nothing to milk", USE_TICKS),
        other => return fail(format!("{other} has no use"), USE_TICKS),
    };
    w.player.energy -= cost;
    done(msg, USE_TICKS, events)
}

fn fill_bowl(w: &mut WorldState, x: i32, y: i32) -> Result<String, Fail> {
    if w.player.water == 0 {
        return fail("the watering can is empty", USE_TICKS);
    }
    let o = w.player_map_mut().object_at_mut(x, y).unwrap();
    let Object::PetBowl { filled } = &mut o.object else {
        unreachable!()
    };
    if *filled {
        return fail("the pet bowl is already full", USE_TICKS);
    }
    *filled = true;
    w.player.water -= 1;
    *w.ledger.filled.entry("Pet Bowl".into()).or_default() += 1;
    Ok("filled the pet bowl".into())
}

fn monster_at(w: &WorldState, x: i32, y: i32) -> Option<usize> {
    w.monsters
        .iter()
        .position(|m| m.map == w.player.map && (m.x, m.y) == (x, y) && !m.burrowed)
}

fn hit_monster(w: &mut WorldState, i: usize, damage: i32, events: &mut Vec<Event>) -> String {
    let m = &mut w.monsters[i];
    if m.shelled {
        return format!("the {}'s shell deflects the blow", m.name);
    }
    m.hp -= damage;
    events.push(Event::MonsterHit {
        name: m.name.clone(),
        damage,
    });
    if m.hp > 0 {
        return format!("hit {} for {damage}", m.name);
    }
    let m = w.monsters.remove(i);
    *w.kill_stats.entry(m.name.clone()).or_default() += 1;
    events.push(Event::MonsterKilled {
        name: m.name.clone(),
        x: m.x,
        y: m.y,
    });
    format!("killed {}", m.name)
}

fn use_weapon(w: &mut WorldState, pack: &ContentPack, stack: &ItemStack) -> Outcome {
    let def = pack.item(&stack.name).unwrap();
    let mut events = Vec::new();
    if def.range > 0 {
        let Some(ammo) = stack.attachment.as_ref() else {
            return fail(format!("no ammo attached to the {}", stack.name), USE_TICKS);
        };
        let ammo_name = ammo.name.clone();
        let slot = w.player.chosen_slot;
        {
            let s = w.player.inventory[slot].as_mut().unwrap();
            let a = s.attachment.as_mut().unwrap();
            a.quantity -= 1;
            if a.quantity == 0 {
                s.attachment = None;
            }
        }
        let m = w.player_map();
        let mut pos = w.player.pos();
        for _ in 0..def.range {
            pos = w.player.facing.step(pos);
            if path::blocked_static(pack, m, pos.0, pos.1) {
                break;
            }
            if let Some(i) = monster_at(w, pos.0, pos.1) {
                let msg = hit_monster(w, i, def.damage, &mut events);
                return done(msg, USE_TICKS, events);
            }
        }
        return done(format!("the {ammo_name} missed"), USE_TICKS, events);
    }
    let (tx, ty) = w.player.facing_tile();
    let Some(i) = monster_at(w, tx, ty) else {
        return fail("nothing to hit", USE_TICKS);
    };
    let msg = hit_monster(w, i, def.damage, &mut events);
    done(msg, USE_TICKS, events)
}

fn open_dialogue(w: &mut WorldState, message: String, options: Vec<MenuOption>) -> Event {
    w.menu = MenuState {
        kind: MenuKind::Dialogue,
        message,
        options,
        shop: None,
    };
    Event::MenuOpened { kind: "dialogue".into() }
}

fn change_friendship(w: &mut WorldState, name: &str, delta: i32) -> Event {
    let f = w.player.friendships.entry(name.to_string()).or_insert(0);
    *f = (*f + delta).clamp(0, FRIENDSHIP_CAP);
    Event::FriendshipChanged {
        name: name.to_string(),
        delta,
    }
}

fn interact_npc(w: &mut WorldState, pack: &ContentPack, ni: usize) -> Outcome {
    let name = w.npcs[ni].name.clone();
    let mut events = Vec::new();
    let chosen = w.player.chosen().cloned();

    // Quest delivery.
    if let Some(stack) = &chosen {
        let qi = w
            .quests
            .iter()
            .position(|q| q.status == QuestStatus::Active && q.delivery.as_ref().is_some_and(|d| d.to == name && d.item == stack.name));
        if let Some(qi) = qi {
            let d = w.quests[qi].delivery.clone().unwrap();
            if inventory::count(&w.player, &d.item) < d.count {
                return fail(format!("{name} needs {} {}", d.count, d.item), 0);
            }
            inventory::remove(&mut w.player, &d.item, d.count);
            let q = &mut w.quests[qi];
            q.status = QuestStatus::Completed;
            if q.help {
                w.ledger.help_completed += 1;
            }
            events.push(Event::QuestChanged {
                id: w.quests[qi].id.clone(),
                status: "completed".into(),
            });
            events.push(change_friendship(w, &name, pack.constants.talk_friendship));
            return done(format!("delivered {} to {name}", d.item), 0, events);
        }
    }

    // Gift.
    let giftable = chosen
        .as_ref()
        .is_some_and(|s| !matches!(s.category, Category::Tool | Category::Weapon));
    if giftable && !w.npcs[ni].gifted_today {
        let stack = chosen.unwrap();
        let taste = pack.npcs[&name].taste(&stack.name);
        let base = pack.gift_delta(taste);
        let delta = (base as f64 * pack.quality_multiplier(stack.quality)).round() as i32;
        let slot = w.player.chosen_slot;
        inventory::remove_from_slot(&mut w.player, slot, 1);
        w.npcs[ni].gifted_today = true;
        *w.ledger.gifted.entry(name.clone()).or_default() += 1;
        events.push(change_friendship(w, &name, delta));
        let reaction = match taste {
            crate::content::Taste::Loved => "loves it",
            crate::content::Taste::Liked => "likes it",
            crate::content::Taste::Neutral => "thanks you",
            crate::content::Taste::Disliked => "dislikes it",
            crate::content::Taste::Hated => "hates it",
        };
        return done(format!("gave {} to {name}; {name} {reaction}", stack.name), 0, events);
    }

    // Talk.
    if w.npcs[ni].talked_today {
        if giftable {
            return fail(format!("{name} already received a gift today"), 0);
        }
        events.push(open_dialogue(w, format!("{name}: Good to see you again."), vec![]));
        return done(format!("talked to {name}"), 0, events);
    }
    w.npcs[ni].talked_today = true;
    *w.ledger.talked.entry(name.clone()).or_default() += 1;
    events.push(change_friendship(w, &name, pack.constants.talk_friendship));
    for q in w.quests.iter_mut().filter(|q| q.status == QuestStatus::Active) {
        if let Some(Objective::TalkTo { talk_to }) = pack.quests.get(&q.id).map(|d| &d.objective) {
            if talk_to.contains(&name) {
                q.talked.insert(name.clone());
                if talk_to.iter().all(|n| q.talked.contains(n)) {
                    q.status = QuestStatus::Completed;
                }
            }
        }
    }
    events.push(open_dialogue(w, format!("{name}: Hello there!"), vec![]));
    done(format!("talked to {name}"), 0, events)
}

fn pet_animal(w: &mut WorldState, pack: &ContentPack, ai: usize) -> Outcome {
    let a = &mut w.animals[ai];
    if a.petted_today {
        return fail(format!("{} was already petted today", a.name), 0);
    }
    a.petted_today = true;
    a.friendship = (a.friendship + pack.constants.pet_friendship).min(ANIMAL_FRIENDSHIP_CAP);
    let (name, kind) = (a.name.clone(), a.kind.clone());
    *w.ledger.pets.entry(kind).or_default() += 1;
    done(
        format!("petted {name}"),
        0,
        vec![Event::FriendshipChanged {
            name,
            delta: pack.constants.pet_friendship,
        }],
    )
}

/// First tile at or next to `pos` the player can stand on.
fn landing(w: &WorldState, pack: &ContentPack, map: &str, pos: (i32, i32)) -> (i32, i32) {
    if path::is_open(w, pack, map, pos.0, pos.1, false) {
        return pos;
    }
    Direction::ALL
        .iter()
        .map(|d| d.step(pos))
        .find(|&(x, y)| path::is_open(w, pack, map, x, y, false))
        .unwrap_or(pos)
}

pub(crate) fn relocate(w: &mut WorldState, pack: &ContentPack, map: &str, pos: (i32, i32)) -> Event {
    let from = std::mem::replace(&mut w.player.map, map.to_string());
    let (x, y) = landing(w, pack, map, pos);
    w.player.x = x;
    w.player.y = y;
    w.menu = MenuState::none();
    Event::MapChanged { from, to: map.to_string() }
}

fn open_now(w: &WorldState, hours: Option<(u32, u32)>) -> Result<(), String> {
    let Some((open, close)) = hours else { return Ok(()) };
    let now = w.clock.minutes_since_6am;
    let (o, c) = (
        hhmm_to_minutes(open as i64).unwrap_or(0),
        hhmm_to_minutes(close as i64).unwrap_or(u32::MAX),
    );
    if now >= o && now < c {
        Ok(())
    } else {
        Err(format!("closed; open {} to {}", format_time(o), format_time(c)))
    }
}

/// Where an exit leads, creating a mine level if needed.
fn exit_destination(w: &mut WorldState, pack: &ContentPack, to: &ExitTarget) -> Option<(String, (i32, i32), Direction)> {
    match to {
        ExitTarget::Map { map, x, y } => Some((map.clone(), (*x, *y), w.player.facing)),
        ExitTarget::Building { id } => {
            let b = w.maps.get("Farm")?.buildings.iter().find(|b| b.id == *id)?;
            let (dx, dy) = pack.buildings[&b.kind].door?;
            Some(("Farm".into(), (b.x + dx, b.y + dy + 1), Direction::Down))
        }
        ExitTarget::MineLevel { level } => {
            let (id, pos) = mine::ensure_level(w, pack, *level);
            Some((id, pos, Direction::Down))
        }
    }
}

fn take_exit(w: &mut WorldState, pack: &ContentPack, exit: Exit) -> Outcome {
    if let Err(e) = open_now(w, exit.hours) {
        return fail(e, 0);
    }
    let Some((map, pos, facing)) = exit_destination(w, pack, &exit.to) else {
        return fail("that way leads nowhere", 0);
    };
    let ev = relocate(w, pack, &map, pos);
    w.player.facing = facing;
    done(format!("entered {map}"), 0, vec![ev])
}

fn interact_building(w: &mut WorldState, pack: &ContentPack, bid: u32, t: (i32, i32)) -> Outcome {
    let b = w.maps["Farm"].buildings.iter().find(|b| b.id == bid).unwrap().clone();
    let def = &pack.buildings[&b.kind];
    let rel = (t.0 - b.x, t.1 - b.y);
    if def.door == Some(rel) {
        if let (Some(interior), Some(base)) = (&b.interior, &def.interior) {
            let (gx, gy) = pack.door_glyph(base).unwrap_or((1, 2));
            let ev = relocate(w, pack, interior, (gx, gy - 1));
            w.player.facing = Direction::Up;
            return done(format!("entered {}", b.kind), 0, vec![ev]);
        }
    }
    if def.animal_door == Some(rel) {
        let nb = w.maps.get_mut("Farm").unwrap().buildings.iter_mut().find(|x| x.id == bid).unwrap();
        nb.animal_door_open = !nb.animal_door_open;
        if nb.animal_door_open {
            *w.ledger.doors_opened.entry(b.kind.clone()).or_default() += 1;
            return done(format!("opened the {} animal door", b.kind), 0, vec![]);
        }
        return done(format!("closed the {} animal door", b.kind), 0, vec![]);
    }
    match b.kind.as_str() {
        "Shipping Bin" => {
            menus::open_shipping(w);
            done("opened the shipping bin", 0, vec![Event::MenuOpened { kind: "shipping".into() }])
        }
        "Silo" => done(format!("the silo holds {} hay", w.silo_hay), 0, vec![]),
        other => fail(format!("nothing to do with the {other} here"), 0),
    }
}

fn do_interact(w: &mut WorldState, pack: &ContentPack, dir: Direction) -> Outcome {
    w.player.facing = dir;
    let (tx, ty) = w.player.facing_tile();
    let map_id = w.player.map.clone();
    if !w.player_map().grid.in_bounds(tx, ty) {
        return fail("nothing there", 0);
    }
    if let Some(ni) = w.npcs.iter().position(|n| n.map == map_id && (n.x, n.y) == (tx, ty)) {
        return interact_npc(w, pack, ni);
    }
    if let Some(ai) = w.animals.iter().position(|a| a.map == map_id && (a.x, a.y) == (tx, ty)) {
        return pet_animal(w, pack, ai);
    }
    if let Some(exit) = w.player_map().exit_at(tx, ty).cloned() {
        return take_exit(w, pack, exit);
    }
    if map_id == "Farm" {
        if let Some(bid) = crate::world::commands::building_at(w, pack, tx, ty) {
            return interact_building(w, pack, bid, (tx, ty));
        }
    }

    let chosen = w.player.chosen().cloned();
    let tile = w.player_map().grid.get(tx, ty).unwrap().clone();

    // Harvest, then sow or fertilize.
    if let Some(soil) = &tile.soil {
        if let Some(crop) = &soil.crop {
            let def = pack.crop_for_seed(&crop.seed).expect("crop defined");
            if crop.days >= def.growth_days {
                let produce = def.produce.clone();
                if !inventory::add(pack, &mut w.player, &produce, 1, 0) {
                    return fail("inventory full", 0);
                }
                w.player_map_mut().grid.get_mut(tx, ty).unwrap().soil.as_mut().unwrap().crop = None;
                note_gathered(w, pack, &produce, 1);
                let ev = Event::CropHarvested {
                    map: map_id,
                    x: tx,
                    y: ty,
                    item: produce.clone(),
                };
                return done(format!("harvested {produce}"), 0, vec![ev]);
            }
        }
        if let Some(stack) = &chosen {
            let idef = pack.item(&stack.name).unwrap();
            if let Some(cdef) = pack.crop_for_seed(&stack.name) {
                if soil.crop.is_some() {
                    return fail("something is already planted there", 0);
                }
                if !cdef.seasons.contains(&w.clock.season) {
                    return fail(format!("{} won't grow in {}", stack.name, w.clock.season.name()), 0);
                }
                let slot = w.player.chosen_slot;
                inventory::remove_from_slot(&mut w.player, slot, 1);
                w.player_map_mut().grid.get_mut(tx, ty).unwrap().soil.as_mut().unwrap().crop = Some(Crop {
                    seed: stack.name.clone(),
                    days: 0,
                });
                let ev = Event::Sown {
                    map: map_id,
                    x: tx,
                    y: ty,
                    seed: stack.name.clone(),
                };
                return done(format!("planted {}", stack.name), 0, vec![ev]);
            }
            if idef.fertilizer {
                if soil.fertilizer.is_some() {
                    return fail("already fertilized", 0);
                }
                let slot = w.player.chosen_slot;
                inventory::remove_from_slot(&mut w.player, slot, 1);
                w.player_map_mut().grid.get_mut(tx, ty).unwrap().soil.as_mut().unwrap().fertilizer = Some(stack.name.clone());
                let ev = Event::Fertilized {
                    map: map_id,
                    x: tx,
                    y: ty,
                    fertilizer: stack.name.clone(),
                };
                return done(format!("applied {}", stack.name), 0, vec![ev]);
            }
        }
        if soil.crop.is_some() {
            return fail("the crop is not ready", 0);
        }
    }

    if let Some(obj) = w.player_map().object_at(tx, ty).cloned() {
        return interact_object(w, pack, (tx, ty), obj.object, chosen);
    }

    // Place a placeable item on an empty tile.
    if let Some(stack) = &chosen {
        let def = pack.item(&stack.name).unwrap();
        if let Some(kind) = def.placeable {
            if tile.soil.is_some() || !path::is_open(w, pack, &map_id, tx, ty, true) {
                return fail("cannot place that here", 0);
            }
            let object = match kind {
                Placeable::Object => Object::Placed { item: stack.name.clone() },
                Placeable::Station => Object::CookoutKit,
                Placeable::Furnace => Object::Furnace {
                    output: None,
                    ready_at: None,
                },
                Placeable::Incubator => Object::Incubator { egg: false, days: 0 },
            };
            let slot = w.player.chosen_slot;
            inventory::remove_from_slot(&mut w.player, slot, 1);
            w.player_map_mut().objects.push(PlacedObject { x: tx, y: ty, object });
            return done(format!("placed {}", stack.name), 0, vec![]);
        }
    }
    fail("nothing to interact with", 0)
}

fn interact_object(w: &mut WorldState, pack: &ContentPack, (tx, ty): (i32, i32), obj: Object, chosen: Option<ItemStack>) -> Outcome {
    match obj {
        Object::Forage { item } => {
            if !inventory::add(pack, &mut w.player, &item, 1, 0) {
                return fail("inventory full", 0);
            }
            w.player_map_mut().objects.retain(|o| (o.x, o.y) != (tx, ty));
            note_gathered(w, pack, &item, 1);
            done(format!("picked up {item}"), 0, vec![Event::ItemGathered { item, count: 1 }])
        }
        Object::Counter { shop } => {
            if let Some(up) = w.pending_upgrade.clone().filter(|u| u.shop == shop) {
                if w.clock.day_index() < up.ready_day {
                    return fail(format!("the {} is not ready yet", up.tool), 0);
                }
                if !inventory::add(pack, &mut w.player, &up.tool, 1, 0) {
                    return fail("inventory full", 0);
                }
                w.pending_upgrade = None;
                *w.ledger.tools_upgraded.entry(up.tool.clone()).or_default() += 1;
                return done(format!("picked up the {}", up.tool), 0, vec![]);
            }
            menus::open_shop(w, pack, &shop);
            done(format!("opened {shop}'s shop"), 0, vec![Event::MenuOpened { kind: "shop".into() }])
        }
        Object::Bed => {
            let opts = vec![
                MenuOption {
                    label: "Yes".into(),
                    payload: OptionPayload::Sleep,
                },
                MenuOption {
                    label: "No".into(),
                    payload: OptionPayload::Close,
                },
            ];
            let ev = open_dialogue(w, "Go to sleep for the night?".into(), opts);
            done("the bed asks whether to sleep", 0, vec![ev])
        }
        Object::QuestBoard => {
            if w.help_taken_today || pack.help_quests.is_empty() {
                return fail("no new requests today", 0);
            }
            let i = (w.clock.day_of_season as usize - 1) % pack.help_quests.len();
            crate::world::commands::start_help(w, &pack.help_quests[i]);
            w.help_taken_today = true;
            let q = w.quests.last().unwrap();
            let ev = Event::QuestChanged {
                id: q.id.clone(),
                status: "active".into(),
            };
            done(format!("accepted: {}", q.name), 0, vec![ev])
        }
        Object::PetBowl { .. } => match chosen {
            Some(s) if tool_kind(&s.name) == "Watering Can" => {
                let msg = fill_bowl(w, tx, ty).map_err(|f| Fail { ticks: 0, ..f })?;
                done(msg, 0, vec![])
            }
            _ => fail("the pet bowl needs water from a watering can", 0),
        },
        Object::Furnace { output, ready_at } => {
            let now = w.clock.absolute_minutes();
            if let Some(out) = output {
                if ready_at.is_some_and(|r| r > now) {
                    return fail(format!("{out} is still smelting"), 0);
                }
                if !inventory::add(pack, &mut w.player, &out, 1, 0) {
                    return fail("inventory full", 0);
                }
                if let Some(Object::Furnace { output, ready_at }) = w.player_map_mut().object_at_mut(tx, ty).map(|o| &mut o.object) {
                    *output = None;
                    *ready_at = None;
                }
                *w.ledger.crafted.entry(out.clone()).or_default() += 1;
                return done(format!("collected {out}"), 0, vec![Event::ItemCrafted { item: out, count: 1 }]);
            }
            let Some(stack) = chosen else {
                return fail("choose ore to smelt", 0);
            };
            let Some(smelt) = pack.smelting.get(&stack.name) else {
                return fail(format!("{} cannot be smelted", stack.name), 0);
            };
            if inventory::count(&w.player, &stack.name) < smelt.count {
                return fail(format!("smelting needs {} {}", smelt.count, stack.name), 0);
            }
            if inventory::count(&w.player, "Coal") < 1 {
                return fail("smelting needs 1 Coal", 0);
            }
            inventory::remove(&mut w.player, &stack.name, smelt.count);
            inventory::remove(&mut w.player, "Coal", 1);
            let (out, minutes) = (smelt.output.clone(), smelt.minutes as u64);
            if let Some(Object::Furnace { output, ready_at }) = w.player_map_mut().object_at_mut(tx, ty).map(|o| &mut o.object) {
                *output = Some(out.clone());
                *ready_at = Some(now + minutes);
            }
            done(format!("smelting {out}, ready in {minutes} minutes"), 0, vec![])
        }
        Object::Incubator { egg, .. } => {
            if egg {
                return fail("the incubator is busy", 0);
            }
            match chosen {
                Some(s) if s.name == "Egg" => {
                    let slot = w.player.chosen_slot;
                    inventory::remove_from_slot(&mut w.player, slot, 1);
                    if let Some(Object::Incubator { egg, days }) = w.player_map_mut().object_at_mut(tx, ty).map(|o| &mut o.object) {
                        *egg = true;
                        *days = 0;
                    }
                    done("placed an Egg in the incubator", 0, vec![])
                }
                _ => fail("the incubator needs an Egg", 0),
            }
        }
        Object::Stove | Object::CookoutKit => fail("cook with craft() while standing near it", 0),
        Object::Ladder => fail("the ladder leads nowhere", 0),
        Object::Placed { item } => fail(format!("the {item} does nothing"), 0),
    }
}

fn do_choose_item(w: &mut WorldState, slot: usize) -> Outcome {
    w.player.chosen_slot = slot;
    let msg = match w.player.chosen() {
        Some(s) => format!("holding {}", s.name),
        None => "holding nothing".into(),
    };
    done(msg, 0, vec![])
}

fn do_attach(w: &mut WorldState, pack: &ContentPack, slot: usize) -> Outcome {
    let Some(host) = w.player.chosen().cloned() else {
        return fail("no item chosen", 0);
    };
    let hdef = pack.item(&host.name).unwrap();
    if !hdef.attachable() {
        return fail(format!("nothing can be attached to the {}", host.name), 0);
    }
    if slot == w.player.chosen_slot {
        return fail("cannot attach an item to itself", 0);
    }
    let Some(item) = w.player.inventory[slot].clone() else {
        return fail(format!("slot {slot} is empty"), 0);
    };
    if !hdef.accepts.contains(&item.name) {
        return fail(format!("the {} does not accept {}", host.name, item.name), 0);
    }
    let cs = w.player.chosen_slot;
    let h = w.player.inventory[cs].as_mut().unwrap();
    match h.attachment.take() {
        Some(mut old) if old.name == item.name && old.quality == item.quality => {
            old.quantity += item.quantity;
            h.attachment = Some(old);
            w.player.inventory[slot] = None;
        }
        Some(old) => {
            h.attachment = Some(Box::new(item.clone()));
            w.player.inventory[slot] = Some(*old);
        }
        None => {
            h.attachment = Some(Box::new(item.clone()));
            w.player.inventory[slot] = None;
        }
    }
    done(format!("attached {} to the {}", item.name, host.name), 0, vec![])
}

fn do_detach(w: &mut WorldState, pack: &ContentPack) -> Outcome {
    let cs = w.player.chosen_slot;
    let Some(att) = w.player.inventory[cs].as_ref().and_then(|h| h.attachment.clone()) else {
        return fail("nothing attached", 0);
    };
    w.player.inventory[cs].as_mut().unwrap().attachment = None;
    if !inventory::add(pack, &mut w.player, &att.name, att.quantity, att.quality) {
        return fail("inventory full", 0);
    }
    done(format!("detached {}", att.name), 0, vec![])
}

/// Whether a cooking station is within reach of the player.
pub fn near_station(w: &WorldState, pack: &ContentPack) -> bool {
    let r = pack.constants.station_radius;
    let (px, py) = w.player.pos();
    w.player_map()
        .objects
        .iter()
        .any(|o| matches!(o.object, Object::Stove | Object::CookoutKit) && (o.x - px).abs() <= r && (o.y - py).abs() <= r)
}

pub(crate) fn do_craft(w: &mut WorldState, pack: &ContentPack, item: &str) -> Outcome {
    let Some(recipe) = pack.recipes.get(item) else {
        return fail(format!("unknown recipe {item:?}"), 0);
    };
    if !w.player.recipes_known.contains(item) {
        return fail(format!("the {item} recipe has not been learned"), 0);
    }
    if !inventory::has_all(&w.player, &recipe.ingredients) {
        let need: Vec<String> = recipe.ingredients.iter().map(|(k, v)| format!("{v} {k}")).collect();
        return fail(format!("insufficient ingredients: {item} needs {}", need.join(", ")), 0);
    }
    if recipe.kind == RecipeKind::Cooking && !near_station(w, pack) {
        return fail(format!("missing station: cooking {item} needs a stove or cookout kit nearby"), 0);
    }
    for (k, v) in &recipe.ingredients {
        inventory::remove(&mut w.player, k, *v);
    }
    if !inventory::add(pack, &mut w.player, item, 1, 0) {
        return fail("inventory full", 0);
    }
    *w.ledger.crafted.entry(item.to_string()).or_default() += 1;
    done(
        format!("crafted {item}"),
        0,
        vec![Event::ItemCrafted {
            item: item.to_string(),
            count: 1,
        }],
    )
}

/// Exits out of `map` as (destination map, arrival tile, hours).
fn map_edges(w: &WorldState, pack: &ContentPack, map: &str) -> Vec<(String, (i32, i32), Option<(u32, u32)>)> {
    let mut out = Vec::new();
    let Some(m) = w.maps.get(map) else { return out };
    for e in &m.exits {
        match &e.to {
            ExitTarget::Map { map, x, y } => out.push((map.clone(), (*x, *y), e.hours)),
            ExitTarget::Building { id } => {
                if let Some(b) = w.maps.get("Farm").and_then(|f| f.buildings.iter().find(|b| b.id == *id)) {
                    if let Some((dx, dy)) = pack.buildings[&b.kind].door {
                        out.push(("Farm".into(), (b.x + dx, b.y + dy + 1), None));
                    }
                }
            }
            ExitTarget::MineLevel { level } => {
                let id = mine::level_map_id(*level);
                if w.maps.contains_key(&id) {
                    out.push((id, pack.mine.arrival, None));
                }
            }
        }
    }
    for b in &m.buildings {
        let def = &pack.buildings[&b.kind];
        if let (Some(interior), Some(base)) = (&b.interior, &def.interior) {
            if let Some((gx, gy)) = pack.door_glyph(base) {
                out.push((interior.clone(), (gx, gy - 1), None));
            }
        }
    }
    out
}

fn do_navigate(w: &mut WorldState, pack: &ContentPack, name: &str, cfg: &ExecConfig) -> Outcome {
    if !cfg.navigate_enabled {
        return fail("navigate disabled", 0);
    }
    let Some(target) = pack.resolve_map(name).filter(|m| w.maps.contains_key(m)) else {
        return fail(format!("unknown location {name:?}"), 0);
    };
    if target == w.player.map {
        return done(format!("already in {target}"), 0, vec![]);
    }
    let mut prev: BTreeMap<String, (String, (i32, i32))> = BTreeMap::new();
    let mut q = VecDeque::from([w.player.map.clone()]);
    prev.insert(w.player.map.clone(), (String::new(), (0, 0)));
    while let Some(cur) = q.pop_front() {
        if cur == target {
            break;
        }
        for (dest, arrival, hours) in map_edges(w, pack, &cur) {
            if prev.contains_key(&dest) || open_now(w, hours).is_err() {
                continue;
            }
            prev.insert(dest.clone(), (cur.clone(), arrival));
            q.push_back(dest);
        }
    }
    let Some((_, arrival)) = prev.get(&target).cloned() else {
        return fail(format!("no route to {target}"), 0);
    };
    let mut hops = 0;
    let mut c = target.clone();
    while c != w.player.map {
        hops += 1;
        c = prev[&c].0.clone();
    }
    let ev = relocate(w, pack, &target, arrival);
    done(format!("navigated to {target}"), hops, vec![ev])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::Content;
    use crate::world::commands::{apply, SimCommand};
    use crate::world::init_world;

    fn setup(save: &str, cmds: &[&str]) -> (WorldState, std::sync::Arc<Content>) {
        let content = Content::shared();
        let mut w = init_world(&content, save, 7).unwrap();
        for c in cmds {
            apply(&mut w, &content, &SimCommand::parse(c).unwrap()).unwrap();
        }
        (w, content)
    }

    fn run(w: &mut WorldState, c: &Content, src: &str) -> ActionResult {
        execute(w, &c.pack, &Action::parse(src).unwrap(), &ExecConfig::default())
    }

    #[test]
    fn move_cost_is_free_up_to_eight_tiles() {
        let (_, c) = setup("save_new", &[]);
        let p = &c.pack;
        assert_eq!(move_ticks(p, 8), 0);
        assert_eq!(move_ticks(p, 9), 1);
        assert_eq!(move_ticks(p, 13), 1);
        assert_eq!(move_ticks(p, 14), 2);
    }

    #[test]
    fn leaving_the_house() {
        let (mut w, c) = setup("save_new", &[]);
        let r = run(&mut w, &c, "move(x=5, y=7)");
        assert!(r.ok, "{}", r.message);
        let r = run(&mut w, &c, "interact(direction=\"down\")");
        assert!(r.ok, "{}", r.message);
        assert_eq!((w.player.map.as_str(), w.player.x, w.player.y), ("Farm", 5, 5));
    }

    #[test]
    fn scythe_clears_weeds_for_fiber() {
        let (mut w, c) = setup("save_new", &["warp(\"Farm\", 2, 9)"]);
        run(&mut w, &c, "choose_item(slot_index=4)");
        let r = run(&mut w, &c, "use(direction=\"down\")");
        assert!(r.ok, "{}", r.message);
        assert_eq!(r.ticks_consumed, 1);
        assert_eq!(inventory::count(&w.player, "Fiber"), 1);
        assert!(w.maps["Farm"].grid.get(2, 10).unwrap().feature.is_none());
        assert_eq!(w.clock.minutes_since_6am, 10);
    }

    #[test]
    fn failed_action_only_moves_the_clock() {
        let (mut w, c) = setup("save_new", &["warp(\"Farm\", 20, 5)"]);
        run(&mut w, &c, "choose_item(slot_index=1)");
        let mut before = w.clone();
        // grass cannot be tilled
        let r = run(&mut w, &c, "use(direction=\"down\")");
        assert!(!r.ok);
        before.clock.minutes_since_6am += 10;
        assert_eq!(before.to_json(), w.to_json());
    }

    #[test]
    fn till_sow_water_grow_harvest() {
        let (mut w, c) = setup("save_new", &["warp(\"Farm\", 17, 10)"]);
        run(&mut w, &c, "choose_item(slot_index=1)");
        assert!(run(&mut w, &c, "use(direction=\"down\")").ok);
        run(&mut w, &c, "choose_item(slot_index=5)");
        assert!(run(&mut w, &c, "interact(direction=\"down\")").ok);
        let days = c.pack.crop_for_seed("Parsnip Seeds").unwrap().growth_days;
        for _ in 0..days {
            apply(&mut w, &c, &SimCommand::parse("warp(\"Farm\", 17, 10)").unwrap()).unwrap();
            run(&mut w, &c, "choose_item(slot_index=2)");
            let _ = run(&mut w, &c, "use(direction=\"down\")");
            crate::world::day::end_of_day(&mut w, &c.pack, true);
        }
        apply(&mut w, &c, &SimCommand::parse("warp(\"Farm\", 17, 10)").unwrap()).unwrap();
        let r = run(&mut w, &c, "interact(direction=\"down\")");
        assert!(r.ok, "{}", r.message);
        assert_eq!(w.ledger.gathered["Parsnip"], 1);
    }

    #[test]
    fn ship_a_parsnip() {
        let (mut w, c) = setup("save_farming", &["add_item_by_name(\"Parsnip\", 1)", "warp(\"Farm\", 9, 5)"]);
        let r = run(&mut w, &c, "interact(direction=\"up\")");
        assert!(r.ok, "{}", r.message);
        assert_eq!(w.menu.kind, MenuKind::Shipping);
        let i = w.menu.options.iter().position(|o| o.label.starts_with("Parsnip x")).unwrap();
        let r = run(&mut w, &c, &format!("choose_option(option_index={i}, direction=\"out\")"));
        assert!(r.ok, "{}", r.message);
        assert_eq!(w.shipped["Parsnip"], 1);
    }

    #[test]
    fn buy_seeds_at_listed_price() {
        let (mut w, c) = setup("save_new", &["set_time(1000)", "warp_shop(\"Pierre\")"]);
        let money = w.player.money;
        run(&mut w, &c, "interact(direction=\"up\")");
        assert_eq!(w.menu.kind, MenuKind::Shop);
        let r = run(&mut w, &c, "choose_option(option_index=0, quantity=5, direction=\"in\")");
        assert!(r.ok, "{}", r.message);
        assert_eq!(w.player.money, money - 100);
    }

    #[test]
    fn navigate_is_off_by_default() {
        let (mut w, c) = setup("save_new", &[]);
        let r = run(&mut w, &c, "navigate(name=\"Town\")");
        assert!(!r.ok);
        assert_eq!(r.message, "navigate disabled");
        let r = execute(
            &mut w,
            &c.pack,
            &Action::parse("navigate(name=\"Town\")").unwrap(),
            &ExecConfig { navigate_enabled: true },
        );
        assert!(r.ok, "{}", r.message);
        assert_eq!(w.player.map, "Town");
    }
}
