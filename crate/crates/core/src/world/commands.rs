//! Simulator commands used by saves and task setup. This is the only path
//! that mutates the world without going through game rules.

use super::clock::{hhmm_to_minutes, GameClock, Season};
use super::day::{spawn_in_home, water_outdoors, HOME_MAP, HOME_POS};
use super::grid::{Feature, Soil, Terrain, TREE_MATURE_STAGE};
use super::inventory;
use super::mine;
use super::state::*;
use super::WorldError;
use crate::content::{Content, ContentPack, Placeable, RecipeKind};
use crate::mechanics::npc;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Bool(bool),
    Str(String),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(i) => write!(f, "{i}"),
            Scalar::Bool(b) => f.write_str(if *b { "True" } else { "False" }),
            Scalar::Str(s) => write!(f, "\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgType {
    Int,
    Str,
    Bool,
}

#[derive(Clone, Copy, Debug)]
pub struct Param {
    pub name: &'static str,
    pub ty: ArgType,
    /// Optional parameters have a default rendered as a literal.
    pub default: Option<&'static str>,
}

const fn req(name: &'static str, ty: ArgType) -> Param {
    Param { name, ty, default: None }
}

const fn opt(name: &'static str, ty: ArgType, default: &'static str) -> Param {
    Param {
        name,
        ty,
        default: Some(default),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CommandSpec {
    pub name: &'static str,
    pub group: &'static str,
    pub params: &'static [Param],
}

use ArgType::{Bool as B, Int as I, Str as S};

/// Every simulator command, grouped as documented.
pub const COMMANDS: &[CommandSpec] = &[
    CommandSpec {
        name: "set_base_health",
        group: "player",
        params: &[req("amount", I)],
    },
    CommandSpec {
        name: "set_health",
        group: "player",
        params: &[req("amount", I)],
    },
    CommandSpec {
        name: "set_base_energy",
        group: "player",
        params: &[req("amount", I)],
    },
    CommandSpec {
        name: "set_energy",
        group: "player",
        params: &[req("amount", I)],
    },
    CommandSpec {
        name: "set_inventory_size",
        group: "player",
        params: &[req("size", I)],
    },
    CommandSpec {
        name: "clear_inventory",
        group: "player",
        params: &[],
    },
    CommandSpec {
        name: "set_money",
        group: "player",
        params: &[req("amount", I)],
    },
    CommandSpec {
        name: "add_item_by_id",
        group: "player",
        params: &[req("id", S), opt("count", I, "1"), opt("quality", I, "0")],
    },
    CommandSpec {
        name: "add_item_by_name",
        group: "player",
        params: &[req("name", S), opt("count", I, "1"), opt("quality", I, "0")],
    },
    CommandSpec {
        name: "lookup",
        group: "player",
        params: &[req("name", S)],
    },
    CommandSpec {
        name: "current_position",
        group: "player",
        params: &[],
    },
    CommandSpec {
        name: "add_recipe",
        group: "player",
        params: &[req("type", S), req("recipe", S)],
    },
    CommandSpec {
        name: "set_max_luck",
        group: "player",
        params: &[],
    },
    CommandSpec {
        name: "print_luck",
        group: "player",
        params: &[],
    },
    CommandSpec {
        name: "world_clear",
        group: "surroundings",
        params: &[req("entity", S), req("location", S)],
    },
    CommandSpec {
        name: "set_terrain",
        group: "surroundings",
        params: &[req("terrain", S), req("id", S), req("x", I), req("y", I)],
    },
    CommandSpec {
        name: "place_item",
        group: "surroundings",
        params: &[req("item", S), req("type", S), req("x", I), req("y", I)],
    },
    CommandSpec {
        name: "remove_item",
        group: "surroundings",
        params: &[req("x", I), req("y", I)],
    },
    CommandSpec {
        name: "place_crop",
        group: "surroundings",
        params: &[req("crop", S), req("x", I), req("y", I)],
    },
    CommandSpec {
        name: "grow_crop",
        group: "surroundings",
        params: &[req("day", I), req("x", I), req("y", I)],
    },
    CommandSpec {
        name: "grow_tree",
        group: "surroundings",
        params: &[req("day", I), req("x", I), req("y", I)],
    },
    CommandSpec {
        name: "build",
        group: "surroundings",
        params: &[req("type", S), req("force", B), req("x", I), req("y", I)],
    },
    CommandSpec {
        name: "build_stable",
        group: "surroundings",
        params: &[req("x", I), req("y", I)],
    },
    CommandSpec {
        name: "move_building",
        group: "surroundings",
        params: &[req("x_source", I), req("y_source", I), req("x_dest", I), req("y_dest", I)],
    },
    CommandSpec {
        name: "remove_building",
        group: "surroundings",
        params: &[req("x", I), req("y", I)],
    },
    CommandSpec {
        name: "upgrade_house",
        group: "surroundings",
        params: &[req("level", I)],
    },
    CommandSpec {
        name: "spawn_pet",
        group: "character",
        params: &[req("type", S), req("breed", S), req("name", S), req("x", I), req("y", I)],
    },
    CommandSpec {
        name: "spawn_animal",
        group: "character",
        params: &[req("type", S), req("name", S)],
    },
    CommandSpec {
        name: "grow_animal",
        group: "character",
        params: &[req("name", S)],
    },
    CommandSpec {
        name: "animal_friendship",
        group: "character",
        params: &[req("name", S), req("friendship", I)],
    },
    CommandSpec {
        name: "npc_friendship",
        group: "character",
        params: &[req("npc", S), req("friendship", I)],
    },
    CommandSpec {
        name: "all_npc_friendship",
        group: "character",
        params: &[req("friendship", I)],
    },
    CommandSpec {
        name: "dating",
        group: "character",
        params: &[req("npc", S)],
    },
    CommandSpec {
        name: "warp",
        group: "location",
        params: &[req("location", S), opt("x", I, "-1"), opt("y", I, "-1")],
    },
    CommandSpec {
        name: "warp_mine",
        group: "location",
        params: &[req("level", I)],
    },
    CommandSpec {
        name: "warp_volcano",
        group: "location",
        params: &[req("level", I)],
    },
    CommandSpec {
        name: "warp_home",
        group: "location",
        params: &[],
    },
    CommandSpec {
        name: "warp_shop",
        group: "location",
        params: &[req("npc", S)],
    },
    CommandSpec {
        name: "warp_character",
        group: "location",
        params: &[req("npc", S), req("location", S), req("x", I), req("y", I)],
    },
    CommandSpec {
        name: "set_date",
        group: "world",
        params: &[req("year", I), req("season", S), req("day", I)],
    },
    CommandSpec {
        name: "set_time",
        group: "world",
        params: &[req("time", I)],
    },
    CommandSpec {
        name: "rain",
        group: "world",
        params: &[],
    },
    CommandSpec {
        name: "set_deepest_mine_level",
        group: "progression",
        params: &[req("level", I)],
    },
    CommandSpec {
        name: "set_monster_stats",
        group: "progression",
        params: &[req("monster", S), req("kills", I)],
    },
    CommandSpec {
        name: "print_monster_stats",
        group: "progression",
        params: &[req("monster", S)],
    },
    CommandSpec {
        name: "start_quest",
        group: "progression",
        params: &[req("id", S)],
    },
    CommandSpec {
        name: "start_help_quest",
        group: "progression",
        params: &[req("type", S)],
    },
    CommandSpec {
        name: "complete_quest",
        group: "progression",
        params: &[req("id", S)],
    },
    CommandSpec {
        name: "joja_membership",
        group: "progression",
        params: &[],
    },
    CommandSpec {
        name: "spawn_junimo_note",
        group: "progression",
        params: &[req("id", S)],
    },
    CommandSpec {
        name: "mark_bundle",
        group: "progression",
        params: &[req("id", S)],
    },
    CommandSpec {
        name: "complete_room_bundles",
        group: "progression",
        params: &[req("id", S)],
    },
    CommandSpec {
        name: "community_development",
        group: "progression",
        params: &[req("id", S)],
    },
    CommandSpec {
        name: "receive_mail",
        group: "progression",
        params: &[req("mail", S)],
    },
    CommandSpec {
        name: "trigger_event",
        group: "progression",
        params: &[req("id", S)],
    },
    CommandSpec {
        name: "seen_event",
        group: "progression",
        params: &[req("id", S), req("see_or_forget", B)],
    },
    CommandSpec {
        name: "load_save",
        group: "progression",
        params: &[req("save", S)],
    },
];

pub fn spec(name: &str) -> Option<&'static CommandSpec> {
    COMMANDS.iter().find(|c| c.name == name)
}

/// A resolved command: arguments are positional, defaults filled in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimCommand {
    pub name: String,
    pub args: Vec<Scalar>,
}

impl fmt::Display for SimCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// Splits `name(arg, key=arg, ...)` into its name and raw argument list.
/// Shared with the action grammar.
pub fn split_call(src: &str) -> Result<(String, Vec<(Option<String>, Scalar)>), String> {
    let s = src.trim();
    let open = s.find('(').ok_or_else(|| format!("expected '(' in {s:?}"))?;
    if !s.ends_with(')') {
        return Err(format!("expected ')' at end of {s:?}"));
    }
    let name = s[..open].trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(format!("bad call name {name:?}"));
    }
    let body = &s[open + 1..s.len() - 1];
    let mut args = Vec::new();
    let mut chars = body.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        if chars.peek().is_none() {
            break;
        }
        // Optional `key =` prefix.
        let mut key = None;
        let mut lookahead: String = String::new();
        let save: Vec<char> = chars.clone().collect();
        let mut i = 0;
        while i < save.len() && (save[i].is_ascii_alphanumeric() || save[i] == '_') {
            lookahead.push(save[i]);
            i += 1;
        }
        let mut j = i;
        while j < save.len() && save[j].is_whitespace() {
            j += 1;
        }
        if !lookahead.is_empty() && j < save.len() && save[j] == '=' && !lookahead.chars().next().unwrap().is_ascii_digit() {
            key = Some(lookahead);
            for _ in 0..=j {
                chars.next();
            }
            while chars.peek().is_some_and(|c| c.is_whitespace()) {
                chars.next();
            }
        }
        let value = match chars.peek() {
            Some(&q) if q == '"' || q == '\'' => {
                chars.next();
                let mut out = String::new();
                loop {
                    match chars.next() {
                        None => return Err("unterminated string".into()),
                        Some('\\') => match chars.next() {
                            Some(c) => out.push(c),
                            None => return Err("dangling escape".into()),
                        },
                        Some(c) if c == q => break,
                        Some(c) => out.push(c),
                    }
                }
                Scalar::Str(out)
            }
            Some(_) => {
                let mut tok = String::new();
                while let Some(&c) = chars.peek() {
                    if c == ',' {
                        break;
                    }
                    tok.push(c);
                    chars.next();
                }
                let tok = tok.trim();
                if let Ok(i) = tok.parse::<i64>() {
                    Scalar::Int(i)
                } else if tok.eq_ignore_ascii_case("true") {
                    Scalar::Bool(true)
                } else if tok.eq_ignore_ascii_case("false") {
                    Scalar::Bool(false)
                } else if !tok.is_empty() && tok.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    Scalar::Str(tok.to_string())
                } else {
                    return Err(format!("bad argument {tok:?}"));
                }
            }
            None => return Err("missing argument".into()),
        };
        args.push((key, value));
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        match chars.next() {
            None => break,
            Some(',') => continue,
            Some(c) => return Err(format!("unexpected {c:?} after argument")),
        }
    }
    Ok((name.to_string(), args))
}

fn default_scalar(p: &Param) -> Scalar {
    let d = p.default.unwrap();
    match p.ty {
        ArgType::Int => Scalar::Int(d.parse().unwrap()),
        ArgType::Bool => Scalar::Bool(d == "true"),
        ArgType::Str => Scalar::Str(d.to_string()),
    }
}

impl SimCommand {
    pub fn parse(src: &str) -> Result<SimCommand, WorldError> {
        let (name, raw) = split_call(src).map_err(WorldError::Malformed)?;
        let spec = spec(&name).ok_or_else(|| WorldError::UnknownCommand(name.clone()))?;
        SimCommand::resolve(spec, raw)
    }

    pub fn new(name: &str, args: Vec<Scalar>) -> Result<SimCommand, WorldError> {
        let spec = spec(name).ok_or_else(|| WorldError::UnknownCommand(name.to_string()))?;
        SimCommand::resolve(spec, args.into_iter().map(|a| (None, a)).collect())
    }

    fn resolve(spec: &CommandSpec, raw: Vec<(Option<String>, Scalar)>) -> Result<SimCommand, WorldError> {
        let arity = || WorldError::BadArity {
            command: spec.name.to_string(),
            expected: spec.params.len(),
            found: raw.len(),
        };
        if raw.len() > spec.params.len() {
            return Err(arity());
        }
        let mut slots: Vec<Option<Scalar>> = vec![None; spec.params.len()];
        let mut seen_key = false;
        for (i, (key, v)) in raw.iter().enumerate() {
            let idx = match key {
                Some(k) => {
                    seen_key = true;
                    spec.params
                        .iter()
                        .position(|p| p.name == k)
                        .ok_or_else(|| WorldError::BadArgument(format!("{} has no parameter {k}", spec.name)))?
                }
                None if seen_key => return Err(WorldError::BadArgument("positional argument after keyword".into())),
                None => i,
            };
            if slots[idx].is_some() {
                return Err(WorldError::BadArgument(format!("{} given twice", spec.params[idx].name)));
            }
            slots[idx] = Some(v.clone());
        }
        let mut args = Vec::with_capacity(spec.params.len());
        for (p, slot) in spec.params.iter().zip(slots) {
            let v = match slot {
                Some(v) => v,
                None if p.default.is_some() => default_scalar(p),
                None => return Err(arity()),
            };
            let v = match (p.ty, v) {
                (ArgType::Int, Scalar::Int(i)) => Scalar::Int(i),
                (ArgType::Int, Scalar::Str(s)) if s.parse::<i64>().is_ok() => Scalar::Int(s.parse().unwrap()),
                (ArgType::Str, Scalar::Str(s)) => Scalar::Str(s),
                (ArgType::Str, Scalar::Int(i)) => Scalar::Str(i.to_string()),
                (ArgType::Bool, Scalar::Bool(b)) => Scalar::Bool(b),
                (ArgType::Bool, Scalar::Int(i)) => Scalar::Bool(i != 0),
                (ty, v) => {
                    return Err(WorldError::BadArgument(format!(
                        "{}: {} expects {ty:?}, got {v}",
                        spec.name, p.name
                    )))
                }
            };
            args.push(v);
        }
        Ok(SimCommand {
            name: spec.name.to_string(),
            args,
        })
    }

    fn int(&self, i: usize) -> i64 {
        match &self.args[i] {
            Scalar::Int(v) => *v,
            _ => unreachable!("resolved args are typed"),
        }
    }

    fn str(&self, i: usize) -> &str {
        match &self.args[i] {
            Scalar::Str(v) => v,
            _ => unreachable!("resolved args are typed"),
        }
    }

    fn bool(&self, i: usize) -> bool {
        match &self.args[i] {
            Scalar::Bool(v) => *v,
            _ => unreachable!("resolved args are typed"),
        }
    }
}

fn unknown_item(name: &str) -> WorldError {
    WorldError::UnknownItem(name.to_string())
}

fn invalid(msg: impl Into<String>) -> WorldError {
    WorldError::Invalid(msg.into())
}

fn nonneg(v: i64, what: &str) -> Result<i64, WorldError> {
    if v < 0 {
        Err(invalid(format!("{what} must be >= 0")))
    } else {
        Ok(v)
    }
}

fn progression_id<'a>(list: &'a [String], id: &str, what: &str) -> Result<&'a String, WorldError> {
    list.iter()
        .find(|x| x.as_str() == id)
        .ok_or_else(|| invalid(format!("unknown {what} id {id:?}")))
}

/// Applies one command. Returns printed output for the query commands.
pub fn apply(world: &mut WorldState, content: &Content, cmd: &SimCommand) -> Result<Option<String>, WorldError> {
    let pack = &content.pack;
    let mut out = None;
    match cmd.name.as_str() {
        "set_base_health" => {
            let v = nonneg(cmd.int(0), "health")? as i32;
            world.player.max_health = v.max(1);
            world.player.health = world.player.health.min(world.player.max_health);
        }
        "set_health" => {
            world.player.health = (nonneg(cmd.int(0), "health")? as i32).min(world.player.max_health);
        }
        "set_base_energy" => {
            let v = nonneg(cmd.int(0), "energy")? as i32;
            world.player.base_energy = v;
            world.player.energy = world.player.energy.min(v);
        }
        "set_energy" => {
            world.player.energy = (nonneg(cmd.int(0), "energy")? as i32).min(world.player.base_energy);
        }
        "set_inventory_size" => {
            let n = cmd.int(0);
            if !(1..=INVENTORY_SLOTS as i64).contains(&n) {
                return Err(invalid("inventory size must be 1..=36"));
            }
            let n = n as usize;
            if world.player.inventory[n..].iter().any(|s| s.is_some()) {
                return Err(invalid("shrinking would drop items"));
            }
            world.player.capacity = n;
        }
        "clear_inventory" => {
            world.player.inventory = vec![None; INVENTORY_SLOTS];
            world.player.chosen_slot = 0;
        }
        "set_money" => world.player.money = nonneg(cmd.int(0), "money")?,
        "add_item_by_id" | "add_item_by_name" => {
            let name = if cmd.name == "add_item_by_id" {
                pack.item_by_id(cmd.str(0)).ok_or_else(|| unknown_item(cmd.str(0)))?.0.to_string()
            } else {
                let n = cmd.str(0);
                pack.item(n).ok_or_else(|| unknown_item(n))?;
                n.to_string()
            };
            let count = cmd.int(1);
            let quality = cmd.int(2);
            if count < 1 || quality < 0 {
                return Err(invalid("count must be >= 1 and quality >= 0"));
            }
            if !inventory::add(pack, &mut world.player, &name, count as u32, quality as u32) {
                return Err(invalid("inventory is full"));
            }
        }
        "lookup" => {
            let def = pack.item(cmd.str(0)).ok_or_else(|| unknown_item(cmd.str(0)))?;
            out = Some(def.id.clone());
        }
        "current_position" => {
            let p = &world.player;
            out = Some(format!("{} ({}, {})", p.map, p.x, p.y));
        }
        "add_recipe" => {
            let kind = match cmd.str(0).to_ascii_lowercase().as_str() {
                "crafting" => RecipeKind::Crafting,
                "cooking" => RecipeKind::Cooking,
                other => return Err(invalid(format!("recipe type must be crafting or cooking, got {other}"))),
            };
            let r = pack.recipes.get(cmd.str(1)).ok_or_else(|| unknown_item(cmd.str(1)))?;
            if r.kind != kind {
                return Err(invalid(format!("{} is not a {} recipe", cmd.str(1), cmd.str(0))));
            }
            world.player.recipes_known.insert(cmd.str(1).to_string());
        }
        "set_max_luck" => world.player.luck = 100,
        "print_luck" => out = Some(format!("{:.3}", world.player.luck as f64 / 1000.0)),
        "world_clear" => world_clear(world, pack, cmd.str(0), cmd.str(1))?,
        "set_terrain" => {
            let (x, y) = (cmd.int(2) as i32, cmd.int(3) as i32);
            let kind = cmd.str(0).to_ascii_lowercase();
            let id = cmd.str(1).to_string();
            let map = world.player.map.clone();
            check_free(world, pack, &map, x, y)?;
            let t = world.maps.get_mut(&map).unwrap().grid.get_mut(x, y).unwrap();
            match kind.as_str() {
                "tree" => {
                    t.feature = Some(Feature::Tree {
                        species: id,
                        stage: TREE_MATURE_STAGE,
                    })
                }
                "grass" => t.feature = Some(Feature::TallGrass),
                "weeds" => t.feature = Some(Feature::Weeds),
                "stone" => t.feature = Some(Feature::Stone),
                "twig" => t.feature = Some(Feature::Twig),
                "hoedirt" => {
                    if t.terrain != Terrain::Dirt {
                        return Err(invalid("hoedirt needs a dirt tile"));
                    }
                    t.soil = Some(Soil::default());
                }
                other => return Err(invalid(format!("unknown terrain feature {other}"))),
            }
        }
        "place_item" => {
            let item = cmd.str(0).to_string();
            let def = pack.item(&item).ok_or_else(|| unknown_item(&item))?;
            let (x, y) = (cmd.int(2) as i32, cmd.int(3) as i32);
            let map = world.player.map.clone();
            check_free(world, pack, &map, x, y)?;
            let m = world.maps.get_mut(&map).unwrap();
            match cmd.str(1).to_ascii_lowercase().as_str() {
                "object" => {
                    let object = match def.placeable {
                        Some(Placeable::Furnace) => Object::Furnace {
                            output: None,
                            ready_at: None,
                        },
                        Some(Placeable::Incubator) => Object::Incubator { egg: false, days: 0 },
                        Some(Placeable::Station) => Object::CookoutKit,
                        Some(Placeable::Object) => Object::Placed { item },
                        None => return Err(invalid(format!("{item} cannot be placed as an object"))),
                    };
                    m.objects.push(PlacedObject { x, y, object });
                }
                "forage" => m.objects.push(PlacedObject {
                    x,
                    y,
                    object: Object::Forage { item },
                }),
                "node" => m.grid.get_mut(x, y).unwrap().feature = Some(Feature::Node { item }),
                "dig_spot" => m.grid.get_mut(x, y).unwrap().feature = Some(Feature::DigSpot { item }),
                other => return Err(invalid(format!("unknown placement type {other}"))),
            }
        }
        "remove_item" => {
            let (x, y) = (cmd.int(0) as i32, cmd.int(1) as i32);
            let m = world.player_map_mut();
            if let Some(i) = m.objects.iter().position(|o| o.x == x && o.y == y) {
                m.objects.remove(i);
            } else if let Some(t) = m.grid.get_mut(x, y).filter(|t| t.feature.is_some()) {
                t.feature = None;
            } else {
                return Err(invalid(format!("nothing to remove at ({x}, {y})")));
            }
        }
        "place_crop" => {
            let name = cmd.str(0);
            let seed = if pack.crops.contains_key(name) {
                name.to_string()
            } else {
                pack.crops
                    .iter()
                    .find(|(_, c)| c.produce == name)
                    .map(|(s, _)| s.clone())
                    .ok_or_else(|| unknown_item(name))?
            };
            let (x, y) = (cmd.int(1) as i32, cmd.int(2) as i32);
            let t = world
                .player_map_mut()
                .grid
                .get_mut(x, y)
                .ok_or_else(|| invalid("tile out of bounds"))?;
            if t.terrain != Terrain::Dirt || t.feature.is_some() {
                return Err(invalid("crops need clear dirt"));
            }
            let soil = t.soil.get_or_insert_with(Soil::default);
            if soil.crop.is_some() {
                return Err(invalid("tile already has a crop"));
            }
            soil.crop = Some(super::grid::Crop { seed, days: 0 });
        }
        "grow_crop" => {
            let days = nonneg(cmd.int(0), "days")? as u32;
            let (x, y) = (cmd.int(1) as i32, cmd.int(2) as i32);
            let crop = world
                .player_map_mut()
                .grid
                .get_mut(x, y)
                .and_then(|t| t.soil.as_mut())
                .and_then(|s| s.crop.as_mut())
                .ok_or_else(|| invalid(format!("no crop at ({x}, {y})")))?;
            crop.days += days;
        }
        "grow_tree" => {
            let days = nonneg(cmd.int(0), "days")? as u32;
            let (x, y) = (cmd.int(1) as i32, cmd.int(2) as i32);
            match world.player_map_mut().grid.get_mut(x, y).and_then(|t| t.feature.as_mut()) {
                Some(Feature::Tree { stage, .. }) => *stage = (*stage + days).min(TREE_MATURE_STAGE),
                _ => return Err(invalid(format!("no tree at ({x}, {y})"))),
            }
        }
        "build" => {
            build(world, pack, cmd.str(0), cmd.bool(1), cmd.int(2) as i32, cmd.int(3) as i32)?;
        }
        "build_stable" => {
            build(world, pack, "Stable", false, cmd.int(0) as i32, cmd.int(1) as i32)?;
        }
        "move_building" => {
            let (sx, sy, dx, dy) = (cmd.int(0) as i32, cmd.int(1) as i32, cmd.int(2) as i32, cmd.int(3) as i32);
            let id = building_at(world, pack, sx, sy).ok_or_else(|| invalid(format!("no building at ({sx}, {sy})")))?;
            relocate_building(world, pack, id, dx, dy)?;
        }
        "remove_building" => {
            let (x, y) = (cmd.int(0) as i32, cmd.int(1) as i32);
            let id = building_at(world, pack, x, y).ok_or_else(|| invalid(format!("no building at ({x}, {y})")))?;
            demolish_building(world, id)?;
        }
        "upgrade_house" => {
            let level = cmd.int(0);
            if !(0..=3).contains(&level) {
                return Err(invalid("house level must be 0..=3"));
            }
            set_house_level(world, level as u32);
        }
        "spawn_pet" => {
            let kind = capitalize(cmd.str(0));
            let def = pack
                .animals
                .get(&kind)
                .ok_or_else(|| invalid(format!("unknown pet type {}", cmd.str(0))))?;
            if def.home != "farm" {
                return Err(invalid(format!("{kind} is not a pet")));
            }
            let (x, y) = (cmd.int(3) as i32, cmd.int(4) as i32);
            check_free(world, pack, "Farm", x, y)?;
            let id = world.alloc_id();
            world.animals.push(Animal {
                id,
                kind,
                name: cmd.str(2).to_string(),
                map: "Farm".into(),
                x,
                y,
                age_days: 30,
                friendship: 0,
                petted_today: false,
            });
        }
        "spawn_animal" => {
            let kind = capitalize(cmd.str(0));
            let id = spawn_in_home(world, pack, &kind, cmd.str(1)).map_err(WorldError::Invalid)?;
            // Bought or spawned animals arrive grown.
            if let Some(a) = world.animals.iter_mut().find(|a| a.id == id) {
                a.age_days = pack.constants.egg_laying_age;
            }
        }
        "grow_animal" => {
            let here = world.player.map.clone();
            let adult = pack.constants.egg_laying_age;
            let a = world
                .animals
                .iter_mut()
                .find(|a| a.name == cmd.str(0) && a.map == here)
                .ok_or_else(|| invalid(format!("no animal named {} here", cmd.str(0))))?;
            a.age_days = a.age_days.max(adult);
        }
        "animal_friendship" => {
            let v = cmd.int(1).clamp(0, 1000) as i32;
            let a = world
                .animals
                .iter_mut()
                .find(|a| a.name == cmd.str(0))
                .ok_or_else(|| invalid(format!("no animal named {}", cmd.str(0))))?;
            a.friendship = v;
        }
        "npc_friendship" => {
            let n = npc_name(pack, cmd.str(0))?;
            world.player.friendships.insert(n, cmd.int(1).clamp(0, 2500) as i32);
        }
        "all_npc_friendship" => {
            let v = cmd.int(0).clamp(0, 2500) as i32;
            for n in pack.npcs.keys() {
                world.player.friendships.insert(n.clone(), v);
            }
        }
        "dating" => {
            let n = npc_name(pack, cmd.str(0))?;
            world.player.dating.insert(n);
        }
        "warp" => {
            let map = pack
                .resolve_map(cmd.str(0))
                .ok_or_else(|| WorldError::UnknownLocation(cmd.str(0).to_string()))?;
            let (x, y) = (cmd.int(1) as i32, cmd.int(2) as i32);
            if let Some(level) = mine::level_of(&map) {
                let (id, pos) = mine::ensure_level(world, pack, level);
                let pos = if x < 0 { pos } else { (x, y) };
                place_player(world, pack, &id, pos)?;
            } else {
                let pos = if x < 0 && y < 0 {
                    pack.default_arrival(&map).unwrap_or((1, 1))
                } else {
                    (x, y)
                };
                place_player(world, pack, &map, pos)?;
            }
        }
        "warp_mine" => {
            let level = cmd.int(0);
            if level < 1 {
                return Err(invalid("mine levels start at 1"));
            }
            let (id, pos) = mine::ensure_level(world, pack, level as u32);
            place_player(world, pack, &id, pos)?;
            world.player.facing = Direction::Down;
        }
        "warp_volcano" => return Err(WorldError::UnknownLocation(format!("VolcanoDungeon{}", cmd.int(0)))),
        "warp_home" => {
            place_player(world, pack, HOME_MAP, HOME_POS)?;
            world.player.facing = Direction::Up;
        }
        "warp_shop" => {
            let id = pack
                .shop_id(cmd.str(0))
                .ok_or_else(|| WorldError::UnknownNpc(cmd.str(0).to_string()))?
                .to_string();
            let shop = &pack.shops[&id];
            place_player(world, pack, &shop.map.clone(), shop.stand)?;
            world.player.facing = Direction::Up;
        }
        "warp_character" => {
            let name = npc_name(pack, cmd.str(0))?;
            let map = pack
                .resolve_map(cmd.str(1))
                .ok_or_else(|| WorldError::UnknownLocation(cmd.str(1).to_string()))?;
            let (x, y) = (cmd.int(2) as i32, cmd.int(3) as i32);
            if !world.maps.contains_key(&map) {
                return Err(WorldError::UnknownLocation(map));
            }
            check_free(world, pack, &map, x, y)?;
            let n = world.npcs.iter_mut().find(|n| n.name == name).unwrap();
            n.map = map;
            n.x = x;
            n.y = y;
        }
        "set_date" => {
            let year = cmd.int(0);
            let season = Season::parse(cmd.str(1)).ok_or_else(|| invalid(format!("unknown season {}", cmd.str(1))))?;
            let day = cmd.int(2);
            if year < 1 || !(1..=28).contains(&day) {
                return Err(invalid("year >= 1 and day in 1..=28"));
            }
            let minutes = world.clock.minutes_since_6am;
            world.clock = GameClock::new(day as u32, season, year as u32);
            world.clock.minutes_since_6am = minutes;
        }
        "set_time" => {
            let m = hhmm_to_minutes(cmd.int(0)).ok_or_else(|| invalid(format!("bad time {}", cmd.int(0))))?;
            world.clock.minutes_since_6am = m;
            npc::update_schedules(world, pack);
        }
        "rain" => {
            world.weather = Weather::Rainy;
            water_outdoors(world);
        }
        "set_deepest_mine_level" => {
            world.progression.deepest_mine_level = nonneg(cmd.int(0), "level")? as u32;
        }
        "set_monster_stats" => {
            let name = cmd.str(0);
            if !pack.monsters.contains_key(name) {
                return Err(invalid(format!("unknown monster {name}")));
            }
            world.kill_stats.insert(name.to_string(), nonneg(cmd.int(1), "kills")? as u32);
        }
        "print_monster_stats" => {
            let name = cmd.str(0);
            if !pack.monsters.contains_key(name) {
                return Err(invalid(format!("unknown monster {name}")));
            }
            out = Some(world.kill_stats.get(name).copied().unwrap_or(0).to_string());
        }
        "start_quest" => start_quest(world, pack, cmd.str(0))?,
        "start_help_quest" => {
            let kind = cmd.str(0).to_ascii_lowercase().replace('_', "");
            if kind != "itemdelivery" {
                return Err(invalid(format!("unsupported help quest type {}", cmd.str(0))));
            }
            use rand::Rng;
            let i = world.rng.gen_range(0..pack.help_quests.len());
            start_help(world, &pack.help_quests[i]);
        }
        "complete_quest" => {
            let id = cmd.str(0);
            let q = world
                .quests
                .iter_mut()
                .find(|q| q.id == id)
                .ok_or_else(|| invalid(format!("quest {id} is not in the log")))?;
            if q.status == QuestStatus::Active {
                q.status = QuestStatus::Completed;
            }
        }
        "joja_membership" => {
            world.progression.flags.insert("Joja Membership".into());
        }
        "spawn_junimo_note" => {
            let id = progression_id(&pack.progression.junimo_notes, cmd.str(0), "junimo note")?;
            world.progression.junimo_notes.insert(id.clone());
        }
        "mark_bundle" => {
            let id = progression_id(&pack.progression.bundles, cmd.str(0), "bundle")?;
            world.progression.bundles.insert(id.clone());
        }
        "complete_room_bundles" => {
            let id = progression_id(&pack.progression.rooms, cmd.str(0), "room")?;
            world.progression.rooms.insert(id.clone());
        }
        "community_development" => {
            let id = progression_id(&pack.progression.projects, cmd.str(0), "project")?;
            world.progression.projects.insert(id.clone());
            world.progression.flags.insert(id.clone());
        }
        "receive_mail" => {
            let id = progression_id(&pack.progression.mail, cmd.str(0), "mail")?;
            world.progression.mail.insert(id.clone());
        }
        "trigger_event" => {
            let id = progression_id(&pack.progression.events, cmd.str(0), "event")?;
            world.progression.events_seen.insert(id.clone());
        }
        "seen_event" => {
            let id = progression_id(&pack.progression.events, cmd.str(0), "event")?.clone();
            if cmd.bool(1) {
                world.progression.events_seen.insert(id);
            } else {
                world.progression.events_seen.remove(&id);
            }
        }
        "load_save" => {
            let seed = world.seed;
            *world = super::init_world(content, cmd.str(0), seed)?;
        }
        other => return Err(WorldError::UnknownCommand(other.to_string())),
    }
    Ok(out)
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().collect::<String>() + &c.as_str().to_ascii_lowercase(),
        None => String::new(),
    }
}

fn npc_name(pack: &ContentPack, n: &str) -> Result<String, WorldError> {
    pack.npcs
        .keys()
        .find(|k| k.eq_ignore_ascii_case(n.trim()))
        .cloned()
        .ok_or_else(|| WorldError::UnknownNpc(n.to_string()))
}

/// Tile is in bounds, walkable terrain, and empty of features, objects,
/// buildings, exits and creatures.
fn check_free(world: &WorldState, pack: &ContentPack, map: &str, x: i32, y: i32) -> Result<(), WorldError> {
    if !world.maps.contains_key(map) {
        return Err(WorldError::UnknownLocation(map.to_string()));
    }
    if crate::mechanics::path::is_open(world, pack, map, x, y, true) {
        Ok(())
    } else {
        Err(invalid(format!("tile ({x}, {y}) on {map} is not free")))
    }
}

fn place_player(world: &mut WorldState, pack: &ContentPack, map: &str, (x, y): (i32, i32)) -> Result<(), WorldError> {
    if !world.maps.contains_key(map) {
        return Err(WorldError::UnknownLocation(map.to_string()));
    }
    if !crate::mechanics::path::is_open(world, pack, map, x, y, false) {
        return Err(invalid(format!("cannot stand at ({x}, {y}) on {map}")));
    }
    world.player.map = map.to_string();
    world.player.x = x;
    world.player.y = y;
    world.menu = MenuState::none();
    Ok(())
}

fn world_clear(world: &mut WorldState, pack: &ContentPack, entity: &str, location: &str) -> Result<(), WorldError> {
    let map = pack
        .resolve_map(location)
        .filter(|m| world.maps.contains_key(m))
        .ok_or_else(|| WorldError::UnknownLocation(location.to_string()))?;
    let entity = entity.to_ascii_lowercase();
    let m = world.maps.get_mut(&map).unwrap();
    let pred: Box<dyn Fn(&Feature) -> bool> = match entity.as_str() {
        "trees" => Box::new(|f| matches!(f, Feature::Tree { .. })),
        "weeds" => Box::new(|f| matches!(f, Feature::Weeds)),
        "stones" => Box::new(|f| matches!(f, Feature::Stone | Feature::Node { .. })),
        "twigs" => Box::new(|f| matches!(f, Feature::Twig)),
        "debris" => Box::new(|f| f.is_debris()),
        "grass" => Box::new(|f| matches!(f, Feature::TallGrass)),
        "crops" | "forage" | "objects" | "monsters" => Box::new(|_| false),
        other => return Err(invalid(format!("unknown entity type {other}"))),
    };
    for t in m.grid.tiles_mut() {
        if t.feature.as_ref().is_some_and(&pred) {
            t.feature = None;
        }
        if entity == "crops" {
            if let Some(s) = t.soil.as_mut() {
                s.crop = None;
            }
        }
    }
    match entity.as_str() {
        "forage" => m.objects.retain(|o| !matches!(o.object, Object::Forage { .. })),
        "objects" => m.objects.retain(|o| !matches!(o.object, Object::Placed { .. })),
        "monsters" => world.monsters.retain(|mo| mo.map != map),
        _ => {}
    }
    Ok(())
}

pub fn footprint(pack: &ContentPack, b: &Building) -> (i32, i32, i32, i32) {
    let def = &pack.buildings[&b.kind];
    (b.x, b.y, def.width, def.height)
}

pub fn building_at(world: &WorldState, pack: &ContentPack, x: i32, y: i32) -> Option<u32> {
    world.maps.get("Farm")?.buildings.iter().find_map(|b| {
        let (bx, by, w, h) = footprint(pack, b);
        (x >= bx && x < bx + w && y >= by && y < by + h).then_some(b.id)
    })
}

/// Whether a `w`x`h` footprint at (x, y) on the farm is clear, ignoring
/// building `skip`.
pub fn site_clear(world: &WorldState, pack: &ContentPack, x: i32, y: i32, w: i32, h: i32, skip: Option<u32>, force: bool) -> bool {
    let Some(farm) = world.maps.get("Farm") else { return false };
    for ty in y..y + h {
        for tx in x..x + w {
            let Some(t) = farm.grid.get(tx, ty) else { return false };
            if !t.terrain.passable() || farm.exit_at(tx, ty).is_some() {
                return false;
            }
            if !force && (t.feature.is_some() || t.soil.is_some() || farm.object_at(tx, ty).is_some()) {
                return false;
            }
            if building_at(world, pack, tx, ty).is_some_and(|id| Some(id) != skip) {
                return false;
            }
            let occupied = (world.player.map == "Farm" && world.player.pos() == (tx, ty))
                || world.animals.iter().any(|a| a.map == "Farm" && (a.x, a.y) == (tx, ty))
                || world.npcs.iter().any(|n| n.map == "Farm" && (n.x, n.y) == (tx, ty));
            if occupied {
                return false;
            }
        }
    }
    true
}

pub fn build(world: &mut WorldState, pack: &ContentPack, kind: &str, force: bool, x: i32, y: i32) -> Result<u32, WorldError> {
    let def = pack
        .buildings
        .get(kind)
        .ok_or_else(|| invalid(format!("unknown building type {kind}")))?;
    if !site_clear(world, pack, x, y, def.width, def.height, None, force) {
        return Err(invalid(format!("cannot place {kind} at ({x}, {y})")));
    }
    let farm = world.maps.get_mut("Farm").unwrap();
    for ty in y..y + def.height {
        for tx in x..x + def.width {
            let t = farm.grid.get_mut(tx, ty).unwrap();
            t.feature = None;
            t.soil = None;
        }
    }
    farm.objects
        .retain(|o| !(o.x >= x && o.x < x + def.width && o.y >= y && o.y < y + def.height));
    let interior = match &def.interior {
        Some(base) => {
            let mut name = base.clone();
            let mut n = 2;
            while world.maps.contains_key(&name) {
                name = format!("{base}{n}");
                n += 1;
            }
            Some(name)
        }
        None => None,
    };
    let id = world.alloc_id();
    if let (Some(name), Some(base)) = (&interior, &def.interior) {
        let mut m = pack.build_map(base).expect("interior map exists");
        for e in m.exits.iter_mut() {
            e.to = ExitTarget::Building { id };
        }
        if m.exits.is_empty() {
            if let Some((dx, dy)) = pack.door_glyph(base) {
                m.exits.push(Exit {
                    x: dx,
                    y: dy,
                    to: ExitTarget::Building { id },
                    hours: None,
                });
            }
        }
        world.maps.insert(name.clone(), m);
    }
    world.maps.get_mut("Farm").unwrap().buildings.push(Building {
        id,
        kind: kind.to_string(),
        x,
        y,
        animal_door_open: false,
        interior,
    });
    Ok(id)
}

/// Replaces one building kind with another in place (e.g. coop upgrades).
pub fn replace_building_kind(world: &mut WorldState, id: u32, kind: &str) {
    if let Some(b) = world.maps.get_mut("Farm").and_then(|f| f.buildings.iter_mut().find(|b| b.id == id)) {
        b.kind = kind.to_string();
    }
}

pub fn relocate_building(world: &mut WorldState, pack: &ContentPack, id: u32, x: i32, y: i32) -> Result<(), WorldError> {
    let b = world
        .maps
        .get("Farm")
        .and_then(|f| f.buildings.iter().find(|b| b.id == id))
        .ok_or_else(|| invalid("no such building"))?
        .clone();
    let def = &pack.buildings[&b.kind];
    if !site_clear(world, pack, x, y, def.width, def.height, Some(id), false) {
        return Err(invalid(format!("cannot move {} to ({x}, {y})", b.kind)));
    }
    let farm = world.maps.get_mut("Farm").unwrap();
    let nb = farm.buildings.iter_mut().find(|nb| nb.id == id).unwrap();
    nb.x = x;
    nb.y = y;
    Ok(())
}

pub fn demolish_building(world: &mut WorldState, id: u32) -> Result<String, WorldError> {
    let farm = world.maps.get_mut("Farm").ok_or_else(|| invalid("no farm"))?;
    let i = farm
        .buildings
        .iter()
        .position(|b| b.id == id)
        .ok_or_else(|| invalid("no such building"))?;
    if farm.buildings[i].kind == "FarmHouse" {
        return Err(invalid("the farmhouse cannot be removed"));
    }
    let b = farm.buildings.remove(i);
    if let Some(interior) = &b.interior {
        if world.animals.iter().any(|a| &a.map == interior) || world.player.map == *interior {
            world.maps.get_mut("Farm").unwrap().buildings.insert(i, b.clone());
            return Err(invalid(format!("{} is not empty", b.kind)));
        }
        world.maps.remove(interior);
    }
    Ok(b.kind)
}

pub fn set_house_level(world: &mut WorldState, level: u32) {
    world.player.house_level = level;
    if let Some(h) = world.maps.get_mut(HOME_MAP) {
        let has_stove = h.objects.iter().any(|o| o.object == Object::Stove);
        if level >= 1 && !has_stove {
            h.objects.push(PlacedObject {
                x: 2,
                y: 2,
                object: Object::Stove,
            });
        }
        if level == 0 {
            h.objects.retain(|o| o.object != Object::Stove);
        }
    }
}

pub fn start_quest(world: &mut WorldState, pack: &ContentPack, id: &str) -> Result<(), WorldError> {
    let def = pack.quests.get(id).ok_or_else(|| invalid(format!("unknown quest {id}")))?;
    if world.quests.iter().any(|q| q.id == id) {
        return Err(invalid(format!("quest {id} already started")));
    }
    let delivery = match &def.objective {
        crate::content::Objective::Deliver { deliver, count, to } => Some(Delivery {
            item: deliver.clone(),
            count: *count,
            to: to.clone(),
            reward: def.reward,
        }),
        _ => None,
    };
    world.quests.push(QuestState {
        id: id.to_string(),
        name: def.name.clone(),
        help: false,
        status: QuestStatus::Active,
        cancellable: def.cancellable,
        reward: def.reward,
        talked: Default::default(),
        progress: 0,
        delivery,
    });
    Ok(())
}

pub fn start_help(world: &mut WorldState, h: &crate::content::HelpQuestDef) {
    let n = world.quests.iter().filter(|q| q.help).count();
    world.quests.push(QuestState {
        id: format!("help-{}", n + 1),
        name: format!("Help Wanted: {} {} for {}", h.count, h.deliver, h.to),
        help: true,
        status: QuestStatus::Active,
        cancellable: true,
        reward: h.reward,
        talked: Default::default(),
        progress: 0,
        delivery: Some(Delivery {
            item: h.deliver.clone(),
            count: h.count,
            to: h.to.clone(),
            reward: h.reward,
        }),
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_positional_and_keyword() {
        let c = SimCommand::parse("set_time(time=900)").unwrap();
        assert_eq!(c.args, vec![Scalar::Int(900)]);
        let c = SimCommand::parse("add_item_by_name(\"Parsnip\", 5)").unwrap();
        assert_eq!(c.args, vec![Scalar::Str("Parsnip".into()), Scalar::Int(5), Scalar::Int(0)]);
        let c = SimCommand::parse("warp(\"joja\", 21, 26)").unwrap();
        assert_eq!(c.args.len(), 3);
        let c = SimCommand::parse("joja_membership()").unwrap();
        assert!(c.args.is_empty());
        let c = SimCommand::parse("seen_event('60367', false)").unwrap();
        assert_eq!(c.args[1], Scalar::Bool(false));
    }

    #[test]
    fn rejects_bad_calls() {
        assert!(matches!(SimCommand::parse("teleport(1)"), Err(WorldError::UnknownCommand(_))));
        assert!(matches!(SimCommand::parse("set_time()"), Err(WorldError::BadArity { .. })));
        assert!(matches!(SimCommand::parse("set_time(1, 2)"), Err(WorldError::BadArity { .. })));
        assert!(SimCommand::parse("set_time(\"noon\")").is_err());
        assert!(SimCommand::parse("set_time(900").is_err());
    }

    #[test]
    fn display_round_trips() {
        for src in ["add_item_by_name(\"Wood\", 400, 0)", "warp_mine(2)", "set_date(1, \"summer\", 3)"] {
            let c = SimCommand::parse(src).unwrap();
            assert_eq!(SimCommand::parse(&c.to_string()).unwrap(), c);
        }
    }
}
