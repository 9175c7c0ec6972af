//! Incremental task evaluation. Each step the world is projected to an
//! [`EvalObservation`]; the task's evaluator compares it with the previous
//! projection and adds the (never negative) change to the running total.

use crate::content::ContentPack;
use crate::world::grid::Feature;
use crate::world::state::{Ledger, QuestStatus, WorldState};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Per-map counts of tile states.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileTally {
    pub features: BTreeMap<String, i64>,
    pub tilled: i64,
    pub fertilized: i64,
    pub sown: i64,
    pub watered: i64,
    pub watered_crops: i64,
}

/// Everything an evaluator may look at, projected from world state.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalObservation {
    pub location: String,
    pub money: i64,
    pub inventory: BTreeMap<String, i64>,
    pub capacity: i64,
    pub house_level: i64,
    pub silo_hay: i64,
    pub kill_stats: BTreeMap<String, i64>,
    pub shipped: BTreeMap<String, i64>,
    pub friendships: BTreeMap<String, i64>,
    /// Summed friendship per animal kind.
    pub animal_friendship: BTreeMap<String, i64>,
    pub quests: BTreeMap<String, QuestStatus>,
    pub flags: BTreeSet<String>,
    pub buildings: BTreeMap<String, i64>,
    pub tiles: BTreeMap<String, TileTally>,
    pub ledger: Ledger,
}

fn counts<V: Copy + Into<i64>>(m: &BTreeMap<String, V>) -> BTreeMap<String, i64> {
    m.iter().map(|(k, v)| (k.clone(), (*v).into())).collect()
}

pub fn project(world: &WorldState, pack: &ContentPack) -> EvalObservation {
    let mut inventory = BTreeMap::new();
    for s in world.player.inventory.iter().flatten() {
        *inventory.entry(s.name.clone()).or_insert(0) += s.quantity as i64;
    }
    let mut animal_friendship = BTreeMap::new();
    for a in &world.animals {
        *animal_friendship.entry(a.kind.clone()).or_insert(0) += a.friendship as i64;
    }
    let mut buildings = BTreeMap::new();
    let mut tiles = BTreeMap::new();
    for (id, m) in &world.maps {
        for b in &m.buildings {
            *buildings.entry(b.kind.clone()).or_insert(0) += 1;
        }
        let mut t = TileTally::default();
        for (_, _, tile) in m.grid.iter() {
            if let Some(f) = &tile.feature {
                *t.features.entry(f.tally_name().to_string()).or_insert(0) += 1;
                if f.is_debris() {
                    *t.features.entry("Debris".into()).or_insert(0) += 1;
                }
                if let Feature::Node { item } = f {
                    if item != "Stone" {
                        *t.features.entry(item.clone()).or_insert(0) += 1;
                    }
                }
            }
            if let Some(s) = &tile.soil {
                t.tilled += 1;
                t.fertilized += s.fertilizer.is_some() as i64;
                t.sown += s.crop.is_some() as i64;
                t.watered += s.watered as i64;
                t.watered_crops += (s.watered && s.crop.is_some()) as i64;
            }
        }
        tiles.insert(id.clone(), t);
    }
    let _ = pack;
    EvalObservation {
        location: world.player.map.clone(),
        money: world.player.money,
        inventory,
        capacity: world.player.capacity as i64,
        house_level: world.player.house_level as i64,
        silo_hay: world.silo_hay as i64,
        kill_stats: counts(&world.kill_stats),
        shipped: counts(&world.shipped),
        friendships: counts(&world.player.friendships),
        animal_friendship,
        quests: world.quests.iter().map(|q| (q.id.clone(), q.status)).collect(),
        flags: world.progression.flags.union(&world.progression.projects).cloned().collect(),
        buildings,
        tiles,
        ledger: world.ledger.clone(),
    }
}

/// Named components of a projection; most rules use a single component.
pub type Components = BTreeMap<String, i64>;

/// Maps an observation and the task object to the quantities a rule diffs.
pub type Projection = fn(&EvalObservation, &str) -> Components;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diff {
    /// Sum of per-component growth. Missing components count as 0.
    Increase,
    /// Sum of per-component shrinkage, over components present both times.
    Decrease,
    /// 1 when a component goes from 0 to nonzero.
    Arrival,
}

#[derive(Clone, Copy, Debug)]
pub struct EvaluatorDef {
    pub key: &'static str,
    pub projection: Projection,
    pub diff: Diff,
    pub rule: &'static str,
}

fn one(v: i64) -> Components {
    BTreeMap::from([(String::new(), v)])
}

fn get(m: &BTreeMap<String, i64>, k: &str) -> i64 {
    m.get(k).copied().unwrap_or(0)
}

fn ledger_get(m: &BTreeMap<String, u32>, k: &str) -> i64 {
    m.get(k).copied().unwrap_or(0) as i64
}

/// Sum over every key when the object names a whole class (e.g. "Animal").
fn ledger_get_or_all(m: &BTreeMap<String, u32>, k: &str, all: &str) -> i64 {
    if k == all {
        m.values().map(|v| *v as i64).sum()
    } else {
        ledger_get(m, k)
    }
}

fn per_map(o: &EvalObservation, f: impl Fn(&TileTally) -> i64) -> Components {
    o.tiles.iter().map(|(k, t)| (k.clone(), f(t))).collect()
}

fn p_clear(o: &EvalObservation, obj: &str) -> Components {
    per_map(o, |t| get(&t.features, obj))
}
fn p_till(o: &EvalObservation, _: &str) -> Components {
    per_map(o, |t| t.tilled)
}
fn p_fertilize(o: &EvalObservation, _: &str) -> Components {
    per_map(o, |t| t.fertilized)
}
fn p_sow(o: &EvalObservation, _: &str) -> Components {
    per_map(o, |t| t.sown)
}
fn p_water(o: &EvalObservation, obj: &str) -> Components {
    if obj == "Crop" {
        per_map(o, |t| t.watered_crops)
    } else {
        per_map(o, |t| t.watered)
    }
}
fn p_harvest(o: &EvalObservation, obj: &str) -> Components {
    one(ledger_get(&o.ledger.gathered, obj))
}
fn p_craft(o: &EvalObservation, obj: &str) -> Components {
    one(ledger_get(&o.ledger.crafted, obj))
}
fn p_kill(o: &EvalObservation, obj: &str) -> Components {
    one(get(&o.kill_stats, obj))
}
fn p_location(o: &EvalObservation, obj: &str) -> Components {
    one((o.location == obj) as i64)
}
fn p_sell(o: &EvalObservation, obj: &str) -> Components {
    one(get(&o.shipped, obj) + ledger_get(&o.ledger.sold, obj))
}
fn p_purchase(o: &EvalObservation, obj: &str) -> Components {
    one(ledger_get(&o.ledger.purchased, obj))
}
fn p_purchase_animal(o: &EvalObservation, obj: &str) -> Components {
    one(ledger_get(&o.ledger.animals_purchased, obj))
}
fn p_sell_animal(o: &EvalObservation, obj: &str) -> Components {
    one(ledger_get(&o.ledger.animals_sold, obj))
}
fn p_build(o: &EvalObservation, obj: &str) -> Components {
    one(ledger_get(&o.ledger.built, obj))
}
fn p_move(o: &EvalObservation, obj: &str) -> Components {
    one(ledger_get(&o.ledger.moved, obj))
}
fn p_demolish(o: &EvalObservation, obj: &str) -> Components {
    one(ledger_get(&o.ledger.demolished, obj))
}
fn p_upgrade_tool(o: &EvalObservation, obj: &str) -> Components {
    one(ledger_get(&o.ledger.tools_upgraded, obj))
}
fn p_upgrade_farmhouse(o: &EvalObservation, _: &str) -> Components {
    one(o.house_level)
}
fn p_gift(o: &EvalObservation, obj: &str) -> Components {
    one(ledger_get(&o.ledger.gifted, obj))
}
fn p_talk(o: &EvalObservation, obj: &str) -> Components {
    one(ledger_get(&o.ledger.talked, obj))
}
fn p_friendship(o: &EvalObservation, obj: &str) -> Components {
    one(get(&o.friendships, obj) + get(&o.animal_friendship, obj))
}
fn p_sleep(o: &EvalObservation, _: &str) -> Components {
    one(o.ledger.times_slept as i64)
}
fn p_reward(o: &EvalObservation, _: &str) -> Components {
    one(o.ledger.rewards_claimed as i64)
}
fn p_quit(o: &EvalObservation, _: &str) -> Components {
    one(o.ledger.quests_quit as i64)
}
fn p_complete_help(o: &EvalObservation, _: &str) -> Components {
    one(o.ledger.help_completed as i64)
}
fn p_complete_story(o: &EvalObservation, obj: &str) -> Components {
    let done = matches!(o.quests.get(obj), Some(QuestStatus::Completed | QuestStatus::Claimed));
    one(done as i64)
}
fn p_silo(o: &EvalObservation, _: &str) -> Components {
    one(o.silo_hay)
}
fn p_jojamart(o: &EvalObservation, obj: &str) -> Components {
    one(o.flags.contains(obj) as i64)
}
fn p_backpack(o: &EvalObservation, _: &str) -> Components {
    one(o.ledger.backpack_upgrades as i64)
}
fn p_break(o: &EvalObservation, _: &str) -> Components {
    one(o.ledger.geodes_processed as i64)
}
fn p_incubate(o: &EvalObservation, obj: &str) -> Components {
    one(ledger_get(&o.ledger.hatched, obj))
}
fn p_open(o: &EvalObservation, obj: &str) -> Components {
    one(ledger_get(&o.ledger.doors_opened, obj))
}
fn p_fill(o: &EvalObservation, obj: &str) -> Components {
    one(ledger_get(&o.ledger.filled, obj))
}
fn p_pet(o: &EvalObservation, obj: &str) -> Components {
    one(ledger_get_or_all(&o.ledger.pets, obj, "Animal"))
}

const fn def(key: &'static str, projection: Projection, diff: Diff, rule: &'static str) -> EvaluatorDef {
    EvaluatorDef {
        key,
        projection,
        diff,
        rule,
    }
}

use Diff::{Arrival, Decrease, Increase};

/// Built-in evaluator types.
pub const BUILTIN: &[EvaluatorDef] = &[
    def("clear", p_clear, Decrease, "per-map count of features named by the object drops"),
    def("till", p_till, Increase, "per-map count of tilled tiles rises"),
    def("fertilize", p_fertilize, Increase, "per-map count of fertilized tiles rises"),
    def("sow", p_sow, Increase, "per-map count of tiles holding a crop rises"),
    def(
        "water",
        p_water,
        Increase,
        "per-map count of watered tiles (with a crop when the object is Crop) rises",
    ),
    def("harvest", p_harvest, Increase, "cumulative gathered count of the object"),
    def("craft", p_craft, Increase, "cumulative crafted count of the object"),
    def("kill", p_kill, Increase, "kill_stats of the object"),
    def("location", p_location, Arrival, "player arrives on the map named by the object"),
    def("sell", p_sell, Increase, "shipped plus sold count of the object"),
    def("purchase", p_purchase, Increase, "cumulative purchased count of the object"),
    def("purchase_animal", p_purchase_animal, Increase, "animals of the object kind bought"),
    def("sell_animal", p_sell_animal, Increase, "animals of the object kind sold"),
    def("build", p_build, Increase, "buildings of the object kind built from a blueprint"),
    def("move", p_move, Increase, "buildings of the object kind moved"),
    def("demolish", p_demolish, Increase, "buildings of the object kind demolished"),
    def(
        "upgrade_tool",
        p_upgrade_tool,
        Increase,
        "upgraded tool named by the object collected",
    ),
    def("upgrade_farmhouse", p_upgrade_farmhouse, Increase, "farmhouse level rises"),
    def("gift", p_gift, Increase, "gifts given to the object NPC"),
    def("talk", p_talk, Increase, "conversations started with the object NPC"),
    def(
        "friendship",
        p_friendship,
        Increase,
        "friendship points with the object NPC or animal kind",
    ),
    def("sleep", p_sleep, Increase, "nights slept in bed"),
    def("reward", p_reward, Increase, "quest rewards claimed"),
    def("quit", p_quit, Increase, "quests abandoned"),
    def("complete_help", p_complete_help, Increase, "help-wanted quests completed"),
    def(
        "complete_story",
        p_complete_story,
        Arrival,
        "the quest with the object id becomes complete",
    ),
    def("silo", p_silo, Increase, "hay stored in silos"),
    def(
        "jojamart",
        p_jojamart,
        Arrival,
        "membership or project flag named by the object is set",
    ),
    def("backpack", p_backpack, Increase, "backpack upgrades bought"),
    def("break", p_break, Increase, "geodes opened"),
    def("incubate", p_incubate, Increase, "animals of the object kind hatched"),
    def("open", p_open, Increase, "animal doors of the object building opened"),
    def("fill", p_fill, Increase, "times the object container was filled"),
    def("pet", p_pet, Increase, "animals petted (all kinds when the object is Animal)"),
];

#[derive(Clone, Debug)]
pub struct Registry {
    defs: BTreeMap<String, EvaluatorDef>,
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Registry { defs: BTreeMap::new() };
        for d in BUILTIN {
            r.register(*d);
        }
        r
    }
}

impl Registry {
    pub fn register(&mut self, d: EvaluatorDef) {
        self.defs.insert(d.key.to_string(), d);
    }

    pub fn get(&self, key: &str) -> Option<&EvaluatorDef> {
        self.defs.get(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.defs.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.defs.keys().map(|k| k.as_str())
    }

    pub fn builtin() -> &'static Registry {
        static R: std::sync::OnceLock<Registry> = std::sync::OnceLock::new();
        R.get_or_init(Registry::default)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown evaluator {0:?}")]
pub struct UnknownEvaluator(pub String);

fn apply_diff(diff: Diff, now: &Components, last: &Components) -> i64 {
    match diff {
        Diff::Increase => {
            let keys: BTreeSet<&String> = now.keys().chain(last.keys()).collect();
            keys.into_iter().map(|k| (get(now, k) - get(last, k)).max(0)).sum()
        }
        Diff::Decrease => now.iter().filter_map(|(k, v)| last.get(k).map(|l| (l - v).max(0))).sum(),
        Diff::Arrival => now.iter().filter(|(k, v)| **v != 0 && get(last, k) == 0).count() as i64,
    }
}

/// Progress made between two observations under one evaluator type.
pub fn compare_with(
    reg: &Registry,
    evaluator: &str,
    object: &str,
    obs: &EvalObservation,
    last: &EvalObservation,
) -> Result<u32, UnknownEvaluator> {
    let d = reg.get(evaluator).ok_or_else(|| UnknownEvaluator(evaluator.to_string()))?;
    let now = (d.projection)(obs, object);
    let before = (d.projection)(last, object);
    Ok(apply_diff(d.diff, &now, &before).clamp(0, u32::MAX as i64) as u32)
}

pub fn compare(evaluator: &str, object: &str, obs: &EvalObservation, last: &EvalObservation) -> Result<u32, UnknownEvaluator> {
    compare_with(Registry::builtin(), evaluator, object, obs, last)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub evaluator: String,
    pub object: String,
    pub quantity: u32,
    pub max_steps: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalResult {
    pub completed: bool,
    pub current_quantity: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalState {
    pub config: EvalConfig,
    pub last_obs: Option<EvalObservation>,
    pub current_quantity: u32,
    pub completed: bool,
    pub steps_used: u32,
}

impl EvalState {
    pub fn new(config: EvalConfig) -> Result<EvalState, UnknownEvaluator> {
        if !Registry::builtin().contains(&config.evaluator) {
            return Err(UnknownEvaluator(config.evaluator));
        }
        Ok(EvalState {
            config,
            last_obs: None,
            current_quantity: 0,
            completed: false,
            steps_used: 0,
        })
    }

    /// Adds the change since the previous call. The first call only records
    /// the observation.
    pub fn evaluate(&mut self, obs: EvalObservation) -> EvalResult {
        let Some(last) = self.last_obs.take() else {
            self.last_obs = Some(obs);
            return EvalResult {
                completed: false,
                current_quantity: 0,
            };
        };
        let change = compare(&self.config.evaluator, &self.config.object, &obs, &last).unwrap_or(0);
        self.current_quantity = self.current_quantity.saturating_add(change);
        self.last_obs = Some(obs);
        if self.current_quantity >= self.config.quantity {
            self.completed = true;
        }
        self.result()
    }

    pub fn result(&self) -> EvalResult {
        EvalResult {
            completed: self.completed,
            current_quantity: self.current_quantity,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(evaluator: &str, object: &str, quantity: u32) -> EvalConfig {
        EvalConfig {
            evaluator: evaluator.into(),
            object: object.into(),
            quantity,
            max_steps: 30,
        }
    }

    fn weeds(n: i64) -> EvalObservation {
        let mut o = EvalObservation::default();
        let mut t = TileTally::default();
        t.features.insert("Weeds".into(), n);
        o.tiles.insert("Farm".into(), t);
        o
    }

    #[test]
    fn first_call_returns_nothing() {
        let mut s = EvalState::new(cfg("clear", "Weeds", 10)).unwrap();
        assert_eq!(s.evaluate(weeds(12)), EvalResult::default());
    }

    #[test]
    fn weed_tally_drop_counts() {
        let mut s = EvalState::new(cfg("clear", "Weeds", 10)).unwrap();
        s.evaluate(weeds(12));
        let r = s.evaluate(weeds(9));
        assert_eq!(r.current_quantity, 3);
        // regress does not subtract
        assert_eq!(s.evaluate(weeds(11)).current_quantity, 3);
    }

    #[test]
    fn location_fires_on_arrival_only() {
        let farm = EvalObservation {
            location: "Farm".into(),
            ..Default::default()
        };
        let bus = EvalObservation {
            location: "BusStop".into(),
            ..Default::default()
        };
        assert_eq!(compare("location", "BusStop", &bus, &farm).unwrap(), 1);
        assert_eq!(compare("location", "BusStop", &bus, &bus).unwrap(), 0);
    }

    #[test]
    fn friendship_and_kill_deltas() {
        let mut a = EvalObservation::default();
        let mut b = EvalObservation::default();
        a.friendships.insert("Elliott".into(), 40);
        b.friendships.insert("Elliott".into(), 100);
        assert_eq!(compare("friendship", "Elliott", &b, &a).unwrap(), 60);
        a.kill_stats.insert("Grub".into(), 2);
        b.kill_stats.insert("Grub".into(), 5);
        assert_eq!(compare("kill", "Grub", &b, &a).unwrap(), 3);
    }

    #[test]
    fn quantity_one_completes() {
        let mut s = EvalState::new(cfg("kill", "Bug", 1)).unwrap();
        let mut o = EvalObservation::default();
        s.evaluate(o.clone());
        o.kill_stats.insert("Bug".into(), 1);
        assert_eq!(
            s.evaluate(o.clone()),
            EvalResult {
                completed: true,
                current_quantity: 1
            }
        );
        o.kill_stats.clear();
        assert!(s.evaluate(o).completed);
    }

    #[test]
    fn unknown_evaluator_is_rejected() {
        assert!(EvalState::new(cfg("teleport", "x", 1)).is_err());
    }
}
