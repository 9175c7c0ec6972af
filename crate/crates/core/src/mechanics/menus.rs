//! Menus: what each one lists and what choosing an option does.
//!
//! In a shop, `direction="in"` buys the listed stock entry at
//! `option_index`; `direction="out"` sells from inventory slot
//! `option_index`. The shipping bin lists one option per shippable slot.

use super::action::{Flow, MenuOp};
use super::execute::{do_craft, done, fail, Outcome};
use crate::content::{ContentPack, StockEntry};
use crate::world::commands;
use crate::world::day::{end_of_day, spawn_in_home};
use crate::world::events::Event;
use crate::world::inventory;
use crate::world::state::*;
use rand::Rng;
use std::collections::BTreeMap;

fn sellable(pack: &ContentPack, s: &ItemStack) -> bool {
    !matches!(s.category, Category::Tool | Category::Weapon) && pack.item(&s.name).is_some_and(|d| d.price > 0)
}

fn set_menu(w: &mut WorldState, kind: MenuKind, message: String, options: Vec<MenuOption>, shop: Option<String>) {
    w.menu = MenuState {
        kind,
        message,
        options,
        shop,
    };
}

pub(crate) fn open_shipping(w: &mut WorldState) {
    let options = w
        .player
        .inventory
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            let s = s.as_ref()?;
            (!matches!(s.category, Category::Tool | Category::Weapon)).then(|| MenuOption {
                label: format!("{} x{}", s.name, s.quantity),
                payload: OptionPayload::Slot { index: i },
            })
        })
        .collect();
    set_menu(w, MenuKind::Shipping, "Shipping Bin".into(), options, None);
}

pub(crate) fn open_shop(w: &mut WorldState, pack: &ContentPack, shop: &str) {
    let options = pack.shops[shop]
        .stock
        .iter()
        .enumerate()
        .map(|(i, e)| MenuOption {
            label: e.label(),
            payload: OptionPayload::Stock { index: i },
        })
        .collect();
    set_menu(w, MenuKind::Shop, format!("{shop}'s shop"), options, Some(shop.to_string()));
}

fn open_building_menu(w: &mut WorldState, service: &str) {
    let mut options = Vec::new();
    if let Some(farm) = w.maps.get("Farm") {
        for b in &farm.buildings {
            if b.kind == "FarmHouse" {
                continue;
            }
            let payload = if service == "move" {
                OptionPayload::MoveBuilding { id: b.id }
            } else {
                OptionPayload::DemolishBuilding { id: b.id }
            };
            options.push(MenuOption {
                label: format!("{} at ({}, {})", b.kind, b.x, b.y),
                payload,
            });
        }
    }
    set_menu(w, MenuKind::Building, format!("Choose a building to {service}"), options, None);
}

fn open_menu(w: &mut WorldState, kind: MenuKind) -> Result<(), String> {
    let options: Vec<MenuOption> = match kind {
        MenuKind::Map => w
            .maps
            .keys()
            .map(|k| MenuOption {
                label: k.clone(),
                payload: OptionPayload::Location { name: k.clone() },
            })
            .collect(),
        MenuKind::QuestLog => w
            .quests
            .iter()
            .filter(|q| matches!(q.status, QuestStatus::Active | QuestStatus::Completed))
            .map(|q| MenuOption {
                label: match q.status {
                    QuestStatus::Completed => format!("{} (reward ready)", q.name),
                    _ => q.name.clone(),
                },
                payload: OptionPayload::Quest { id: q.id.clone() },
            })
            .collect(),
        MenuKind::Crafting => w
            .player
            .recipes_known
            .iter()
            .map(|r| MenuOption {
                label: r.clone(),
                payload: OptionPayload::Recipe { name: r.clone() },
            })
            .collect(),
        MenuKind::Animals => w
            .animals
            .iter()
            .map(|a| MenuOption {
                label: format!("{} the {}", a.name, a.kind),
                payload: OptionPayload::Animal { id: a.id },
            })
            .collect(),
        other => return Err(format!("the {} menu cannot be opened directly", other.name())),
    };
    let title = match kind {
        MenuKind::Map => "Map",
        MenuKind::QuestLog => "Journal",
        MenuKind::Crafting => "Crafting",
        _ => "Animals",
    };
    set_menu(w, kind, title.into(), options, None);
    Ok(())
}

pub(crate) fn menu(w: &mut WorldState, _pack: &ContentPack, op: MenuOp, kind: MenuKind) -> Outcome {
    match op {
        MenuOp::Open => {
            if let Err(e) = open_menu(w, kind) {
                return fail(e, 0);
            }
            done(
                format!("opened {}", kind.name()),
                0,
                vec![Event::MenuOpened { kind: kind.name().into() }],
            )
        }
        MenuOp::Close => {
            if w.menu.kind != kind {
                return fail(format!("the {} menu is not open", kind.name()), 0);
            }
            w.menu = MenuState::none();
            done(format!("closed {}", kind.name()), 0, vec![Event::MenuClosed])
        }
    }
}

pub(crate) fn choose_option(w: &mut WorldState, pack: &ContentPack, index: usize, quantity: Option<u32>, dir: Option<Flow>) -> Outcome {
    let qty = quantity.unwrap_or(1);
    match w.menu.kind {
        MenuKind::None => fail("no menu is open", 0),
        MenuKind::Shop if dir == Some(Flow::Out) => sell(w, pack, index, qty),
        MenuKind::Shop => {
            let shop = w.menu.shop.clone().unwrap_or_default();
            let Some(entry) = pack.shops.get(&shop).and_then(|s| s.stock.get(index)).cloned() else {
                return fail(format!("no option {index}"), 0);
            };
            buy(w, pack, &shop, &entry, qty)
        }
        _ => {
            let Some(opt) = w.menu.options.get(index).cloned() else {
                return fail(format!("no option {index}"), 0);
            };
            choose_payload(w, pack, opt, qty, dir)
        }
    }
}

fn choose_payload(w: &mut WorldState, pack: &ContentPack, opt: MenuOption, qty: u32, dir: Option<Flow>) -> Outcome {
    match (w.menu.kind, opt.payload) {
        (_, OptionPayload::Close) => {
            w.menu = MenuState::none();
            done("closed", 0, vec![Event::MenuClosed])
        }
        (_, OptionPayload::Sleep) => {
            w.menu = MenuState::none();
            let events = end_of_day(w, pack, true);
            done(
                format!("slept until {} {}", w.clock.season.name(), w.clock.day_of_season),
                0,
                events,
            )
        }
        (MenuKind::Shipping, OptionPayload::Slot { index }) => ship(w, pack, index, qty, dir),
        (MenuKind::Building, OptionPayload::MoveBuilding { id }) => move_building(w, pack, id),
        (MenuKind::Building, OptionPayload::DemolishBuilding { id }) => match commands::demolish_building(w, id) {
            Ok(kind) => {
                *w.ledger.demolished.entry(kind.clone()).or_default() += 1;
                w.menu = MenuState::none();
                done(
                    format!("demolished the {kind}"),
                    0,
                    vec![Event::BuildingChanged {
                        kind,
                        change: "demolished".into(),
                    }],
                )
            }
            Err(e) => fail(e.to_string(), 0),
        },
        (MenuKind::Animals, OptionPayload::Animal { id }) => {
            if dir != Some(Flow::Out) {
                return fail("choose an animal with direction=\"out\" to sell it", 0);
            }
            let i = w.animals.iter().position(|a| a.id == id).unwrap();
            let a = w.animals.remove(i);
            let price = (pack.animals[&a.kind].price as f64 * pack.constants.animal_sell_factor).round() as i64;
            w.player.money += price;
            *w.ledger.animals_sold.entry(a.kind.clone()).or_default() += 1;
            w.menu.options.retain(|o| o.payload != OptionPayload::Animal { id });
            done(format!("sold {} for {price}g", a.name), 0, vec![])
        }
        (MenuKind::QuestLog, OptionPayload::Quest { id }) => quest_option(w, &id, dir),
        (MenuKind::Crafting, OptionPayload::Recipe { name }) => do_craft(w, pack, &name),
        (MenuKind::Map, _) => fail("the map is read-only", 0),
        (MenuKind::Dialogue, _) => fail("nothing to choose", 0),
        (kind, p) => fail(format!("cannot choose {p:?} in the {} menu", kind.name()), 0),
    }
}

fn ship(w: &mut WorldState, pack: &ContentPack, slot: usize, qty: u32, dir: Option<Flow>) -> Outcome {
    if dir == Some(Flow::In) {
        return fail("the shipping bin only takes items out of the inventory", 0);
    }
    let Some(stack) = w.player.inventory.get(slot).cloned().flatten() else {
        return fail(format!("slot {slot} is empty"), 0);
    };
    if qty > stack.quantity {
        return fail(format!("only {} {} in slot {slot}", stack.quantity, stack.name), 0);
    }
    let price = pack.item(&stack.name).map(|d| d.price).unwrap_or(0);
    let value = (price as f64 * pack.quality_multiplier(stack.quality)).round() as i64 * qty as i64;
    inventory::remove_from_slot(&mut w.player, slot, qty);
    *w.shipped.entry(stack.name.clone()).or_default() += qty;
    w.pending_payout += value;
    open_shipping(w);
    done(
        format!("shipped {qty} {}", stack.name),
        0,
        vec![Event::ItemShipped {
            item: stack.name,
            count: qty,
        }],
    )
}

fn sell(w: &mut WorldState, pack: &ContentPack, slot: usize, qty: u32) -> Outcome {
    let Some(stack) = w.player.inventory.get(slot).cloned().flatten() else {
        return fail(format!("slot {slot} is empty"), 0);
    };
    if !sellable(pack, &stack) {
        return fail(format!("{} cannot be sold", stack.name), 0);
    }
    if qty > stack.quantity {
        return fail(format!("only {} {} in slot {slot}", stack.quantity, stack.name), 0);
    }
    let price = pack.item(&stack.name).unwrap().price;
    let money = (price as f64 * pack.quality_multiplier(stack.quality)).round() as i64 * qty as i64;
    inventory::remove_from_slot(&mut w.player, slot, qty);
    w.player.money += money;
    *w.ledger.sold.entry(stack.name.clone()).or_default() += qty;
    done(
        format!("sold {qty} {} for {money}g", stack.name),
        0,
        vec![Event::ItemSold {
            item: stack.name,
            count: qty,
            money,
        }],
    )
}

fn pay(w: &mut WorldState, money: i64, materials: &BTreeMap<String, u32>) -> Result<(), String> {
    if w.player.money < money {
        return Err(format!("not enough money: need {money}g, have {}g", w.player.money));
    }
    if !inventory::has_all(&w.player, materials) {
        let need: Vec<String> = materials.iter().map(|(k, v)| format!("{v} {k}")).collect();
        return Err(format!("missing materials: need {}", need.join(", ")));
    }
    w.player.money -= money;
    for (k, v) in materials {
        inventory::remove(&mut w.player, k, *v);
    }
    Ok(())
}

fn buy(w: &mut WorldState, pack: &ContentPack, shop: &str, entry: &StockEntry, qty: u32) -> Outcome {
    let none = BTreeMap::new();
    match entry {
        StockEntry::Item { item, price } => {
            let cost = price * qty as i64;
            if !inventory::can_add(pack, &w.player, item, qty, 0) {
                return fail("inventory full", 0);
            }
            if let Err(e) = pay(w, cost, &none) {
                return fail(e, 0);
            }
            inventory::add(pack, &mut w.player, item, qty, 0);
            *w.ledger.purchased.entry(item.clone()).or_default() += qty;
            done(
                format!("bought {qty} {item} for {cost}g"),
                0,
                vec![Event::ItemPurchased {
                    item: item.clone(),
                    count: qty,
                    money: cost,
                }],
            )
        }
        StockEntry::Backpack { backpack, capacity, price } => {
            if w.player.capacity >= *capacity {
                return fail("the backpack is already that large", 0);
            }
            if let Err(e) = pay(w, *price, &none) {
                return fail(e, 0);
            }
            w.player.capacity = *capacity;
            w.ledger.backpack_upgrades += 1;
            done(format!("bought the {backpack}: {capacity} slots"), 0, vec![])
        }
        StockEntry::ToolUpgrade {
            tool_upgrade,
            from,
            price,
            materials,
        } => {
            if w.pending_upgrade.is_some() {
                return fail("a tool is already being upgraded", 0);
            }
            if inventory::count(&w.player, from) == 0 {
                return fail(format!("bring a {from} to upgrade"), 0);
            }
            if let Err(e) = pay(w, *price, materials) {
                return fail(e, 0);
            }
            inventory::remove(&mut w.player, from, 1);
            w.pending_upgrade = Some(PendingUpgrade {
                tool: tool_upgrade.clone(),
                shop: shop.to_string(),
                ready_day: w.clock.day_index() + pack.constants.tool_upgrade_days,
            });
            done(
                format!("the {tool_upgrade} will be ready in {} days", pack.constants.tool_upgrade_days),
                0,
                vec![],
            )
        }
        StockEntry::GeodeService { geode_service, price } => {
            if inventory::count(&w.player, geode_service) < qty {
                return fail(format!("need {qty} {geode_service}"), 0);
            }
            if let Err(e) = pay(w, price * qty as i64, &none) {
                return fail(e, 0);
            }
            let mut found = Vec::new();
            for _ in 0..qty {
                inventory::remove(&mut w.player, geode_service, 1);
                let i = w.rng.gen_range(0..pack.geode_drops.len());
                let item = pack.geode_drops[i].clone();
                if !inventory::add(pack, &mut w.player, &item, 1, 0) {
                    return fail("inventory full", 0);
                }
                w.ledger.geodes_processed += 1;
                found.push(item);
            }
            done(format!("broke open {qty} {geode_service}: {}", found.join(", ")), 0, vec![])
        }
        StockEntry::Blueprint {
            blueprint,
            price,
            materials,
        } => {
            let def = &pack.buildings[blueprint];
            let Some(&(x, y)) = pack
                .building_sites
                .iter()
                .find(|(x, y)| commands::site_clear(w, pack, *x, *y, def.width, def.height, None, false))
            else {
                return fail(format!("no free site for a {blueprint}"), 0);
            };
            if let Err(e) = pay(w, *price, materials) {
                return fail(e, 0);
            }
            if let Err(e) = commands::build(w, pack, blueprint, false, x, y) {
                return fail(e.to_string(), 0);
            }
            *w.ledger.built.entry(blueprint.clone()).or_default() += 1;
            done(
                format!("built a {blueprint} at ({x}, {y})"),
                0,
                vec![Event::BuildingChanged {
                    kind: blueprint.clone(),
                    change: "built".into(),
                }],
            )
        }
        StockEntry::HouseUpgrade {
            house_upgrade,
            price,
            materials,
        } => {
            if w.player.house_level + 1 != *house_upgrade {
                return fail(format!("the farmhouse is level {}", w.player.house_level), 0);
            }
            if let Err(e) = pay(w, *price, materials) {
                return fail(e, 0);
            }
            commands::set_house_level(w, *house_upgrade);
            *w.ledger.built.entry("House Upgrade".into()).or_default() += 1;
            done(format!("the farmhouse is now level {house_upgrade}"), 0, vec![])
        }
        StockEntry::BuildingService { building_service } => {
            open_building_menu(w, building_service);
            done(
                format!("choose a building to {building_service}"),
                0,
                vec![Event::MenuOpened { kind: "building".into() }],
            )
        }
        StockEntry::Animal { animal, price } => {
            if w.player.money < *price {
                return fail(format!("not enough money: need {price}g"), 0);
            }
            let n = w.animals.iter().filter(|a| &a.kind == animal).count() + 1;
            if let Err(e) = spawn_in_home(w, pack, animal, &format!("{animal} {n}")) {
                return fail(e, 0);
            }
            w.player.money -= price;
            *w.ledger.animals_purchased.entry(animal.clone()).or_default() += 1;
            done(format!("bought a {animal}"), 0, vec![])
        }
        StockEntry::Membership { membership, price } => {
            if w.progression.flags.contains(membership) {
                return fail(format!("already a {membership} member"), 0);
            }
            if let Err(e) = pay(w, *price, &none) {
                return fail(e, 0);
            }
            w.progression.flags.insert(membership.clone());
            done(format!("bought {membership}"), 0, vec![])
        }
        StockEntry::Project { project, price, requires } => {
            if !w.progression.flags.contains(requires) {
                return fail(format!("requires {requires}"), 0);
            }
            if w.progression.projects.contains(project) {
                return fail(format!("{project} is already done"), 0);
            }
            if let Err(e) = pay(w, *price, &none) {
                return fail(e, 0);
            }
            w.progression.projects.insert(project.clone());
            w.progression.flags.insert(project.clone());
            done(format!("funded {project}"), 0, vec![])
        }
    }
}

fn move_building(w: &mut WorldState, pack: &ContentPack, id: u32) -> Outcome {
    let Some((_, b)) = w.building_by_id(id) else {
        return fail("no such building", 0);
    };
    let b = b.clone();
    let def = &pack.buildings[&b.kind];
    let site = pack
        .building_sites
        .iter()
        .copied()
        .filter(|&s| s != (b.x, b.y))
        .find(|&(x, y)| commands::site_clear(w, pack, x, y, def.width, def.height, Some(id), false));
    let Some((x, y)) = site else {
        return fail(format!("no free site to move the {} to", b.kind), 0);
    };
    if let Err(e) = commands::relocate_building(w, pack, id, x, y) {
        return fail(e.to_string(), 0);
    }
    *w.ledger.moved.entry(b.kind.clone()).or_default() += 1;
    w.menu = MenuState::none();
    done(
        format!("moved the {} to ({x}, {y})", b.kind),
        0,
        vec![Event::BuildingChanged {
            kind: b.kind,
            change: "moved".into(),
        }],
    )
}

fn quest_option(w: &mut WorldState, id: &str, dir: Option<Flow>) -> Outcome {
    let Some(qi) = w.quests.iter().position(|q| q.id == id) else {
        return fail("no such quest", 0);
    };
    let q = w.quests[qi].clone();
    match (dir, q.status) {
        (Some(Flow::Out), QuestStatus::Active) => {
            if !q.cancellable {
                return fail(format!("{} cannot be abandoned", q.name), 0);
            }
            w.quests[qi].status = QuestStatus::Quit;
            w.ledger.quests_quit += 1;
            open_menu(w, MenuKind::QuestLog).unwrap();
            done(
                format!("abandoned {}", q.name),
                0,
                vec![Event::QuestChanged {
                    id: q.id,
                    status: "quit".into(),
                }],
            )
        }
        (Some(Flow::Out), _) => fail(format!("{} is not active", q.name), 0),
        (_, QuestStatus::Completed) => {
            w.quests[qi].status = QuestStatus::Claimed;
            w.player.money += q.reward;
            w.ledger.rewards_claimed += 1;
            open_menu(w, MenuKind::QuestLog).unwrap();
            done(
                format!("claimed {}g for {}", q.reward, q.name),
                0,
                vec![Event::QuestChanged {
                    id: q.id,
                    status: "claimed".into(),
                }],
            )
        }
        _ => fail(format!("{} is not complete yet", q.name), 0),
    }
}
