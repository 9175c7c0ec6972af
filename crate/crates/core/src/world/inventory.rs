//! Inventory helpers. Only the first `capacity` slots hold items; the rest
//! of the 36 stay empty until the backpack grows.

use super::state::{ItemStack, Player};
use crate::content::ContentPack;

pub fn make_stack(pack: &ContentPack, name: &str, quantity: u32, quality: u32) -> Option<ItemStack> {
    let def = pack.item(name)?;
    Some(ItemStack {
        name: name.to_string(),
        quantity,
        quality,
        category: def.category,
        attachment: None,
    })
}

pub fn count(player: &Player, name: &str) -> u32 {
    player
        .inventory
        .iter()
        .flatten()
        .filter(|s| s.name == name)
        .map(|s| s.quantity)
        .sum()
}

pub fn has_all(player: &Player, needs: &std::collections::BTreeMap<String, u32>) -> bool {
    needs.iter().all(|(k, v)| count(player, k) >= *v)
}

/// Whether `quantity` of `name` fits, merging into matching stacks first.
pub fn can_add(pack: &ContentPack, player: &Player, name: &str, quantity: u32, quality: u32) -> bool {
    let Some(def) = pack.item(name) else { return false };
    if def.stackable()
        && player.inventory[..player.capacity]
            .iter()
            .flatten()
            .any(|s| s.name == name && s.quality == quality)
    {
        return true;
    }
    let free = player.inventory[..player.capacity].iter().filter(|s| s.is_none()).count();
    if def.stackable() {
        free >= 1
    } else {
        free >= quantity as usize
    }
}

/// Adds items. Returns false, leaving the inventory alone, when they do not
/// fit or the item is unknown.
pub fn add(pack: &ContentPack, player: &mut Player, name: &str, quantity: u32, quality: u32) -> bool {
    if quantity == 0 {
        return true;
    }
    if !can_add(pack, player, name, quantity, quality) {
        return false;
    }
    let def = pack.item(name).unwrap();
    if def.stackable() {
        if let Some(s) = player.inventory[..player.capacity]
            .iter_mut()
            .flatten()
            .find(|s| s.name == name && s.quality == quality)
        {
            s.quantity += quantity;
            return true;
        }
        let slot = first_free(player).unwrap();
        player.inventory[slot] = make_stack(pack, name, quantity, quality);
    } else {
        for _ in 0..quantity {
            let slot = first_free(player).unwrap();
            player.inventory[slot] = make_stack(pack, name, 1, quality);
        }
    }
    true
}

pub fn first_free(player: &Player) -> Option<usize> {
    player.inventory[..player.capacity].iter().position(|s| s.is_none())
}

/// Removes `quantity` of `name` across stacks, lowest slot first. Caller
/// checks availability.
pub fn remove(player: &mut Player, name: &str, mut quantity: u32) -> bool {
    if count(player, name) < quantity {
        return false;
    }
    for slot in player.inventory.iter_mut() {
        if quantity == 0 {
            break;
        }
        if let Some(s) = slot {
            if s.name == name {
                let take = s.quantity.min(quantity);
                s.quantity -= take;
                quantity -= take;
                if s.quantity == 0 {
                    *slot = None;
                }
            }
        }
    }
    true
}

pub fn remove_from_slot(player: &mut Player, slot: usize, quantity: u32) -> Option<ItemStack> {
    let s = player.inventory.get_mut(slot)?.as_mut()?;
    if s.quantity < quantity {
        return None;
    }
    let mut taken = s.clone();
    taken.quantity = quantity;
    s.quantity -= quantity;
    if s.quantity == 0 {
        player.inventory[slot] = None;
    }
    Some(taken)
}

pub fn find_slot(player: &Player, name: &str) -> Option<usize> {
    player.inventory.iter().position(|s| s.as_ref().is_some_and(|s| s.name == name))
}
