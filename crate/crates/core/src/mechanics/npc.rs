//! NPC schedules. Each NPC jumps to the position of the latest schedule
//! entry whose start time has passed. A manual warp holds until the next
//! entry begins.

use super::path;
use crate::content::ContentPack;
use crate::world::state::{Direction, WorldState};

pub fn schedule_slot(pack: &ContentPack, name: &str, hhmm: u32) -> usize {
    let sched = &pack.npcs[name].schedule;
    sched.iter().rposition(|(t, ..)| *t <= hhmm).unwrap_or(0)
}

pub fn update_schedules(world: &mut WorldState, pack: &ContentPack) {
    let hhmm = world.clock.hhmm();
    for i in 0..world.npcs.len() {
        let name = world.npcs[i].name.clone();
        let slot = schedule_slot(pack, &name, hhmm);
        if world.npcs[i].slot == Some(slot) {
            continue;
        }
        let (_, map, x, y) = pack.npcs[&name].schedule[slot].clone();
        // Step aside if the player is standing on the spot.
        let mut pos = (x, y);
        if world.player.map == map && world.player.pos() == pos {
            if let Some(p) = Direction::ALL
                .iter()
                .map(|d| d.step((x, y)))
                .find(|&(nx, ny)| path::is_open(world, pack, &map, nx, ny, true))
            {
                pos = p;
            }
        }
        let n = &mut world.npcs[i];
        n.map = map;
        (n.x, n.y) = pos;
        n.facing = Direction::Down;
        n.slot = Some(slot);
    }
}
