//! Monster behaviour, one beat per in-game minute. Only monsters on the
//! player's map act.

use super::path;
use crate::content::ContentPack;
use crate::world::events::Event;
use crate::world::state::{Direction, Monster, Species, WorldState};
use rand::Rng;

pub const ATTACK_COOLDOWN: u32 = 10;
pub const DUGGY_BURROW_BEATS: u32 = 8;
pub const DUGGY_SURFACE_BEATS: u32 = 12;

pub fn manhattan(a: (i32, i32), b: (i32, i32)) -> i32 {
    (a.0 - b.0).abs() + (a.1 - b.1).abs()
}

/// Whether a monster can be damaged right now.
pub fn vulnerable(m: &Monster) -> bool {
    !m.burrowed && !m.shelled
}

fn monster_open(world: &WorldState, pack: &ContentPack, map: &str, x: i32, y: i32) -> bool {
    path::is_open(world, pack, map, x, y, true)
}

fn random_step(world: &mut WorldState, pack: &ContentPack, i: usize) -> Option<(i32, i32)> {
    let m = &world.monsters[i];
    let here = (m.x, m.y);
    let choices: Vec<(i32, i32)> = Direction::ALL
        .iter()
        .map(|d| d.step(here))
        .filter(|&(x, y)| monster_open(world, pack, &m.map, x, y))
        .collect();
    if choices.is_empty() {
        return None;
    }
    let k = world.rng.gen_range(0..choices.len());
    Some(choices[k])
}

fn chase_step(world: &WorldState, pack: &ContentPack, i: usize) -> Option<(i32, i32)> {
    let m = &world.monsters[i];
    let target = world.player.pos();
    let map = &world.maps[&m.map];
    let p = path::bfs(map.grid.width(), map.grid.height(), (m.x, m.y), target, |x, y| {
        (x, y) == target || monster_open(world, pack, &m.map, x, y)
    })?;
    p.first().copied().filter(|&s| s != target)
}

/// Diagonal mover: bounces off walls one axis at a time and reverses fully
/// when cornered.
fn bounce_step(world: &mut WorldState, pack: &ContentPack, i: usize) -> Option<(i32, i32)> {
    let m = &world.monsters[i];
    let (x, y) = (m.x, m.y);
    let (mut hx, mut hy) = m.heading;
    let map = m.map.clone();
    if !monster_open(world, pack, &map, x + hx, y) {
        hx = -hx;
    }
    if !monster_open(world, pack, &map, x, y + hy) {
        hy = -hy;
    }
    let mut next = None;
    if monster_open(world, pack, &map, x + hx, y + hy) {
        next = Some((x + hx, y + hy));
    } else if monster_open(world, pack, &map, x - hx, y - hy) {
        hx = -hx;
        hy = -hy;
        next = Some((x + hx, y + hy));
    }
    world.monsters[i].heading = (hx, hy);
    next
}

fn duggy_surface_tile(world: &WorldState, pack: &ContentPack, map: &str) -> Option<(i32, i32)> {
    let m = &world.maps[map];
    Direction::ALL
        .iter()
        .map(|d| d.step(world.player.pos()))
        .find(|&(x, y)| m.grid.get(x, y).is_some_and(|t| t.terrain.diggable()) && monster_open(world, pack, map, x, y))
}

/// One minute of monster activity on the player's map.
pub fn beat(world: &mut WorldState, pack: &ContentPack, events: &mut Vec<Event>) {
    let here = world.player.map.clone();
    for i in 0..world.monsters.len() {
        if world.monsters[i].map != here || world.player.health <= 0 {
            continue;
        }
        let def = &pack.monsters[&world.monsters[i].name];
        {
            let m = &mut world.monsters[i];
            m.cooldown = m.cooldown.saturating_sub(1);
            m.phase += 1;
        }
        match world.monsters[i].species {
            Species::RockCrab => {
                let m = &mut world.monsters[i];
                let limit = if m.shelled { def.shell_minutes } else { def.walk_minutes };
                if limit > 0 && m.phase >= limit {
                    m.shelled = !m.shelled;
                    m.phase = 0;
                }
            }
            Species::Duggy => {
                let m = &world.monsters[i];
                if m.burrowed && m.phase >= DUGGY_BURROW_BEATS {
                    if let Some((x, y)) = duggy_surface_tile(world, pack, &here) {
                        let m = &mut world.monsters[i];
                        (m.x, m.y) = (x, y);
                        m.burrowed = false;
                        m.phase = 0;
                    }
                } else if !m.burrowed && m.phase >= DUGGY_SURFACE_BEATS {
                    let m = &mut world.monsters[i];
                    m.burrowed = true;
                    m.phase = 0;
                }
            }
            _ => {}
        }

        // Contact attack.
        let m = &world.monsters[i];
        let adjacent = manhattan((m.x, m.y), world.player.pos()) == 1;
        if adjacent && m.cooldown == 0 && vulnerable(m) && def.damage > 0 {
            world.player.health -= def.damage;
            events.push(Event::PlayerDamaged {
                by: m.name.clone(),
                amount: def.damage,
            });
            world.monsters[i].cooldown = ATTACK_COOLDOWN;
        }

        // Movement.
        let m = &world.monsters[i];
        if m.species == Species::Duggy || m.shelled {
            continue;
        }
        world.monsters[i].acc += def.speed;
        while world.monsters[i].acc >= 10 {
            world.monsters[i].acc -= 10;
            let m = &world.monsters[i];
            let dist = manhattan((m.x, m.y), world.player.pos());
            let aggro = def.aggro_radius > 0 && dist <= def.aggro_radius;
            let next = match m.species {
                Species::Bug => bounce_step(world, pack, i),
                _ if dist == 1 => None,
                Species::GreenSlime => {
                    if !aggro || world.rng.gen_range(0..5) == 0 {
                        random_step(world, pack, i)
                    } else {
                        chase_step(world, pack, i)
                    }
                }
                Species::Fly => {
                    if !aggro || world.rng.gen_bool(0.5) {
                        random_step(world, pack, i)
                    } else {
                        chase_step(world, pack, i)
                    }
                }
                _ => {
                    if aggro {
                        chase_step(world, pack, i)
                    } else {
                        random_step(world, pack, i)
                    }
                }
            };
            if let Some((x, y)) = next {
                let m = &mut world.monsters[i];
                (m.x, m.y) = (x, y);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manhattan_distance() {
        assert_eq!(manhattan((0, 0), (3, -4)), 7);
    }
}
