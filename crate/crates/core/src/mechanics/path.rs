//! Walkability and shortest paths.

use crate::content::ContentPack;
use crate::world::state::{Direction, MapState, WorldState};
use std::collections::VecDeque;

/// Static blockers: terrain, features, objects, building footprints.
pub fn blocked_static(pack: &ContentPack, m: &MapState, x: i32, y: i32) -> bool {
    let Some(t) = m.grid.get(x, y) else { return true };
    if !t.terrain.passable() || t.feature.as_ref().is_some_and(|f| f.blocks()) {
        return true;
    }
    if m.object_at(x, y).is_some() {
        return true;
    }
    m.buildings.iter().any(|b| {
        let d = &pack.buildings[&b.kind];
        x >= b.x && x < b.x + d.width && y >= b.y && y < b.y + d.height
    })
}

/// Creatures standing on a tile. Burrowed monsters do not count.
pub fn occupant(world: &WorldState, map: &str, x: i32, y: i32, include_player: bool) -> bool {
    (include_player && world.player.map == map && world.player.pos() == (x, y))
        || world.npcs.iter().any(|n| n.map == map && (n.x, n.y) == (x, y))
        || world.animals.iter().any(|a| a.map == map && (a.x, a.y) == (x, y))
        || world
            .monsters
            .iter()
            .any(|mo| mo.map == map && (mo.x, mo.y) == (x, y) && !mo.burrowed)
}

pub fn is_open(world: &WorldState, pack: &ContentPack, map: &str, x: i32, y: i32, include_player: bool) -> bool {
    let Some(m) = world.maps.get(map) else { return false };
    !blocked_static(pack, m, x, y) && m.exit_at(x, y).is_none() && !occupant(world, map, x, y, include_player)
}

/// BFS over the player's map from `from` to `to`. Neighbours are tried up,
/// right, down, left, so ties resolve the same way every time. Returns the
/// steps taken, excluding the start.
pub fn bfs<F>(w: i32, h: i32, from: (i32, i32), to: (i32, i32), open: F) -> Option<Vec<(i32, i32)>>
where
    F: Fn(i32, i32) -> bool,
{
    if from == to {
        return Some(Vec::new());
    }
    if w <= 0 || h <= 0 {
        return None;
    }
    let idx = |x: i32, y: i32| (y * w + x) as usize;
    let mut prev: Vec<Option<(i32, i32)>> = vec![None; (w * h) as usize];
    let mut seen = vec![false; (w * h) as usize];
    let mut q = VecDeque::new();
    seen[idx(from.0, from.1)] = true;
    q.push_back(from);
    while let Some(cur) = q.pop_front() {
        for d in Direction::ALL {
            let (nx, ny) = d.step(cur);
            if nx < 0 || ny < 0 || nx >= w || ny >= h || seen[idx(nx, ny)] {
                continue;
            }
            if !open(nx, ny) {
                continue;
            }
            seen[idx(nx, ny)] = true;
            prev[idx(nx, ny)] = Some(cur);
            if (nx, ny) == to {
                let mut path = vec![to];
                let mut c = cur;
                while c != from {
                    path.push(c);
                    c = prev[idx(c.0, c.1)].unwrap();
                }
                path.reverse();
                return Some(path);
            }
            q.push_back((nx, ny));
        }
    }
    None
}

/// BFS distances from `from` to every reachable tile.
pub fn distances<F>(w: i32, h: i32, from: (i32, i32), open: F) -> Vec<Option<u32>>
where
    F: Fn(i32, i32) -> bool,
{
    let idx = |x: i32, y: i32| (y * w + x) as usize;
    let mut dist = vec![None; (w * h).max(0) as usize];
    if from.0 < 0 || from.1 < 0 || from.0 >= w || from.1 >= h {
        return dist;
    }
    dist[idx(from.0, from.1)] = Some(0);
    let mut q = VecDeque::from([from]);
    while let Some(cur) = q.pop_front() {
        let d0 = dist[idx(cur.0, cur.1)].unwrap();
        for d in Direction::ALL {
            let (nx, ny) = d.step(cur);
            if nx < 0 || ny < 0 || nx >= w || ny >= h || dist[idx(nx, ny)].is_some() || !open(nx, ny) {
                continue;
            }
            dist[idx(nx, ny)] = Some(d0 + 1);
            q.push_back((nx, ny));
        }
    }
    dist
}

/// Tiles the player could walk on right now, on the player's map.
pub fn player_open<'a>(world: &'a WorldState, pack: &'a ContentPack) -> impl Fn(i32, i32) -> bool + 'a {
    let map = world.player.map.as_str();
    let m = &world.maps[map];
    move |x, y| !blocked_static(pack, m, x, y) && m.exit_at(x, y).is_none() && !occupant(world, map, x, y, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bfs_prefers_up_then_right() {
        // Open 3x3 field: two shortest paths to the diagonal; up wins.
        let p = bfs(3, 3, (0, 1), (1, 0), |_, _| true).unwrap();
        assert_eq!(p, vec![(0, 0), (1, 0)]);
        let p = bfs(3, 3, (0, 2), (2, 0), |_, _| true).unwrap();
        assert_eq!(p, vec![(0, 1), (0, 0), (1, 0), (2, 0)]);
    }

    #[test]
    fn bfs_routes_around_walls() {
        let wall = |x: i32, y: i32| !(x == 1 && y < 2);
        let p = bfs(3, 3, (0, 0), (2, 0), wall).unwrap();
        assert_eq!(p.len(), 6);
        assert!(bfs(3, 3, (0, 0), (2, 0), |x, _| x != 1).is_none());
    }
}
