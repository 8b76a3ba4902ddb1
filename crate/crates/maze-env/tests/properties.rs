//! Randomized invariant checks over generated mazes.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use maze_env::{gen, Action, CellKind, MazeGrid, Position, Sensation};

fn random_suite(seed: u64, count: usize) -> Vec<MazeGrid> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| gen::random_maze(&mut rng, 8, 8, 0.4))
        .collect()
}

#[test]
fn sense_and_step_agree() {
    // bit i of sense(pos) is set exactly when action i moves
    for grid in random_suite(101, 60) {
        for pos in grid.empty_cells() {
            let s = grid.sense(pos).unwrap();
            for a in Action::all() {
                let r = grid.step(pos, a);
                assert_eq!(s.bit(a.index()), r.moved, "{pos} action {a}");
                assert!(grid.is_open(r.position));
            }
        }
    }
}

#[test]
fn parse_render_round_trips() {
    for grid in random_suite(202, 60) {
        let text = grid.render();
        assert_eq!(MazeGrid::parse(&text).unwrap(), grid);
        assert_eq!(MazeGrid::parse(&text).unwrap().render(), text);
    }
}

#[test]
fn distance_map_satisfies_bellman() {
    for grid in random_suite(303, 60) {
        let d = grid.optimal_distance_map();
        assert_eq!(d.distance(grid.goal()), Some(0));
        for pos in grid.empty_cells() {
            let here = d.distance(pos).unwrap();
            let best_next = Action::all()
                .filter_map(|a| {
                    let r = grid.step(pos, a);
                    r.moved.then(|| d.distance(r.position).unwrap())
                })
                .min()
                .unwrap();
            assert_eq!(here, best_next + 1);
        }
    }
}

/// Independent aliasing oracle, written pairwise rather than by bucketing:
/// a sensation is aliased when any two of its cells disagree on the set of
/// distance-decreasing actions.
fn aliased_by_pairwise_scan(grid: &MazeGrid) -> BTreeMap<Sensation, Vec<Position>> {
    let d = grid.optimal_distance_map();
    let cells = grid.empty_cells();
    let dec = |p: Position| -> Vec<u8> {
        let here = d.distance(p).unwrap();
        let mut out = Vec::new();
        for a in Action::all() {
            let r = grid.step(p, a);
            if r.moved && d.distance(r.position).unwrap() < here {
                out.push(a.index());
            }
        }
        out
    };
    let mut flagged: BTreeMap<Sensation, Vec<Position>> = BTreeMap::new();
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            let (u, v) = (cells[i], cells[j]);
            let su = grid.sense(u).unwrap();
            if su != grid.sense(v).unwrap() {
                continue;
            }
            if dec(u) != dec(v) {
                let entry = flagged.entry(su).or_default();
                for p in [u, v] {
                    if !entry.contains(&p) {
                        entry.push(p);
                    }
                }
            }
        }
    }
    // a flagged sensation's group contains *all* cells sharing it
    for (s, members) in flagged.iter_mut() {
        for p in grid.empty_cells() {
            if grid.sense(p).unwrap() == *s && !members.contains(&p) {
                members.push(p);
            }
        }
        members.sort();
    }
    flagged
}

#[test]
fn aliasing_matches_independent_oracle_on_random_mazes() {
    for grid in random_suite(404, 200) {
        let got: BTreeMap<Sensation, Vec<Position>> = grid
            .aliased_groups()
            .into_iter()
            .map(|g| (g.sensation, g.members))
            .collect();
        let want = aliased_by_pairwise_scan(&grid);
        assert_eq!(got, want, "maze:\n{}", grid.render());
    }
}

#[test]
fn goal_counts_as_open_for_sensing() {
    for grid in random_suite(505, 20) {
        let goal = grid.goal();
        assert_eq!(grid.cell(goal), CellKind::Goal);
        assert!(grid.sense(goal).is_ok());
    }
}
