use std::collections::{BTreeMap, VecDeque};

use crate::grid::{Action, MazeGrid, Position, Sensation};

/// Breadth-first distances (in 8-neighbour moves) from every open cell to
/// the goal. The mean over empty cells is the optimal mean steps-to-goal.
#[derive(Debug, Clone)]
pub struct DistanceMap {
    width: usize,
    map: Vec<Option<u32>>,
}

impl DistanceMap {
    pub fn distance(&self, pos: Position) -> Option<u32> {
        self.map[pos.row * self.width + pos.col]
    }

    /// Mean distance over empty cells (goal excluded): the best possible
    /// average steps-to-goal under uniform random starts.
    pub fn mean_over_empty(&self, grid: &MazeGrid) -> f64 {
        let empties = grid.empty_cells();
        let total: u64 = empties
            .iter()
            .map(|p| u64::from(self.distance(*p).expect("validated grid")))
            .sum();
        total as f64 / empties.len() as f64
    }
}

/// A set of positions sharing one sensation whose optimal-action sets
/// differ: states the agent cannot tell apart but must treat differently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliasedGroup {
    pub sensation: Sensation,
    pub members: Vec<Position>,
}

impl MazeGrid {
    pub fn optimal_distance_map(&self) -> DistanceMap {
        let mut map = vec![None; self.width() * self.height()];
        let goal = self.goal();
        map[goal.row * self.width() + goal.col] = Some(0);
        let mut queue = VecDeque::new();
        queue.push_back(goal);
        while let Some(p) = queue.pop_front() {
            let d = map[p.row * self.width() + p.col].unwrap();
            for a in Action::all() {
                let r = self.step(p, a);
                if r.moved {
                    let slot = &mut map[r.position.row * self.width() + r.position.col];
                    if slot.is_none() {
                        *slot = Some(d + 1);
                        queue.push_back(r.position);
                    }
                }
            }
        }
        DistanceMap {
            width: self.width(),
            map,
        }
    }

    /// Actions from `pos` that strictly reduce the goal distance.
    pub fn decreasing_actions(&self, pos: Position, distances: &DistanceMap) -> Vec<Action> {
        let here = distances.distance(pos).expect("open cell");
        Action::all()
            .filter(|a| {
                let r = self.step(pos, *a);
                r.moved && distances.distance(r.position).unwrap() < here
            })
            .collect()
    }

    /// Brute-force aliasing detection: bucket empty cells by sensation and
    /// flag buckets whose members disagree on the set of
    /// distance-decreasing actions.
    pub fn aliased_groups(&self) -> Vec<AliasedGroup> {
        let distances = self.optimal_distance_map();
        let mut buckets: BTreeMap<Sensation, Vec<Position>> = BTreeMap::new();
        for pos in self.empty_cells() {
            buckets
                .entry(self.sense(pos).expect("empty cell"))
                .or_default()
                .push(pos);
        }
        let mut groups = Vec::new();
        for (sensation, members) in buckets {
            if members.len() < 2 {
                continue;
            }
            let first = self.decreasing_actions(members[0], &distances);
            if members[1..]
                .iter()
                .any(|p| self.decreasing_actions(*p, &distances) != first)
            {
                groups.push(AliasedGroup { sensation, members });
            }
        }
        groups
    }
}
