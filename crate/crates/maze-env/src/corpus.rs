//! The benchmark grids shipped with the crate.
//!
//! `SAMPLE` is a small alias-free maze (every empty cell senses a unique
//! neighbourhood). `ALIASED` is the minimal two-aliased-state corridor:
//! both aliased cells sense `00100010` but one must exit east and the
//! other west. `MAZE7`, `LITTMAN57` and `MAZE10` are the benchmark mazes;
//! their optimal mean steps-to-goal are 4.26, 3.85 and 6.55.

use crate::grid::MazeGrid;

pub const SAMPLE: &str = include_str!("../data/sample.maze");
pub const ALIASED: &str = include_str!("../data/aliased.maze");
pub const MAZE7: &str = include_str!("../data/maze7.maze");
pub const LITTMAN57: &str = include_str!("../data/littman57.maze");
pub const MAZE10: &str = include_str!("../data/maze10.maze");

/// Looks a maze up by its canonical name.
pub fn by_name(name: &str) -> Option<&'static str> {
    match name {
        "sample" => Some(SAMPLE),
        "aliased" => Some(ALIASED),
        "maze7" => Some(MAZE7),
        "littman57" => Some(LITTMAN57),
        "maze10" => Some(MAZE10),
        _ => None,
    }
}

pub fn names() -> &'static [&'static str] {
    &["sample", "aliased", "maze7", "littman57", "maze10"]
}

/// Parses a canonical maze; panics on a name the crate does not ship.
pub fn load(name: &str) -> MazeGrid {
    MazeGrid::parse(by_name(name).unwrap_or_else(|| panic!("unknown maze {name:?}")))
        .expect("shipped mazes are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_shipped_mazes_parse() {
        for name in names() {
            let grid = load(name);
            assert_eq!(grid.name(), Some(*name));
        }
    }

    #[test]
    fn benchmark_means_match_reference_optima() {
        for (name, want) in [("maze7", 4.3), ("littman57", 3.8), ("maze10", 6.5)] {
            let grid = load(name);
            let mean = grid.optimal_distance_map().mean_over_empty(&grid);
            assert!(
                (mean - want).abs() <= 0.2,
                "{name}: mean {mean:.3} vs {want}"
            );
        }
    }

    #[test]
    fn sample_maze_has_the_east_pocket_state() {
        let grid = load("sample");
        let hits: Vec<_> = grid
            .empty_cells()
            .into_iter()
            .filter(|p| grid.sense(*p).unwrap().to_string() == "00100000")
            .collect();
        assert_eq!(hits.len(), 1, "expected a unique east-only pocket");
    }

    #[test]
    fn sample_maze_sensations_are_all_distinct() {
        let grid = load("sample");
        let mut seen = std::collections::BTreeSet::new();
        for p in grid.empty_cells() {
            assert!(seen.insert(grid.sense(p).unwrap()), "duplicate at {p}");
        }
    }
}
