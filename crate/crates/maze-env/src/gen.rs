//! Random connected mazes for randomized test suites.

use rand::Rng;

use crate::grid::MazeGrid;

/// Generates a random valid maze of the given outer dimensions: blocked
/// border, random interior walls near `density`, one random goal, and a
/// guaranteed path from every empty cell (rejection sampling).
pub fn random_maze<R: Rng>(rng: &mut R, width: usize, height: usize, density: f64) -> MazeGrid {
    assert!(width >= 4 && height >= 4);
    loop {
        let mut rows = Vec::with_capacity(height);
        let mut open = Vec::new();
        for r in 0..height {
            let mut row = String::with_capacity(width);
            for c in 0..width {
                let boundary = r == 0 || c == 0 || r == height - 1 || c == width - 1;
                if boundary || rng.gen_bool(density) {
                    row.push('0');
                } else {
                    row.push('1');
                    open.push((r, c));
                }
            }
            rows.push(row);
        }
        if open.len() < 4 {
            continue;
        }
        let (gr, gc) = open[rng.gen_range(0..open.len())];
        rows[gr].replace_range(gc..gc + 1, "G");
        let text = rows.join("\n");
        if let Ok(grid) = MazeGrid::parse(&text) {
            return grid;
        }
    }
}
