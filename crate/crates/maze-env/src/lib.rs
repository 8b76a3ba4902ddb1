//! Grid-maze environment: parsing, the 8-neighbour sensation/transition
//! model, and brute-force oracles (shortest paths, aliased-state detection)
//! used as training targets and test references.

mod grid;
mod oracle;

pub mod corpus;
pub mod gen;

pub use grid::{Action, CellKind, MazeError, MazeGrid, Position, Sensation, StepResult};
pub use oracle::{AliasedGroup, DistanceMap};
