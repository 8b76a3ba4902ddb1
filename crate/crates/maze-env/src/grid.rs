use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Offsets for the eight directions, clockwise starting at north:
/// N, NE, E, SE, S, SW, W, NW. Sensation bits and action indices share
/// this ordering.
pub const DELTAS: [(i32, i32); 8] = [
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    Empty,
    Blocked,
    Goal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub row: usize,
    pub col: usize,
}

impl Position {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Neighbouring position in direction `a`, if it stays on the grid.
    fn offset(&self, a: Action, width: usize, height: usize) -> Option<Position> {
        let (dr, dc) = DELTAS[a.index() as usize];
        let r = self.row as i32 + dr;
        let c = self.col as i32 + dc;
        if r < 0 || c < 0 || r >= height as i32 || c >= width as i32 {
            None
        } else {
            Some(Position::new(r as usize, c as usize))
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// One of the eight moves, index 0..7 clockwise from north.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action(u8);

impl Action {
    pub const COUNT: usize = 8;

    pub fn new(index: u8) -> Self {
        assert!(index < 8, "action index out of range: {index}");
        Self(index)
    }

    pub fn index(&self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Action> {
        (0..8).map(Action)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The agent's 8-bit view of its surroundings. Bit i is set iff the
/// adjacent cell in direction i is Empty or Goal. Rendered as an
/// 8-character '0'/'1' string, north first, clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sensation(u8);

impl Sensation {
    pub fn from_bits(bits: u8) -> Self {
        Self(bits)
    }

    pub fn bits(&self) -> u8 {
        self.0
    }

    pub fn bit(&self, direction: u8) -> bool {
        debug_assert!(direction < 8);
        self.0 & (1 << direction) != 0
    }

    /// Actions whose target cell is open (Empty or Goal).
    pub fn open_actions(&self) -> impl Iterator<Item = Action> + '_ {
        let bits = self.0;
        Action::all().filter(move |a| bits & (1 << a.index()) != 0)
    }
}

impl fmt::Display for Sensation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..8 {
            write!(f, "{}", if self.bit(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl FromStr for Sensation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() != 8 {
            return Err(format!("sensation must be 8 chars, got {:?}", s));
        }
        let mut bits = 0u8;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '1' => bits |= 1 << i,
                '0' => {}
                other => return Err(format!("invalid sensation char {other:?}")),
            }
        }
        Ok(Sensation(bits))
    }
}

/// Outcome of executing an action. Moving into a blocked cell is a legal
/// no-op (`moved == false`), not an error: the learning loop needs to
/// observe failed moves to punish them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepResult {
    pub position: Position,
    pub reached_goal: bool,
    pub moved: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MazeError {
    #[error("malformed grid at line {line}: {reason}")]
    MalformedGrid { line: usize, reason: String },
    #[error("grid has no goal cell")]
    NoGoal,
    #[error("grid has more than one goal cell")]
    MultipleGoals,
    #[error("empty cell {0} cannot reach the goal")]
    UnreachableCell(Position),
    #[error("boundary cell {0} is not blocked")]
    OpenBoundary(Position),
    #[error("position {0} is blocked or out of bounds")]
    InvalidPosition(Position),
}

/// A rectangular maze. Immutable after parsing; all operations are pure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MazeGrid {
    width: usize,
    height: usize,
    cells: Vec<CellKind>,
    goal: Position,
    starts: Vec<Position>,
    name: Option<String>,
}

impl MazeGrid {
    /// Parses the maze file format: one row per line, '0' blocked,
    /// '1' empty, 'G' goal, 'S' designated start (counts as empty);
    /// an optional leading ';' line carries the maze name.
    pub fn parse(text: &str) -> Result<Self, MazeError> {
        let mut name = None;
        let mut rows: Vec<(usize, &str)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            if line.starts_with(';') {
                if rows.is_empty() && name.is_none() {
                    name = Some(line[1..].trim().to_string());
                    continue;
                }
                return Err(MazeError::MalformedGrid {
                    line: idx + 1,
                    reason: "comment lines are only allowed before the grid".into(),
                });
            }
            rows.push((idx + 1, line));
        }
        if rows.is_empty() {
            return Err(MazeError::MalformedGrid {
                line: 1,
                reason: "no grid rows".into(),
            });
        }
        let width = rows[0].1.len();
        let height = rows.len();
        let mut cells = Vec::with_capacity(width * height);
        let mut goals = Vec::new();
        let mut starts = Vec::new();
        for (r, (line_no, row)) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(MazeError::MalformedGrid {
                    line: *line_no,
                    reason: format!("row length {} != {}", row.len(), width),
                });
            }
            for (c, ch) in row.chars().enumerate() {
                let kind = match ch {
                    '0' => CellKind::Blocked,
                    '1' => CellKind::Empty,
                    'G' => {
                        goals.push(Position::new(r, c));
                        CellKind::Goal
                    }
                    'S' => {
                        starts.push(Position::new(r, c));
                        CellKind::Empty
                    }
                    other => {
                        return Err(MazeError::MalformedGrid {
                            line: *line_no,
                            reason: format!("unknown character {other:?}"),
                        })
                    }
                };
                cells.push(kind);
            }
        }
        let goal = match goals.len() {
            0 => return Err(MazeError::NoGoal),
            1 => goals[0],
            _ => return Err(MazeError::MultipleGoals),
        };
        let grid = MazeGrid {
            width,
            height,
            cells,
            goal,
            starts,
            name,
        };
        grid.validate()?;
        Ok(grid)
    }

    fn validate(&self) -> Result<(), MazeError> {
        for r in 0..self.height {
            for c in 0..self.width {
                let boundary =
                    r == 0 || c == 0 || r == self.height - 1 || c == self.width - 1;
                let pos = Position::new(r, c);
                if boundary && self.cell(pos) != CellKind::Blocked {
                    return Err(MazeError::OpenBoundary(pos));
                }
            }
        }
        // every empty cell must reach the goal (8-neighbour flood from goal)
        let mut seen = vec![false; self.cells.len()];
        let mut queue = std::collections::VecDeque::new();
        seen[self.idx(self.goal)] = true;
        queue.push_back(self.goal);
        while let Some(p) = queue.pop_front() {
            for a in Action::all() {
                if let Some(n) = p.offset(a, self.width, self.height) {
                    if self.is_open(n) && !seen[self.idx(n)] {
                        seen[self.idx(n)] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
        for r in 0..self.height {
            for c in 0..self.width {
                let pos = Position::new(r, c);
                if self.cell(pos) == CellKind::Empty && !seen[self.idx(pos)] {
                    return Err(MazeError::UnreachableCell(pos));
                }
            }
        }
        Ok(())
    }

    /// Inverse of `parse`; `parse(render(g))` reproduces `g` exactly.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            out.push(';');
            out.push_str(name);
            out.push('\n');
        }
        for r in 0..self.height {
            for c in 0..self.width {
                let pos = Position::new(r, c);
                out.push(match self.cell(pos) {
                    CellKind::Blocked => '0',
                    CellKind::Goal => 'G',
                    CellKind::Empty if self.starts.contains(&pos) => 'S',
                    CellKind::Empty => '1',
                });
            }
            out.push('\n');
        }
        out
    }

    fn idx(&self, pos: Position) -> usize {
        pos.row * self.width + pos.col
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn goal(&self) -> Position {
        self.goal
    }

    pub fn cell(&self, pos: Position) -> CellKind {
        self.cells[self.idx(pos)]
    }

    /// True for Empty and Goal cells; the goal is sensed like empty space.
    pub fn is_open(&self, pos: Position) -> bool {
        self.cell(pos) != CellKind::Blocked
    }

    /// All empty cells, goal excluded, in row-major order.
    pub fn empty_cells(&self) -> Vec<Position> {
        let mut out = Vec::new();
        for r in 0..self.height {
            for c in 0..self.width {
                let pos = Position::new(r, c);
                if self.cell(pos) == CellKind::Empty {
                    out.push(pos);
                }
            }
        }
        out
    }

    /// Valid trial start cells: the designated 'S' cells when present,
    /// otherwise every empty cell.
    pub fn start_cells(&self) -> Vec<Position> {
        if self.starts.is_empty() {
            self.empty_cells()
        } else {
            self.starts.clone()
        }
    }

    pub fn random_start<R: rand::Rng>(&self, rng: &mut R) -> Position {
        let starts = self.start_cells();
        starts[rng.gen_range(0..starts.len())]
    }

    /// The agent's view from `pos`: bit i set iff the neighbour in
    /// direction i is Empty or Goal.
    pub fn sense(&self, pos: Position) -> Result<Sensation, MazeError> {
        if pos.row >= self.height || pos.col >= self.width || !self.is_open(pos) {
            return Err(MazeError::InvalidPosition(pos));
        }
        let mut bits = 0u8;
        for a in Action::all() {
            if let Some(n) = pos.offset(a, self.width, self.height) {
                if self.is_open(n) {
                    bits |= 1 << a.index();
                }
            }
        }
        Ok(Sensation::from_bits(bits))
    }

    /// Executes action `a` from `pos`. Blocked targets leave the position
    /// unchanged with `moved == false`.
    pub fn step(&self, pos: Position, a: Action) -> StepResult {
        debug_assert!(self.is_open(pos), "step from a blocked cell");
        match pos.offset(a, self.width, self.height) {
            Some(n) if self.is_open(n) => StepResult {
                position: n,
                reached_goal: self.cell(n) == CellKind::Goal,
                moved: true,
            },
            _ => StepResult {
                position: pos,
                reached_goal: false,
                moved: false,
            },
        }
    }
}

impl FromStr for MazeGrid {
    type Err = MazeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MazeGrid::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rejects_goalless_grid() {
        let err = MazeGrid::parse("000\n010\n000\n").unwrap_err();
        assert_eq!(err, MazeError::NoGoal);
    }

    #[test]
    fn parse_rejects_two_goals() {
        let err = MazeGrid::parse("0000\n0GG0\n0000\n").unwrap_err();
        assert_eq!(err, MazeError::MultipleGoals);
    }

    #[test]
    fn parse_rejects_walled_off_cell() {
        let text = "00000\n0G010\n00000\n";
        let err = MazeGrid::parse(text).unwrap_err();
        assert_eq!(err, MazeError::UnreachableCell(Position::new(1, 3)));
    }

    #[test]
    fn parse_rejects_open_boundary() {
        let err = MazeGrid::parse("010\n0G0\n000\n").unwrap_err();
        assert_eq!(err, MazeError::OpenBoundary(Position::new(0, 1)));
    }

    #[test]
    fn parse_rejects_ragged_rows() {
        let err = MazeGrid::parse("0000\n0G0\n0000\n").unwrap_err();
        assert!(matches!(err, MazeError::MalformedGrid { line: 2, .. }));
    }

    #[test]
    fn comment_line_carries_name() {
        let grid = MazeGrid::parse("; my maze\n000\n0G0\n000\n").unwrap();
        assert_eq!(grid.name(), Some("my maze"));
    }

    #[test]
    fn sense_open_block_center() {
        let grid = MazeGrid::parse("00000\n01110\n01110\n011G0\n00000\n").unwrap();
        let s = grid.sense(Position::new(2, 2)).unwrap();
        assert_eq!(s.to_string(), "11111111");
    }

    #[test]
    fn sense_east_only() {
        let grid = MazeGrid::parse("0000\n011G\n0000\n");
        // open boundary on purpose: G sits on the border
        assert!(grid.is_err());
        let grid = MazeGrid::parse("00000\n011G0\n00000\n").unwrap();
        let s = grid.sense(Position::new(1, 1)).unwrap();
        assert_eq!(s.to_string(), "00100000");
    }

    #[test]
    fn sense_rejects_blocked() {
        let grid = MazeGrid::parse("00000\n011G0\n00000\n").unwrap();
        let err = grid.sense(Position::new(0, 0)).unwrap_err();
        assert_eq!(err, MazeError::InvalidPosition(Position::new(0, 0)));
    }

    #[test]
    fn step_into_wall_is_noop() {
        let grid = MazeGrid::parse("00000\n011G0\n00000\n").unwrap();
        let r = grid.step(Position::new(1, 1), Action::new(0));
        assert!(!r.moved);
        assert!(!r.reached_goal);
        assert_eq!(r.position, Position::new(1, 1));
    }

    #[test]
    fn step_east_reaches_goal() {
        let grid = MazeGrid::parse("00000\n011G0\n00000\n").unwrap();
        let r = grid.step(Position::new(1, 2), Action::new(2));
        assert!(r.moved);
        assert!(r.reached_goal);
        assert_eq!(r.position, Position::new(1, 3));
    }

    #[test]
    fn render_round_trips() {
        let text = ";demo\n00000\n0S1G0\n00000\n";
        let grid = MazeGrid::parse(text).unwrap();
        assert_eq!(grid.render(), text);
        assert_eq!(MazeGrid::parse(&grid.render()).unwrap(), grid);
    }

    #[test]
    fn designated_starts_limit_start_cells() {
        let grid = MazeGrid::parse("00000\n0S1G0\n00000\n").unwrap();
        assert_eq!(grid.start_cells(), vec![Position::new(1, 1)]);
    }

    #[test]
    fn sensation_string_round_trip() {
        let s: Sensation = "00100010".parse().unwrap();
        assert!(s.bit(2));
        assert!(s.bit(6));
        assert_eq!(s.to_string(), "00100010");
        assert_eq!(s.open_actions().count(), 2);
    }
}
