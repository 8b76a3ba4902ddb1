use std::fmt;

use maze_env::{Action, Sensation};

/// One behavioural identity of a sensation. Versions of a sensation are
/// minted 1, 2, 3, … as observed contradictions prove that cells sharing
/// the sensation behave differently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateVersion {
    pub sensation: Sensation,
    pub version: u16,
}

impl StateVersion {
    pub fn new(sensation: Sensation, version: u16) -> Self {
        debug_assert!(version >= 1);
        Self { sensation, version }
    }
}

impl fmt::Display for StateVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.sensation, self.version)
    }
}

/// One outgoing edge of a code path: the action taken and where it led.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Branch {
    pub action: Action,
    pub dest: StateVersion,
    pub last_used: u64,
}

/// Depth-2 tree rooted at a state version: the root plus up to three
/// (action, destination) pairs — seven nodes at most. Branch actions are
/// distinct; a fourth action evicts the least-recently-used branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodePath {
    pub root: StateVersion,
    branches: Vec<Branch>,
}

pub const MAX_BRANCHES: usize = 3;

impl CodePath {
    pub fn new(root: StateVersion) -> Self {
        Self {
            root,
            branches: Vec::new(),
        }
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch(&self, action: Action) -> Option<&Branch> {
        self.branches.iter().find(|b| b.action == action)
    }

    /// Confirms or records the (action → dest) edge, stamping it with the
    /// LRU clock. An existing edge for the action is redirected (identity
    /// repairs rewrite destinations); a new edge on a full tree evicts
    /// the least-recently-used branch.
    pub fn record(&mut self, action: Action, dest: StateVersion, clock: u64) {
        if let Some(b) = self.branches.iter_mut().find(|b| b.action == action) {
            b.dest = dest;
            b.last_used = clock;
            return;
        }
        if self.branches.len() == MAX_BRANCHES {
            let oldest = self
                .branches
                .iter()
                .enumerate()
                .min_by_key(|(_, b)| b.last_used)
                .map(|(i, _)| i)
                .expect("nonempty");
            self.branches.remove(oldest);
        }
        self.branches.push(Branch {
            action,
            dest,
            last_used: clock,
        });
    }

    pub fn node_count(&self) -> usize {
        1 + 2 * self.branches.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(text: &str, v: u16) -> StateVersion {
        StateVersion::new(text.parse().unwrap(), v)
    }

    #[test]
    fn record_is_idempotent() {
        let mut cp = CodePath::new(sv("00100010", 1));
        cp.record(Action::new(2), sv("00000010", 1), 1);
        cp.record(Action::new(2), sv("00000010", 1), 2);
        assert_eq!(cp.branches().len(), 1);
        assert_eq!(cp.node_count(), 3);
    }

    #[test]
    fn fourth_action_evicts_least_recently_used() {
        let mut cp = CodePath::new(sv("11111111", 1));
        cp.record(Action::new(0), sv("00000001", 1), 10);
        cp.record(Action::new(1), sv("00000010", 1), 11);
        cp.record(Action::new(2), sv("00000100", 1), 12);
        assert_eq!(cp.node_count(), 7);
        // touching action 0 makes action 1 the eviction victim
        cp.record(Action::new(0), sv("00000001", 1), 13);
        cp.record(Action::new(3), sv("00001000", 1), 14);
        assert_eq!(cp.branches().len(), 3);
        assert!(cp.branch(Action::new(1)).is_none());
        assert!(cp.branch(Action::new(0)).is_some());
        assert!(cp.branch(Action::new(3)).is_some());
        assert!(cp.node_count() <= 7);
    }

    #[test]
    fn branch_actions_stay_distinct() {
        let mut cp = CodePath::new(sv("11111111", 1));
        for clock in 0..20 {
            cp.record(Action::new((clock % 8) as u8), sv("00000001", 1), clock);
            let mut actions: Vec<_> = cp.branches().iter().map(|b| b.action).collect();
            actions.dedup();
            assert_eq!(actions.len(), cp.branches().len());
            assert!(cp.branches().len() <= MAX_BRANCHES);
        }
    }

    #[test]
    fn record_redirects_existing_edge() {
        let mut cp = CodePath::new(sv("00100010", 1));
        cp.record(Action::new(2), sv("00000010", 1), 1);
        cp.record(Action::new(2), sv("00000010", 2), 2);
        assert_eq!(cp.branch(Action::new(2)).unwrap().dest, sv("00000010", 2));
        assert_eq!(cp.branches().len(), 1);
    }
}
