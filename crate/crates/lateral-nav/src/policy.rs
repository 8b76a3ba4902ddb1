use maze_env::Action;

use crate::state::StateVersion;

/// One link of a policy chain: the state version the agent is at and the
/// action the policy prescribes there. The destination is implicit: the
/// next step's root, or the policy terminal for the last step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolicyStep {
    pub root: StateVersion,
    pub action: Action,
}

/// A world-viewpoint route: a chain of code-path choices from a start
/// state version to the goal. Chaining is structural — each step's
/// destination is the next step's root — so a policy is valid by
/// construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    pub steps: Vec<PolicyStep>,
    pub terminal: StateVersion,
    pub malign: bool,
    pub uses: u32,
    pub successes: u32,
    pub created: u64,
}

impl Policy {
    pub fn new(steps: Vec<PolicyStep>, terminal: StateVersion, created: u64) -> Self {
        debug_assert!(!steps.is_empty());
        Self {
            steps,
            terminal,
            malign: false,
            uses: 0,
            successes: 0,
            created,
        }
    }

    /// Chained action count from the start to the goal.
    pub fn expected_steps(&self) -> u32 {
        self.steps.len() as u32
    }

    /// Same route? Identity is the chain, not the counters.
    pub fn same_chain(&self, other: &Policy) -> bool {
        self.steps == other.steps && self.terminal == other.terminal
    }

    /// Last chain position whose root is `sv`: entering there leaves the
    /// fewest remaining steps this policy can offer from `sv`.
    pub fn position_of(&self, sv: StateVersion) -> Option<usize> {
        self.steps.iter().rposition(|s| s.root == sv)
    }

    /// Steps left when entering the chain at `cursor`.
    pub fn remaining(&self, cursor: usize) -> u32 {
        (self.steps.len() - cursor) as u32
    }

    /// The state version this policy expects after executing step
    /// `cursor`.
    pub fn expected_dest(&self, cursor: usize) -> StateVersion {
        if cursor + 1 < self.steps.len() {
            self.steps[cursor + 1].root
        } else {
            self.terminal
        }
    }

    /// Whether executing step `cursor` is expected to end the trial.
    pub fn ends_at(&self, cursor: usize) -> bool {
        cursor + 1 == self.steps.len()
    }
}

/// Crossover: prefix of `a` up to its `i`-th root plus suffix of `b`
/// from its `j`-th root. Valid whenever those roots coincide; chaining
/// is preserved by construction. Returns `None` for empty offspring.
pub fn splice(a: &Policy, i: usize, b: &Policy, j: usize, created: u64) -> Option<Policy> {
    debug_assert_eq!(a.steps[i].root, b.steps[j].root);
    let mut steps = Vec::with_capacity(i + b.steps.len() - j);
    steps.extend_from_slice(&a.steps[..i]);
    steps.extend_from_slice(&b.steps[j..]);
    if steps.is_empty() {
        return None;
    }
    Some(Policy::new(steps, b.terminal, created))
}
