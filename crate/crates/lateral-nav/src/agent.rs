use std::collections::{BTreeMap, BTreeSet};

use maze_env::{Action, MazeGrid, Sensation};
use rand::Rng;
use xcs_core::{Population, SelectionMode, TrialMode, TrialRecord, XcsParams, GOAL_REWARD};

use crate::policy::{splice, Policy, PolicyStep};
use crate::state::{CodePath, StateVersion};

/// Knobs for the lateral layer (the rule-learning knobs live in
/// `XcsParams`).
#[derive(Debug, Clone, PartialEq)]
pub struct LateralParams {
    /// Policy store capacity; worst policies (malign first, then longest)
    /// are evicted when full.
    pub policy_limit: usize,
    /// Crossover attempts per evolution call.
    pub evolve_attempts: usize,
    /// How far back trajectory suffix matching looks when resolving an
    /// ambiguous identity.
    pub suffix_depth: usize,
}

impl Default for LateralParams {
    fn default() -> Self {
        Self {
            policy_limit: 50,
            evolve_attempts: 60,
            suffix_depth: 6,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct ActivePolicy {
    index: usize,
    cursor: usize,
}

/// The lateralized agent: an XCS population (local rules) plus code paths
/// and policies (versioned structure of the world), with the explore/
/// exploit trial protocol gluing them together.
#[derive(Debug, Clone)]
pub struct HetroAgent {
    pub population: Population,
    pub params: XcsParams,
    pub lateral: LateralParams,
    pub(crate) cp_store: BTreeMap<StateVersion, CodePath>,
    pub(crate) version_counts: BTreeMap<Sensation, u16>,
    pub(crate) goal_versions: BTreeSet<StateVersion>,
    pub(crate) policies: Vec<Policy>,
    active: Option<ActivePolicy>,
    current: Option<StateVersion>,
    trajectory: Vec<(StateVersion, Action)>,
    cognate: bool,
    pub(crate) trials: u64,
    pub(crate) clock: u64,
    pub(crate) policy_seq: u64,
    pub(crate) mismatches: u64,
}

/// The exploit-mode action rule: follow the active policy when there is
/// one, and note whether the rule-based best action agrees (the cognate
/// flag). Without a policy the rules decide and count as agreement.
pub fn exploit_choice(best_rule: Action, policy_action: Option<Action>) -> (Action, bool) {
    match policy_action {
        None => (best_rule, true),
        Some(a) if a == best_rule => (a, true),
        Some(a) => (a, false),
    }
}

impl HetroAgent {
    pub fn new(params: XcsParams, lateral: LateralParams) -> Self {
        Self {
            population: Population::new(),
            params,
            lateral,
            cp_store: BTreeMap::new(),
            version_counts: BTreeMap::new(),
            goal_versions: BTreeSet::new(),
            policies: Vec::new(),
            active: None,
            current: None,
            trajectory: Vec::new(),
            cognate: true,
            trials: 0,
            clock: 0,
            policy_seq: 0,
            mismatches: 0,
        }
    }

    // ---- inspection -----------------------------------------------------

    pub fn code_path(&self, root: StateVersion) -> Option<&CodePath> {
        self.cp_store.get(&root)
    }

    pub fn code_paths(&self) -> impl Iterator<Item = &CodePath> {
        self.cp_store.values()
    }

    pub fn policies(&self) -> &[Policy] {
        &self.policies
    }

    /// Highest version minted for a sensation (0 when never seen).
    pub fn max_version(&self, s: Sensation) -> u16 {
        self.version_counts.get(&s).copied().unwrap_or(0)
    }

    pub fn current_state(&self) -> Option<StateVersion> {
        self.current
    }

    pub fn cognate_flag(&self) -> bool {
        self.cognate
    }

    pub fn policy_mismatches(&self) -> u64 {
        self.mismatches
    }

    pub fn trials_run(&self) -> u64 {
        self.trials
    }

    // ---- state versions -------------------------------------------------

    fn ensure_version1(&mut self, s: Sensation) -> StateVersion {
        let count = self.version_counts.entry(s).or_insert(0);
        if *count == 0 {
            *count = 1;
        }
        StateVersion::new(s, 1)
    }

    fn mint(&mut self, s: Sensation) -> StateVersion {
        let count = self.version_counts.entry(s).or_insert(0);
        *count += 1;
        StateVersion::new(s, *count)
    }

    fn branch_dest(&self, root: StateVersion, action: Action) -> Option<StateVersion> {
        self.cp_store
            .get(&root)
            .and_then(|cp| cp.branch(action))
            .map(|b| b.dest)
    }

    fn record_edge(&mut self, from: StateVersion, action: Action, dest: StateVersion) {
        self.cp_store
            .entry(from)
            .or_insert_with(|| CodePath::new(from))
            .record(action, dest, self.clock);
    }

    /// Positions the agent at trial start. With no policy and no
    /// trajectory there is no context: the sensation resolves to
    /// version 1, to be corrected by contradiction evidence.
    pub fn begin_trial_at(&mut self, s: Sensation) -> StateVersion {
        self.trajectory.clear();
        self.active = None;
        let sv = self.ensure_version1(s);
        self.current = Some(sv);
        sv
    }

    /// Re-labels the current state after evidence showed the previous
    /// label wrong, repairing the code-path edge that pointed at it.
    fn reassign_current(&mut self, corrected: StateVersion) {
        let wrong = self.current.expect("positioned");
        if let Some(&(prev_sv, prev_action)) = self.trajectory.last() {
            let points_here = self
                .branch_dest(prev_sv, prev_action)
                .is_some_and(|d| d == wrong);
            if points_here {
                let clock = self.clock;
                if let Some(cp) = self.cp_store.get_mut(&prev_sv) {
                    cp.record(prev_action, corrected, clock);
                }
            }
        }
        self.current = Some(corrected);
    }

    /// Finds a better identity for a state whose recorded behaviour under
    /// `action` contradicts the observation: an existing version whose
    /// branch agrees, else one that has not committed to this action,
    /// else a freshly minted version.
    fn reidentify(&mut self, wrong: StateVersion, action: Action, observed: Sensation) -> StateVersion {
        let max = self.max_version(wrong.sensation);
        for v in 1..=max {
            if v == wrong.version {
                continue;
            }
            let candidate = StateVersion::new(wrong.sensation, v);
            if self
                .branch_dest(candidate, action)
                .is_some_and(|d| d.sensation == observed)
            {
                return candidate;
            }
        }
        // a stored chain may remember the identity even when the live
        // branch has been evicted
        let mut from_chains: BTreeSet<StateVersion> = BTreeSet::new();
        for p in &self.policies {
            if p.malign {
                continue;
            }
            for (k, step) in p.steps.iter().enumerate() {
                if step.action == action
                    && step.root.sensation == wrong.sensation
                    && step.root.version != wrong.version
                    && p.expected_dest(k).sensation == observed
                {
                    from_chains.insert(step.root);
                }
            }
        }
        if from_chains.len() == 1 {
            return from_chains.into_iter().next().expect("len checked");
        }
        for v in 1..=max {
            if v == wrong.version {
                continue;
            }
            let candidate = StateVersion::new(wrong.sensation, v);
            if self.branch_dest(candidate, action).is_none() {
                return candidate;
            }
        }
        self.mint(wrong.sensation)
    }

    /// Multi-step context: when the current version has no commitment for
    /// the executed action, other versions of the same sensation whose
    /// branch explains the observation become candidates, ranked by how
    /// deep a trajectory suffix supports them. A unique best candidate
    /// re-labels the current state.
    fn suffix_match(
        &self,
        from: StateVersion,
        action: Action,
        observed: Sensation,
    ) -> Option<(StateVersion, StateVersion)> {
        let max = self.max_version(from.sensation);
        let mut candidates: Vec<(StateVersion, StateVersion)> = Vec::new();
        for v in 1..=max {
            let root = StateVersion::new(from.sensation, v);
            if let Some(dest) = self.branch_dest(root, action) {
                if dest.sensation == observed {
                    candidates.push((root, dest));
                }
            }
        }
        match candidates.len() {
            0 => None,
            1 => Some(candidates[0]),
            _ => {
                let depth_of = |target: StateVersion| -> usize {
                    let mut want = target;
                    let mut depth = 0;
                    for &(sv, a) in self.trajectory.iter().rev().take(self.lateral.suffix_depth) {
                        // any version of the recorded sensation linking to `want`
                        let linked = (1..=self.max_version(sv.sensation)).find_map(|v| {
                            let root = StateVersion::new(sv.sensation, v);
                            self.branch_dest(root, a)
                                .is_some_and(|d| d == want)
                                .then_some(root)
                        });
                        match linked {
                            Some(root) => {
                                depth += 1;
                                want = root;
                            }
                            None => break,
                        }
                    }
                    depth
                };
                let mut best: Option<(usize, (StateVersion, StateVersion))> = None;
                let mut tied = false;
                for cand in candidates {
                    let d = depth_of(cand.0);
                    match &best {
                        Some((bd, _)) if d < *bd => {}
                        Some((bd, _)) if d == *bd => tied = true,
                        _ => {
                            best = Some((d, cand));
                            tied = false;
                        }
                    }
                }
                match best {
                    Some((_, cand)) if !tied => Some(cand),
                    _ => None,
                }
            }
        }
    }

    /// Chain memory: policies are immutable snapshots of code-path
    /// chains, so they survive branch eviction. A transition
    /// (prev —action→ observed) appearing in stored chains with one
    /// consistent destination version resolves the arrival.
    fn policy_chain_context(
        &self,
        prev: StateVersion,
        action: Action,
        observed: Sensation,
        at_goal: bool,
    ) -> Option<StateVersion> {
        let mut exact: BTreeSet<StateVersion> = BTreeSet::new();
        let mut by_sensation: BTreeSet<StateVersion> = BTreeSet::new();
        for p in &self.policies {
            if p.malign {
                continue;
            }
            for (k, step) in p.steps.iter().enumerate() {
                if step.action != action || step.root.sensation != prev.sensation {
                    continue;
                }
                let dest = p.expected_dest(k);
                if dest.sensation != observed || p.ends_at(k) != at_goal {
                    continue;
                }
                if step.root == prev {
                    exact.insert(dest);
                }
                by_sensation.insert(dest);
            }
        }
        if exact.len() == 1 {
            return exact.into_iter().next();
        }
        if by_sensation.len() == 1 {
            return by_sensation.into_iter().next();
        }
        None
    }

    fn default_dest(&mut self, observed: Sensation, at_goal: bool) -> StateVersion {
        if at_goal {
            if let Some(g) = self
                .goal_versions
                .iter()
                .find(|g| g.sensation == observed)
                .copied()
            {
                return g;
            }
        }
        self.ensure_version1(observed)
    }

    /// Records a completed move: resolves the destination state version
    /// (correcting the current identity when the observation contradicts
    /// its recorded behaviour), updates the code-path store, and advances
    /// the trajectory.
    pub fn record_transition(
        &mut self,
        action: Action,
        observed: Sensation,
        at_goal: bool,
    ) -> StateVersion {
        self.clock += 1;
        let mut from = self.current.expect("positioned");

        if let Some(dest) = self.branch_dest(from, action) {
            if dest.sensation != observed {
                // the stored edge disagrees: our identity was wrong
                let corrected = self.reidentify(from, action, observed);
                self.reassign_current(corrected);
                from = corrected;
            }
        }

        let dest = match self.branch_dest(from, action) {
            Some(d) if d.sensation == observed => d,
            Some(_) => self.default_dest(observed, at_goal),
            None => match self.suffix_match(from, action, observed) {
                Some((root, dest)) => {
                    if root != from {
                        self.reassign_current(root);
                        from = root;
                    }
                    dest
                }
                None => match self.policy_chain_context(from, action, observed, at_goal) {
                    Some(dest) => dest,
                    None => self.default_dest(observed, at_goal),
                },
            },
        };

        self.record_edge(from, action, dest);
        self.trajectory.push((from, action));
        self.current = Some(dest);
        if at_goal {
            self.goal_versions.insert(dest);
        }
        dest
    }

    // ---- policies --------------------------------------------------------

    /// Non-malign policy usable from `sv` with the fewest remaining
    /// steps; ties prefer more successes, then earlier creation.
    pub fn best_policy(&self, sv: StateVersion) -> Option<&Policy> {
        self.best_policy_entry(sv).map(|(i, _)| &self.policies[i])
    }

    fn best_policy_entry(&self, sv: StateVersion) -> Option<(usize, usize)> {
        let mut best: Option<(u32, u32, u64, usize, usize)> = None;
        for (index, p) in self.policies.iter().enumerate() {
            if p.malign {
                continue;
            }
            if let Some(cursor) = p.position_of(sv) {
                let key = (p.remaining(cursor), u32::MAX - p.successes, p.created);
                if best.is_none_or(|(r, s, c, _, _)| (key.0, key.1, key.2) < (r, s, c)) {
                    best = Some((key.0, key.1, key.2, index, cursor));
                }
            }
        }
        best.map(|(_, _, _, index, cursor)| (index, cursor))
    }

    fn try_activate(&mut self) {
        if self.active.is_some() {
            return;
        }
        let Some(sv) = self.current else { return };
        if let Some((index, cursor)) = self.best_policy_entry(sv) {
            self.policies[index].uses += 1;
            self.active = Some(ActivePolicy { index, cursor });
        }
    }

    /// Deactivates and permanently marks the active policy malign.
    /// Reactivation (from the re-resolved current state) is the caller's
    /// next move, so a broken policy never silently keeps control.
    pub fn handle_policy_mismatch(&mut self) {
        if let Some(ap) = self.active.take() {
            self.policies[ap.index].malign = true;
            self.mismatches += 1;
        }
    }

    /// Manually invalidates a stored policy (malign is permanent).
    pub fn mark_policy_malign(&mut self, index: usize) {
        self.policies[index].malign = true;
    }

    /// Chains the goal-reaching trajectory into a policy. Duplicates of a
    /// healthy stored policy are not re-added; a chain that only exists
    /// in malign copies may return as a fresh policy. The store may
    /// overflow until the next `enforce_policy_limit`, so evolution gets
    /// a chance to shorten the raw chain before eviction.
    pub fn imprint_policy(&mut self) -> bool {
        let terminal = self.current.expect("positioned at goal");
        if self.trajectory.is_empty() {
            return false;
        }
        let steps: Vec<PolicyStep> = self
            .trajectory
            .iter()
            .map(|&(root, action)| PolicyStep { root, action })
            .collect();
        let candidate = Policy::new(steps, terminal, self.policy_seq);
        if self
            .policies
            .iter()
            .any(|p| !p.malign && p.same_chain(&candidate))
        {
            return false;
        }
        self.policy_seq += 1;
        self.policies.push(candidate);
        true
    }

    /// Eviction down to the store limit: malign first, then redundant
    /// policies (those that are nowhere the best provider for any state
    /// version they pass through), then longest, then least proven, then
    /// newest. Keeping each state version's best provider preserves
    /// route coverage for distant starts.
    fn enforce_policy_limit(&mut self) {
        while self.policies.len() > self.lateral.policy_limit {
            let mut provider = vec![false; self.policies.len()];
            let mut best: BTreeMap<StateVersion, (u32, u32, u64, usize)> = BTreeMap::new();
            for (index, p) in self.policies.iter().enumerate() {
                if p.malign {
                    continue;
                }
                for step in &p.steps {
                    let cursor = p.position_of(step.root).expect("own root");
                    let key = (p.remaining(cursor), u32::MAX - p.successes, p.created, index);
                    best.entry(step.root)
                        .and_modify(|cur| {
                            if key < *cur {
                                *cur = key;
                            }
                        })
                        .or_insert(key);
                }
            }
            for (_, _, _, index) in best.values() {
                provider[*index] = true;
            }
            let worst = self
                .policies
                .iter()
                .enumerate()
                .max_by_key(|(i, p)| {
                    (
                        p.malign,
                        !provider[*i],
                        p.expected_steps(),
                        u32::MAX - p.successes,
                        p.created,
                    )
                })
                .map(|(i, _)| i)
                .expect("nonempty");
            self.policies.remove(worst);
        }
    }

    fn try_insert_offspring(&mut self, child: Policy) -> bool {
        if self
            .policies
            .iter()
            .any(|p| !p.malign && p.same_chain(&child))
        {
            return false;
        }
        self.policy_seq += 1;
        self.policies.push(child);
        true
    }

    /// All splice points shared by two chains (positions where a root of
    /// `a` equals a root of `b`); for a self-splice only forward pairs.
    fn shared_positions(a: &Policy, b: &Policy, same: bool) -> Vec<(usize, usize)> {
        let mut b_positions: BTreeMap<StateVersion, Vec<usize>> = BTreeMap::new();
        for (j, step) in b.steps.iter().enumerate() {
            b_positions.entry(step.root).or_default().push(j);
        }
        let mut shared = Vec::new();
        for (i, step) in a.steps.iter().enumerate() {
            if let Some(js) = b_positions.get(&step.root) {
                for &j in js {
                    if !same || i < j {
                        shared.push((i, j));
                    }
                }
            }
        }
        shared
    }

    /// Self-splices a policy at repeated state versions until none
    /// remain, inserting the loop-erased chain.
    fn erase_loops(&mut self, index: usize) {
        let mut chain = self.policies[index].clone();
        let mut shortened = false;
        loop {
            let repeats = Self::shared_positions(&chain, &chain, true);
            let Some((i, j)) = repeats.first().copied() else {
                break;
            };
            let Some(child) = splice(&chain, i, &chain, j, self.policy_seq) else {
                break;
            };
            chain = child;
            shortened = true;
        }
        if shortened {
            self.try_insert_offspring(chain);
        }
    }

    /// Evolution: random splice crossovers at shared state versions.
    /// The newest chain is loop-erased first (a policy spliced with
    /// itself where a state version repeats), then crossover attempts
    /// run, half of them anchored on the newest policy. Offspring no
    /// shorter than both parents, or duplicating a healthy policy, are
    /// discarded; afterwards the store is trimmed back to its limit.
    pub fn evolve_policies<R: Rng>(&mut self, rng: &mut R) {
        if let Some(newest) = self.policies.iter().rposition(|p| !p.malign) {
            self.erase_loops(newest);
        }
        for attempt in 0..self.lateral.evolve_attempts {
            let healthy: Vec<usize> = (0..self.policies.len())
                .filter(|&i| !self.policies[i].malign)
                .collect();
            if healthy.is_empty() {
                break;
            }
            let i1 = if attempt % 2 == 0 {
                *healthy.last().expect("nonempty")
            } else {
                healthy[rng.gen_range(0..healthy.len())]
            };
            let i2 = healthy[rng.gen_range(0..healthy.len())];
            let (a, b) = (&self.policies[i1], &self.policies[i2]);
            let shared = Self::shared_positions(a, b, i1 == i2);
            if shared.is_empty() {
                continue;
            }
            let (i, j) = shared[rng.gen_range(0..shared.len())];
            let Some(child) = splice(a, i, b, j, self.policy_seq) else {
                continue;
            };
            if child.expected_steps() >= a.expected_steps()
                && child.expected_steps() >= b.expected_steps()
            {
                continue;
            }
            self.try_insert_offspring(child);
        }
        self.enforce_policy_limit();
    }

    // ---- trials -----------------------------------------------------------

    /// One trial: random start, sense → resolve identity → act → record →
    /// reinforce, until the goal or the step cap. Explore trials pick
    /// random actions and, on success, imprint a policy and evolve the
    /// store; exploit trials follow the best applicable policy and fall
    /// back to the rules.
    pub fn run_trial<R: Rng>(
        &mut self,
        grid: &MazeGrid,
        mode: TrialMode,
        step_cap: u32,
        rng: &mut R,
    ) -> TrialRecord {
        let start = grid.random_start(rng);
        self.run_trial_from(grid, start, mode, step_cap, rng)
    }

    /// Runs a trial from a fixed start cell.
    pub fn run_trial_from<R: Rng>(
        &mut self,
        grid: &MazeGrid,
        start: maze_env::Position,
        mode: TrialMode,
        step_cap: u32,
        rng: &mut R,
    ) -> TrialRecord {
        let trial = self.trials;
        self.trials += 1;
        let params = self.params.clone();
        let explore = mode == TrialMode::Explore;

        let mut pos = start;
        self.begin_trial_at(grid.sense(pos).expect("open start"));

        let mut previous: Option<(Vec<u64>, f64, Sensation)> = None;
        let mut steps = 0u32;
        let reached;
        let mut exploit_steps = 0u64;
        let mut agreements = 0u64;

        loop {
            let sensed = grid.sense(pos).expect("agent stays on open cells");
            debug_assert_eq!(Some(sensed), self.current.map(|sv| sv.sensation));
            if !explore {
                self.try_activate();
            }
            let match_set = self.population.match_and_cover(sensed, trial, &params, rng);
            let pa = self.population.prediction_array(&match_set);
            if let Some((aset, reward, prev_sensed)) = previous.take() {
                let payoff = reward + params.discount * pa.best_value().unwrap_or(0.0);
                self.population.reinforce(&aset, payoff, &params);
                if explore {
                    self.population.run_ga(&aset, prev_sensed, trial, &params, rng);
                }
            }

            let action = if explore {
                pa.select(SelectionMode::Explore, rng)
            } else {
                let best_rule = pa.best_action().expect("covering leaves no gaps");
                let policy_action = self
                    .active
                    .map(|ap| self.policies[ap.index].steps[ap.cursor].action);
                let (action, cognate) = exploit_choice(best_rule, policy_action);
                self.cognate = cognate;
                exploit_steps += 1;
                if cognate {
                    agreements += 1;
                }
                action
            };

            let action_set = self.population.action_set(&match_set, action);
            let result = grid.step(pos, action);
            steps += 1;
            let reward = if result.reached_goal { GOAL_REWARD } else { 0.0 };

            if result.moved {
                let observed = grid.sense(result.position).expect("moved to open cell");
                self.arrive(action, observed, result.reached_goal);
            } else if self.active.is_some() {
                // the policy prescribed a blocked move
                self.handle_policy_mismatch();
                self.try_activate();
            }

            if result.reached_goal || steps >= step_cap {
                self.population.reinforce(&action_set, reward, &params);
                if explore {
                    self.population.run_ga(&action_set, sensed, trial, &params, rng);
                }
                reached = result.reached_goal;
                break;
            }
            previous = Some((action_set, reward, sensed));
            pos = result.position;
        }

        if explore && reached {
            self.imprint_policy();
            self.evolve_policies(rng);
        }
        self.active = None;

        TrialRecord {
            steps,
            reached_goal: reached,
            cognate_rate: if exploit_steps == 0 {
                1.0
            } else {
                agreements as f64 / exploit_steps as f64
            },
        }
    }

    /// Post-move bookkeeping. With an active policy the predicted state
    /// version is adopted when the observation confirms it; any
    /// divergence marks the policy malign and falls back to free
    /// resolution plus re-planning.
    fn arrive(&mut self, action: Action, observed: Sensation, at_goal: bool) {
        if let Some(ap) = self.active {
            let policy = &self.policies[ap.index];
            debug_assert_eq!(policy.steps[ap.cursor].action, action);
            let expected = policy.expected_dest(ap.cursor);
            let expects_goal = policy.ends_at(ap.cursor);
            if expected.sensation == observed && expects_goal == at_goal {
                self.clock += 1;
                let from = self.current.expect("positioned");
                self.record_edge(from, action, expected);
                self.trajectory.push((from, action));
                self.current = Some(expected);
                if at_goal {
                    self.goal_versions.insert(expected);
                    self.policies[ap.index].successes += 1;
                    self.active = None;
                } else {
                    self.active = Some(ActivePolicy {
                        index: ap.index,
                        cursor: ap.cursor + 1,
                    });
                }
                return;
            }
            self.handle_policy_mismatch();
            self.record_transition(action, observed, at_goal);
            self.try_activate();
            return;
        }
        self.record_transition(action, observed, at_goal);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(text: &str) -> Sensation {
        text.parse().unwrap()
    }

    fn sv(text: &str, v: u16) -> StateVersion {
        StateVersion::new(s(text), v)
    }

    fn agent() -> HetroAgent {
        HetroAgent::new(XcsParams::default(), LateralParams::default())
    }

    #[test]
    fn first_transition_builds_the_first_code_path() {
        let mut a = agent();
        a.begin_trial_at(s("00100000"));
        let dest = a.record_transition(Action::new(2), s("00100010"), false);
        assert_eq!(dest, sv("00100010", 1));
        let cp = a.code_path(sv("00100000", 1)).unwrap();
        assert_eq!(cp.branch(Action::new(2)).unwrap().dest, dest);
    }

    #[test]
    fn repeating_a_transition_changes_nothing() {
        let shape = |a: &HetroAgent| -> Vec<(StateVersion, Vec<(Action, StateVersion)>)> {
            a.code_paths()
                .map(|cp| {
                    (
                        cp.root,
                        cp.branches().iter().map(|b| (b.action, b.dest)).collect(),
                    )
                })
                .collect()
        };
        let mut a = agent();
        a.begin_trial_at(s("00100000"));
        a.record_transition(Action::new(2), s("00100010"), false);
        let snapshot = shape(&a);
        a.begin_trial_at(s("00100000"));
        a.record_transition(Action::new(2), s("00100010"), false);
        assert_eq!(shape(&a), snapshot);
        assert_eq!(a.max_version(s("00100010")), 1);
    }

    #[test]
    fn contradiction_mints_a_second_version() {
        let mut a = agent();
        // context A: from the east-pocket, east leads to a corridor cell
        // whose east exit shows one face
        a.begin_trial_at(s("00100000"));
        a.record_transition(Action::new(2), s("00100010"), false);
        a.record_transition(Action::new(2), s("01000000"), false);
        // context B: same corridor sensation, east exit shows another face
        a.begin_trial_at(s("00100010"));
        let dest = a.record_transition(Action::new(2), s("00000110"), false);
        assert_eq!(dest.sensation, s("00000110"));
        // the corridor sensation needed splitting
        assert_eq!(a.max_version(s("00100010")), 2);
        // versions are minted densely: 1 then 2
        assert_eq!(a.max_version(s("01000000")), 1);
    }

    #[test]
    fn predecessor_context_resolves_aliased_versions() {
        let mut a = agent();
        // route 1 enters the aliased sensation from predecessor P1
        a.begin_trial_at(s("10000000"));
        let via_p1 = a.record_transition(Action::new(0), s("00100010"), false);
        a.record_transition(Action::new(2), s("01000000"), false);
        // route 2 enters it from predecessor P2 and behaves differently
        a.begin_trial_at(s("00000100"));
        let via_p2 = a.record_transition(Action::new(4), s("00100010"), false);
        let dest2 = a.record_transition(Action::new(2), s("00011000"), false);
        assert_eq!(dest2.sensation, s("00011000"));
        // after learning, re-entering by each predecessor yields each version
        a.begin_trial_at(s("10000000"));
        let again1 = a.record_transition(Action::new(0), s("00100010"), false);
        a.begin_trial_at(s("00000100"));
        let again2 = a.record_transition(Action::new(4), s("00100010"), false);
        assert_eq!(again1, via_p1);
        assert_eq!(again2, a.current_state().unwrap());
        assert_ne!(again1, again2);
        // the misidentified first pass got re-labelled, so route 2's entry
        // now resolves to the corrected version
        assert_eq!(again2.sensation, via_p2.sensation);
    }

    #[test]
    fn unaliased_walks_never_mint_higher_versions() {
        let mut a = agent();
        for _ in 0..10 {
            a.begin_trial_at(s("00100000"));
            a.record_transition(Action::new(2), s("00100010"), false);
            a.record_transition(Action::new(2), s("00000010"), true);
        }
        for sensed in ["00100000", "00100010", "00000010"] {
            assert_eq!(a.max_version(s(sensed)), 1, "{sensed}");
        }
    }

    #[test]
    fn imprint_deduplicates_identical_chains() {
        let mut a = agent();
        a.begin_trial_at(s("00100000"));
        a.record_transition(Action::new(2), s("00100010"), false);
        a.record_transition(Action::new(2), s("00000010"), true);
        assert!(a.imprint_policy());
        // identical second walk
        a.begin_trial_at(s("00100000"));
        a.record_transition(Action::new(2), s("00100010"), false);
        a.record_transition(Action::new(2), s("00000010"), true);
        assert!(!a.imprint_policy());
        assert_eq!(a.policies().len(), 1);
        assert_eq!(a.policies()[0].expected_steps(), 2);
    }

    #[test]
    fn diverging_chains_imprint_separately() {
        let mut a = agent();
        a.begin_trial_at(s("00100000"));
        a.record_transition(Action::new(2), s("00100010"), false);
        a.record_transition(Action::new(2), s("00000010"), true);
        assert!(a.imprint_policy());
        a.begin_trial_at(s("00100000"));
        a.record_transition(Action::new(1), s("01000000"), false);
        a.record_transition(Action::new(2), s("00000010"), true);
        assert!(a.imprint_policy());
        assert_eq!(a.policies().len(), 2);
    }

    #[test]
    fn best_policy_prefers_short_healthy_routes() {
        let mut a = agent();
        assert!(a.best_policy(sv("00100000", 1)).is_none());

        // long route: 7 distinct hops to the goal
        a.begin_trial_at(s("00100000"));
        a.record_transition(Action::new(0), s("11000000"), false);
        a.record_transition(Action::new(1), s("10100000"), false);
        a.record_transition(Action::new(2), s("01100000"), false);
        a.record_transition(Action::new(3), s("10010000"), false);
        a.record_transition(Action::new(4), s("01010000"), false);
        a.record_transition(Action::new(5), s("00110000"), false);
        a.record_transition(Action::new(6), s("00000010"), true);
        assert!(a.imprint_policy());
        // short route: 2 steps
        a.begin_trial_at(s("00100000"));
        a.record_transition(Action::new(7), s("00100010"), false);
        a.record_transition(Action::new(2), s("00000010"), true);
        assert!(a.imprint_policy());

        let best = a.best_policy(sv("00100000", 1)).unwrap();
        assert_eq!(best.expected_steps(), 2);
    }

    #[test]
    fn malign_policies_are_excluded_from_selection() {
        let mut a = agent();
        a.begin_trial_at(s("00100000"));
        a.record_transition(Action::new(2), s("00100010"), false);
        a.record_transition(Action::new(2), s("00000010"), true);
        a.imprint_policy();
        a.begin_trial_at(s("00100000"));
        for _ in 0..2 {
            a.record_transition(Action::new(1), s("01000000"), false);
            a.record_transition(Action::new(5), s("00100000"), false);
        }
        a.record_transition(Action::new(2), s("00100010"), false);
        a.record_transition(Action::new(2), s("00000010"), true);
        a.imprint_policy();
        assert_eq!(a.policies().len(), 2);
        // poison the 2-step one
        let short = a
            .policies
            .iter()
            .position(|p| p.expected_steps() == 2)
            .unwrap();
        a.policies[short].malign = true;
        let best = a.best_policy(sv("00100000", 1)).unwrap();
        assert_eq!(best.expected_steps(), 6);
    }

    #[test]
    fn exploit_choice_is_policy_first() {
        let (a, cognate) = exploit_choice(Action::new(2), Some(Action::new(2)));
        assert_eq!((a, cognate), (Action::new(2), true));
        let (a, cognate) = exploit_choice(Action::new(2), Some(Action::new(6)));
        assert_eq!((a, cognate), (Action::new(6), false));
        let (a, cognate) = exploit_choice(Action::new(4), None);
        assert_eq!((a, cognate), (Action::new(4), true));
    }

    #[test]
    fn evolution_splices_at_shared_versions() {
        let mut a = agent();
        a.lateral.evolve_attempts = 200;
        // long way to X then quick finish: start -> X in 3, X -> goal in 2
        a.begin_trial_at(s("00000001"));
        a.record_transition(Action::new(1), s("01000000"), false);
        a.record_transition(Action::new(2), s("00110000"), false);
        a.record_transition(Action::new(3), s("11000000"), false); // X
        a.record_transition(Action::new(4), s("00001100"), false);
        a.record_transition(Action::new(4), s("00000010"), true);
        assert!(a.imprint_policy());
        // quick way to X then slow finish: start -> X in 1, X -> goal in 4
        a.begin_trial_at(s("00000001"));
        a.record_transition(Action::new(6), s("11000000"), false); // X
        a.record_transition(Action::new(5), s("00010001"), false);
        a.record_transition(Action::new(5), s("01100000"), false);
        a.record_transition(Action::new(6), s("00001100"), false);
        a.record_transition(Action::new(4), s("00000010"), true);
        assert!(a.imprint_policy());

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        a.evolve_policies(&mut rng);
        let best = a.best_policy(sv("00000001", 1)).unwrap();
        // quick prefix + quick suffix: 1 + 2 = 3 steps
        assert_eq!(best.expected_steps(), 3);
    }

    #[test]
    fn evolution_without_shared_versions_is_a_no_op() {
        let mut a = agent();
        a.begin_trial_at(s("00000001"));
        a.record_transition(Action::new(2), s("01000000"), false);
        a.record_transition(Action::new(2), s("00000010"), true);
        a.imprint_policy();
        a.begin_trial_at(s("10000000"));
        a.record_transition(Action::new(4), s("00001000"), false);
        a.record_transition(Action::new(4), s("00000010"), true);
        a.imprint_policy();
        // the only shared root is none; chains share the goal terminal only
        let before = a.policies().len();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        a.evolve_policies(&mut rng);
        assert_eq!(a.policies().len(), before);
    }

    #[test]
    fn version_numbers_are_dense() {
        let mut a = agent();
        // force several contradictions on one sensation
        let aliased = "00100010";
        for (i, face) in ["01000000", "00000110", "00011000", "10000001"]
            .iter()
            .enumerate()
        {
            a.begin_trial_at(s(aliased));
            a.record_transition(Action::new(2), s(face), false);
            let expect = (i + 1) as u16;
            assert_eq!(a.max_version(s(aliased)), expect);
        }
        // no gaps: every version from 1..=max is addressable
        for v in 1..=a.max_version(s(aliased)) {
            let root = sv(aliased, v);
            assert!(a.code_path(root).is_some(), "version {v} has no code path");
        }
    }
}
