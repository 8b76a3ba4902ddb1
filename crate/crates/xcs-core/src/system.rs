use std::collections::BTreeMap;

use maze_env::{Action, Sensation};
use rand::Rng;

use crate::classifier::{Classifier, Condition};
use crate::params::XcsParams;

/// Stable handle to a macroclassifier; ids survive unrelated insertions
/// and deletions, so action sets can be held across steps.
pub type ClassifierId = u64;

/// The rule population. Keyed by insertion id; total numerosity never
/// exceeds the population limit after any operation.
#[derive(Debug, Clone, Default)]
pub struct Population {
    entries: BTreeMap<ClassifierId, Classifier>,
    next_id: ClassifierId,
}

/// Per-action fitness-weighted mean payoff prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionArray {
    entries: [Option<f64>; Action::COUNT],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMode {
    Explore,
    Exploit,
}

impl PredictionArray {
    pub fn entry(&self, a: Action) -> Option<f64> {
        self.entries[a.index() as usize]
    }

    pub fn defined_actions(&self) -> impl Iterator<Item = Action> + '_ {
        Action::all().filter(|a| self.entries[a.index() as usize].is_some())
    }

    /// Highest predicted payoff among defined entries.
    pub fn best_value(&self) -> Option<f64> {
        self.entries
            .iter()
            .flatten()
            .copied()
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
    }

    /// Argmax entry; ties break toward the lowest action index.
    pub fn best_action(&self) -> Option<Action> {
        let mut best: Option<(Action, f64)> = None;
        for a in Action::all() {
            if let Some(v) = self.entries[a.index() as usize] {
                match best {
                    Some((_, bv)) if v <= bv => {}
                    _ => best = Some((a, v)),
                }
            }
        }
        best.map(|(a, _)| a)
    }

    pub fn select<R: Rng>(&self, mode: SelectionMode, rng: &mut R) -> Action {
        match mode {
            SelectionMode::Exploit => self.best_action().expect("empty prediction array"),
            SelectionMode::Explore => {
                let defined: Vec<Action> = self.defined_actions().collect();
                assert!(!defined.is_empty(), "empty prediction array");
                defined[rng.gen_range(0..defined.len())]
            }
        }
    }
}

impl Population {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, id: ClassifierId) -> Option<&Classifier> {
        self.entries.get(&id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClassifierId, &Classifier)> {
        self.entries.iter().map(|(id, cl)| (*id, cl))
    }

    pub fn macro_count(&self) -> usize {
        self.entries.len()
    }

    pub fn total_numerosity(&self) -> u64 {
        self.entries.values().map(|c| u64::from(c.numerosity)).sum()
    }

    /// Inserts a classifier, folding it into an identical existing rule
    /// when possible. Does not enforce the population limit.
    fn insert_raw(&mut self, cl: Classifier) {
        for existing in self.entries.values_mut() {
            if existing.condition == cl.condition && existing.action == cl.action {
                existing.numerosity += cl.numerosity;
                return;
            }
        }
        let id = self.next_id;
        self.next_id += 1;
        self.entries.insert(id, cl);
    }

    /// Direct insertion for tests and checkpoint restore; trims to the
    /// limit afterwards.
    pub fn insert<R: Rng>(&mut self, cl: Classifier, params: &XcsParams, rng: &mut R) {
        self.insert_raw(cl);
        self.enforce_limit(params, rng);
    }

    /// Rebuilds a population from dumped classifiers, keeping their order
    /// as the id order. No limit enforcement: dumps were within limits.
    pub fn restore(classifiers: Vec<Classifier>) -> Self {
        let mut pop = Population::new();
        for cl in classifiers {
            let id = pop.next_id;
            pop.next_id += 1;
            pop.entries.insert(id, cl);
        }
        pop
    }

    /// Roulette deletion until total numerosity fits the limit. Votes are
    /// action-set-size × numerosity, inflated for experienced rules whose
    /// per-copy fitness has fallen below the population average.
    pub fn enforce_limit<R: Rng>(&mut self, params: &XcsParams, rng: &mut R) {
        while self.total_numerosity() > u64::from(params.population_limit) {
            let total_num = self.total_numerosity() as f64;
            let mean_fitness: f64 =
                self.entries.values().map(|c| c.fitness).sum::<f64>() / total_num;
            let vote = |cl: &Classifier| -> f64 {
                let mut v = cl.action_set_size * f64::from(cl.numerosity);
                let per_copy = cl.fitness / f64::from(cl.numerosity);
                if cl.experience > params.deletion_threshold
                    && per_copy < params.deletion_fitness_fraction * mean_fitness
                    && per_copy > 0.0
                {
                    v *= mean_fitness / per_copy;
                }
                v
            };
            let total_vote: f64 = self.entries.values().map(vote).sum();
            let mut point = rng.gen_range(0.0..total_vote.max(f64::MIN_POSITIVE));
            let mut chosen = *self.entries.keys().next_back().expect("nonempty");
            for (id, cl) in &self.entries {
                point -= vote(cl);
                if point <= 0.0 {
                    chosen = *id;
                    break;
                }
            }
            let cl = self.entries.get_mut(&chosen).expect("chosen id");
            if cl.numerosity > 1 {
                cl.numerosity -= 1;
            } else {
                self.entries.remove(&chosen);
            }
        }
    }

    /// Forms the match set for `s`, covering any action that lacks an
    /// advocate. Covering inserts a rule that matches `s`, wildcards drawn
    /// with the configured probability, then re-forms the set (deletion
    /// may have removed members).
    pub fn match_and_cover<R: Rng>(
        &mut self,
        s: Sensation,
        trial: u64,
        params: &XcsParams,
        rng: &mut R,
    ) -> Vec<ClassifierId> {
        loop {
            let matched: Vec<ClassifierId> = self
                .entries
                .iter()
                .filter(|(_, cl)| cl.matches(s))
                .map(|(id, _)| *id)
                .collect();
            let mut advocated = [false; Action::COUNT];
            for id in &matched {
                advocated[self.entries[id].action.index() as usize] = true;
            }
            let missing: Vec<Action> = Action::all()
                .filter(|a| !advocated[a.index() as usize])
                .collect();
            if missing.is_empty() {
                return matched;
            }
            for action in missing {
                let mut condition = Condition::exact(s);
                for i in 0..Condition::LEN {
                    if rng.gen_bool(params.wildcard_prob) {
                        condition.toggle_wildcard(i, s);
                    }
                }
                self.insert_raw(Classifier {
                    condition,
                    action,
                    prediction: params.initial_prediction,
                    error: params.initial_error,
                    fitness: params.initial_fitness,
                    numerosity: 1,
                    experience: 0,
                    action_set_size: 1.0,
                    ga_timestamp: trial,
                });
            }
            self.enforce_limit(params, rng);
        }
    }

    pub fn prediction_array(&self, match_set: &[ClassifierId]) -> PredictionArray {
        let mut weighted = [0.0f64; Action::COUNT];
        let mut weights = [0.0f64; Action::COUNT];
        for id in match_set {
            // ids can go stale when the GA deletes between set formations
            let Some(cl) = self.entries.get(id) else {
                continue;
            };
            let i = cl.action.index() as usize;
            weighted[i] += cl.prediction * cl.fitness;
            weights[i] += cl.fitness;
        }
        let mut entries = [None; Action::COUNT];
        for i in 0..Action::COUNT {
            if weights[i] > 0.0 {
                entries[i] = Some(weighted[i] / weights[i]);
            }
        }
        PredictionArray { entries }
    }

    pub fn action_set(&self, match_set: &[ClassifierId], action: Action) -> Vec<ClassifierId> {
        match_set
            .iter()
            .copied()
            .filter(|id| self.entries.get(id).is_some_and(|cl| cl.action == action))
            .collect()
    }

    /// Widrow-Hoff reinforcement of an action set toward payoff `P`, with
    /// incremental averaging over the first 1/beta updates, then the
    /// relative-accuracy fitness update.
    pub fn reinforce(&mut self, action_set: &[ClassifierId], payoff: f64, params: &XcsParams) {
        let live: Vec<ClassifierId> = action_set
            .iter()
            .copied()
            .filter(|id| self.entries.contains_key(id))
            .collect();
        if live.is_empty() {
            return;
        }
        let set_numerosity: f64 = live
            .iter()
            .map(|id| f64::from(self.entries[id].numerosity))
            .sum();
        let beta = params.learning_rate;
        for id in &live {
            let cl = self.entries.get_mut(id).expect("live id");
            cl.experience += 1;
            let rate = if (f64::from(cl.experience)) < 1.0 / beta {
                1.0 / f64::from(cl.experience)
            } else {
                beta
            };
            cl.error += rate * ((payoff - cl.prediction).abs() - cl.error);
            cl.prediction += rate * (payoff - cl.prediction);
            cl.action_set_size += rate * (set_numerosity - cl.action_set_size);
        }
        // relative accuracy over the set
        let kappa = |cl: &Classifier| -> f64 {
            if cl.error < params.error_threshold {
                1.0
            } else {
                params.accuracy_falloff
                    * (cl.error / params.error_threshold).powf(-params.accuracy_power)
            }
        };
        let accuracy_sum: f64 = live
            .iter()
            .map(|id| {
                let cl = &self.entries[id];
                kappa(cl) * f64::from(cl.numerosity)
            })
            .sum();
        for id in &live {
            let k = kappa(&self.entries[id]);
            let cl = self.entries.get_mut(id).expect("live id");
            let relative = k * f64::from(cl.numerosity) / accuracy_sum;
            cl.fitness += beta * (relative - cl.fitness);
        }
    }

    fn roulette_by_fitness<R: Rng>(&self, set: &[ClassifierId], rng: &mut R) -> ClassifierId {
        let total: f64 = set.iter().map(|id| self.entries[id].fitness).sum();
        let mut point = rng.gen_range(0.0..total.max(f64::MIN_POSITIVE));
        for id in set {
            point -= self.entries[id].fitness;
            if point <= 0.0 {
                return *id;
            }
        }
        *set.last().expect("nonempty set")
    }

    /// Niche GA over an action set: fires when the set's mean timestamp
    /// age exceeds the threshold. Two fitness-roulette parents, uniform
    /// crossover with probability chi, per-symbol mutation toward
    /// {matching bit, '#'}, GA subsumption against the parents, then
    /// insertion and deletion back to the limit.
    pub fn run_ga<R: Rng>(
        &mut self,
        action_set: &[ClassifierId],
        s: Sensation,
        trial: u64,
        params: &XcsParams,
        rng: &mut R,
    ) {
        let live: Vec<ClassifierId> = action_set
            .iter()
            .copied()
            .filter(|id| self.entries.contains_key(id))
            .collect();
        if live.is_empty() {
            return;
        }
        let set_numerosity: f64 = live
            .iter()
            .map(|id| f64::from(self.entries[id].numerosity))
            .sum();
        let mean_timestamp: f64 = live
            .iter()
            .map(|id| {
                let cl = &self.entries[id];
                cl.ga_timestamp as f64 * f64::from(cl.numerosity)
            })
            .sum::<f64>()
            / set_numerosity;
        if trial as f64 - mean_timestamp <= params.ga_threshold {
            return;
        }
        for id in &live {
            self.entries.get_mut(id).expect("live id").ga_timestamp = trial;
        }

        let parent1_id = self.roulette_by_fitness(&live, rng);
        let parent2_id = self.roulette_by_fitness(&live, rng);
        let parent1 = self.entries[&parent1_id].clone();
        let parent2 = self.entries[&parent2_id].clone();

        let mut child1 = parent1.clone();
        let mut child2 = parent2.clone();
        for child in [&mut child1, &mut child2] {
            child.numerosity = 1;
            child.experience = 0;
        }
        if rng.gen_bool(params.crossover_prob) {
            for i in 0..Condition::LEN {
                if rng.gen_bool(0.5) {
                    Condition::swap_symbol(&mut child1.condition, &mut child2.condition, i);
                }
            }
            let mean_p = (parent1.prediction + parent2.prediction) / 2.0;
            let mean_e = (parent1.error + parent2.error) / 2.0;
            let mean_f = (parent1.fitness + parent2.fitness) / 2.0;
            for child in [&mut child1, &mut child2] {
                child.prediction = mean_p;
                child.error = mean_e;
                child.fitness = mean_f;
            }
        }
        for child in [&mut child1, &mut child2] {
            child.fitness *= 0.1;
            for i in 0..Condition::LEN {
                if rng.gen_bool(params.mutation_prob) {
                    child.condition.toggle_wildcard(i, s);
                }
            }
        }

        for child in [child1, child2] {
            let absorbed = [parent1_id, parent2_id].iter().any(|pid| {
                if let Some(parent) = self.entries.get(pid) {
                    parent.subsumes(
                        &child,
                        params.error_threshold,
                        params.subsumption_threshold,
                    )
                } else {
                    false
                }
            });
            if absorbed {
                for pid in [parent1_id, parent2_id] {
                    if let Some(parent) = self.entries.get(&pid) {
                        if parent.subsumes(
                            &child,
                            params.error_threshold,
                            params.subsumption_threshold,
                        ) {
                            self.entries.get_mut(&pid).expect("parent").numerosity += 1;
                            break;
                        }
                    }
                }
            } else {
                self.insert_raw(child);
            }
        }
        self.enforce_limit(params, rng);
    }
}
