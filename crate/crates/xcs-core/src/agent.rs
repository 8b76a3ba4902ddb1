use maze_env::MazeGrid;
use rand::Rng;

use crate::params::XcsParams;
use crate::system::{Population, SelectionMode};
use crate::GOAL_REWARD;

/// Trial modes: random action choice vs greedy. Trials alternate
/// strictly; learning updates run in both, the GA only in explore.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialMode {
    Explore,
    Exploit,
}

impl TrialMode {
    pub fn selection(self) -> SelectionMode {
        match self {
            TrialMode::Explore => SelectionMode::Explore,
            TrialMode::Exploit => SelectionMode::Exploit,
        }
    }
}

/// Outcome of one trial. `cognate_rate` is the fraction of exploit steps
/// where the rule-based choice and the active policy agreed; the baseline
/// has no policies, so every step counts as agreement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub steps: u32,
    pub reached_goal: bool,
    pub cognate_rate: f64,
}

/// The baseline agent: a rule population and a trial counter.
#[derive(Debug, Clone)]
pub struct XcsAgent {
    pub population: Population,
    pub params: XcsParams,
    trials: u64,
}

impl XcsAgent {
    pub fn new(params: XcsParams) -> Self {
        Self {
            population: Population::new(),
            params,
            trials: 0,
        }
    }

    pub fn trials_run(&self) -> u64 {
        self.trials
    }

    /// One trial from a random start: sense, act, reinforce the previous
    /// action set with the discounted lookahead, until the goal or the
    /// step cap. Capped trials record the cap as their step count.
    pub fn run_trial<R: Rng>(
        &mut self,
        grid: &MazeGrid,
        mode: TrialMode,
        step_cap: u32,
        rng: &mut R,
    ) -> TrialRecord {
        let trial = self.trials;
        self.trials += 1;
        let params = self.params.clone();
        let ga_active = mode == TrialMode::Explore;

        let mut pos = grid.random_start(rng);
        let mut previous: Option<(Vec<u64>, f64, maze_env::Sensation)> = None;
        let mut steps = 0u32;
        let reached;

        loop {
            let sensed = grid.sense(pos).expect("agent stays on open cells");
            let match_set = self
                .population
                .match_and_cover(sensed, trial, &params, rng);
            let pa = self.population.prediction_array(&match_set);
            if let Some((aset, reward, prev_sensed)) = previous.take() {
                let payoff = reward + params.discount * pa.best_value().unwrap_or(0.0);
                self.population.reinforce(&aset, payoff, &params);
                if ga_active {
                    self.population
                        .run_ga(&aset, prev_sensed, trial, &params, rng);
                }
            }
            let action = pa.select(mode.selection(), rng);
            let action_set = self.population.action_set(&match_set, action);
            let result = grid.step(pos, action);
            steps += 1;
            let reward = if result.reached_goal { GOAL_REWARD } else { 0.0 };

            if result.reached_goal || steps >= step_cap {
                self.population.reinforce(&action_set, reward, &params);
                if ga_active {
                    self.population
                        .run_ga(&action_set, sensed, trial, &params, rng);
                }
                reached = result.reached_goal;
                break;
            }
            previous = Some((action_set, reward, sensed));
            pos = result.position;
        }

        TrialRecord {
            steps,
            reached_goal: reached,
            cognate_rate: 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use maze_env::corpus;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn untrained_trial_is_well_formed() {
        let grid = corpus::load("sample");
        let mut agent = XcsAgent::new(XcsParams::default());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rec = agent.run_trial(&grid, TrialMode::Explore, 100, &mut rng);
        assert!(rec.steps >= 1 && rec.steps <= 100);
        assert!(agent.population.total_numerosity() > 0);
    }

    #[test]
    fn identical_seeds_give_identical_records() {
        let grid = corpus::load("sample");
        let run = |seed: u64| {
            let mut agent = XcsAgent::new(XcsParams::default());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..40)
                .map(|i| {
                    let mode = if i % 2 == 0 {
                        TrialMode::Explore
                    } else {
                        TrialMode::Exploit
                    };
                    agent.run_trial(&grid, mode, 100, &mut rng)
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(9), run(9));
        assert_ne!(run(9), run(10));
    }
}
