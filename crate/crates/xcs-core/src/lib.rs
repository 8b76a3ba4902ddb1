//! Accuracy-based learning classifier system over 8-bit sensations and
//! 8 actions. Used standalone as the baseline maze agent and as the
//! rule-learning substrate of the lateralized agent.

mod agent;
mod classifier;
mod params;
mod system;

pub use agent::{TrialMode, TrialRecord, XcsAgent};
pub use classifier::{Classifier, Condition};
pub use params::{ConfigError, XcsParams};
pub use system::{ClassifierId, Population, PredictionArray, SelectionMode};

/// Payoff delivered on goal entry; every other step pays zero.
pub const GOAL_REWARD: f64 = 1000.0;
