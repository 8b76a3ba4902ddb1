use std::fmt;
use std::path::Path;

use thiserror::Error;

/// The learning parameters, standard names in comments. Loadable from a
/// flat `key=value` config file; every field is overridable by name.
#[derive(Debug, Clone, PartialEq)]
pub struct XcsParams {
    /// N: microclassifier population limit.
    pub population_limit: u32,
    /// beta: Widrow-Hoff learning rate.
    pub learning_rate: f64,
    /// alpha: accuracy falloff multiplier.
    pub accuracy_falloff: f64,
    /// epsilon_0: error below which a rule counts as fully accurate.
    pub error_threshold: f64,
    /// nu: accuracy falloff exponent.
    pub accuracy_power: f64,
    /// gamma: payoff discount per step.
    pub discount: f64,
    /// theta_GA: mean action-set age (in trials) that triggers the GA.
    pub ga_threshold: f64,
    /// chi: crossover probability.
    pub crossover_prob: f64,
    /// mu: per-symbol mutation probability.
    pub mutation_prob: f64,
    /// theta_del: experience before fitness-penalized deletion.
    pub deletion_threshold: u32,
    /// delta: fraction of mean fitness below which deletion is penalized.
    pub deletion_fitness_fraction: f64,
    /// theta_sub: experience before a rule may subsume.
    pub subsumption_threshold: u32,
    /// p_I, epsilon_I, F_I: initial values for covering classifiers.
    pub initial_prediction: f64,
    pub initial_error: f64,
    pub initial_fitness: f64,
    /// Reserved for probabilistic explore/exploit schedules; the shipped
    /// runner alternates modes strictly and does not consult it.
    pub explore_probability: f64,
    /// P_#: wildcard probability during covering.
    pub wildcard_prob: f64,
}

impl Default for XcsParams {
    fn default() -> Self {
        Self {
            population_limit: 2000,
            learning_rate: 0.2,
            accuracy_falloff: 0.1,
            error_threshold: 10.0,
            accuracy_power: 5.0,
            discount: 0.71,
            ga_threshold: 25.0,
            crossover_prob: 0.8,
            mutation_prob: 0.04,
            deletion_threshold: 20,
            deletion_fitness_fraction: 0.1,
            subsumption_threshold: 20,
            initial_prediction: 10.0,
            initial_error: 0.0,
            initial_fitness: 0.01,
            explore_probability: 0.5,
            wildcard_prob: 0.33,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown parameter {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value for {key}: {value:?}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("{key} out of range: {reason}")]
    OutOfRange { key: String, reason: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl XcsParams {
    /// Applies `key = value` lines on top of the defaults. Blank lines
    /// and lines starting with '#' are skipped.
    pub fn from_kv(text: &str) -> Result<Self, ConfigError> {
        let mut params = XcsParams::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                text: trimmed.to_string(),
            })?;
            params.set(key.trim(), value.trim(), line)?;
        }
        params.validate()?;
        Ok(params)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_kv(&text)
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        macro_rules! parse {
            ($ty:ty) => {
                value.parse::<$ty>().map_err(|_| ConfigError::BadValue {
                    line,
                    key: key.to_string(),
                    value: value.to_string(),
                })?
            };
        }
        match key {
            "population_limit" => self.population_limit = parse!(u32),
            "learning_rate" => self.learning_rate = parse!(f64),
            "accuracy_falloff" => self.accuracy_falloff = parse!(f64),
            "error_threshold" => self.error_threshold = parse!(f64),
            "accuracy_power" => self.accuracy_power = parse!(f64),
            "discount" => self.discount = parse!(f64),
            "ga_threshold" => self.ga_threshold = parse!(f64),
            "crossover_prob" => self.crossover_prob = parse!(f64),
            "mutation_prob" => self.mutation_prob = parse!(f64),
            "deletion_threshold" => self.deletion_threshold = parse!(u32),
            "deletion_fitness_fraction" => self.deletion_fitness_fraction = parse!(f64),
            "subsumption_threshold" => self.subsumption_threshold = parse!(u32),
            "initial_prediction" => self.initial_prediction = parse!(f64),
            "initial_error" => self.initial_error = parse!(f64),
            "initial_fitness" => self.initial_fitness = parse!(f64),
            "explore_probability" => self.explore_probability = parse!(f64),
            "wildcard_prob" => self.wildcard_prob = parse!(f64),
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let range_err = |key: &str, reason: String| ConfigError::OutOfRange {
            key: key.to_string(),
            reason,
        };
        if self.population_limit == 0 {
            return Err(range_err("population_limit", "must be positive".into()));
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(range_err(
                "discount",
                format!("{} not in (0,1)", self.discount),
            ));
        }
        for (key, v) in [
            ("learning_rate", self.learning_rate),
            ("crossover_prob", self.crossover_prob),
            ("mutation_prob", self.mutation_prob),
            ("deletion_fitness_fraction", self.deletion_fitness_fraction),
            ("explore_probability", self.explore_probability),
            ("wildcard_prob", self.wildcard_prob),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(range_err(key, format!("{v} not in [0,1]")));
            }
        }
        for (key, v) in [
            ("accuracy_falloff", self.accuracy_falloff),
            ("error_threshold", self.error_threshold),
            ("accuracy_power", self.accuracy_power),
            ("ga_threshold", self.ga_threshold),
            ("initial_prediction", self.initial_prediction),
            ("initial_error", self.initial_error),
            ("initial_fitness", self.initial_fitness),
        ] {
            if v < 0.0 {
                return Err(range_err(key, format!("{v} is negative")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for XcsParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "population_limit={}", self.population_limit)?;
        writeln!(f, "learning_rate={}", self.learning_rate)?;
        writeln!(f, "accuracy_falloff={}", self.accuracy_falloff)?;
        writeln!(f, "error_threshold={}", self.error_threshold)?;
        writeln!(f, "accuracy_power={}", self.accuracy_power)?;
        writeln!(f, "discount={}", self.discount)?;
        writeln!(f, "ga_threshold={}", self.ga_threshold)?;
        writeln!(f, "crossover_prob={}", self.crossover_prob)?;
        writeln!(f, "mutation_prob={}", self.mutation_prob)?;
        writeln!(f, "deletion_threshold={}", self.deletion_threshold)?;
        writeln!(
            f,
            "deletion_fitness_fraction={}",
            self.deletion_fitness_fraction
        )?;
        writeln!(f, "subsumption_threshold={}", self.subsumption_threshold)?;
        writeln!(f, "initial_prediction={}", self.initial_prediction)?;
        writeln!(f, "initial_error={}", self.initial_error)?;
        writeln!(f, "initial_fitness={}", self.initial_fitness)?;
        writeln!(f, "explore_probability={}", self.explore_probability)?;
        writeln!(f, "wildcard_prob={}", self.wildcard_prob)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_pass_validation() {
        XcsParams::default().validate().unwrap();
    }

    #[test]
    fn kv_overrides_apply() {
        let p = XcsParams::from_kv("population_limit = 500\n# comment\n\ndiscount=0.9\n").unwrap();
        assert_eq!(p.population_limit, 500);
        assert_eq!(p.discount, 0.9);
        assert_eq!(p.learning_rate, XcsParams::default().learning_rate);
    }

    #[test]
    fn unknown_key_is_reported_with_line() {
        let err = XcsParams::from_kv("nope=1\n").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { line: 1, .. }));
    }

    #[test]
    fn bad_range_is_rejected() {
        assert!(XcsParams::from_kv("discount=1.5\n").is_err());
        assert!(XcsParams::from_kv("mutation_prob=-0.1\n").is_err());
        assert!(XcsParams::from_kv("population_limit=0\n").is_err());
    }

    #[test]
    fn display_round_trips_through_from_kv() {
        let mut p = XcsParams::default();
        p.population_limit = 750;
        p.wildcard_prob = 0.5;
        let q = XcsParams::from_kv(&p.to_string()).unwrap();
        assert_eq!(p, q);
    }
}
