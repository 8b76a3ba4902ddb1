use std::fmt;
use std::str::FromStr;

use maze_env::{Action, Sensation};

/// 8-symbol ternary condition over {0, 1, #}, packed into two bitmasks:
/// `care` marks non-wildcard positions, `bits` holds their required
/// values. Position i corresponds to sensation bit i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Condition {
    care: u8,
    bits: u8,
}

impl Condition {
    pub const LEN: usize = 8;

    pub fn new(care: u8, bits: u8) -> Self {
        Self {
            care,
            bits: bits & care,
        }
    }

    /// Fully-wildcard condition, matches every sensation.
    pub fn any() -> Self {
        Self { care: 0, bits: 0 }
    }

    /// Exact condition matching only `s`.
    pub fn exact(s: Sensation) -> Self {
        Self {
            care: 0xff,
            bits: s.bits(),
        }
    }

    pub fn matches(&self, s: Sensation) -> bool {
        (s.bits() ^ self.bits) & self.care == 0
    }

    pub fn is_wildcard(&self, i: usize) -> bool {
        self.care & (1 << i) == 0
    }

    pub fn wildcard_count(&self) -> u32 {
        self.care.count_zeros()
    }

    /// Flips position i between '#' and the bit that matches `s` there.
    pub fn toggle_wildcard(&mut self, i: usize, s: Sensation) {
        let mask = 1 << i;
        if self.care & mask == 0 {
            self.care |= mask;
            if s.bits() & mask != 0 {
                self.bits |= mask;
            } else {
                self.bits &= !mask;
            }
        } else {
            self.care &= !mask;
            self.bits &= !mask;
        }
    }

    /// Swaps position i between two conditions (uniform crossover step).
    pub fn swap_symbol(a: &mut Condition, b: &mut Condition, i: usize) {
        let mask = 1u8 << i;
        let (ac, ab) = (a.care & mask, a.bits & mask);
        let (bc, bb) = (b.care & mask, b.bits & mask);
        a.care = (a.care & !mask) | bc;
        a.bits = (a.bits & !mask) | bb;
        b.care = (b.care & !mask) | ac;
        b.bits = (b.bits & !mask) | ab;
    }

    /// True when `self` matches strictly more sensations than `other`
    /// while agreeing wherever both care.
    pub fn is_more_general(&self, other: &Condition) -> bool {
        self.care != other.care
            && self.care & !other.care == 0
            && (self.bits ^ other.bits) & self.care == 0
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..8 {
            let mask = 1 << i;
            let ch = if self.care & mask == 0 {
                '#'
            } else if self.bits & mask != 0 {
                '1'
            } else {
                '0'
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() != 8 {
            return Err(format!("condition must be 8 chars, got {:?}", s));
        }
        let (mut care, mut bits) = (0u8, 0u8);
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '#' => {}
                '0' => care |= 1 << i,
                '1' => {
                    care |= 1 << i;
                    bits |= 1 << i;
                }
                other => return Err(format!("invalid condition char {other:?}")),
            }
        }
        Ok(Condition { care, bits })
    }
}

/// One rule with the usual accuracy-based bookkeeping. `numerosity`
/// copies share the entry (macroclassifier).
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    pub condition: Condition,
    pub action: Action,
    pub prediction: f64,
    pub error: f64,
    pub fitness: f64,
    pub numerosity: u32,
    pub experience: u32,
    pub action_set_size: f64,
    pub ga_timestamp: u64,
}

impl Classifier {
    pub fn matches(&self, s: Sensation) -> bool {
        self.condition.matches(s)
    }

    /// Accurate and experienced enough to absorb more specific rules.
    pub fn could_subsume(&self, error_threshold: f64, subsumption_threshold: u32) -> bool {
        self.experience > subsumption_threshold && self.error < error_threshold
    }

    pub fn subsumes(
        &self,
        other: &Classifier,
        error_threshold: f64,
        subsumption_threshold: u32,
    ) -> bool {
        self.action == other.action
            && self.could_subsume(error_threshold, subsumption_threshold)
            && self.condition.is_more_general(&other.condition)
    }
}
