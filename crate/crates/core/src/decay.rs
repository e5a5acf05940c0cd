use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weight applied to a segment detected `offset` steps after its start.
///
/// Every valid spec satisfies `at(0) == 1`, is nonincreasing in the offset,
/// and stays within `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecaySpec {
    /// `rate.powi(offset)`.
    Exponential { rate: f64 },
    /// Explicit weights by offset; offsets past the end reuse the last entry.
    Table { weights: Vec<f64> },
}

impl DecaySpec {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::DecayRate(rate));
        }
        Ok(Self::Exponential { rate })
    }

    /// `D == 1` everywhere, which turns PAdf into plain point adjustment.
    pub fn constant() -> Self {
        Self::Exponential { rate: 1.0 }
    }

    pub fn table(weights: Vec<f64>) -> Result<Self> {
        match weights.first() {
            None => return Err(Error::DecayTable("table is empty".into())),
            Some(&first) if first != 1.0 => {
                return Err(Error::DecayTable(format!("first weight must be 1, got {first}")))
            }
            _ => {}
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && **w <= 1.0)) {
            return Err(Error::DecayTable(format!("weight {w} is outside (0, 1]")));
        }
        if let Some(i) = weights.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::DecayTable(format!(
                "weights increase at offset {}",
                i + 1
            )));
        }
        Ok(Self::Table { weights })
    }

    /// Re-checks the invariants, for values built directly or deserialized.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Exponential { rate } => Self::exponential(*rate).map(drop),
            Self::Table { weights } => Self::table(weights.clone()).map(drop),
        }
    }

    pub fn at(&self, offset: usize) -> f64 {
        match self {
            Self::Exponential { rate } => {
                if *rate == 1.0 {
                    1.0
                } else {
                    rate.powi(i32::try_from(offset).unwrap_or(i32::MAX))
                }
            }
            Self::Table { weights } => weights[offset.min(weights.len() - 1)],
        }
    }

    /// The exponential rate, if this is an exponential decay.
    pub fn rate(&self) -> Option<f64> {
        match self {
            Self::Exponential { rate } => Some(*rate),
            Self::Table { .. } => None,
        }
    }
}

impl Default for DecaySpec {
    fn default() -> Self {
        Self::Exponential { rate: 0.9 }
    }
}

/// Free-function form of [`DecaySpec::at`].
pub fn decay_at(spec: &DecaySpec, offset: usize) -> f64 {
    spec.at(offset)
}
