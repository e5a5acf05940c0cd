//! Index-aligned series and the anomaly segments they contain.

use crate::error::{Error, Result};

/// Ground-truth anomaly labels, one per timestamp.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSeries {
    values: Vec<bool>,
}

impl LabelSeries {
    /// Builds a label series from `0`/`1` values. Anything else is rejected.
    pub fn new<T: Into<f64> + Copy>(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        let values = values
            .iter()
            .enumerate()
            .map(|(index, &v)| match v.into() {
                0.0 => Ok(false),
                1.0 => Ok(true),
                value => Err(Error::InvalidLabel { index, value }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values })
    }

    pub fn from_bools(values: Vec<bool>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.values
    }

    pub fn is_anomaly(&self, t: usize) -> bool {
        self.values[t]
    }

    pub fn anomaly_count(&self) -> usize {
        self.values.iter().filter(|&&v| v).count()
    }

    /// Fraction of anomalous timestamps.
    pub fn anomaly_ratio(&self) -> f64 {
        self.anomaly_count() as f64 / self.len() as f64
    }

    pub fn segments(&self) -> Vec<AnomalySegment> {
        extract_segments(self)
    }

    pub(crate) fn check_len(&self, other: usize) -> Result<()> {
        if self.len() != other {
            return Err(Error::LengthMismatch {
                labels: self.len(),
                other,
            });
        }
        Ok(())
    }
}

/// Raw detector scores; larger means more anomalous.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSeries {
    values: Vec<f64>,
}

impl ScoreSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteScore { index });
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// Detector decisions: hard 0/1 flags, or a probability of anomaly per
/// timestamp.
#[derive(Debug, Clone, PartialEq)]
pub enum PredictionSeries {
    Binary(Vec<bool>),
    /// `values[t]` is the probability that `t` is predicted anomalous.
    Probabilistic(Vec<f64>),
}

impl PredictionSeries {
    pub fn binary<T: Into<f64> + Copy>(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        values
            .iter()
            .enumerate()
            .map(|(index, &v)| match v.into() {
                0.0 => Ok(false),
                1.0 => Ok(true),
                value => Err(Error::InvalidBinary { index, value }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::Binary)
    }

    pub fn probabilistic(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::ProbabilityOutOfRange { index, value });
        }
        Ok(Self::Probabilistic(values))
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Binary(v) => v.len(),
            Self::Probabilistic(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, Self::Binary(_))
    }

    pub fn as_binary(&self) -> Option<&[bool]> {
        match self {
            Self::Binary(v) => Some(v),
            Self::Probabilistic(_) => None,
        }
    }

    /// Probability of an anomaly prediction at `t`; binary flags map to 0 or 1.
    pub fn anomaly_probability(&self, t: usize) -> f64 {
        match self {
            Self::Binary(v) => f64::from(u8::from(v[t])),
            Self::Probabilistic(v) => v[t],
        }
    }

    /// Widens a binary series to the probabilistic representation.
    pub fn to_probabilistic(&self) -> Self {
        match self {
            Self::Binary(v) => Self::Probabilistic(v.iter().map(|&b| f64::from(u8::from(b))).collect()),
            Self::Probabilistic(v) => Self::Probabilistic(v.clone()),
        }
    }
}

/// One maximal run of anomalous timestamps, `start..=end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AnomalySegment {
    pub start: usize,
    pub end: usize,
}

impl AnomalySegment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: usize) -> bool {
        (self.start..=self.end).contains(&t)
    }

    pub fn range(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

/// Maximal runs of 1s in `labels`, sorted by start.
pub fn extract_segments(labels: &LabelSeries) -> Vec<AnomalySegment> {
    let mut segments = Vec::new();
    let mut open: Option<usize> = None;
    for (t, &anomalous) in labels.as_slice().iter().enumerate() {
        match (anomalous, open) {
            (true, None) => open = Some(t),
            (false, Some(start)) => {
                segments.push(AnomalySegment { start, end: t - 1 });
                open = None;
            }
            _ => {}
        }
    }
    if let Some(start) = open {
        segments.push(AnomalySegment {
            start,
            end: labels.len() - 1,
        });
    }
    segments
}
