//! Effective confusion counts under the raw, PA, PA%K and PAdf protocols.
//!
//! Every protocol reduces to an [`EffectiveCounts`]: a (possibly fractional)
//! true-positive mass `eTP`, a false-positive mass `eFP`, and the
//! protocol-adjusted number of predicted-positive anomaly points that sits in
//! the precision denominator next to `eFP`.
//!
//! Adjustment only ever flips points inside ground-truth segments, so `eFP`
//! is always counted on the unadjusted predictions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decay::DecaySpec;
use crate::error::{Error, Result};
use crate::series::{AnomalySegment, LabelSeries, PredictionSeries};

/// How PAdf fills the precision numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecisionMode {
    /// `eTP / (adjusted_positives + eFP)`: precision decays with recall.
    #[default]
    Decayed,
    /// `adjusted_positives / (adjusted_positives + eFP)`: PA-style precision,
    /// only recall decays.
    Adjusted,
}

impl PrecisionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Decayed => "decayed",
            Self::Adjusted => "adjusted",
        }
    }
}

impl std::str::FromStr for PrecisionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decayed" => Ok(Self::Decayed),
            "adjusted" => Ok(Self::Adjusted),
            other => Err(Error::InvalidParameter(format!(
                "unknown precision mode {other:?} (expected decayed or adjusted)"
            ))),
        }
    }
}

pub const DEFAULT_K: f64 = 20.0;
pub const DEFAULT_DECAY_RATE: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "snake_case")]
pub enum Protocol {
    Raw,
    #[serde(rename = "pa")]
    PointAdjust,
    #[serde(rename = "pak")]
    PaK { k: f64 },
    Padf {
        decay: DecaySpec,
        precision_mode: PrecisionMode,
    },
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Raw => "raw",
            Self::PointAdjust => "pa",
            Self::PaK { .. } => "pak",
            Self::Padf { .. } => "padf",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Raw | Self::PointAdjust => Ok(()),
            Self::PaK { k } => check_k(*k),
            Self::Padf { decay, .. } => decay.validate(),
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Raw | Self::PointAdjust => f.write_str(self.name()),
            Self::PaK { k } => write!(f, "pak(k={k})"),
            Self::Padf {
                decay,
                precision_mode,
            } => match decay {
                DecaySpec::Exponential { rate } => {
                    write!(f, "padf(d={rate},{})", precision_mode.as_str())
                }
                DecaySpec::Table { .. } => write!(f, "padf(table,{})", precision_mode.as_str()),
            },
        }
    }
}

/// A protocol together with the F-beta weight used to summarize it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    #[serde(flatten)]
    pub protocol: Protocol,
    pub beta: f64,
}

impl ProtocolConfig {
    pub fn new(protocol: Protocol) -> Result<Self> {
        protocol.validate()?;
        Ok(Self {
            protocol,
            beta: 1.0,
        })
    }

    pub fn raw() -> Self {
        Self {
            protocol: Protocol::Raw,
            beta: 1.0,
        }
    }

    pub fn point_adjust() -> Self {
        Self {
            protocol: Protocol::PointAdjust,
            beta: 1.0,
        }
    }

    pub fn pak(k: f64) -> Result<Self> {
        Self::new(Protocol::PaK { k })
    }

    /// PAdf with exponential decay `d` and decayed precision.
    pub fn padf(d: f64) -> Result<Self> {
        Self::padf_with(DecaySpec::exponential(d)?, PrecisionMode::Decayed)
    }

    pub fn padf_with(decay: DecaySpec, precision_mode: PrecisionMode) -> Result<Self> {
        Self::new(Protocol::Padf {
            decay,
            precision_mode,
        })
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        self.beta = beta;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_beta(self.beta)?;
        self.protocol.validate()
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::Beta(beta))
    }
}

fn check_k(k: f64) -> Result<()> {
    if (0.0..=100.0).contains(&k) {
        Ok(())
    } else {
        Err(Error::KOutOfRange(k))
    }
}

/// Real-valued confusion totals produced by a protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCounts {
    /// eTP.
    pub true_positive: f64,
    /// eFP, always measured outside the ground-truth segments.
    pub false_positive: f64,
    /// Protocol-adjusted predicted-positive anomaly points.
    pub adjusted_positives: f64,
    pub total_anomaly: usize,
    pub total_points: usize,
    pub precision_mode: PrecisionMode,
}

impl EffectiveCounts {
    pub fn precision_numerator(&self) -> f64 {
        match self.precision_mode {
            PrecisionMode::Decayed => self.true_positive,
            PrecisionMode::Adjusted => self.adjusted_positives,
        }
    }

    pub fn precision_denominator(&self) -> f64 {
        self.adjusted_positives + self.false_positive
    }

    /// Checks `0 <= eTP <= adjusted <= total_anomaly` and
    /// `0 <= eFP <= total_points - total_anomaly`.
    pub fn is_consistent(&self) -> bool {
        let normal = (self.total_points - self.total_anomaly) as f64;
        0.0 <= self.true_positive
            && self.true_positive <= self.adjusted_positives
            && self.adjusted_positives <= self.total_anomaly as f64
            && 0.0 <= self.false_positive
            && self.false_positive <= normal
    }
}

fn require_binary<'a>(preds: &'a PredictionSeries, protocol: &'static str) -> Result<&'a [bool]> {
    preds
        .as_binary()
        .ok_or(Error::BinaryRequired { protocol })
}

/// Pointwise confusion counts with no adjustment.
pub fn score_raw(labels: &LabelSeries, preds: &PredictionSeries) -> Result<EffectiveCounts> {
    labels.check_len(preds.len())?;
    let (tp, fp) = match preds {
        PredictionSeries::Binary(flags) => {
            let mut tp = 0usize;
            let mut fp = 0usize;
            for (&y, &yhat) in labels.as_slice().iter().zip(flags) {
                match (y, yhat) {
                    (true, true) => tp += 1,
                    (false, true) => fp += 1,
                    _ => {}
                }
            }
            (tp as f64, fp as f64)
        }
        // Expected counts under independent Bernoulli predictions.
        PredictionSeries::Probabilistic(probs) => {
            labels
                .as_slice()
                .iter()
                .zip(probs)
                .fold((0.0, 0.0), |(tp, fp), (&y, &q)| {
                    if y {
                        (tp + q, fp)
                    } else {
                        (tp, fp + q)
                    }
                })
        }
    };
    Ok(EffectiveCounts {
        true_positive: tp,
        false_positive: fp,
        adjusted_positives: tp,
        total_anomaly: labels.anomaly_count(),
        total_points: labels.len(),
        precision_mode: PrecisionMode::Decayed,
    })
}

/// Point adjustment: every segment with at least one flagged point becomes
/// fully flagged.
pub fn adjust_pa(labels: &LabelSeries, preds: &PredictionSeries) -> Result<PredictionSeries> {
    labels.check_len(preds.len())?;
    let flags = require_binary(preds, "pa")?;
    Ok(adjust_segments(labels, flags, |hits, _| hits > 0))
}

/// PA%K: a segment is fully flagged iff `100 * hits / N > k` (strict).
pub fn adjust_pak(labels: &LabelSeries, preds: &PredictionSeries, k: f64) -> Result<PredictionSeries> {
    check_k(k)?;
    labels.check_len(preds.len())?;
    let flags = require_binary(preds, "pak")?;
    Ok(adjust_segments(labels, flags, |hits, n| {
        100.0 * hits as f64 / n as f64 > k
    }))
}

fn adjust_segments(
    labels: &LabelSeries,
    flags: &[bool],
    adjust: impl Fn(usize, usize) -> bool,
) -> PredictionSeries {
    let mut out = flags.to_vec();
    for segment in labels.segments() {
        let hits = flags[segment.range()].iter().filter(|&&f| f).count();
        if adjust(hits, segment.len()) {
            out[segment.range()].fill(true);
        }
    }
    PredictionSeries::Binary(out)
}

fn false_positive_mass(labels: &LabelSeries, preds: &PredictionSeries) -> f64 {
    (0..labels.len())
        .filter(|&t| !labels.is_anomaly(t))
        .map(|t| preds.anomaly_probability(t))
        .sum()
}

/// PAdf on hard predictions.
///
/// A segment whose first flagged point sits `j` steps after its start
/// contributes `N * D(j)` to eTP and `N` to the adjusted positives; an
/// undetected segment contributes nothing. Decay restarts at every segment.
pub fn score_padf_binary(
    labels: &LabelSeries,
    preds: &PredictionSeries,
    decay: &DecaySpec,
    precision_mode: PrecisionMode,
) -> Result<EffectiveCounts> {
    labels.check_len(preds.len())?;
    let flags = require_binary(preds, "padf")?;
    let mut true_positive = 0.0;
    let mut adjusted_positives = 0.0;
    for segment in labels.segments() {
        if let Some(delay) = flags[segment.range()].iter().position(|&f| f) {
            let n = segment.len() as f64;
            true_positive += n * decay.at(delay);
            adjusted_positives += n;
        }
    }
    Ok(EffectiveCounts {
        true_positive,
        false_positive: false_positive_mass(labels, preds),
        adjusted_positives,
        total_anomaly: labels.anomaly_count(),
        total_points: labels.len(),
        precision_mode,
    })
}

/// PAdf on per-timestamp anomaly probabilities (expected counts).
///
/// With `q` the anomaly probability, a segment contributes
/// `N * sum_n D(n) q_n prod_{i<n} (1 - q_i)` to eTP and
/// `N * (1 - prod (1 - q))` to the adjusted positives. The latter is
/// accumulated as `N * sum_n q_n prod_{i<n} (1 - q_i)`, which is the same
/// quantity and keeps `eTP <= adjusted` exact under rounding.
pub fn score_padf_probabilistic(
    labels: &LabelSeries,
    preds: &PredictionSeries,
    decay: &DecaySpec,
    precision_mode: PrecisionMode,
) -> Result<EffectiveCounts> {
    labels.check_len(preds.len())?;
    let mut true_positive = 0.0;
    let mut adjusted_positives = 0.0;
    for segment in labels.segments() {
        let (recall, detected) = segment_expectation(&segment, preds, decay);
        let n = segment.len() as f64;
        true_positive += n * recall;
        adjusted_positives += n * detected;
    }
    Ok(EffectiveCounts {
        true_positive,
        false_positive: false_positive_mass(labels, preds),
        adjusted_positives,
        total_anomaly: labels.anomaly_count(),
        total_points: labels.len(),
        precision_mode,
    })
}

/// (decayed detection probability, plain detection probability) of one segment.
fn segment_expectation(
    segment: &AnomalySegment,
    preds: &PredictionSeries,
    decay: &DecaySpec,
) -> (f64, f64) {
    let mut missed_so_far = 1.0;
    let mut recall = 0.0;
    let mut detected = 0.0;
    for (offset, t) in segment.range().enumerate() {
        let q = preds.anomaly_probability(t);
        let first_hit_here = q * missed_so_far;
        recall += decay.at(offset) * first_hit_here;
        detected += first_hit_here;
        missed_so_far *= 1.0 - q;
        if missed_so_far == 0.0 {
            break;
        }
    }
    (recall, detected)
}

/// Scores `preds` under `config`.
///
/// PA and raw accept probabilistic predictions (expected counts); PA%K needs
/// binary predictions.
pub fn score(
    labels: &LabelSeries,
    preds: &PredictionSeries,
    config: &ProtocolConfig,
) -> Result<EffectiveCounts> {
    config.validate()?;
    match (&config.protocol, preds) {
        (Protocol::Raw, _) => score_raw(labels, preds),
        (Protocol::PointAdjust, PredictionSeries::Binary(_)) => {
            score_raw(labels, &adjust_pa(labels, preds)?)
        }
        (Protocol::PointAdjust, PredictionSeries::Probabilistic(_)) => score_padf_probabilistic(
            labels,
            preds,
            &DecaySpec::constant(),
            PrecisionMode::Decayed,
        ),
        (Protocol::PaK { k }, _) => score_raw(labels, &adjust_pak(labels, preds, *k)?),
        (
            Protocol::Padf {
                decay,
                precision_mode,
            },
            PredictionSeries::Binary(_),
        ) => score_padf_binary(labels, preds, decay, *precision_mode),
        (
            Protocol::Padf {
                decay,
                precision_mode,
            },
            PredictionSeries::Probabilistic(_),
        ) => score_padf_probabilistic(labels, preds, decay, *precision_mode),
    }
}
