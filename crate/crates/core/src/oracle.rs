//! Brute-force reference implementations for differential testing.
//!
//! Nothing here shares code with [`crate::protocols`] segment handling:
//! segment bounds are rediscovered per timestamp with linear scans, and the
//! probabilistic PAdf counts come from full enumeration of binary outcomes.
//! Everything is quadratic or exponential on purpose; use on small inputs.

use crate::decay::DecaySpec;
use crate::error::{Error, Result};
use crate::protocols::{score_padf_binary, EffectiveCounts, PrecisionMode, Protocol};
use crate::series::{LabelSeries, PredictionSeries};

/// Largest series length [`oracle_padf_expectation`] will enumerate.
pub const ENUMERATION_LIMIT: usize = 14;

/// Bounds of the anomaly run containing `t`, found by walking outwards.
fn run_around(labels: &[bool], t: usize) -> (usize, usize) {
    let mut start = t;
    while start > 0 && labels[start - 1] {
        start -= 1;
    }
    let mut end = t;
    while end + 1 < labels.len() && labels[end + 1] {
        end += 1;
    }
    (start, end)
}

fn binary_flags(preds: &PredictionSeries) -> Result<&[bool]> {
    preds.as_binary().ok_or(Error::WrongPredictionMode { expected: "binary" })
}

/// Naive PA / PA%K adjustment. `Raw` returns the predictions unchanged.
pub fn oracle_adjust(
    labels: &LabelSeries,
    preds: &PredictionSeries,
    protocol: &Protocol,
) -> Result<PredictionSeries> {
    let y = labels.as_slice();
    let p = binary_flags(preds)?;
    if y.len() != p.len() {
        return Err(Error::LengthMismatch {
            labels: y.len(),
            other: p.len(),
        });
    }
    let mut out = Vec::with_capacity(p.len());
    for t in 0..y.len() {
        if !y[t] {
            out.push(p[t]);
            continue;
        }
        let (start, end) = run_around(y, t);
        let n = end - start + 1;
        let hits = (start..=end).filter(|&i| p[i]).count();
        let adjust = match protocol {
            Protocol::Raw => false,
            Protocol::PointAdjust => hits >= 1,
            Protocol::PaK { k } => {
                if !(0.0..=100.0).contains(k) {
                    return Err(Error::KOutOfRange(*k));
                }
                100.0 * hits as f64 / n as f64 > *k
            }
            Protocol::Padf { .. } => {
                return Err(Error::InvalidParameter(
                    "PAdf does not rewrite predictions".into(),
                ))
            }
        };
        out.push(p[t] || adjust);
    }
    Ok(PredictionSeries::Binary(out))
}

/// Naive PAdf on binary predictions: every anomalous point earns the decay
/// weight of its segment's first detection.
pub fn oracle_padf_binary(
    labels: &LabelSeries,
    preds: &PredictionSeries,
    decay: &DecaySpec,
    precision_mode: PrecisionMode,
) -> Result<EffectiveCounts> {
    let y = labels.as_slice();
    let p = binary_flags(preds)?;
    if y.len() != p.len() {
        return Err(Error::LengthMismatch {
            labels: y.len(),
            other: p.len(),
        });
    }
    let mut true_positive = 0.0;
    let mut adjusted_positives = 0.0;
    let mut false_positive = 0.0;
    let mut total_anomaly = 0;
    for t in 0..y.len() {
        if !y[t] {
            if p[t] {
                false_positive += 1.0;
            }
            continue;
        }
        total_anomaly += 1;
        let (start, end) = run_around(y, t);
        if let Some(first) = (start..=end).find(|&i| p[i]) {
            true_positive += decay.at(first - start);
            adjusted_positives += 1.0;
        }
    }
    Ok(EffectiveCounts {
        true_positive,
        false_positive,
        adjusted_positives,
        total_anomaly,
        total_points: y.len(),
        precision_mode,
    })
}

/// Expected PAdf counts by enumerating all `2^len` binary outcomes,
/// weighting each by its independent Bernoulli probability and scoring it
/// with the binary protocol.
pub fn oracle_padf_expectation(
    labels: &LabelSeries,
    probs: &PredictionSeries,
    decay: &DecaySpec,
    precision_mode: PrecisionMode,
) -> Result<EffectiveCounts> {
    let tau = labels.len();
    if tau > ENUMERATION_LIMIT {
        return Err(Error::EnumerationBound(tau));
    }
    if probs.len() != tau {
        return Err(Error::LengthMismatch {
            labels: tau,
            other: probs.len(),
        });
    }
    let q: Vec<f64> = (0..tau).map(|t| probs.anomaly_probability(t)).collect();

    let mut expected = EffectiveCounts {
        true_positive: 0.0,
        false_positive: 0.0,
        adjusted_positives: 0.0,
        total_anomaly: labels.anomaly_count(),
        total_points: tau,
        precision_mode,
    };
    for mask in 0u32..(1 << tau) {
        let outcome: Vec<bool> = (0..tau).map(|t| mask >> t & 1 == 1).collect();
        let weight: f64 = outcome
            .iter()
            .zip(&q)
            .map(|(&hit, &q)| if hit { q } else { 1.0 - q })
            .product();
        if weight == 0.0 {
            continue;
        }
        let counts = score_padf_binary(
            labels,
            &PredictionSeries::Binary(outcome),
            decay,
            precision_mode,
        )?;
        expected.true_positive += weight * counts.true_positive;
        expected.false_positive += weight * counts.false_positive;
        expected.adjusted_positives += weight * counts.adjusted_positives;
    }
    Ok(expected)
}
