//! Deterministic fixtures shared by the benchmarks.

use tsad_eval::simulate::trial_scores;
use tsad_eval::{LabelSeries, PredictionSeries, ScoreSeries};

/// Labels of length `tau` with one anomaly segment of `seg_len` points
/// every `period` points.
pub fn periodic_labels(tau: usize, period: usize, seg_len: usize) -> LabelSeries {
    let flags = (0..tau).map(|t| t % period >= period - seg_len).collect();
    LabelSeries::from_bools(flags).expect("non-empty")
}

pub fn uniform_scores(tau: usize, seed: u64) -> ScoreSeries {
    trial_scores(tau, seed, 0).expect("non-empty")
}

pub fn binary_predictions(scores: &ScoreSeries, theta: f64) -> PredictionSeries {
    PredictionSeries::Binary(scores.as_slice().iter().map(|&s| s > theta).collect())
}

/// Scores reused as per-point anomaly probabilities.
pub fn probabilistic_predictions(scores: &ScoreSeries) -> PredictionSeries {
    PredictionSeries::Probabilistic(scores.as_slice().to_vec())
}
