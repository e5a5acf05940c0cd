//! Score binarization and best-F1 threshold selection.
//!
//! A point is predicted anomalous iff its score is strictly greater than the
//! threshold. The default candidate set is every distinct score plus one
//! sentinel below the minimum, which together reach every distinct
//! binarization of the series (the sentinel flags everything).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{compute_metrics, evaluate, MetricReport};
use crate::protocols::{EffectiveCounts, PrecisionMode, Protocol, ProtocolConfig};
use crate::series::{LabelSeries, PredictionSeries, ScoreSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Candidates {
    /// All distinct score values plus a sentinel below the minimum.
    #[default]
    UniqueScores,
    /// `m` evenly spaced quantiles of the scores plus the sentinel.
    Quantiles(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSpec {
    Fixed(f64),
    Sweep(Candidates),
}

impl Default for ThresholdSpec {
    fn default() -> Self {
        Self::Sweep(Candidates::UniqueScores)
    }
}

/// Flags every point whose score is strictly above `theta`.
pub fn binarize(scores: &ScoreSeries, theta: f64) -> Result<PredictionSeries> {
    if !theta.is_finite() {
        return Err(Error::NonFiniteThreshold(theta));
    }
    Ok(PredictionSeries::Binary(
        scores.as_slice().iter().map(|&s| s > theta).collect(),
    ))
}

/// A finite value strictly below `min`.
fn below(min: f64) -> f64 {
    let s = min - 1.0;
    if s < min {
        s
    } else {
        min - min.abs()
    }
}

fn sorted_scores(scores: &ScoreSeries) -> Vec<f64> {
    let mut sorted = scores.as_slice().to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
}

/// Candidate thresholds in ascending order, deduplicated.
pub fn candidate_thresholds(scores: &ScoreSeries, candidates: Candidates) -> Result<Vec<f64>> {
    let sorted = sorted_scores(scores);
    let mut out = vec![below(sorted[0])];
    match candidates {
        Candidates::UniqueScores => out.extend_from_slice(&sorted),
        Candidates::Quantiles(m) => {
            if m < 2 {
                return Err(Error::QuantileGrid(m));
            }
            let last = (sorted.len() - 1) as f64;
            out.extend((0..m).map(|i| {
                let pos = last * i as f64 / (m - 1) as f64;
                let lo = pos.floor() as usize;
                let hi = pos.ceil() as usize;
                let frac = pos - lo as f64;
                sorted[lo] + (sorted[hi] - sorted[lo]) * frac
            }));
        }
    }
    out.dedup();
    Ok(out)
}

/// Evaluates every threshold independently by binarizing and scoring.
pub fn evaluate_thresholds(
    labels: &LabelSeries,
    scores: &ScoreSeries,
    config: &ProtocolConfig,
    thetas: &[f64],
) -> Result<Vec<MetricReport>> {
    labels.check_len(scores.len())?;
    thetas
        .iter()
        .map(|&theta| Ok(evaluate(labels, &binarize(scores, theta)?, config)?.with_threshold(theta)))
        .collect()
}

/// Incremental confusion state as the threshold walks downward and points
/// get flagged one at a time.
struct Sweep<'a> {
    config: &'a ProtocolConfig,
    labels: &'a LabelSeries,
    segment_of: Vec<Option<usize>>,
    starts: Vec<usize>,
    lens: Vec<usize>,
    hits: Vec<usize>,
    first_hit: Vec<Option<usize>>,
    false_positive: usize,
    raw_true_positive: usize,
    pak_true_positive: usize,
    detected_len: usize,
    decayed_true_positive: f64,
    total_anomaly: usize,
}

impl<'a> Sweep<'a> {
    fn new(labels: &'a LabelSeries, config: &'a ProtocolConfig) -> Self {
        let segments = labels.segments();
        let mut segment_of = vec![None; labels.len()];
        for (k, s) in segments.iter().enumerate() {
            segment_of[s.range()].fill(Some(k));
        }
        Self {
            config,
            labels,
            segment_of,
            starts: segments.iter().map(|s| s.start).collect(),
            lens: segments.iter().map(|s| s.len()).collect(),
            hits: vec![0; segments.len()],
            first_hit: vec![None; segments.len()],
            false_positive: 0,
            raw_true_positive: 0,
            pak_true_positive: 0,
            detected_len: 0,
            decayed_true_positive: 0.0,
            total_anomaly: labels.anomaly_count(),
        }
    }

    fn pak_contribution(&self, k: usize, hits: usize) -> usize {
        match self.config.protocol {
            Protocol::PaK { k: pct } if 100.0 * hits as f64 / self.lens[k] as f64 > pct => self.lens[k],
            _ => hits,
        }
    }

    fn flag(&mut self, t: usize) {
        let Some(k) = self.segment_of[t] else {
            self.false_positive += 1;
            return;
        };
        self.raw_true_positive += 1;
        let before = self.pak_contribution(k, self.hits[k]);
        self.hits[k] += 1;
        self.pak_true_positive = self.pak_true_positive - before + self.pak_contribution(k, self.hits[k]);
        if self.hits[k] == 1 {
            self.detected_len += self.lens[k];
        }

        let offset = t - self.starts[k];
        if let Protocol::Padf { decay, .. } = &self.config.protocol {
            let n = self.lens[k] as f64;
            match self.first_hit[k] {
                Some(prev) if prev <= offset => {}
                prev => {
                    if let Some(prev) = prev {
                        self.decayed_true_positive -= n * decay.at(prev);
                    }
                    self.decayed_true_positive += n * decay.at(offset);
                    self.first_hit[k] = Some(offset);
                }
            }
        }
    }

    fn counts(&self) -> EffectiveCounts {
        let (tp, adjusted, mode) = match &self.config.protocol {
            Protocol::Raw => {
                let tp = self.raw_true_positive as f64;
                (tp, tp, PrecisionMode::Decayed)
            }
            Protocol::PointAdjust => {
                let tp = self.detected_len as f64;
                (tp, tp, PrecisionMode::Decayed)
            }
            Protocol::PaK { .. } => {
                let tp = self.pak_true_positive as f64;
                (tp, tp, PrecisionMode::Decayed)
            }
            Protocol::Padf { precision_mode, .. } => {
                let adjusted = self.detected_len as f64;
                (
                    self.decayed_true_positive.clamp(0.0, adjusted),
                    adjusted,
                    *precision_mode,
                )
            }
        };
        EffectiveCounts {
            true_positive: tp,
            false_positive: self.false_positive as f64,
            adjusted_positives: adjusted,
            total_anomaly: self.total_anomaly,
            total_points: self.labels.len(),
            precision_mode: mode,
        }
    }
}

/// F-beta at each ascending threshold in `thetas`, from a single downward
/// pass over the sorted scores.
pub fn sweep_f_beta(
    labels: &LabelSeries,
    scores: &ScoreSeries,
    config: &ProtocolConfig,
    thetas: &[f64],
) -> Result<Vec<f64>> {
    config.validate()?;
    labels.check_len(scores.len())?;
    if thetas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "sweep thresholds must be strictly ascending".into(),
        ));
    }
    let values = scores.as_slice();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

    let mut state = Sweep::new(labels, config);
    let mut next = 0;
    let mut out = vec![0.0; thetas.len()];
    for (slot, &theta) in thetas.iter().enumerate().rev() {
        while next < order.len() && values[order[next]] > theta {
            state.flag(order[next]);
            next += 1;
        }
        out[slot] = compute_metrics(&state.counts(), config.beta)?.f_beta;
    }
    Ok(out)
}

/// Threshold with the highest F-beta, ties going to the smallest threshold.
///
/// The returned report is recomputed from the binarized scores at the
/// winning threshold, so it is identical to evaluating those predictions
/// directly.
pub fn best_f1(
    labels: &LabelSeries,
    scores: &ScoreSeries,
    config: &ProtocolConfig,
    spec: ThresholdSpec,
) -> Result<(f64, MetricReport)> {
    labels.check_len(scores.len())?;
    let theta = match spec {
        ThresholdSpec::Fixed(theta) => theta,
        ThresholdSpec::Sweep(candidates) => {
            let thetas = candidate_thresholds(scores, candidates)?;
            let f = sweep_f_beta(labels, scores, config, &thetas)?;
            let mut best = None::<(f64, f64)>;
            for (&theta, &f) in thetas.iter().zip(&f) {
                if best.map_or(true, |(_, bf)| f > bf) {
                    best = Some((theta, f));
                }
            }
            best.ok_or(Error::EmptyCandidates)?.0
        }
    };
    let report = evaluate(labels, &binarize(scores, theta)?, config)?.with_threshold(theta);
    Ok((theta, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scores(v: &[f64]) -> ScoreSeries {
        ScoreSeries::new(v.to_vec()).unwrap()
    }

    fn all_configs() -> Vec<ProtocolConfig> {
        vec![
            ProtocolConfig::raw(),
            ProtocolConfig::point_adjust(),
            ProtocolConfig::pak(20.0).unwrap(),
            ProtocolConfig::padf(0.9).unwrap(),
            ProtocolConfig::padf_with(
                crate::DecaySpec::exponential(0.7).unwrap(),
                PrecisionMode::Adjusted,
            )
            .unwrap(),
        ]
    }

    #[test]
    fn binarize_is_strict() {
        let p = binarize(&scores(&[0.1, 0.9, 0.5]), 0.5).unwrap();
        assert_eq!(p.as_binary().unwrap(), [false, true, false]);
        let p = binarize(&scores(&[0.1, 0.9, 0.5]), -10.0).unwrap();
        assert_eq!(p.as_binary().unwrap(), [true; 3]);
        let p = binarize(&scores(&[0.9, 0.1, 0.9]), 0.9).unwrap();
        assert_eq!(p.as_binary().unwrap(), [false; 3]);
        assert!(binarize(&scores(&[0.1]), f64::NAN).is_err());
        assert!(binarize(&scores(&[0.1]), f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn candidates_include_a_sentinel() {
        let c = candidate_thresholds(&scores(&[0.5, 0.2, 0.5, 0.9]), Candidates::UniqueScores).unwrap();
        assert_eq!(c, [0.2 - 1.0, 0.2, 0.5, 0.9]);
        let c = candidate_thresholds(&scores(&[0.0, 1.0, 2.0, 3.0, 4.0]), Candidates::Quantiles(3)).unwrap();
        assert_eq!(c, [-1.0, 0.0, 2.0, 4.0]);
        assert!(candidate_thresholds(&scores(&[0.0]), Candidates::Quantiles(1)).is_err());
        assert!(below(1e300) < 1e300);
        assert!(below(-1e300) < -1e300);
    }

    #[test]
    fn separable_scores_reach_f1_one() {
        let labels = LabelSeries::new(vec![0, 0, 1, 1, 0, 1, 0]).unwrap();
        let s = scores(&[0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0]);
        for config in all_configs() {
            let (theta, report) = best_f1(&labels, &s, &config, ThresholdSpec::default()).unwrap();
            assert_eq!(report.f_beta, 1.0, "{:?}", config.protocol);
            // smallest candidate achieving F1 = 1 is the 0.0 score itself
            assert_eq!(theta, 0.0);
            assert_eq!(report.threshold, Some(0.0));
        }
    }

    #[test]
    fn constant_scores_fall_back_to_all_positive() {
        let labels = LabelSeries::new(vec![0, 1, 1, 0]).unwrap();
        let s = scores(&[0.3; 4]);
        let (theta, report) = best_f1(&labels, &s, &ProtocolConfig::raw(), ThresholdSpec::default()).unwrap();
        assert!(theta < 0.3);
        assert_eq!(report.recall, 1.0);
        assert_eq!(report.precision, 0.5);
    }

    #[test]
    fn fixed_threshold_is_evaluated_directly() {
        let labels = LabelSeries::new(vec![0, 1, 1, 0]).unwrap();
        let s = scores(&[0.1, 0.2, 0.8, 0.9]);
        let (theta, report) = best_f1(&labels, &s, &ProtocolConfig::raw(), ThresholdSpec::Fixed(0.5)).unwrap();
        assert_eq!(theta, 0.5);
        assert_eq!((report.precision, report.recall), (0.5, 0.5));
    }

    proptest! {
        #[test]
        fn sweep_matches_brute_force(
            data in prop::collection::vec((any::<bool>(), 0u8..12), 1..60),
            config_index in 0usize..5,
        ) {
            let labels = LabelSeries::from_bools(data.iter().map(|d| d.0).collect()).unwrap();
            let s = ScoreSeries::new(data.iter().map(|d| f64::from(d.1) / 4.0).collect()).unwrap();
            let config = &all_configs()[config_index];
            let thetas = candidate_thresholds(&s, Candidates::UniqueScores).unwrap();
            let swept = sweep_f_beta(&labels, &s, config, &thetas).unwrap();
            let brute = evaluate_thresholds(&labels, &s, config, &thetas).unwrap();
            for (a, b) in swept.iter().zip(&brute) {
                prop_assert!((a - b.f_beta).abs() < 1e-12, "{} vs {}", a, b.f_beta);
            }

            let (_, best) = best_f1(&labels, &s, config, ThresholdSpec::default()).unwrap();
            for b in &brute {
                prop_assert!(best.f_beta + 1e-12 >= b.f_beta);
            }

            // a coarser candidate set can only do as well or worse
            let (_, coarse) = best_f1(&labels, &s, config, ThresholdSpec::Sweep(Candidates::Quantiles(3))).unwrap();
            prop_assert!(coarse.f_beta <= best.f_beta + 1e-12);
        }
    }
}
