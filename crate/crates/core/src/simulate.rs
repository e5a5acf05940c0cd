//! Random-score baselines and synthetic detection scenarios.
//!
//! Random scores come from ChaCha8 seeded with `seed_from_u64(seed)`; trial
//! `i` of a baseline run uses stream `i` of that generator, so every trial is
//! reproducible on its own and independent of thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{evaluate, MetricReport};
use crate::protocols::ProtocolConfig;
use crate::series::{LabelSeries, PredictionSeries, ScoreSeries};
use crate::thresholding::{best_f1, ThresholdSpec};

pub const DEFAULT_TRIALS: usize = 5;

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn uniform_series(tau: usize, mut rng: ChaCha8Rng) -> Result<ScoreSeries> {
    if tau == 0 {
        return Err(Error::EmptySeries);
    }
    ScoreSeries::new((0..tau).map(|_| rng.random::<f64>()).collect())
}

/// `tau` i.i.d. `U[0, 1)` scores.
pub fn random_scores(tau: usize, seed: u64) -> Result<ScoreSeries> {
    uniform_series(tau, trial_rng(seed, 0))
}

/// Scores for trial `trial` of a baseline run seeded with `seed`.
pub fn trial_scores(tau: usize, seed: u64, trial: u64) -> Result<ScoreSeries> {
    uniform_series(tau, trial_rng(seed, trial))
}

/// Streaming mean and population variance (Welford, with Chan's merge).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&self, other: &Self) -> Self {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Self { n, mean, m2 }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.m2 / self.n as f64).max(0.0)
        }
    }

    pub fn summary(&self) -> Summary {
        Summary {
            mean: self.mean(),
            variance: self.variance(),
        }
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut stats = Self::default();
        for x in iter {
            stats.push(x);
        }
        stats
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub variance: f64,
}

impl Summary {
    /// Standard error of the mean over `n` samples.
    pub fn std_error(&self, n: usize) -> f64 {
        (self.variance / n as f64).sqrt()
    }
}

/// Mean and population variance of each metric over the trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub config: ProtocolConfig,
    pub threshold_spec: ThresholdSpec,
    pub n_trials: usize,
    pub seed: u64,
    pub precision: Summary,
    pub recall: Summary,
    pub f1: Summary,
    pub threshold: Summary,
}

/// Evaluates `n_trials` random-score detectors against `labels`.
///
/// Each trial draws fresh uniform scores and either binarizes them at a fixed
/// threshold or picks its best-F1 threshold. Results are aggregated in trial
/// order, so the output does not depend on the thread count.
pub fn run_baseline(
    labels: &LabelSeries,
    config: &ProtocolConfig,
    n_trials: usize,
    seed: u64,
    threshold: ThresholdSpec,
) -> Result<TrialStats> {
    if n_trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    config.validate()?;
    let reports: Vec<(f64, MetricReport)> = (0..n_trials as u64)
        .into_par_iter()
        .map(|trial| {
            let scores = trial_scores(labels.len(), seed, trial)?;
            best_f1(labels, &scores, config, threshold)
        })
        .collect::<Result<_>>()?;

    let stat = |f: fn(&(f64, MetricReport)) -> f64| {
        reports.iter().map(f).collect::<RunningStats>().summary()
    };
    Ok(TrialStats {
        config: config.clone(),
        threshold_spec: threshold,
        n_trials,
        seed,
        precision: stat(|r| r.1.precision),
        recall: stat(|r| r.1.recall),
        f1: stat(|r| r.1.f_beta),
        threshold: stat(|r| r.0),
    })
}

/// One ground-truth segment of a scenario and how the detector meets it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentPlan {
    pub start: usize,
    pub len: usize,
    /// Offset of the first flagged point, or `None` for a missed segment.
    pub first_hit: Option<usize>,
    /// Further flagged offsets, each after `first_hit`.
    #[serde(default)]
    pub extra_hits: Vec<usize>,
}

impl SegmentPlan {
    pub fn missed(start: usize, len: usize) -> Self {
        Self {
            start,
            len,
            first_hit: None,
            extra_hits: Vec::new(),
        }
    }

    pub fn hit(start: usize, len: usize, first_hit: usize) -> Self {
        Self {
            start,
            len,
            first_hit: Some(first_hit),
            extra_hits: Vec::new(),
        }
    }

    pub fn with_extra_hits(mut self, offsets: impl IntoIterator<Item = usize>) -> Self {
        self.extra_hits.extend(offsets);
        self
    }

    fn end(&self) -> usize {
        self.start + self.len - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub tau: usize,
    pub segments: Vec<SegmentPlan>,
    #[serde(default)]
    pub false_positives: Vec<usize>,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Scenario(msg));
        if self.tau == 0 {
            return bad("tau must be positive".into());
        }
        let mut sorted: Vec<&SegmentPlan> = self.segments.iter().collect();
        sorted.sort_by_key(|s| s.start);
        for s in &sorted {
            if s.len == 0 {
                return bad(format!("segment at {} has length 0", s.start));
            }
            if s.end() >= self.tau {
                return bad(format!("segment at {} runs past tau = {}", s.start, self.tau));
            }
            match s.first_hit {
                Some(delay) if delay >= s.len => {
                    return bad(format!(
                        "delay {delay} is not shorter than the segment length {}",
                        s.len
                    ))
                }
                None if !s.extra_hits.is_empty() => {
                    return bad(format!("segment at {} has extra hits but no first hit", s.start))
                }
                _ => {}
            }
            if let Some(&x) = s
                .extra_hits
                .iter()
                .find(|&&x| x >= s.len || Some(x) <= s.first_hit)
            {
                return bad(format!(
                    "extra hit offset {x} must lie after the first hit and inside the segment"
                ));
            }
        }
        for pair in sorted.windows(2) {
            if pair[0].end() + 1 >= pair[1].start {
                return bad(format!(
                    "segments at {} and {} overlap or touch",
                    pair[0].start, pair[1].start
                ));
            }
        }
        for &t in &self.false_positives {
            if t >= self.tau {
                return bad(format!("false positive at {t} is past tau = {}", self.tau));
            }
            if sorted.iter().any(|s| (s.start..=s.end()).contains(&t)) {
                return bad(format!("false positive at {t} lies inside a segment"));
            }
        }
        Ok(())
    }
}

/// Deterministic labels and binary predictions realizing `spec`.
pub fn build_scenario(spec: &ScenarioSpec) -> Result<(LabelSeries, PredictionSeries)> {
    spec.validate()?;
    let mut labels = vec![false; spec.tau];
    let mut preds = vec![false; spec.tau];
    for s in &spec.segments {
        labels[s.start..=s.end()].fill(true);
        for offset in s.first_hit.iter().chain(&s.extra_hits) {
            preds[s.start + offset] = true;
        }
    }
    for &t in &spec.false_positives {
        preds[t] = true;
    }
    Ok((LabelSeries::from_bools(labels)?, PredictionSeries::Binary(preds)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub id: String,
    pub description: String,
    pub spec: ScenarioSpec,
}

const SUITE_TAU: usize = 30;
const SUITE_START: usize = 12;
const SUITE_LEN: usize = 7;

/// Sixteen single-segment cases covering missed, delayed, repeated and
/// false-positive detections of one length-7 anomaly.
///
/// Cases `a`..`p`: all normal; first detection at delay 0..=6; immediate
/// detection followed by later hits; immediate detection plus a stray false
/// positive; a false-positive block that misses the segment; and contiguous
/// detection blocks that start 3, 2 and 0 points before the segment.
pub fn appendix_d_suite() -> Vec<Case> {
    let mut cases = Vec::new();
    let mut push = |description: String, segment: SegmentPlan, false_positives: Vec<usize>| {
        let id = char::from(b'a' + cases.len() as u8).to_string();
        cases.push(Case {
            id,
            description,
            spec: ScenarioSpec {
                tau: SUITE_TAU,
                segments: vec![segment],
                false_positives,
            },
        });
    };

    push(
        "no detection".into(),
        SegmentPlan::missed(SUITE_START, SUITE_LEN),
        vec![],
    );
    for delay in 0..SUITE_LEN {
        push(
            format!("single detection at delay {delay}"),
            SegmentPlan::hit(SUITE_START, SUITE_LEN, delay),
            vec![],
        );
    }
    for extra in [vec![3], vec![3, 5], vec![2, 4, 6]] {
        push(
            format!("immediate detection, later hits at {extra:?}"),
            SegmentPlan::hit(SUITE_START, SUITE_LEN, 0).with_extra_hits(extra),
            vec![],
        );
    }
    push(
        "immediate detection, later hit and one false positive".into(),
        SegmentPlan::hit(SUITE_START, SUITE_LEN, 0).with_extra_hits([4]),
        vec![SUITE_START + SUITE_LEN + 3],
    );
    push(
        "contiguous false-positive block, segment missed".into(),
        SegmentPlan::missed(SUITE_START, SUITE_LEN),
        (2..SUITE_START - 2).collect(),
    );
    for lead in [3, 2, 0] {
        push(
            format!("contiguous detection starting {lead} points early"),
            SegmentPlan::hit(SUITE_START, SUITE_LEN, 0).with_extra_hits(1..SUITE_LEN),
            (SUITE_START - lead..SUITE_START).collect(),
        );
    }
    cases
}

/// Scores every case of a suite under `config`.
pub fn run_suite(cases: &[Case], config: &ProtocolConfig) -> Result<Vec<MetricReport>> {
    cases
        .iter()
        .map(|case| {
            let (labels, preds) = build_scenario(&case.spec)?;
            evaluate(&labels, &preds, config)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::extract_segments;

    #[test]
    fn seeds_are_reproducible() {
        assert_eq!(random_scores(100, 7).unwrap(), random_scores(100, 7).unwrap());
        assert_ne!(random_scores(100, 7).unwrap(), random_scores(100, 8).unwrap());
        assert_ne!(trial_scores(100, 7, 1).unwrap(), trial_scores(100, 7, 2).unwrap());
        assert!(random_scores(0, 1).is_err());
    }

    #[test]
    fn uniform_mean() {
        let s = random_scores(1_000_000, 42).unwrap();
        let mean = s.as_slice().iter().sum::<f64>() / s.len() as f64;
        assert!((mean - 0.5).abs() < 0.002, "{mean}");
        assert!(s.as_slice().iter().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn running_stats_merge_matches_sequential() {
        let xs: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let all: RunningStats = xs.iter().copied().collect();
        let left: RunningStats = xs[..17].iter().copied().collect();
        let right: RunningStats = xs[17..].iter().copied().collect();
        let merged = left.merge(&right);
        assert_eq!(merged.count(), 50);
        assert!((merged.mean() - all.mean()).abs() < 1e-14);
        assert!((merged.variance() - all.variance()).abs() < 1e-14);

        let naive_mean = xs.iter().sum::<f64>() / 50.0;
        let naive_var = xs.iter().map(|x| (x - naive_mean).powi(2)).sum::<f64>() / 50.0;
        assert!((all.variance() - naive_var).abs() < 1e-14);
    }

    #[test]
    fn single_trial_has_zero_variance() {
        let labels = LabelSeries::new([vec![0; 10], vec![1; 5], vec![0; 10]].concat()).unwrap();
        let stats = run_baseline(
            &labels,
            &ProtocolConfig::point_adjust(),
            1,
            3,
            ThresholdSpec::default(),
        )
        .unwrap();
        assert_eq!(stats.recall.variance, 0.0);
        assert_eq!(stats.precision.variance, 0.0);
        assert_eq!(stats.f1.variance, 0.0);
        assert!(run_baseline(&labels, &ProtocolConfig::raw(), 0, 3, ThresholdSpec::default()).is_err());
    }

    #[test]
    fn baseline_is_deterministic() {
        let labels = LabelSeries::new([vec![0; 40], vec![1; 8], vec![0; 40]].concat()).unwrap();
        let config = ProtocolConfig::padf(0.9).unwrap();
        let a = run_baseline(&labels, &config, 20, 11, ThresholdSpec::default()).unwrap();
        let b = run_baseline(&labels, &config, 20, 11, ThresholdSpec::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn baseline_recall_near_closed_form() {
        // one length-2 segment, theta = 0.5, d = 0.9: recall 0.725
        let labels = LabelSeries::new(vec![0, 0, 1, 1, 0, 0]).unwrap();
        let config = ProtocolConfig::padf(0.9).unwrap();
        let stats = run_baseline(&labels, &config, 4000, 5, ThresholdSpec::Fixed(0.5)).unwrap();
        assert!((stats.recall.mean - 0.725).abs() < 0.01, "{}", stats.recall.mean);
    }

    #[test]
    fn scenario_round_trip() {
        let spec = ScenarioSpec {
            tau: 20,
            segments: vec![
                SegmentPlan::hit(2, 3, 1).with_extra_hits([2]),
                SegmentPlan::missed(10, 4),
            ],
            false_positives: vec![0, 19],
        };
        let (labels, preds) = build_scenario(&spec).unwrap();
        let segments = extract_segments(&labels);
        let layout: Vec<(usize, usize)> = segments.iter().map(|s| (s.start, s.len())).collect();
        assert_eq!(layout, [(2, 3), (10, 4)]);
        let flagged: Vec<usize> = (0..20).filter(|&t| preds.anomaly_probability(t) == 1.0).collect();
        assert_eq!(flagged, [0, 3, 4, 19]);
    }

    #[test]
    fn scenario_validation() {
        let base = |segments, false_positives| ScenarioSpec {
            tau: 20,
            segments,
            false_positives,
        };
        let cases = [
            base(vec![SegmentPlan::missed(2, 5), SegmentPlan::missed(5, 3)], vec![]),
            base(vec![SegmentPlan::missed(2, 3), SegmentPlan::missed(5, 3)], vec![]),
            base(vec![SegmentPlan::hit(2, 3, 3)], vec![]),
            base(vec![SegmentPlan::hit(2, 3, 1).with_extra_hits([0])], vec![]),
            base(vec![SegmentPlan::missed(2, 3).with_extra_hits([1])], vec![]),
            base(vec![SegmentPlan::missed(18, 5)], vec![]),
            base(vec![SegmentPlan::missed(2, 3)], vec![3]),
            base(vec![SegmentPlan::missed(2, 3)], vec![25]),
            base(vec![SegmentPlan::missed(2, 0)], vec![]),
        ];
        for spec in cases {
            assert!(matches!(build_scenario(&spec), Err(Error::Scenario(_))), "{spec:?}");
        }
    }

    #[test]
    fn suite_round_trips_and_has_sixteen_cases() {
        let suite = appendix_d_suite();
        assert_eq!(suite.len(), 16);
        assert_eq!(suite[0].id, "a");
        assert_eq!(suite[15].id, "p");
        for case in &suite {
            let (labels, _) = build_scenario(&case.spec).unwrap();
            let segments = extract_segments(&labels);
            assert_eq!(segments.len(), 1);
            assert_eq!((segments[0].start, segments[0].len()), (SUITE_START, SUITE_LEN));
        }
    }
}
