//! Evaluation protocols for time-series anomaly detectors.
//!
//! A detector's output is scored against a binary ground truth under one of
//! four protocols:
//!
//! * **raw**: pointwise confusion counts, no adjustment.
//! * **PA** (point adjustment): a segment with any flagged point counts as
//!   fully detected.
//! * **PA%K**: like PA, but only when the flagged fraction of the segment
//!   strictly exceeds `K` percent.
//! * **PAdf** (point adjustment with decay): a detected segment of length `N`
//!   contributes `N * D(delay)` effective true positives, where `D` decays
//!   with the offset of the first detection from the segment start.
//!
//! Besides the protocols themselves the crate ships closed-form curves for
//! the uniform random-score model ([`analytic`]), Monte-Carlo baselines and
//! synthetic scenarios ([`simulate`]), best-F1 threshold selection
//! ([`thresholding`]), brute-force reference implementations ([`oracle`]),
//! and CSV/JSON file formats ([`io`]).
//!
//! ```
//! use tsad_eval::{evaluate, LabelSeries, PredictionSeries, ProtocolConfig};
//!
//! let labels = LabelSeries::new(vec![0, 1, 1, 1, 0]).unwrap();
//! let preds = PredictionSeries::binary(vec![0, 0, 1, 0, 0]).unwrap();
//!
//! let pa = evaluate(&labels, &preds, &ProtocolConfig::point_adjust()).unwrap();
//! assert_eq!(pa.f_beta, 1.0);
//!
//! let padf = evaluate(&labels, &preds, &ProtocolConfig::padf(0.9).unwrap()).unwrap();
//! assert!((padf.recall - 0.9).abs() < 1e-12);
//! ```

pub mod analytic;
pub mod decay;
pub mod error;
pub mod io;
pub mod metrics;
pub mod oracle;
pub mod protocols;
pub mod series;
pub mod simulate;
pub mod thresholding;

pub use decay::DecaySpec;
pub use error::{Error, Result};
pub use metrics::{compute_metrics, evaluate, DegenerateFlags, MetricReport};
pub use protocols::{score, EffectiveCounts, PrecisionMode, Protocol, ProtocolConfig};
pub use series::{extract_segments, AnomalySegment, LabelSeries, PredictionSeries, ScoreSeries};
pub use thresholding::{best_f1, binarize, Candidates, ThresholdSpec};
