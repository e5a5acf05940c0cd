use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::protocols::{check_beta, score, EffectiveCounts, ProtocolConfig};
use crate::series::{LabelSeries, PredictionSeries};

/// Why a metric fell back to 0 instead of dividing by zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegenerateFlags {
    /// The ground truth has no anomalies, so recall is 0 by convention.
    pub no_anomalies: bool,
    /// Nothing was predicted positive, so precision is 0 by convention.
    pub no_predictions: bool,
}

impl DegenerateFlags {
    pub fn names(&self) -> Vec<&'static str> {
        let mut names = Vec::new();
        if self.no_anomalies {
            names.push("no_anomalies");
        }
        if self.no_predictions {
            names.push("no_predictions");
        }
        names
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
    pub beta: f64,
    pub flags: DegenerateFlags,
    /// Protocol echo, filled by [`evaluate`] and the threshold search.
    pub config: Option<ProtocolConfig>,
    pub threshold: Option<f64>,
}

impl MetricReport {
    pub fn with_config(mut self, config: ProtocolConfig) -> Self {
        self.config = Some(config);
        self
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = Some(threshold);
        self
    }
}

/// `(1 + b^2) P R / (b^2 P + R)`, or 0 when both are 0.
pub fn f_beta(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denominator = b2 * precision + recall;
    if denominator > 0.0 {
        (1.0 + b2) * precision * recall / denominator
    } else {
        0.0
    }
}

/// Precision, recall and F-beta from effective counts.
///
/// Recall is `eTP / total_anomaly`. Precision divides the mode's numerator
/// (eTP, or the adjusted positives) by `adjusted_positives + eFP`. Zero
/// denominators give 0 and set the matching flag.
pub fn compute_metrics(counts: &EffectiveCounts, beta: f64) -> Result<MetricReport> {
    check_beta(beta)?;
    let mut flags = DegenerateFlags::default();

    let recall = if counts.total_anomaly == 0 {
        flags.no_anomalies = true;
        0.0
    } else {
        counts.true_positive / counts.total_anomaly as f64
    };

    let denominator = counts.precision_denominator();
    let precision = if denominator > 0.0 {
        counts.precision_numerator() / denominator
    } else {
        flags.no_predictions = true;
        0.0
    };

    Ok(MetricReport {
        precision,
        recall,
        f_beta: f_beta(precision, recall, beta),
        beta,
        flags,
        config: None,
        threshold: None,
    })
}

/// Scores `preds` under `config` and summarizes the counts.
pub fn evaluate(
    labels: &LabelSeries,
    preds: &PredictionSeries,
    config: &ProtocolConfig,
) -> Result<MetricReport> {
    let counts = score(labels, preds, config)?;
    Ok(compute_metrics(&counts, config.beta)?.with_config(config.clone()))
}
