//! Closed-form precision, recall and F1 for the uniform random-score model.
//!
//! A detector emits i.i.d. `U(0, 1)` scores, so each point stays below a
//! threshold `theta` with probability `theta`. One anomaly segment of length
//! `N` makes up a fraction `anomaly_ratio` of the series.
//!
//! ```text
//! PA    recall    = 1 - theta^N
//! PA    precision = ratio R / (ratio R + (1 - theta)(1 - ratio))
//! PAdf  recall    = sum_{i<N} d^i (1 - theta) theta^i
//!                 = (1 - theta)(1 - (theta d)^N) / (1 - theta d)
//! PAdf  precision = ratio R / ((1 - theta)(1 - ratio) + (1 - theta^N) ratio)
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{f_beta, DegenerateFlags};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomModelParams {
    pub theta: f64,
    pub segment_len: usize,
    pub anomaly_ratio: f64,
    pub decay_rate: f64,
}

impl RandomModelParams {
    pub fn new(theta: f64, segment_len: usize, anomaly_ratio: f64, decay_rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidParameter(format!("theta {theta} is outside [0, 1]")));
        }
        if segment_len == 0 {
            return Err(Error::InvalidParameter("segment length must be positive".into()));
        }
        if !(anomaly_ratio > 0.0 && anomaly_ratio < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "anomaly ratio {anomaly_ratio} is outside (0, 1)"
            )));
        }
        if !(decay_rate > 0.0 && decay_rate <= 1.0) {
            return Err(Error::DecayRate(decay_rate));
        }
        Ok(Self {
            theta,
            segment_len,
            anomaly_ratio,
            decay_rate,
        })
    }
}

/// `x^n` with an integer exponent of arbitrary size.
fn pow_len(x: f64, n: usize) -> f64 {
    match i32::try_from(n) {
        Ok(n) => x.powi(n),
        Err(_) => x.powf(n as f64),
    }
}

/// `sum_{i<n} x^i` for `x` in `[0, 1]`, with the `x = 1` limit taken exactly.
fn geometric_sum(x: f64, n: usize) -> f64 {
    if x == 1.0 {
        n as f64
    } else if x == 0.0 {
        1.0
    } else {
        // 1 - x^n without cancellation when x is close to 1
        -(n as f64 * x.ln()).exp_m1() / (1.0 - x)
    }
}

pub fn pa_recall(params: &RandomModelParams) -> f64 {
    1.0 - pow_len(params.theta, params.segment_len)
}

/// Returns 0 when nothing is ever predicted (`theta = 1`).
pub fn pa_precision(params: &RandomModelParams) -> f64 {
    let ratio = params.anomaly_ratio;
    let true_mass = pa_recall(params) * ratio;
    let denominator = true_mass + (1.0 - params.theta) * (1.0 - ratio);
    if denominator > 0.0 {
        true_mass / denominator
    } else {
        0.0
    }
}

pub fn padf_recall(params: &RandomModelParams) -> f64 {
    let theta = params.theta;
    (1.0 - theta) * geometric_sum(theta * params.decay_rate, params.segment_len)
}

/// Returns 0 when nothing is ever predicted (`theta = 1`).
pub fn padf_precision(params: &RandomModelParams) -> f64 {
    let ratio = params.anomaly_ratio;
    let theta = params.theta;
    let denominator =
        (1.0 - pow_len(theta, params.segment_len)) * ratio + (1.0 - theta) * (1.0 - ratio);
    if denominator > 0.0 {
        ratio * padf_recall(params) / denominator
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "snake_case")]
pub enum AnalyticProtocol {
    #[serde(rename = "pa")]
    PointAdjust,
    Padf { d: f64 },
}

impl AnalyticProtocol {
    pub fn name(&self) -> &'static str {
        match self {
            Self::PointAdjust => "pa",
            Self::Padf { .. } => "padf",
        }
    }

    pub fn decay_rate(&self) -> Option<f64> {
        match self {
            Self::PointAdjust => None,
            Self::Padf { d } => Some(*d),
        }
    }
}

/// One analytic curve: a protocol at fixed segment length and anomaly ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub protocol: AnalyticProtocol,
    pub segment_len: usize,
    pub anomaly_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub curve: CurveSpec,
    pub theta: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub flags: DegenerateFlags,
}

/// Analytic metrics of one protocol at one parameter point.
pub fn analytic_point(curve: &CurveSpec, theta: f64) -> Result<CurvePoint> {
    let rate = curve.protocol.decay_rate().unwrap_or(1.0);
    let params = RandomModelParams::new(theta, curve.segment_len, curve.anomaly_ratio, rate)?;
    let (precision, recall) = match curve.protocol {
        AnalyticProtocol::PointAdjust => (pa_precision(&params), pa_recall(&params)),
        AnalyticProtocol::Padf { .. } => (padf_precision(&params), padf_recall(&params)),
    };
    let flags = DegenerateFlags {
        no_anomalies: false,
        no_predictions: theta == 1.0,
    };
    Ok(CurvePoint {
        curve: *curve,
        theta,
        precision,
        recall,
        f1: f_beta(precision, recall, 1.0),
        flags,
    })
}

/// F1 over `thetas` for each curve, curve-major and in grid order.
pub fn f1_curve(curves: &[CurveSpec], thetas: &[f64]) -> Result<Vec<CurvePoint>> {
    if curves.is_empty() || thetas.is_empty() {
        return Err(Error::InvalidParameter("curve grid is empty".into()));
    }
    curves
        .iter()
        .flat_map(|curve| thetas.iter().map(move |&theta| (curve, theta)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(curve, theta)| analytic_point(curve, theta))
        .collect()
}

/// Inclusive grid `start, start + step, ..., stop`.
pub fn theta_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) || start > stop {
        return Err(Error::InvalidParameter(format!(
            "theta range {start}:{stop} must satisfy 0 <= start <= stop <= 1"
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter(format!("theta step {step} must be positive")));
    }
    let intervals = ((stop - start) / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=intervals)
        .map(|i| (start + i as f64 * step).min(stop))
        .collect();
    // land exactly on `stop` when the step divides the range
    if let Some(last) = grid.last_mut() {
        if (stop - *last).abs() < step * 1e-6 {
            *last = stop;
        }
    }
    Ok(grid)
}

/// Parses `start:stop:step`.
pub fn parse_theta_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::InvalidParameter(format!("malformed theta grid {spec:?}, expected start:stop:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>>>()?;
    theta_grid(nums[0], nums[1], nums[2])
}
