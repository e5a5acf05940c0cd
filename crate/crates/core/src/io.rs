//! Series and report files.
//!
//! Inputs are either a headered single-column CSV (one value per line) or a
//! flat JSON array, chosen by the `.json` extension. Reports are written as
//! JSON with a stable key order or as CSV, again chosen by extension.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analytic::CurvePoint;
use crate::decay::DecaySpec;
use crate::error::{Error, Result};
use crate::metrics::MetricReport;
use crate::protocols::{Protocol, ProtocolConfig};
use crate::series::{LabelSeries, PredictionSeries, ScoreSeries};
use crate::simulate::{Case, TrialStats};
use crate::thresholding::ThresholdSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Labels,
    Scores,
    BinaryPredictions,
    ProbabilisticPredictions,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Series {
    Labels(LabelSeries),
    Scores(ScoreSeries),
    Predictions(PredictionSeries),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Csv,
    Json,
}

impl FileFormat {
    /// `.json` is JSON, everything else CSV.
    pub fn for_input(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Self::Json,
            _ => Self::Csv,
        }
    }

    /// Output files must say what they are.
    pub fn for_output(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Ok(Self::Json),
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Ok(Self::Csv),
            _ => Err(Error::InvalidParameter(format!(
                "cannot tell the output format of {}; use a .json or .csv extension",
                path.display()
            ))),
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Values paired with the 1-based line (CSV) or 0-based element index (JSON)
/// they came from.
fn read_values(path: &Path) -> Result<(Vec<f64>, Vec<u64>)> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    match FileFormat::for_input(path) {
        FileFormat::Json => {
            let values: Vec<f64> = serde_json::from_str(&text).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: e.line() as u64,
                message: format!("expected a flat array of numbers: {e}"),
            })?;
            let positions = (0..values.len() as u64).collect();
            Ok((values, positions))
        }
        FileFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(true)
                .flexible(true)
                .from_reader(text.as_bytes());
            let mut values = Vec::new();
            let mut lines = Vec::new();
            for record in reader.records() {
                let record = record.map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    line: e.position().map_or(0, |p| p.line()),
                    message: e.to_string(),
                })?;
                let line = record.position().map_or(0, |p| p.line());
                let parse_error = |message: String| Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message,
                };
                if record.len() != 1 {
                    return Err(parse_error(format!(
                        "expected one value per line, found {}",
                        record.len()
                    )));
                }
                let field = record[0].trim();
                let value = field
                    .parse::<f64>()
                    .map_err(|_| parse_error(format!("{field:?} is not a number")))?;
                values.push(value);
                lines.push(line);
            }
            Ok((values, lines))
        }
    }
}

/// Reads and validates one series file.
pub fn read_series(path: impl AsRef<Path>, kind: SeriesKind) -> Result<Series> {
    let path = path.as_ref();
    let (values, positions) = read_values(path)?;
    if values.is_empty() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "series has no values".into(),
        });
    }

    let is_json = FileFormat::for_input(path) == FileFormat::Json;
    let locate = |index: usize, message: String| {
        if is_json {
            Error::Format {
                path: path.to_path_buf(),
                message: format!("element {}: {message}", positions[index]),
            }
        } else {
            Error::Parse {
                path: path.to_path_buf(),
                line: positions[index],
                message,
            }
        }
    };

    let series = match kind {
        SeriesKind::Labels => LabelSeries::new(values).map(Series::Labels),
        SeriesKind::Scores => ScoreSeries::new(values).map(Series::Scores),
        SeriesKind::BinaryPredictions => PredictionSeries::binary(values).map(Series::Predictions),
        SeriesKind::ProbabilisticPredictions => {
            PredictionSeries::probabilistic(values).map(Series::Predictions)
        }
    };
    series.map_err(|e| match e {
        Error::InvalidLabel { index, .. }
        | Error::InvalidBinary { index, .. }
        | Error::ProbabilityOutOfRange { index, .. }
        | Error::NonFiniteScore { index } => locate(index, e.to_string()),
        other => other,
    })
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<LabelSeries> {
    match read_series(path, SeriesKind::Labels)? {
        Series::Labels(labels) => Ok(labels),
        _ => unreachable!("labels requested"),
    }
}

pub fn read_scores(path: impl AsRef<Path>) -> Result<ScoreSeries> {
    match read_series(path, SeriesKind::Scores)? {
        Series::Scores(scores) => Ok(scores),
        _ => unreachable!("scores requested"),
    }
}

pub fn read_predictions(path: impl AsRef<Path>, probabilistic: bool) -> Result<PredictionSeries> {
    let kind = if probabilistic {
        SeriesKind::ProbabilisticPredictions
    } else {
        SeriesKind::BinaryPredictions
    };
    match read_series(path, kind)? {
        Series::Predictions(preds) => Ok(preds),
        _ => unreachable!("predictions requested"),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(io_error(path))
}

/// Writes a series in the format implied by `path`. Reals are printed with
/// the shortest representation that parses back to the same value.
pub fn write_series(path: impl AsRef<Path>, header: &str, values: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let contents = match FileFormat::for_input(path) {
        FileFormat::Json => {
            let mut s = serde_json::to_string(values).expect("finite floats serialize");
            s.push('\n');
            s
        }
        FileFormat::Csv => {
            let mut s = format!("{header}\n");
            for v in values {
                s.push_str(&format!("{v}\n"));
            }
            s
        }
    };
    write_file(path, &contents)
}

pub fn write_labels(path: impl AsRef<Path>, labels: &LabelSeries) -> Result<()> {
    let values: Vec<f64> = labels.as_slice().iter().map(|&b| f64::from(u8::from(b))).collect();
    write_series(path, "label", &values)
}

pub fn write_predictions(path: impl AsRef<Path>, preds: &PredictionSeries) -> Result<()> {
    let values: Vec<f64> = (0..preds.len()).map(|t| preds.anomaly_probability(t)).collect();
    write_series(path, "prediction", &values)
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// Flat, ordered view of a protocol configuration for reports.
#[derive(Debug, Clone, Serialize)]
struct ProtocolFields {
    protocol: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decay_weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    precision_mode: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
}

impl ProtocolFields {
    fn new(config: &ProtocolConfig) -> Self {
        let mut fields = Self {
            protocol: config.protocol.name(),
            k: None,
            d: None,
            decay_weights: None,
            precision_mode: None,
            beta: (config.beta != 1.0).then_some(config.beta),
        };
        match &config.protocol {
            Protocol::Raw | Protocol::PointAdjust => {}
            Protocol::PaK { k } => fields.k = Some(*k),
            Protocol::Padf {
                decay,
                precision_mode,
            } => {
                match decay {
                    DecaySpec::Exponential { rate } => fields.d = Some(*rate),
                    DecaySpec::Table { weights } => fields.decay_weights = Some(weights.clone()),
                }
                fields.precision_mode = Some(precision_mode.as_str());
            }
        }
        fields
    }

    /// `k=20`, `d=0.9;mode=decayed`, ... for the CSV `params` column.
    fn params(&self) -> String {
        let mut parts = Vec::new();
        if let Some(k) = self.k {
            parts.push(format!("k={k}"));
        }
        if let Some(d) = self.d {
            parts.push(format!("d={d}"));
        }
        if let Some(w) = &self.decay_weights {
            let w: Vec<String> = w.iter().map(f64::to_string).collect();
            parts.push(format!("weights={}", w.join(" ")));
        }
        if let Some(mode) = self.precision_mode {
            parts.push(format!("mode={mode}"));
        }
        if let Some(beta) = self.beta {
            parts.push(format!("beta={beta}"));
        }
        parts.join(";")
    }
}

#[derive(Debug, Serialize)]
struct ReportRecord {
    #[serde(flatten)]
    protocol: ProtocolFields,
    threshold: Option<f64>,
    precision: f64,
    recall: f64,
    f1: f64,
    flags: Vec<&'static str>,
}

impl ReportRecord {
    fn new(report: &MetricReport) -> Self {
        let config = report.config.clone().unwrap_or_else(ProtocolConfig::raw);
        Self {
            protocol: ProtocolFields::new(&ProtocolConfig {
                beta: report.beta,
                ..config
            }),
            threshold: report.threshold,
            precision: round6(report.precision),
            recall: round6(report.recall),
            f1: round6(report.f_beta),
            flags: report.flags.names(),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json_text<T: Serialize>(records: &[T]) -> String {
    let mut s = if records.len() == 1 {
        serde_json::to_string_pretty(&records[0])
    } else {
        serde_json::to_string_pretty(records)
    }
    .expect("report records serialize");
    s.push('\n');
    s
}

/// Renders reports: a JSON object (one report) or array, or a CSV table
/// `protocol,params,threshold,precision,recall,f1`.
pub fn render_reports(reports: &[MetricReport], format: FileFormat) -> Result<String> {
    if reports.is_empty() {
        return Err(Error::InvalidParameter("no reports to write".into()));
    }
    let records: Vec<ReportRecord> = reports.iter().map(ReportRecord::new).collect();
    Ok(match format {
        FileFormat::Json => json_text(&records),
        FileFormat::Csv => {
            let mut s = String::from("protocol,params,threshold,precision,recall,f1\n");
            for r in &records {
                s.push_str(&format!(
                    "{},{},{},{:.6},{:.6},{:.6}\n",
                    r.protocol.protocol,
                    csv_field(&r.protocol.params()),
                    r.threshold.map(|t| t.to_string()).unwrap_or_default(),
                    r.precision,
                    r.recall,
                    r.f1
                ));
            }
            s
        }
    })
}

pub fn write_report(reports: &[MetricReport], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = render_reports(reports, FileFormat::for_output(path)?)?;
    write_file(path, &text)
}

/// Curve CSV. A single curve is written as `theta,f1`; several curves get
/// `protocol,n,d,theta,f1` so they can be told apart.
pub fn render_curve(points: &[CurvePoint]) -> String {
    let single = points
        .first()
        .is_some_and(|first| points.iter().all(|p| p.curve == first.curve));
    let mut s = String::new();
    if single {
        s.push_str("theta,f1\n");
        for p in points {
            s.push_str(&format!("{},{:.6}\n", p.theta, p.f1));
        }
    } else {
        s.push_str("protocol,n,d,theta,f1\n");
        for p in points {
            let d = p.curve.protocol.decay_rate().map(|d| d.to_string()).unwrap_or_default();
            s.push_str(&format!(
                "{},{},{},{},{:.6}\n",
                p.curve.protocol.name(),
                p.curve.segment_len,
                d,
                p.theta,
                p.f1
            ));
        }
    }
    s
}

pub fn write_curve(points: &[CurvePoint], path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &render_curve(points))
}

#[derive(Debug, Serialize)]
struct StatsRecord {
    #[serde(flatten)]
    protocol: ProtocolFields,
    threshold_mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_threshold: Option<f64>,
    trials: usize,
    seed: u64,
    precision: crate::simulate::Summary,
    recall: crate::simulate::Summary,
    f1: crate::simulate::Summary,
    threshold: crate::simulate::Summary,
}

impl StatsRecord {
    fn new(stats: &TrialStats) -> Self {
        let (threshold_mode, fixed_threshold) = match stats.threshold_spec {
            ThresholdSpec::Fixed(t) => ("fixed", Some(t)),
            ThresholdSpec::Sweep(_) => ("sweep", None),
        };
        Self {
            protocol: ProtocolFields::new(&stats.config),
            threshold_mode,
            fixed_threshold,
            trials: stats.n_trials,
            seed: stats.seed,
            precision: stats.precision,
            recall: stats.recall,
            f1: stats.f1,
            threshold: stats.threshold,
        }
    }
}

/// Monte-Carlo statistics as JSON, or CSV with one mean/variance column
/// pair per metric.
pub fn render_trial_stats(stats: &[TrialStats], format: FileFormat) -> Result<String> {
    if stats.is_empty() {
        return Err(Error::InvalidParameter("no statistics to write".into()));
    }
    let records: Vec<StatsRecord> = stats.iter().map(StatsRecord::new).collect();
    Ok(match format {
        FileFormat::Json => json_text(&records),
        FileFormat::Csv => {
            let mut s = String::from(
                "protocol,params,threshold_mode,trials,seed,precision_mean,precision_var,recall_mean,recall_var,f1_mean,f1_var\n",
            );
            for r in &records {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    r.protocol.protocol,
                    csv_field(&r.protocol.params()),
                    r.fixed_threshold
                        .map_or_else(|| "sweep".to_string(), |t| format!("fixed={t}")),
                    r.trials,
                    r.seed,
                    r.precision.mean,
                    r.precision.variance,
                    r.recall.mean,
                    r.recall.variance,
                    r.f1.mean,
                    r.f1.variance,
                ));
            }
            s
        }
    })
}

pub fn write_trial_stats(stats: &[TrialStats], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = render_trial_stats(stats, FileFormat::for_output(path)?)?;
    write_file(path, &text)
}

/// Suite results, one row per case: `case,description,precision,recall,f1`.
pub fn render_case_table(cases: &[Case], reports: &[MetricReport]) -> String {
    let mut s = String::from("case,description,precision,recall,f1\n");
    for (case, r) in cases.iter().zip(reports) {
        s.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6}\n",
            case.id,
            csv_field(&case.description),
            r.precision,
            r.recall,
            r.f_beta
        ));
    }
    s
}

/// Writes each case's labels and predictions plus `table.csv` into `dir`.
/// Returns the paths written, table last.
pub fn write_case_suite(
    dir: impl AsRef<Path>,
    cases: &[Case],
    reports: &[MetricReport],
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    let mut written = Vec::new();
    for case in cases {
        let (labels, preds) = crate::simulate::build_scenario(&case.spec)?;
        let labels_path = dir.join(format!("case_{}_labels.csv", case.id));
        let preds_path = dir.join(format!("case_{}_predictions.csv", case.id));
        write_labels(&labels_path, &labels)?;
        write_predictions(&preds_path, &preds)?;
        written.extend([labels_path, preds_path]);
    }
    let table = dir.join("table.csv");
    write_file(&table, &render_case_table(cases, reports))?;
    written.push(table);
    Ok(written)
}
