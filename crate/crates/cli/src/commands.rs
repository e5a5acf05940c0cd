use tsad_eval::analytic::{f1_curve, parse_theta_grid, AnalyticProtocol, CurveSpec};
use tsad_eval::io;
use tsad_eval::simulate::{appendix_d_suite, run_baseline, run_suite};
use tsad_eval::{
    best_f1, evaluate, Candidates, DecaySpec, MetricReport, PrecisionMode, ProtocolConfig,
    ThresholdSpec,
};

use crate::args::{CasesArgs, CurvesArgs, EvaluateArgs, ModeArg, ProtocolArg, ProtocolArgs, SimulateArgs, SuiteArg};
use crate::CliError;

impl From<ModeArg> for PrecisionMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Decayed => PrecisionMode::Decayed,
            ModeArg::Adjusted => PrecisionMode::Adjusted,
        }
    }
}

/// Expands the protocol flags into one config per (protocol, parameter)
/// combination, in flag order.
pub fn expand_configs(args: &ProtocolArgs) -> Result<Vec<ProtocolConfig>, CliError> {
    let mut configs = Vec::new();
    for protocol in &args.protocol {
        match protocol {
            ProtocolArg::Raw => configs.push(ProtocolConfig::raw()),
            ProtocolArg::Pa => configs.push(ProtocolConfig::point_adjust()),
            ProtocolArg::Pak => {
                for &k in &args.k {
                    configs.push(ProtocolConfig::pak(k)?);
                }
            }
            ProtocolArg::Padf => {
                for &d in &args.d {
                    for &mode in &args.precision_mode {
                        configs.push(ProtocolConfig::padf_with(DecaySpec::exponential(d)?, mode.into())?);
                    }
                }
            }
        }
    }
    configs
        .into_iter()
        .map(|c| c.with_beta(args.beta).map_err(CliError::from))
        .collect()
}

pub fn evaluate_cmd(args: &EvaluateArgs) -> Result<(), CliError> {
    let configs = expand_configs(&args.protocols)?;
    let labels = io::read_labels(&args.labels)?;
    let mut reports: Vec<MetricReport> = Vec::with_capacity(configs.len());

    if let Some(path) = &args.predictions {
        let preds = io::read_predictions(path, args.prob)?;
        for config in &configs {
            reports.push(evaluate(&labels, &preds, config)?);
        }
    } else if let Some(path) = &args.scores {
        let scores = io::read_scores(path)?;
        let spec = match (args.threshold, args.sweep) {
            (Some(theta), false) => ThresholdSpec::Fixed(theta),
            (None, true) => ThresholdSpec::Sweep(match args.quantiles {
                Some(m) => Candidates::Quantiles(m),
                None => Candidates::UniqueScores,
            }),
            _ => {
                return Err(CliError::Usage(
                    "--scores needs exactly one of --threshold or --sweep".into(),
                ))
            }
        };
        for config in &configs {
            reports.push(best_f1(&labels, &scores, config, spec)?.1);
        }
    }

    io::write_report(&reports, &args.out)?;
    Ok(())
}

pub fn curves_cmd(args: &CurvesArgs) -> Result<(), CliError> {
    let thetas = parse_theta_grid(&args.theta_grid)?;
    if args.segment_len.is_empty() {
        return Err(CliError::Usage("--n needs at least one segment length".into()));
    }
    let mut curves = Vec::new();
    for &segment_len in &args.segment_len {
        curves.push(CurveSpec {
            protocol: AnalyticProtocol::PointAdjust,
            segment_len,
            anomaly_ratio: args.anomaly_ratio,
        });
        for &d in &args.d {
            DecaySpec::exponential(d)?;
            curves.push(CurveSpec {
                protocol: AnalyticProtocol::Padf { d },
                segment_len,
                anomaly_ratio: args.anomaly_ratio,
            });
        }
    }
    let points = f1_curve(&curves, &thetas)?;
    io::write_curve(&points, &args.out)?;
    Ok(())
}

pub fn simulate_cmd(args: &SimulateArgs) -> Result<(), CliError> {
    let configs = expand_configs(&args.protocols)?;
    let labels = io::read_labels(&args.labels)?;
    let spec = match args.threshold {
        Some(theta) => ThresholdSpec::Fixed(theta),
        None => ThresholdSpec::Sweep(Candidates::UniqueScores),
    };
    let stats = configs
        .iter()
        .map(|config| run_baseline(&labels, config, args.trials, args.seed, spec))
        .collect::<Result<Vec<_>, _>>()?;
    io::write_trial_stats(&stats, &args.out)?;
    Ok(())
}

pub fn cases_cmd(args: &CasesArgs) -> Result<(), CliError> {
    let suite = match args.suite {
        SuiteArg::AppendixD => appendix_d_suite(),
    };
    let config = ProtocolConfig::padf_with(DecaySpec::exponential(args.d)?, args.precision_mode.into())?;
    let reports = run_suite(&suite, &config)?;
    io::write_case_suite(&args.out_dir, &suite, &reports)?;
    print!("{}", io::render_case_table(&suite, &reports));
    Ok(())
}
