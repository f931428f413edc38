//! Subcommands as pure functions from a configuration to output bytes.

use std::fmt::Write as _;

use cavitybell::bell::bell_surface;
use cavitybell::models::{validate_regime, FourLevelParams, RegimeReport, TwoLevelParams};
use cavitybell::montecarlo::{
    estimate_bell_prepared, prepare_for_pipeline, PipelineModel, PreparedPair,
};
use cavitybell::protocols::{prepare_four_level, prepare_two_level, PulseSpec};
use cavitybell::HilbertDims;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, Model, RunConfig, Source};

/// Version of the pipeline JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum CommandError {
    Config(String),
    Numerical(cavitybell::Error),
}

impl From<cavitybell::Error> for CommandError {
    fn from(e: cavitybell::Error) -> Self {
        match e {
            cavitybell::Error::NonConvergence(_) => CommandError::Numerical(e),
            other => CommandError::Config(other.to_string()),
        }
    }
}

pub struct Output {
    pub body: String,
    /// A regime check did not pass.
    pub regime_failed: bool,
}

impl Output {
    fn ok(body: String) -> Self {
        Self {
            body,
            regime_failed: false,
        }
    }
}

type Result<T> = std::result::Result<T, CommandError>;

/// 17 significant digits, exact round trip.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(num).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn grid(outer: &[f64], inner: &[f64]) -> Vec<(f64, f64)> {
    outer
        .iter()
        .flat_map(|&a| inner.iter().map(move |&b| (a, b)))
        .collect()
}

/// Success probability and fidelity of the two-level scheme over
/// `Γ × |Ω⁽¹⁾|` with `Ω⁽²⁾ = −Ω⁽¹⁾` and a full-transfer pulse.
pub fn fig2(cfg: &RunConfig) -> Result<Output> {
    let dims = HilbertDims::cavity_pair(cfg.n_max, 2)?;
    let points = grid(&cfg.fig2_gamma(), &cfg.fig2_omega1());
    let base = cfg.two_level;
    let rows = points
        .par_iter()
        .map(|&(gamma, omega1)| {
            let p = TwoLevelParams {
                gamma,
                omega1: omega1.into(),
                omega2: (-omega1).into(),
                ..base
            };
            let r = prepare_two_level(&p, PulseSpec::full_transfer(p.omega_minus())?, dims)?;
            Ok(vec![
                omega1 / p.g,
                gamma / p.g,
                p.kappa / p.g,
                r.p0,
                r.fidelity,
                r.alpha_realized.norm(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Output::ok(csv(
        "omega1_over_g,gamma_over_g,kappa_over_g,p0,fidelity,alpha_abs",
        rows,
    )))
}

/// Four-level scheme over `Γ × drive` with `Ω⁽¹⁾ = −Ω⁽²⁾ = drive` and
/// `Γ2 = Γ3 = Γ`.
pub fn fig6(cfg: &RunConfig) -> Result<Output> {
    let dims = HilbertDims::cavity_pair(cfg.n_max, 4)?;
    let points = grid(&cfg.fig6_gamma(), &cfg.fig6_drive());
    let base = cfg.four_level;
    let rows = points
        .par_iter()
        .map(|&(gamma, drive)| {
            let p = FourLevelParams {
                gamma2: gamma,
                gamma3: gamma,
                omega_i: [drive.into(), (-drive).into()],
                ..base
            };
            let r = prepare_four_level(&p, dims)?;
            Ok(vec![drive / p.g, gamma / p.g, r.p0, r.fidelity])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Output::ok(csv(
        "omega_drive_over_g,gamma_over_g,p0,fidelity",
        rows,
    )))
}

pub fn bell(cfg: &RunConfig) -> Result<Output> {
    let scan = bell_surface(cfg.bell)?;
    let g = scan.grid;
    let rows = scan
        .values
        .indexed_iter()
        .map(|((i, j), v)| vec![g.x(i), g.y(j), *v]);
    Ok(Output::ok(csv("omega_minus_T,vartheta,b_s", rows)))
}

#[derive(Serialize)]
struct Complex {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct AngleEstimate {
    angle: f64,
    e_hat: f64,
    std_err: Option<f64>,
    n_runs: u64,
    n_discarded: u64,
}

#[derive(Serialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
enum SourceParams {
    Injected {
        alpha: Complex,
    },
    TwoLevel {
        params: TwoLevelParams,
        n_max: usize,
    },
    FourLevel {
        params: FourLevelParams,
        n_max: usize,
    },
}

#[derive(Serialize)]
struct PipelineParams {
    #[serde(flatten)]
    source: SourceParams,
    vartheta: f64,
    n_runs_per_angle: u64,
    failure_policy: cavitybell::montecarlo::FailurePolicy,
    forced_p0: Option<f64>,
}

#[derive(Serialize)]
struct PipelineReport {
    schema_version: u32,
    params: PipelineParams,
    p0: f64,
    alpha_realized: Complex,
    fidelity: Option<f64>,
    e_hat: Vec<AngleEstimate>,
    b_hat: f64,
    std_err: Option<f64>,
    n_discarded: u64,
    seed: u64,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Sampled prepare → rotate → shelve experiment, reported as JSON.
pub fn pipeline(cfg: &RunConfig) -> Result<Output> {
    let pc = &cfg.pipeline;
    let (prepared, source) = match pc.source {
        Source::Injected => (
            PreparedPair::ideal(pc.alpha)?,
            SourceParams::Injected {
                alpha: Complex {
                    re: pc.alpha.re,
                    im: pc.alpha.im,
                },
            },
        ),
        Source::TwoLevel => {
            let params = cfg.two_level;
            let model = PipelineModel::TwoLevel {
                params,
                pulse: PulseSpec::full_transfer(params.omega_minus())?,
                n_max: cfg.n_max,
            };
            (
                prepare_for_pipeline(&model)?,
                SourceParams::TwoLevel {
                    params,
                    n_max: cfg.n_max,
                },
            )
        }
        Source::FourLevel => {
            let params = cfg.four_level;
            let model = PipelineModel::FourLevel {
                params,
                n_max: cfg.n_max,
            };
            (
                prepare_for_pipeline(&model)?,
                SourceParams::FourLevel {
                    params,
                    n_max: cfg.n_max,
                },
            )
        }
    };
    let prepared = match pc.p0 {
        Some(p0) => prepared.with_p0(p0)?,
        None => prepared,
    };
    let b = estimate_bell_prepared(
        &prepared,
        pc.vartheta,
        pc.n_runs,
        cfg.seed,
        pc.failure_policy,
    )?;
    let angle = |angle: f64, e: &cavitybell::montecarlo::CorrelationEstimate| AngleEstimate {
        angle,
        e_hat: e.e_hat,
        std_err: finite(e.std_err),
        n_runs: e.n_runs,
        n_discarded: e.n_discarded,
    };
    let report = PipelineReport {
        schema_version: SCHEMA_VERSION,
        params: PipelineParams {
            source,
            vartheta: pc.vartheta,
            n_runs_per_angle: pc.n_runs,
            failure_policy: pc.failure_policy,
            forced_p0: pc.p0,
        },
        p0: prepared.p0,
        alpha_realized: Complex {
            re: prepared.alpha_realized.re,
            im: prepared.alpha_realized.im,
        },
        fidelity: prepared.fidelity,
        e_hat: vec![
            angle(pc.vartheta, &b.e_theta),
            angle(3.0 * pc.vartheta, &b.e_three_theta),
        ],
        b_hat: b.b_hat,
        std_err: finite(b.std_err),
        n_discarded: b.e_theta.n_discarded + b.e_three_theta.n_discarded,
        seed: cfg.seed,
    };
    let mut body = serde_json::to_string_pretty(&report).expect("report serializes");
    body.push('\n');
    Ok(Output::ok(body))
}

/// Regime report for the configured model; fails when any check warns.
pub fn validate(cfg: &RunConfig) -> Result<Output> {
    let report: RegimeReport = match cfg.model {
        Model::TwoLevel => validate_regime(&cfg.two_level, &cfg.thresholds),
        Model::FourLevel => validate_regime(&cfg.four_level, &cfg.thresholds),
    };
    let body = match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = report.to_string();
            let warned = report.warnings().count();
            let _ = writeln!(
                s,
                "{} of {} checks pass",
                report.checks.len() - warned,
                report.checks.len()
            );
            s
        }
    };
    Ok(Output {
        body,
        regime_failed: !report.all_pass(),
    })
}
