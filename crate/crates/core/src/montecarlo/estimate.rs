//! The sampled Bell experiment.
//!
//! The preparation is integrated once per parameter set; each run then draws
//! success with probability `P0`, rotates both atoms for the requested
//! analyzer angle and reads them out by shelving, atom 1 first and atom 2
//! conditioned on atom 1's result. Per-run values are `±1` (or `0` for an
//! undetected failure), so the aggregate sums are exact integers and
//! independent of scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::{stream_rng, Stage};
use crate::bell::measurement_rotation;
use crate::models::{FourLevelParams, TwoLevelParams};
use crate::protocols::{
    draw_emission, prepare_four_level, prepare_two_level, target_state, PulseSpec,
};
use crate::{Error, HilbertDims, Result, StateVector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailurePolicy {
    /// Failed preparations are detected and dropped.
    Discard,
    /// Failed preparations go unnoticed and contribute zero correlation.
    IncludeAsZero,
}

/// Where the atom pair comes from.
#[derive(Debug, Clone)]
pub enum PipelineModel {
    TwoLevel {
        params: TwoLevelParams,
        pulse: PulseSpec,
        n_max: usize,
    },
    FourLevel {
        params: FourLevelParams,
        n_max: usize,
    },
    /// A given two-qubit state, prepared with success probability `p0`.
    Injected { state: StateVector, p0: f64 },
}

/// Cached outcome of the preparation stage.
#[derive(Debug, Clone, Serialize)]
pub struct PreparedPair {
    pub p0: f64,
    /// Normalized two-qubit state (cavity vacuum, ground levels).
    #[serde(skip)]
    pub atoms: StateVector,
    pub alpha_realized: C64,
    pub fidelity: Option<f64>,
}

impl PreparedPair {
    pub fn injected(state: &StateVector, p0: f64) -> Result<Self> {
        if state.dims() != HilbertDims::qubit_pair() {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: state.dims().dim(),
            });
        }
        let atoms = state.normalized()?;
        let alpha_realized = (atoms.amps()[2] - atoms.amps()[1]) * std::f64::consts::FRAC_1_SQRT_2;
        Self {
            p0: 1.0,
            atoms,
            alpha_realized,
            fidelity: None,
        }
        .with_p0(p0)
    }

    /// The target superposition with amplitude `alpha`, prepared with certainty.
    pub fn ideal(alpha: C64) -> Result<Self> {
        let atoms = target_state(alpha, HilbertDims::qubit_pair())?;
        Ok(Self {
            p0: 1.0,
            atoms,
            alpha_realized: alpha,
            fidelity: Some(1.0),
        })
    }

    /// Replace the success probability (e.g. to study the failure model).
    pub fn with_p0(self, p0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p0) {
            return Err(Error::Domain(format!(
                "success probability {p0} outside [0, 1]"
            )));
        }
        Ok(Self { p0, ..self })
    }
}

pub fn prepare_for_pipeline(model: &PipelineModel) -> Result<PreparedPair> {
    let result = match model {
        PipelineModel::Injected { state, p0 } => return PreparedPair::injected(state, *p0),
        PipelineModel::TwoLevel {
            params,
            pulse,
            n_max,
        } => prepare_two_level(params, *pulse, HilbertDims::cavity_pair(*n_max, 2)?)?,
        PipelineModel::FourLevel { params, n_max } => {
            prepare_four_level(params, HilbertDims::cavity_pair(*n_max, 4)?)?
        }
    };
    let atoms = result
        .state
        .project_onto(HilbertDims::qubit_pair())?
        .normalized()?;
    Ok(PreparedPair {
        p0: result.p0,
        atoms,
        alpha_realized: result.alpha_realized,
        fidelity: Some(result.fidelity),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub e_hat: f64,
    /// Sample standard deviation over `√n_used`; infinite below two used runs.
    pub std_err: f64,
    pub n_runs: u64,
    pub n_discarded: u64,
}

impl CorrelationEstimate {
    pub fn n_used(&self) -> u64 {
        self.n_runs - self.n_discarded
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellEstimate {
    /// `|3 ê(ϑ) − ê(3ϑ)|`.
    pub b_hat: f64,
    pub std_err: f64,
    pub e_theta: CorrelationEstimate,
    pub e_three_theta: CorrelationEstimate,
}

/// Readout tallies of a batch of runs; `joint[j1][j2]` counts the runs
/// that classified atom 1 as `|j1⟩` and atom 2 as `|j2⟩`.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OutcomeCounts {
    pub joint: [[u64; 2]; 2],
    /// Failed preparations.
    pub failures: u64,
}

impl OutcomeCounts {
    fn merge(mut self, o: OutcomeCounts) -> OutcomeCounts {
        for (row, other) in self.joint.iter_mut().zip(o.joint) {
            row[0] += other[0];
            row[1] += other[1];
        }
        self.failures += o.failures;
        self
    }

    pub fn successes(&self) -> u64 {
        self.joint.iter().flatten().sum()
    }

    /// `Σ σz(j1) σz(j2)` over the successful runs.
    fn correlation_sum(&self) -> i64 {
        let [[a, b], [c, d]] = self.joint.map(|r| r.map(|n| n as i64));
        a + d - b - c
    }
}

/// Born probabilities of the four readouts after the analyzer rotation for
/// `(ϑ, 0)`, as `p[j1][j2]`.
pub fn readout_probabilities(prepared: &PreparedPair, vartheta: f64) -> Result<[[f64; 2]; 2]> {
    let rotated = measurement_rotation(vartheta, 0.0)?.apply(&prepared.atoms)?;
    let born = |j1: usize, j2: usize| rotated.amplitude(0, j1, j2).map(|a| a.norm_sqr());
    Ok([[born(0, 0)?, born(0, 1)?], [born(1, 0)?, born(1, 1)?]])
}

/// Sample `n_runs` prepare → rotate → shelve runs for analyzer angle `ϑ`.
pub fn sample_outcomes(
    prepared: &PreparedPair,
    vartheta: f64,
    n_runs: u64,
    seed: u64,
    stage: Stage,
) -> Result<OutcomeCounts> {
    let p = readout_probabilities(prepared, vartheta)?;
    let p_first = p[0][0] + p[0][1];
    let p_second = |j1: usize| {
        let total = p[j1][0] + p[j1][1];
        if total > 0.0 {
            p[j1][0] / total
        } else {
            0.0
        }
    };
    let p0 = prepared.p0;
    Ok((0..n_runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, stage, i);
            let mut counts = OutcomeCounts::default();
            if rand::Rng::random::<f64>(&mut rng) < p0 {
                let first = draw_emission(p_first, &mut rng).classified_level();
                let second = draw_emission(p_second(first), &mut rng).classified_level();
                counts.joint[first][second] = 1;
            } else {
                counts.failures = 1;
            }
            counts
        })
        .reduce(OutcomeCounts::default, OutcomeCounts::merge))
}

pub fn estimate_correlation(
    model: &PipelineModel,
    vartheta: f64,
    n_runs: u64,
    seed: u64,
    policy: FailurePolicy,
) -> Result<CorrelationEstimate> {
    let prepared = prepare_for_pipeline(model)?;
    estimate_correlation_prepared(
        &prepared,
        vartheta,
        n_runs,
        seed,
        policy,
        Stage::Correlation,
    )
}

/// Estimate `E(ϑ, 0)` from `n_runs` sampled runs of a prepared pair.
pub fn estimate_correlation_prepared(
    prepared: &PreparedPair,
    vartheta: f64,
    n_runs: u64,
    seed: u64,
    policy: FailurePolicy,
    stage: Stage,
) -> Result<CorrelationEstimate> {
    if n_runs == 0 {
        return Err(Error::InvalidArgument("n_runs must be ≥ 1".into()));
    }
    let counts = sample_outcomes(prepared, vartheta, n_runs, seed, stage)?;
    let successes = counts.successes();
    let (used, discarded) = match policy {
        FailurePolicy::Discard => (successes, counts.failures),
        FailurePolicy::IncludeAsZero => (n_runs, 0),
    };
    let sum = counts.correlation_sum() as f64;
    let n = used as f64;
    let (e_hat, std_err) = match used {
        0 => (0.0, f64::INFINITY),
        1 => (sum, f64::INFINITY),
        _ => {
            let mean = sum / n;
            // Per-run values are ±1 on successes and 0 otherwise.
            let var = ((successes as f64 - sum * mean) / (n - 1.0)).max(0.0);
            (mean, (var / n).sqrt())
        }
    };
    Ok(CorrelationEstimate {
        e_hat,
        std_err,
        n_runs,
        n_discarded: discarded,
    })
}

pub fn estimate_bell(
    model: &PipelineModel,
    vartheta: f64,
    n_runs_per_e: u64,
    seed: u64,
    policy: FailurePolicy,
) -> Result<BellEstimate> {
    let prepared = prepare_for_pipeline(model)?;
    estimate_bell_prepared(&prepared, vartheta, n_runs_per_e, seed, policy)
}

/// `B_S` from independent estimates of `E(ϑ, 0)` and `E(3ϑ, 0)`.
pub fn estimate_bell_prepared(
    prepared: &PreparedPair,
    vartheta: f64,
    n_runs_per_e: u64,
    seed: u64,
    policy: FailurePolicy,
) -> Result<BellEstimate> {
    let e1 = estimate_correlation_prepared(
        prepared,
        vartheta,
        n_runs_per_e,
        seed,
        policy,
        Stage::BellFirst,
    )?;
    let e3 = estimate_correlation_prepared(
        prepared,
        3.0 * vartheta,
        n_runs_per_e,
        seed,
        policy,
        Stage::BellSecond,
    )?;
    Ok(BellEstimate {
        b_hat: (3.0 * e1.e_hat - e3.e_hat).abs(),
        std_err: (9.0 * e1.std_err.powi(2) + e3.std_err.powi(2)).sqrt(),
        e_theta: e1,
        e_three_theta: e3,
    })
}
