use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use super::pulse::{expected_alpha, target_state, PulseSpec};
use crate::models::{
    effective_params, h_cond_four_level, h_cond_two_level, h_laser_two_level, FourLevelParams,
    TwoLevelParams,
};
use crate::propagate::{evolve_nojump_with, survival_probability, StepControl};
use crate::{Error, HilbertDims, OperatorMatrix, Result, StateVector, C64};

/// Knobs for the step and Fock-truncation refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrepOptions {
    pub step: StepControl,
    /// Accept a truncation once raising `n_max` changes `P0` by less than this.
    pub fock_tol: f64,
    pub max_n_max: usize,
}

impl Default for PrepOptions {
    fn default() -> Self {
        Self {
            step: StepControl::default(),
            fock_tol: 1e-8,
            max_n_max: 10,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PreparationResult {
    /// Probability that no photon was emitted during the pulse.
    pub p0: f64,
    /// Normalized conditional state.
    #[serde(skip)]
    pub state: StateVector,
    /// `|⟨target(alpha_expected)|state⟩|²`.
    pub fidelity: f64,
    /// Antisymmetric-state amplitude of `state`, phased so the ground
    /// amplitude is real and non-negative.
    pub alpha_realized: C64,
    /// Amplitude the effective two-state dynamics predicts for this pulse.
    pub alpha_expected: C64,
    pub duration: f64,
    /// Fock truncation at which `P0` was converged.
    pub n_max: usize,
    /// RK4 steps of the accepted integration.
    pub steps: u64,
}

pub fn prepare_two_level(
    p: &TwoLevelParams,
    pulse: PulseSpec,
    dims: HilbertDims,
) -> Result<PreparationResult> {
    prepare_two_level_with(p, pulse, dims, &PrepOptions::default())
}

pub fn prepare_two_level_with(
    p: &TwoLevelParams,
    pulse: PulseSpec,
    dims: HilbertDims,
    opts: &PrepOptions,
) -> Result<PreparationResult> {
    p.validate()?;
    let t = pulse.duration(p.omega_minus())?;
    let alpha = expected_alpha(p.omega_minus(), t);
    let build = |d: HilbertDims| Ok(h_cond_two_level(p, d)? + h_laser_two_level(p, d)?);
    prepare(build, dims, t, alpha, opts)
}

/// `T = 2√2 π |Δ3| / |Ω0 (Ω⁽¹⁾ − Ω⁽²⁾)|`, the full-transfer pulse of the
/// effective dynamics.
pub fn four_level_pulse_duration(p: &FourLevelParams) -> Result<f64> {
    p.validate()?;
    let denom = (p.omega0 * (p.omega_i[0] - p.omega_i[1])).norm();
    if denom == 0.0 {
        return Err(Error::Domain(
            "four-level pulse needs Ω0 ≠ 0 and Ω⁽¹⁾ ≠ Ω⁽²⁾".into(),
        ));
    }
    Ok(2.0 * SQRT_2 * PI * p.delta3.abs() / denom)
}

pub fn prepare_four_level(p: &FourLevelParams, dims: HilbertDims) -> Result<PreparationResult> {
    prepare_four_level_with(p, dims, &PrepOptions::default())
}

pub fn prepare_four_level_with(
    p: &FourLevelParams,
    dims: HilbertDims,
    opts: &PrepOptions,
) -> Result<PreparationResult> {
    prepare_four_level_for(p, dims, four_level_pulse_duration(p)?, opts)
}

/// Four-level preparation with an explicit pulse length.
pub fn prepare_four_level_for(
    p: &FourLevelParams,
    dims: HilbertDims,
    t: f64,
    opts: &PrepOptions,
) -> Result<PreparationResult> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "pulse duration must be ≥ 0, got {t}"
        )));
    }
    let (_, om) = effective_params(p)?;
    let alpha = expected_alpha((om[0] - om[1]) / SQRT_2, t);
    prepare(|d| h_cond_four_level(p, d), dims, t, alpha, opts)
}

fn prepare(
    build: impl Fn(HilbertDims) -> Result<OperatorMatrix>,
    dims: HilbertDims,
    t: f64,
    alpha: C64,
    opts: &PrepOptions,
) -> Result<PreparationResult> {
    let run = |d: HilbertDims| {
        let h = build(d)?;
        let psi0 = StateVector::basis(d, 0, 0, 0)?;
        evolve_nojump_with(&h, &psi0, t, &opts.step)
    };
    let mut current = run(dims)?;
    let mut n_max = dims.n_max();
    loop {
        if n_max >= opts.max_n_max {
            return Err(Error::NonConvergence(format!(
                "P0 not converged in Fock truncation up to n_max = {n_max}"
            )));
        }
        let next = run(dims.with_n_max(n_max + 1))?;
        let delta =
            (survival_probability(&next.state) - survival_probability(&current.state)).abs();
        if delta < opts.fock_tol {
            break;
        }
        current = next;
        n_max += 1;
    }
    let d = dims.with_n_max(n_max);
    let p0 = survival_probability(&current.state).clamp(0.0, 1.0);
    let state = current.state.normalized()?;
    let target = target_state(alpha, d)?;
    let fidelity = target.inner(&state)?.norm_sqr().clamp(0.0, 1.0);
    let alpha_realized = realized_alpha(&state)?;
    Ok(PreparationResult {
        p0,
        state,
        fidelity,
        alpha_realized,
        alpha_expected: alpha,
        duration: t,
        n_max,
        steps: current.steps,
    })
}

fn realized_alpha(state: &StateVector) -> Result<C64> {
    let ground = state.amplitude(0, 0, 0)?;
    let anti =
        (state.amplitude(0, 1, 0)? - state.amplitude(0, 0, 1)?) * std::f64::consts::FRAC_1_SQRT_2;
    if ground.norm() > 1e-3 {
        Ok(anti * (ground.conj() / ground.norm()))
    } else {
        Ok(anti)
    }
}
