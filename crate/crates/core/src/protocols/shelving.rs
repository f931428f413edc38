//! Electron-shelving readout: driving the cycling 0–2 transition makes an
//! atom in `|0⟩` fluoresce while `|1⟩` stays dark.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::montecarlo::TrajectorySimulator;
use crate::{Error, HilbertDims, OperatorMatrix, Result, StateVector, C64};

const NORM_TOL: f64 = 1e-9;
/// Window must exceed the fluorescence time scale by this factor.
const WINDOW_MARGIN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShelvingOutcome {
    /// Photons seen: the atom is classified as `|0⟩`.
    Emits,
    /// No photon: the atom is classified as `|1⟩`.
    Silent,
}

impl ShelvingOutcome {
    pub fn classified_level(self) -> usize {
        match self {
            ShelvingOutcome::Emits => 0,
            ShelvingOutcome::Silent => 1,
        }
    }

    /// Eigenvalue of `σz = |1⟩⟨1| − |0⟩⟨0|` for the classified level.
    pub fn sigma_z(self) -> i64 {
        match self {
            ShelvingOutcome::Emits => -1,
            ShelvingOutcome::Silent => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShelvingParams {
    pub omega_probe: f64,
    pub gamma_probe: f64,
    pub window: f64,
}

impl ShelvingParams {
    /// Window of `100 · max{1/Γ2, Γ2/Ω2²}`.
    pub fn with_default_window(omega_probe: f64, gamma_probe: f64) -> Self {
        let mut p = Self {
            omega_probe,
            gamma_probe,
            window: 0.0,
        };
        p.window = 100.0 * p.fluorescence_time();
        p
    }

    /// `max{1/Γ2, Γ2/Ω2²}`: time to the first photon from `|0⟩`.
    pub fn fluorescence_time(&self) -> f64 {
        (1.0 / self.gamma_probe).max(self.gamma_probe / (self.omega_probe * self.omega_probe))
    }

    /// `None` if the window is long enough to tell the levels apart.
    pub fn window_warning(&self) -> Option<String> {
        let need = WINDOW_MARGIN * self.fluorescence_time();
        (self.window < need).then(|| {
            format!("shelving window {:.4e} is shorter than {WINDOW_MARGIN}x the fluorescence time ({need:.4e})", self.window)
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.omega_probe > 0.0 && self.gamma_probe > 0.0 && self.window >= 0.0)
            || !(self.omega_probe.is_finite()
                && self.gamma_probe.is_finite()
                && self.window.is_finite())
        {
            return Err(Error::Domain(format!(
                "invalid shelving parameters {self:?}"
            )));
        }
        Ok(())
    }
}

pub fn draw_emission<R: Rng + ?Sized>(p_emit: f64, rng: &mut R) -> ShelvingOutcome {
    if rng.random::<f64>() < p_emit {
        ShelvingOutcome::Emits
    } else {
        ShelvingOutcome::Silent
    }
}

/// Ideal shelving readout of a qubit `α0|0⟩ + α1|1⟩`.
pub fn shelving_measure(amps: (C64, C64), seed: u64) -> Result<ShelvingOutcome> {
    shelving_measure_with(amps, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn shelving_measure_with<R: Rng + ?Sized>(
    amps: (C64, C64),
    rng: &mut R,
) -> Result<ShelvingOutcome> {
    let p0 = amps.0.norm_sqr();
    let total = p0 + amps.1.norm_sqr();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidArgument(format!(
            "qubit amplitudes not normalized (norm² = {total})"
        )));
    }
    Ok(draw_emission(p0, rng))
}

/// Probe Hamiltonian on one three-level atom `{0, 1, 2}` and its emission
/// channel `(|0⟩⟨2|, 2Γ2)`.
pub fn shelving_hamiltonian(
    params: &ShelvingParams,
) -> Result<(OperatorMatrix, Vec<(OperatorMatrix, f64)>)> {
    params.validate()?;
    let d = HilbertDims::atoms_only(3, 1)?;
    let drive = OperatorMatrix::transition(d, 0, 2, 0)? * (0.5 * params.omega_probe);
    let h = drive.clone()
        + drive.dagger()
        + OperatorMatrix::transition(d, 0, 2, 2)? * C64::new(0.0, -params.gamma_probe);
    Ok((
        h,
        vec![(
            OperatorMatrix::transition(d, 0, 0, 2)?,
            2.0 * params.gamma_probe,
        )],
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShelvingRecord {
    pub photon_count: usize,
    pub outcome: ShelvingOutcome,
    /// Set when the window is too short for reliable discrimination.
    pub warning: Option<String>,
}

/// Quantum-jump simulation of the probe window acting on
/// `α0|0⟩ + √(1−|α0|²)|1⟩`, counting emitted photons.
pub fn shelving_physical_sim(
    alpha0: C64,
    params: &ShelvingParams,
    seed: u64,
) -> Result<ShelvingRecord> {
    let sim = ShelvingSimulator::new(params)?;
    sim.run(alpha0, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Reusable form of [`shelving_physical_sim`] for many runs.
pub(crate) struct ShelvingSimulator {
    sim: TrajectorySimulator,
    warning: Option<String>,
}

impl ShelvingSimulator {
    pub(crate) fn new(params: &ShelvingParams) -> Result<Self> {
        let (h, jumps) = shelving_hamiltonian(params)?;
        Ok(Self {
            sim: TrajectorySimulator::new(h, jumps, params.window)?,
            warning: params.window_warning(),
        })
    }

    pub(crate) fn run<R: Rng + ?Sized>(&self, alpha0: C64, rng: &mut R) -> Result<ShelvingRecord> {
        let p = alpha0.norm_sqr();
        if !(p <= 1.0 + NORM_TOL) {
            return Err(Error::InvalidArgument(format!("|alpha0|² = {p} exceeds 1")));
        }
        let d = HilbertDims::atoms_only(3, 1)?;
        let psi = StateVector::from_labels(
            d,
            &[
                ((0, 0, 0), alpha0),
                ((0, 1, 0), C64::new((1.0 - p).max(0.0).sqrt(), 0.0)),
            ],
        )?;
        let rec = self.sim.run(&psi, rng)?;
        let photon_count = rec.jump_times.len();
        let outcome = if photon_count > 0 {
            ShelvingOutcome::Emits
        } else {
            ShelvingOutcome::Silent
        };
        Ok(ShelvingRecord {
            photon_count,
            outcome,
            warning: self.warning.clone(),
        })
    }
}
