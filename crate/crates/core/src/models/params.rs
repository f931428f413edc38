use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Two two-level atoms in a common cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelParams {
    pub g: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub omega1: C64,
    pub omega2: C64,
}

impl TwoLevelParams {
    /// `κ = g = 1`, antisymmetric drive `Ω⁽²⁾ = −Ω⁽¹⁾`.
    pub fn reference(omega1: f64, gamma: f64) -> Self {
        Self {
            g: 1.0,
            kappa: 1.0,
            gamma,
            omega1: C64::new(omega1, 0.0),
            omega2: C64::new(-omega1, 0.0),
        }
    }

    /// `(Ω⁽¹⁾ + Ω⁽²⁾)/√2`.
    pub fn omega_plus(&self) -> C64 {
        (self.omega1 + self.omega2) / SQRT_2
    }

    /// `(Ω⁽¹⁾ − Ω⁽²⁾)/√2`: the only drive combination that moves population
    /// inside the decoherence-free subspace.
    pub fn omega_minus(&self) -> C64 {
        (self.omega1 - self.omega2) / SQRT_2
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.g,
            self.kappa,
            self.gamma,
            self.omega1.re,
            self.omega1.im,
            self.omega2.re,
            self.omega2.im,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("two-level parameters"));
        }
        if self.kappa < 0.0 || self.gamma < 0.0 {
            return Err(Error::Domain(format!(
                "decay rates must be non-negative (kappa={}, gamma={})",
                self.kappa, self.gamma
            )));
        }
        Ok(())
    }
}

/// Two four-level atoms: cavity on 0–2 (detuning Δ2), pumps Ω1 on 1–2 and
/// Ω0 on 0–3 (detuning Δ3), weak per-atom drive Ω⁽ⁱ⁾ on 1–3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourLevelParams {
    pub g: f64,
    pub kappa: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub omega0: C64,
    pub omega1: C64,
    pub omega_i: [C64; 2],
}

impl FourLevelParams {
    /// `Ω0 = Ω1 = 2g`, `Δ2 = Δ3 = 400g`, `κ = 0.0025g`, `Γ2 = Γ3 = gamma`,
    /// weak drive `Ω⁽¹⁾ = −Ω⁽²⁾ = drive`.
    pub fn reference(drive: f64, gamma: f64) -> Self {
        Self {
            g: 1.0,
            kappa: 0.0025,
            gamma2: gamma,
            gamma3: gamma,
            delta2: 400.0,
            delta3: 400.0,
            omega0: C64::new(2.0, 0.0),
            omega1: C64::new(2.0, 0.0),
            omega_i: [C64::new(drive, 0.0), C64::new(-drive, 0.0)],
        }
    }

    /// Detunings scaled by `factor` with both pumps scaled alike, which keeps
    /// the effective coupling and effective drives fixed.
    pub fn rescaled_detuning(&self, factor: f64) -> Self {
        Self {
            delta2: self.delta2 * factor,
            delta3: self.delta3 * factor,
            omega0: self.omega0 * factor,
            omega1: self.omega1 * factor,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut finite = vec![
            self.g,
            self.kappa,
            self.gamma2,
            self.gamma3,
            self.delta2,
            self.delta3,
        ];
        for z in [self.omega0, self.omega1, self.omega_i[0], self.omega_i[1]] {
            finite.extend([z.re, z.im]);
        }
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("four-level parameters"));
        }
        if self.kappa < 0.0 || self.gamma2 < 0.0 || self.gamma3 < 0.0 {
            return Err(Error::Domain("decay rates must be non-negative".into()));
        }
        if self.delta2 == 0.0 || self.delta3 == 0.0 {
            return Err(Error::Domain(format!(
                "detunings must be non-zero (delta2={}, delta3={})",
                self.delta2, self.delta3
            )));
        }
        Ok(())
    }
}
