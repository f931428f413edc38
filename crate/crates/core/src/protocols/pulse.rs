use std::f64::consts::PI;

use crate::{Error, HilbertDims, Result, StateVector, C64};

const PHASE_TOL: f64 = 1e-9;

/// A preparation pulse, fixed either by its length or by the amplitude it
/// should transfer into the antisymmetric state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseSpec {
    Duration(f64),
    TargetAlpha(C64),
}

impl PulseSpec {
    /// The full-transfer pulse `T = π / |Ω⁻|`.
    pub fn full_transfer(omega_minus: C64) -> Result<Self> {
        if omega_minus.norm() == 0.0 {
            return Err(Error::Domain(
                "full transfer needs a non-zero antisymmetric drive".into(),
            ));
        }
        Ok(PulseSpec::Duration(PI / omega_minus.norm()))
    }

    pub fn duration(&self, omega_minus: C64) -> Result<f64> {
        match *self {
            PulseSpec::Duration(t) if t.is_finite() && t >= 0.0 => Ok(t),
            PulseSpec::Duration(t) => Err(Error::InvalidArgument(format!(
                "pulse duration must be ≥ 0, got {t}"
            ))),
            PulseSpec::TargetAlpha(a) => pulse_duration_for_alpha(a, omega_minus),
        }
    }
}

/// `α(T) = −i (Ω⁻/|Ω⁻|) sin(|Ω⁻| T / 2)`; zero for a vanishing drive.
pub fn expected_alpha(omega_minus: C64, t: f64) -> C64 {
    let w = omega_minus.norm();
    if w == 0.0 {
        return C64::new(0.0, 0.0);
    }
    C64::new(0.0, -1.0) * (omega_minus / w) * (w * t / 2.0).sin()
}

/// Shortest `T ≥ 0` with `α(T) = alpha`.
pub fn pulse_duration_for_alpha(alpha: C64, omega_minus: C64) -> Result<f64> {
    let w = omega_minus.norm();
    if w == 0.0 {
        return Err(Error::Domain("antisymmetric drive Ω⁻ is zero".into()));
    }
    let a = alpha.norm();
    if !a.is_finite() || a > 1.0 + PHASE_TOL {
        return Err(Error::Domain(format!("|alpha| must be ≤ 1, got {a}")));
    }
    if a > 0.0 {
        let required = C64::new(0.0, -1.0) * omega_minus / w;
        if (alpha / a - required).norm() > PHASE_TOL {
            return Err(Error::InvalidArgument(format!(
                "alpha phase {:.6} is unreachable; the drive fixes it to {:.6}",
                alpha.arg(),
                required.arg()
            )));
        }
    }
    Ok(2.0 * a.min(1.0).asin() / w)
}

/// `√(1−|α|²) |0,00⟩ + α |0,a⟩` with `|a⟩ = (|10⟩ − |01⟩)/√2`, embedded in
/// any two-atom space.
pub fn target_state(alpha: C64, dims: HilbertDims) -> Result<StateVector> {
    if dims.n_atoms() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: dims.n_atoms(),
        });
    }
    let a2 = alpha.norm_sqr();
    if a2 > 1.0 + PHASE_TOL {
        return Err(Error::Domain(format!(
            "|alpha| must be ≤ 1, got {}",
            alpha.norm()
        )));
    }
    let ground = C64::new((1.0 - a2).max(0.0).sqrt(), 0.0);
    let anti = alpha * std::f64::consts::FRAC_1_SQRT_2;
    StateVector::from_labels(
        dims,
        &[((0, 0, 0), ground), ((0, 1, 0), anti), ((0, 0, 1), -anti)],
    )
}
