use crate::models::FourLevelParams;
use crate::{Error, HilbertDims, OperatorMatrix, Result, C64};

/// `U(ξ, φ) = cos ξ − i sin ξ (e^{iφ} |0⟩⟨1| + e^{−iφ} |1⟩⟨0|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSpec {
    pub xi: f64,
    pub phi: f64,
}

impl RotationSpec {
    pub fn new(xi: f64, phi: f64) -> Self {
        Self { xi, phi }
    }
}

pub fn rotation_operator(spec: RotationSpec) -> OperatorMatrix {
    let (s, c) = spec.xi.sin_cos();
    let m = ndarray::array![
        [
            C64::new(c, 0.0),
            C64::new(0.0, -s) * C64::from_polar(1.0, spec.phi)
        ],
        [
            C64::new(0.0, -s) * C64::from_polar(1.0, -spec.phi),
            C64::new(c, 0.0)
        ],
    ];
    OperatorMatrix::new(HilbertDims::qubit(), m).expect("2x2 rotation")
}

/// Laser setting and duration realizing `U(ξ, φ)` on a free two-level atom
/// driven by `½(Ω|1⟩⟨0| + h.c.)`: `Ω = |Ω| e^{−iφ}`, `T = 2ξ/|Ω|`.
pub fn rotation_pulse_two_level(xi: f64, phi: f64, omega_abs: f64) -> Result<(C64, f64)> {
    let (xi, phi) = canonical(xi, phi)?;
    if xi == 0.0 {
        return Ok((C64::from_polar(omega_abs.max(0.0), -phi), 0.0));
    }
    if !(omega_abs > 0.0) || !omega_abs.is_finite() {
        return Err(Error::Domain(format!(
            "rotation needs a positive Rabi frequency, got {omega_abs}"
        )));
    }
    Ok((C64::from_polar(omega_abs, -phi), 2.0 * xi / omega_abs))
}

/// Drive settings for a rotation of one four-level atom outside the cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourLevelRotation {
    pub omega_i: C64,
    pub duration: f64,
    /// Phase picked up uniformly from the pump light shift, `exp(i|Ω0|²T/(4Δ3))`.
    pub global_phase: C64,
}

/// Rotation angle `φ` produced by weak drive `omega_i` with the pumps of `p`:
/// `e^{iφ} = −sign(Δ3) Ω⁽ⁱ⁾ Ω0* / |Ω⁽ⁱ⁾ Ω0|`.
pub fn rotation_phase_four_level(omega_i: C64, p: &FourLevelParams) -> Result<f64> {
    let z = -omega_i * p.omega0.conj() * p.delta3.signum();
    if z.norm() == 0.0 || p.delta3 == 0.0 {
        return Err(Error::Domain(
            "rotation phase undefined for zero drive, pump or detuning".into(),
        ));
    }
    Ok(z.arg().rem_euclid(2.0 * std::f64::consts::PI))
}

/// The weak drive keeps the magnitude `|p.omega_i[atom]|`; its phase and the
/// pulse length are chosen to give `U(ξ, φ)` up to `global_phase`.
pub fn rotation_pulse_four_level(
    xi: f64,
    phi: f64,
    atom: usize,
    p: &FourLevelParams,
) -> Result<FourLevelRotation> {
    p.validate()?;
    if atom > 1 {
        return Err(Error::Domain(format!(
            "atom index {atom} out of range 0..2"
        )));
    }
    let pump = p.omega0.norm();
    if pump == 0.0 {
        return Err(Error::Domain("rotation needs a non-zero pump Ω0".into()));
    }
    let (xi, phi) = canonical(xi, phi)?;
    let drive = p.omega_i[atom].norm();
    if xi > 0.0 && drive == 0.0 {
        return Err(Error::Domain("rotation needs a non-zero weak drive".into()));
    }
    let omega_i = -C64::from_polar(1.0, phi) * (p.omega0 / pump) * drive * p.delta3.signum();
    let duration = if xi == 0.0 {
        0.0
    } else {
        4.0 * p.delta3.abs() * xi / (drive * pump)
    };
    let global_phase = C64::from_polar(1.0, pump * pump * duration / (4.0 * p.delta3));
    Ok(FourLevelRotation {
        omega_i,
        duration,
        global_phase,
    })
}

/// Non-negative `ξ`: `U(−ξ, φ) = U(ξ, φ + π)`.
fn canonical(xi: f64, phi: f64) -> Result<(f64, f64)> {
    if !xi.is_finite() || !phi.is_finite() {
        return Err(Error::NonFinite("rotation angles"));
    }
    Ok(if xi < 0.0 {
        (-xi, phi + std::f64::consts::PI)
    } else {
        (xi, phi)
    })
}
