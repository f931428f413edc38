use super::{require_dims, FourLevelParams};
use crate::{Error, HilbertDims, OperatorMatrix, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Laser, decay and detuning terms of one four-level atom with weak drive
/// `omega_i` on 1–3.
fn atom_terms(
    p: &FourLevelParams,
    omega_i: C64,
    atom: usize,
    dims: HilbertDims,
) -> Result<OperatorMatrix> {
    let s = |j, k| OperatorMatrix::transition(dims, atom, j, k);
    let drive =
        s(2, 1)? * (p.omega1 * 0.5) + s(3, 0)? * (p.omega0 * 0.5) + s(3, 1)? * (omega_i * 0.5);
    Ok(drive.clone()
        + drive.dagger()
        + s(2, 2)? * C64::new(p.delta2, -p.gamma2)
        + s(3, 3)? * C64::new(p.delta3, -p.gamma3))
}

/// Full conditional Hamiltonian of two four-level atoms in the cavity, in
/// the frame rotating with the lasers and the cavity mode.
pub fn h_cond_four_level(p: &FourLevelParams, dims: HilbertDims) -> Result<OperatorMatrix> {
    require_dims(dims, 4, 2)?;
    p.validate()?;
    let b = OperatorMatrix::annihilation(dims);
    let mut h = OperatorMatrix::number(dims) * (-I * p.kappa);
    for atom in 0..2 {
        let x = b.matmul(&OperatorMatrix::transition(dims, atom, 2, 0)?)? * (I * p.g);
        h = h + x.clone() + x.dagger() + atom_terms(p, p.omega_i[atom], atom, dims)?;
    }
    Ok(h)
}

/// Single-atom Hamiltonian (no cavity) for the rotation pulse on `atom`.
pub fn h_rotation_four_level(p: &FourLevelParams, atom: usize) -> Result<OperatorMatrix> {
    p.validate()?;
    if atom > 1 {
        return Err(Error::Domain(format!(
            "atom index {atom} out of range 0..2"
        )));
    }
    atom_terms(p, p.omega_i[atom], 0, HilbertDims::atoms_only(4, 1)?)
}

/// `(g_eff, [Ω_eff⁽¹⁾, Ω_eff⁽²⁾])` after eliminating levels 2 and 3.
///
/// `g_eff = −g Ω1* / (2Δ2)` and `Ω_eff⁽ⁱ⁾ = −Ω⁽ⁱ⁾* Ω0 / (2Δ3)`: each is the
/// product of the two legs of the Raman path divided by the detuning, with
/// the leg into the eliminated level conjugated when it is traversed
/// downwards.
pub fn effective_params(p: &FourLevelParams) -> Result<(C64, [C64; 2])> {
    p.validate()?;
    let g_eff = -p.g * p.omega1.conj() / (2.0 * p.delta2);
    let om = |w: C64| -w.conj() * p.omega0 / (2.0 * p.delta3);
    Ok((g_eff, [om(p.omega_i[0]), om(p.omega_i[1])]))
}

/// Effective ground-state Hamiltonian on the two-level reduced space.
/// `include_shifts = false` drops the second-order level-shift line.
pub fn h_eff_four_level(
    p: &FourLevelParams,
    dims: HilbertDims,
    include_shifts: bool,
) -> Result<OperatorMatrix> {
    require_dims(dims, 2, 2)?;
    let (g_eff, om_eff) = effective_params(p)?;
    let b = OperatorMatrix::annihilation(dims);
    let number = OperatorMatrix::number(dims);
    let mut h = number.clone() * (-I * p.kappa);
    for atom in 0..2 {
        let s = |j, k| OperatorMatrix::transition(dims, atom, j, k);
        let x = b.matmul(&s(1, 0)?)? * (I * g_eff) + s(1, 0)? * (om_eff[atom] * 0.5);
        h = h + x.clone() + x.dagger();
        if include_shifts {
            let shift1 = p.omega1.norm_sqr() / p.delta2 + p.omega_i[atom].norm_sqr() / p.delta3;
            let shift0 = s(0, 0)? * (p.omega0.norm_sqr() / p.delta3)
                + number.matmul(&s(0, 0)?)? * (4.0 * p.g * p.g / p.delta2);
            h = h - (s(1, 1)? * shift1 + shift0) * 0.25;
        }
    }
    Ok(h)
}
