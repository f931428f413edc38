use std::f64::consts::FRAC_1_SQRT_2;

use super::{require_dims, TwoLevelParams};
use crate::{Error, HilbertDims, OperatorMatrix, Result, StateVector, C64};

const PROJECTOR_TOL: f64 = 1e-10;

/// `i g Σ_i (b σ⁺_i − h.c.) − i Γ Σ_i |1⟩⟨1|_i − i κ b†b`.
pub fn h_cond_two_level(p: &TwoLevelParams, dims: HilbertDims) -> Result<OperatorMatrix> {
    require_dims(dims, 2, 2)?;
    p.validate()?;
    let b = OperatorMatrix::annihilation(dims);
    let i = C64::new(0.0, 1.0);
    let mut h = OperatorMatrix::number(dims) * (-i * p.kappa);
    for atom in 0..2 {
        let raise = OperatorMatrix::transition(dims, atom, 1, 0)?;
        let x = b.matmul(&raise)? * (i * p.g);
        h = h + x.clone() + x.dagger();
        h = h + OperatorMatrix::transition(dims, atom, 1, 1)? * (-i * p.gamma);
    }
    Ok(h)
}

/// `½ Σ_i (Ω⁽ⁱ⁾ |1⟩⟨0|_i + h.c.)`.
pub fn h_laser_two_level(p: &TwoLevelParams, dims: HilbertDims) -> Result<OperatorMatrix> {
    require_dims(dims, 2, 2)?;
    p.validate()?;
    Ok(h_laser_single_atom(p.omega1, 0, dims)? + h_laser_single_atom(p.omega2, 1, dims)?)
}

/// `½ (Ω |1⟩⟨0| + h.c.)` on one atom of any two-level space.
pub fn h_laser_single_atom(omega: C64, atom: usize, dims: HilbertDims) -> Result<OperatorMatrix> {
    if dims.atom_levels() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: dims.atom_levels(),
        });
    }
    let x = OperatorMatrix::transition(dims, atom, 1, 0)? * (omega * 0.5);
    Ok(x.clone() + x.dagger())
}

/// `|0⟩_cav ⊗ (|10⟩ − |01⟩)/√2`.
pub fn antisymmetric_state(dims: HilbertDims) -> Result<StateVector> {
    require_dims(dims, 2, 2)?;
    let c = C64::new(FRAC_1_SQRT_2, 0.0);
    StateVector::from_labels(dims, &[((0, 1, 0), c), ((0, 0, 1), -c)])
}

/// Orthogonal projector onto span{|0,00⟩, |0,a⟩}.
pub fn dfs_projector(dims: HilbertDims) -> Result<OperatorMatrix> {
    require_dims(dims, 2, 2)?;
    let ground = StateVector::basis(dims, 0, 0, 0)?;
    let anti = antisymmetric_state(dims)?;
    let d = dims.dim();
    let mut m = ndarray::Array2::<C64>::zeros((d, d));
    for v in [&ground, &anti] {
        let a = v.amps();
        for r in 0..d {
            for c in 0..d {
                m[[r, c]] += a[r] * a[c].conj();
            }
        }
    }
    OperatorMatrix::new(dims, m)
}

/// `P H P`, the Zeno-limited generator inside the range of `P`.
pub fn h_eff_zeno(h_total: &OperatorMatrix, projector: &OperatorMatrix) -> Result<OperatorMatrix> {
    let p2 = projector.matmul(projector)?;
    let idempotent = p2.max_abs_diff(projector)?;
    let hermitian = projector.max_abs_diff(&projector.dagger())?;
    if idempotent > PROJECTOR_TOL || hermitian > PROJECTOR_TOL {
        return Err(Error::InvalidArgument(format!(
            "not an orthogonal projector (|P²−P| = {idempotent:.3e}, |P−P†| = {hermitian:.3e})"
        )));
    }
    projector.matmul(h_total)?.matmul(projector)
}

/// Jump operators with rates whose anti-Hermitian sum reproduces the decay
/// terms of [`h_cond_two_level`]: `(b, 2κ)`, `(|0⟩⟨1|_i, 2Γ)`.
pub fn two_level_jumps(
    p: &TwoLevelParams,
    dims: HilbertDims,
) -> Result<Vec<(OperatorMatrix, f64)>> {
    require_dims(dims, 2, 2)?;
    Ok(vec![
        (OperatorMatrix::annihilation(dims), 2.0 * p.kappa),
        (OperatorMatrix::transition(dims, 0, 0, 1)?, 2.0 * p.gamma),
        (OperatorMatrix::transition(dims, 1, 0, 1)?, 2.0 * p.gamma),
    ])
}
