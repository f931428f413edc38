//! Hamiltonian, projector and jump-operator builders for the two atom schemes.
//!
//! Sign conventions: `g` is real; complex Rabi frequencies are stored as
//! given. Atom levels are `0, 1` (ground/qubit) and, for the four-level
//! scheme, `2, 3` (far-detuned excited states).

mod four_level;
mod params;
mod regime;
mod two_level;

pub use four_level::{
    effective_params, h_cond_four_level, h_eff_four_level, h_rotation_four_level,
};
pub use params::{FourLevelParams, TwoLevelParams};
pub use regime::{
    validate_regime, RegimeCheck, RegimeParams, RegimeReport, RegimeThresholds, Relation, Verdict,
};
pub use two_level::{
    antisymmetric_state, dfs_projector, h_cond_two_level, h_eff_zeno, h_laser_single_atom,
    h_laser_two_level, two_level_jumps,
};

use crate::{Error, HilbertDims, Result};

pub(crate) fn require_dims(dims: HilbertDims, levels: usize, atoms: usize) -> Result<()> {
    if dims.atom_levels() != levels || dims.n_atoms() != atoms {
        let expected = HilbertDims::new(dims.n_max(), levels, atoms)?.dim();
        return Err(Error::DimensionMismatch {
            expected,
            found: dims.dim(),
        });
    }
    Ok(())
}
