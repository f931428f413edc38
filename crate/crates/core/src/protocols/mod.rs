//! Experimental primitives: entangling preparation pulses, single-qubit
//! rotations and electron-shelving readout.

mod preparation;
mod pulse;
mod rotation;
mod shelving;

pub use preparation::{
    four_level_pulse_duration, prepare_four_level, prepare_four_level_for, prepare_four_level_with,
    prepare_two_level, prepare_two_level_with, PrepOptions, PreparationResult,
};
pub use pulse::{expected_alpha, pulse_duration_for_alpha, target_state, PulseSpec};
pub use rotation::{
    rotation_operator, rotation_phase_four_level, rotation_pulse_four_level,
    rotation_pulse_two_level, FourLevelRotation, RotationSpec,
};
pub use shelving::{
    draw_emission, shelving_hamiltonian, shelving_measure, shelving_measure_with,
    shelving_physical_sim, ShelvingOutcome, ShelvingParams, ShelvingRecord,
};
