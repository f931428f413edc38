//! Stochastic simulation: quantum-jump trajectories and the sampled
//! prepare → rotate → shelve experiment.
//!
//! Every random draw comes from a ChaCha8 stream keyed by
//! `(master seed, stage, run index)`, so results do not depend on how runs
//! are scheduled across threads.

mod estimate;
mod rng;
mod trajectory;

pub use estimate::{
    estimate_bell, estimate_bell_prepared, estimate_correlation, estimate_correlation_prepared,
    prepare_for_pipeline, readout_probabilities, sample_outcomes, BellEstimate,
    CorrelationEstimate, FailurePolicy, OutcomeCounts, PipelineModel, PreparedPair,
};
pub use rng::{stream_rng, Stage};
pub use trajectory::{trajectory_run, TrajectoryRecord, TrajectorySimulator};
