use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stage tag occupying the top byte of the stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Stage {
    Trajectory = 1,
    Correlation = 2,
    BellFirst = 3,
    BellSecond = 4,
    Shelving = 5,
}

/// Independent generator for run `index` of `stage` under `master`.
pub fn stream_rng(master: u64, stage: Stage, index: u64) -> ChaCha8Rng {
    debug_assert!(index < 1 << 56);
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(((stage as u64) << 56) | index);
    rng
}
