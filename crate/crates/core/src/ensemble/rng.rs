use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream for trajectory `index`: ChaCha8 keyed by the master seed,
/// with the trajectory ordinal as the stream id. Streams never overlap, so
/// results do not depend on how trajectories are scheduled.
pub fn trajectory_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
