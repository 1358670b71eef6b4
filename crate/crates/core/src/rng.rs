//! Seeded generators addressed by (master seed, stream id).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent stream `stream` under `master_seed`; equal inputs give identical sequences.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for replication `rep` of grid cell `cell`.
pub fn cell_stream(cell: usize, rep: usize) -> u64 {
    ((cell as u64) << 32) | rep as u64
}
