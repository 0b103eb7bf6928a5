//! Per-task seeds derived from a master seed, so that every trajectory owns an
//! independent stream regardless of how tasks are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// First eight bytes of `SHA-256(master ‖ point ‖ trajectory)`, little endian.
pub fn derive_seed(master: u64, point: u64, trajectory: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(b"surflearn-task");
    h.update(master.to_le_bytes());
    h.update(point.to_le_bytes());
    h.update(trajectory.to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

pub fn task_rng(master: u64, point: u64, trajectory: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, point, trajectory))
}
