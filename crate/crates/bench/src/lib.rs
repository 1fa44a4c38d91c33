//! Shared input generation for the solver benchmarks.

use ortree_core::simlab::{noisy_observation, smooth_truth, twopiece_truth};
use ortree_core::LatticeArray;

/// A noisy two-block matrix, the favorable case for dyadic splitting.
pub fn noisy_twopiece(n: usize, seed: u64) -> LatticeArray {
    noisy_observation(&twopiece_truth(n).expect("even n"), 1.0, seed, n, 0)
}

/// A noisy smooth bump, which forces deep recursive partitions.
pub fn noisy_smooth(n: usize, seed: u64) -> LatticeArray {
    noisy_observation(&smooth_truth(n).expect("n >= 2"), 1.0, seed, n, 0)
}
