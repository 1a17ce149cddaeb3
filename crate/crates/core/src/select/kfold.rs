//! Seeded k-fold splitting and seed derivation.
//!
//! Every stochastic component draws from a seed derived off one global seed,
//! so a run is reproducible end to end and tree-level parallelism cannot
//! change results.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Stable per-component seed derivation (splitmix64 over seed ⊕ salt).
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    splitmix64(seed ^ splitmix64(salt.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Partitions `0..n` into `k` disjoint folds whose sizes differ by at most
/// one, by dealing a seeded shuffle round-robin.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || k > n {
        return Err(Error::InvalidParameter(format!(
            "fold count must satisfy 2 ≤ k ≤ n, got k={k}, n={n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeded_rng(seed));
    let mut folds = vec![Vec::with_capacity(n / k + 1); k];
    for (i, index) in order.into_iter().enumerate() {
        folds[i % k].push(index);
    }
    Ok(folds)
}
