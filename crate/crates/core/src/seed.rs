//! Seed derivation.
//!
//! Every random stream is addressed by `(master_seed, trial, stream)` and
//! expanded through SplitMix64, so a trial's randomness does not depend on
//! which worker runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tag for device positions.
pub const DEVICE_STREAM: u64 = 0x6465_7669_6365;
/// Stream tag for firewall positions.
pub const FIREWALL_STREAM: u64 = 0x6669_7265_7761_6c6c;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes two 64-bit values into one well-distributed seed.
pub fn mix(a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(a) ^ b.rotate_left(32) ^ 0xD6E8_FEB8_6659_FD93)
}

/// Seed of trial `trial` under `master_seed`.
pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
    mix(master_seed, trial)
}

/// Seed of a named sub-stream inside one trial.
pub fn stream_seed(trial_seed: u64, stream: u64) -> u64 {
    mix(trial_seed, stream)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_trials_distinct_seeds() {
        let mut seen = std::collections::HashSet::new();
        for t in 0..10_000 {
            assert!(seen.insert(trial_seed(42, t)));
        }
    }

    #[test]
    fn streams_differ() {
        let t = trial_seed(7, 3);
        assert_ne!(stream_seed(t, DEVICE_STREAM), stream_seed(t, FIREWALL_STREAM));
    }
}
