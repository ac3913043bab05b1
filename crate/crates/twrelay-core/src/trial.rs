//! One self-contained simulation trial.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{draw_channels, draw_distortions, LargeScaleFading};
use crate::config::SystemConfig;
use crate::gram::{build_gram_cache, compute_trial_sinr, DegenerateChannel, TrialResult};

/// Mixes a master seed and a trial index into an independent trial seed
/// (splitmix64 finalizer). Pure, so any scheduling of trials reproduces
/// the same streams.
pub fn derive_trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    let mut z = master_seed
        .wrapping_add(0x9E3779B97F4A7C15u64.wrapping_mul(trial_index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Random stream for one trial.
pub fn trial_rng(trial_seed: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&trial_seed.to_le_bytes());
    seed[8..16].copy_from_slice(b"twrtrial");
    ChaCha8Rng::from_seed(seed)
}

/// Draws one coherence block (channel + distortions) from a stream derived
/// from `trial_seed` and computes all per-device SINRs.
pub fn run_trial(
    config: &SystemConfig,
    fading: &LargeScaleFading,
    trial_seed: u64,
) -> Result<TrialResult, DegenerateChannel> {
    let mut rng = trial_rng(trial_seed);
    let channel = draw_channels(config, fading, &mut rng);
    let distortion = draw_distortions(&channel, config, &mut rng);
    let cache = build_gram_cache(&channel);
    compute_trial_sinr(&cache, &channel, &distortion, config)
}
