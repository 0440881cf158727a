//! Shared fixtures for the criterion benchmarks.

use dtn_tradesim_core::{NetworkConfig, NetworkState, SimConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Default-sized network generated from `seed`.
pub fn fixture_network(seed: u64) -> NetworkState {
    NetworkState::generate(&NetworkConfig::default(), &mut rng(seed))
        .expect("default config is valid")
}

/// Single run at the default 500 packets.
pub fn single_run_config() -> SimConfig {
    SimConfig {
        run_count: 1,
        ..SimConfig::default()
    }
}
