//! Shared test support: seeded random feasible environments.
#![allow(dead_code)] // each test target compiles its own copy

use jscs::rng::CounterRng;
use jscs::{SensingEnv, SourceEnv};

pub struct EnvSampler {
    seed: u64,
}

impl EnvSampler {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Deterministic feasible environment pair number `i`.
    pub fn pair(&self, i: u64) -> (SensingEnv, SourceEnv) {
        let mut rng = CounterRng::new(self.seed, i);
        let mut uniform = |lo: f64, hi: f64| lo + (hi - lo) * rng.next_f64();

        let p_h1 = uniform(0.1, 0.5);
        let p_e = uniform(0.02, 0.1);
        let snr = 10f64.powf(uniform(-2.0, -0.7)); // -20 .. -7 dB
        let e_sample = 10f64.powf(uniform(-5.0, -3.0));
        let slot_len = uniform(0.25, 4.0);
        let senv = SensingEnv::new(snr, 1.0, 1.0 - p_h1, p_e, e_sample, slot_len)
            .expect("sampled sensing env is valid");

        let source_var = 1.0;
        let distortion = uniform(0.05, 0.5);
        let k_nodes = 2 + (uniform(0.0, 15.0) as u32).min(14);
        // keep strictly inside the feasible observation-noise range
        let noise_cap =
            f64::from(k_nodes) * distortion * source_var / (source_var - distortion);
        let obs_noise_var = noise_cap * uniform(0.05, 0.8);
        let symbol_rate = 10f64.powf(uniform(5.0, 6.3));
        let bandwidth = 10f64.powf(uniform(6.0, 7.0));
        let n0 = 10f64.powf(uniform(-6.0, -4.0));
        let aenv = SourceEnv::new(
            source_var,
            obs_noise_var,
            k_nodes,
            symbol_rate,
            distortion,
            bandwidth,
            n0,
        )
        .expect("sampled source env is feasible");

        (senv, aenv)
    }

    pub fn pairs(&self, count: u64) -> Vec<(SensingEnv, SourceEnv)> {
        (0..count).map(|i| self.pair(i)).collect()
    }
}
