//! Small counter-based pseudo-random generator with independent streams.
//!
//! Every `(seed, stream)` pair names its own deterministic sequence, so a
//! simulation can hand stream `i` to slot `i` and evaluate slots in any
//! order, or in parallel, and still reproduce the sequential run bit for
//! bit. The core is the SplitMix64 finalizer, which is plenty for
//! Monte-Carlo rate estimation.

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One pseudo-random stream out of 2^64 per seed.
#[derive(Debug, Clone)]
pub struct CounterRng {
    state: u64,
}

impl CounterRng {
    /// Generator for `stream` under `seed`. Distinct streams of the same
    /// seed start from distinct, well-separated states.
    pub fn new(seed: u64, stream: u64) -> Self {
        let key = mix64(
            stream
                .wrapping_mul(GOLDEN_GAMMA)
                .wrapping_add(0x6a09_e667_f3bc_c909),
        );
        Self { state: seed ^ key }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`; safe to feed to `ln`.
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)` via the multiply-shift trick.
    #[inline]
    pub fn next_index(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((u128::from(self.next_u64()) * u128::from(n)) >> 64) as u64
    }

    /// Pair of independent standard normals (Box-Muller).
    #[inline]
    pub fn standard_normal_pair(&mut self) -> (f64, f64) {
        let r = (-2.0 * self.next_open01().ln()).sqrt();
        let theta = std::f64::consts::TAU * self.next_f64();
        let (s, c) = theta.sin_cos();
        (r * c, r * s)
    }
}
