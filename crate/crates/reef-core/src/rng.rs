//! Deterministic pseudo-random numbers.
//!
//! Everything stochastic in the toolkit (splits, bootstraps, synthetic data)
//! flows through [`Rng`], a SplitMix64 generator. The algorithm is tiny, has
//! no platform-dependent state, and is trivially reproducible in other
//! languages, which is what we need for cross-checking runs.

/// SplitMix64 generator. One u64 of state, one output per step.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
    /// Spare normal deviate from the last Box-Muller pair.
    spare: Option<f64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            state: seed,
            spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in [0, 1), using the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in [low, high).
    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.next_f64()
    }

    /// Uniform integer in [0, n). n must be nonzero.
    ///
    /// Multiply-shift mapping: bias is at most n / 2^64, far below anything
    /// observable here, and the mapping is exactly reproducible.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0) is meaningless");
        let x = self.next_u64() as u128;
        ((x * n as u128) >> 64) as usize
    }

    /// Standard normal deviate via Box-Muller.
    ///
    /// The uniforms are nudged onto the open interval (0, 1) so ln() never
    /// sees zero.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let scale = 1.0 / (1u64 << 53) as f64;
        let u1 = ((self.next_u64() >> 11) as f64 + 0.5) * scale;
        let u2 = ((self.next_u64() >> 11) as f64 + 0.5) * scale;
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Normal deviate with the given mean and standard deviation.
    pub fn normal_scaled(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.normal()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

/// 64-bit FNV-1a over a byte string.
fn fnv1a(label: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &byte in label.as_bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Derive a stage seed from a root seed and a textual label.
///
/// Each pipeline stage gets its own labeled stream ("split", "forest/2", ...)
/// so reordering or removing stages never perturbs the draws of another.
pub fn derive_seed(root: u64, label: &str) -> u64 {
    Rng::new(root ^ fnv1a(label)).next_u64()
}
