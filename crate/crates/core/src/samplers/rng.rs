use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Words reserved per step; each step starts at `(slot << 32)` in the stream.
const SLOT_SHIFT: u32 = 32;

/// Counter-addressed random stream for one chain.
///
/// The key is derived from the master seed and the stream id from the chain
/// id; every step repositions the generator at its own block, so the draws of
/// step `k` depend only on `(seed, chain_id, k)` and on the draw index within
/// the step.
#[derive(Debug, Clone)]
pub struct ChainRng {
    inner: ChaCha8Rng,
}

impl ChainRng {
    pub fn new(seed: u64, chain_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(chain_id);
        inner.set_word_pos(0);
        Self { inner }
    }

    /// Positions the stream at the block reserved for initialization draws.
    pub fn begin_init(&mut self) {
        self.inner.set_word_pos(0);
    }

    /// Positions the stream at the block reserved for `step`.
    pub fn begin_step(&mut self, step: u64) {
        self.inner.set_word_pos(((step as u128) + 1) << SLOT_SHIFT);
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn normals(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }
}
