//! Per-sample random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream source: sample `i` always draws from stream `i` of the generator
/// keyed by the seed, whichever worker runs it.
#[derive(Clone, Debug)]
pub struct StreamFactory {
    base: ChaCha8Rng,
}

impl StreamFactory {
    pub fn new(seed: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng
    }
}
