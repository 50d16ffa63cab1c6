use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Words of keystream reserved for each Metropolis step.
const WORDS_PER_STEP: u128 = 256;

/// Counter-based random stream keyed by `(base_seed, trajectory, step)`.
///
/// The trajectory index selects the ChaCha stream and the step index selects
/// the keystream position, so any step of any trajectory can be reproduced
/// without replaying earlier ones.
#[derive(Debug, Clone)]
pub struct StepRng {
    inner: ChaCha8Rng,
}

impl StepRng {
    pub fn new(base_seed: u64, trajectory: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(base_seed);
        inner.set_stream(trajectory);
        Self { inner }
    }

    /// Positions the stream at the start of `step`'s block and returns it.
    pub fn at_step(&mut self, step: u64) -> &mut ChaCha8Rng {
        self.inner.set_word_pos(step as u128 * WORDS_PER_STEP);
        &mut self.inner
    }
}
