use dp_topology::PhilosopherId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Adversary, AdversaryError, History};

/// Schedules `0, 1, …, n−1, 0, 1, …`.
#[derive(Debug, Clone, Default)]
pub struct RoundRobin {
    next: usize,
}

impl RoundRobin {
    pub fn new() -> RoundRobin {
        RoundRobin::default()
    }
}

impl Adversary for RoundRobin {
    fn name(&self) -> String {
        "round-robin".into()
    }

    fn choose(&mut self, history: &History) -> Result<PhilosopherId, AdversaryError> {
        let n = history.current().philosopher_count();
        let p = self.next % n;
        self.next = (p + 1) % n;
        Ok(PhilosopherId(p))
    }
}

/// Schedules a uniformly random philosopher at every step, from a private
/// stream that is independent of all protocol draws.
#[derive(Debug, Clone)]
pub struct UniformRandom {
    rng: ChaCha8Rng,
}

/// Stream number of the adversary's private generator; philosopher `i`
/// draws from stream `i + 1` of the same seed.
pub const ADVERSARY_STREAM: u64 = 0;

impl UniformRandom {
    pub fn new(seed: u64) -> UniformRandom {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(ADVERSARY_STREAM);
        UniformRandom { rng }
    }
}

impl Adversary for UniformRandom {
    fn name(&self) -> String {
        "uniform-random".into()
    }

    fn choose(&mut self, history: &History) -> Result<PhilosopherId, AdversaryError> {
        let n = history.current().philosopher_count();
        Ok(PhilosopherId(self.rng.gen_range(0..n)))
    }
}
