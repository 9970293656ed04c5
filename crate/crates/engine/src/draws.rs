use dp_protocol::{Bias, Draw, DrawSource};
use dp_topology::{PhilosopherId, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The generator philosopher `p` draws from in a run with `seed`: ChaCha8
/// keyed by `seed`, on stream `p + 1`. (Stream 0 belongs to the adversary.)
pub fn philosopher_stream(seed: u64, p: PhilosopherId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(p.0 as u64 + 1);
    rng
}

/// Per-philosopher protocol randomness, created on first use.
#[derive(Debug, Clone)]
pub struct SeededDraws {
    seed: u64,
    streams: Vec<Option<ChaCha8Rng>>,
}

impl SeededDraws {
    pub fn new(seed: u64) -> SeededDraws {
        SeededDraws {
            seed,
            streams: Vec::new(),
        }
    }

    fn stream(&mut self, p: PhilosopherId) -> &mut ChaCha8Rng {
        if self.streams.len() <= p.0 {
            self.streams.resize(p.0 + 1, None);
        }
        let seed = self.seed;
        self.streams[p.0].get_or_insert_with(|| philosopher_stream(seed, p))
    }
}

impl DrawSource for SeededDraws {
    fn side(&mut self, p: PhilosopherId, bias: Bias) -> Side {
        if self.stream(p).gen_range(0..bias.den) < bias.left {
            Side::Left
        } else {
            Side::Right
        }
    }

    fn label(&mut self, p: PhilosopherId, m: u32) -> u32 {
        self.stream(p).gen_range(1..=m)
    }
}

/// Returns one predetermined outcome, falling back to the seeded stream
/// for a draw of the other kind.
pub(crate) struct Forced<'a> {
    draw: Draw,
    fallback: &'a mut SeededDraws,
}

impl<'a> Forced<'a> {
    pub(crate) fn new(draw: Draw, fallback: &'a mut SeededDraws) -> Forced<'a> {
        Forced { draw, fallback }
    }
}

impl DrawSource for Forced<'_> {
    fn side(&mut self, p: PhilosopherId, bias: Bias) -> Side {
        match self.draw {
            Draw::Side(s) => s,
            Draw::Label(_) => self.fallback.side(p, bias),
        }
    }

    fn label(&mut self, p: PhilosopherId, m: u32) -> u32 {
        match self.draw {
            Draw::Label(l) => l,
            Draw::Side(_) => self.fallback.label(p, m),
        }
    }
}
