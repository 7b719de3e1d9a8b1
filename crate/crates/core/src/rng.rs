//! Counter-based SplitMix64 streams.

use crate::field::{FieldCtx, FieldElem};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 output function.
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The `counter`-th draw of the stream keyed by `seed`.
pub fn draw(seed: u64, counter: u64) -> u64 {
    mix(seed.wrapping_add(GOLDEN.wrapping_mul(counter.wrapping_add(1))))
}

/// Sequential reader over a counter-based stream.
#[derive(Clone, Debug)]
pub struct Stream {
    seed: u64,
    counter: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Stream {
        Stream { seed, counter: 0 }
    }

    /// A stream starting at an arbitrary counter, so that chunks can be drawn independently.
    pub fn at(seed: u64, counter: u64) -> Stream {
        Stream { seed, counter }
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn next_u64(&mut self) -> u64 {
        let out = draw(self.seed, self.counter);
        self.counter += 1;
        out
    }

    /// Uniform-ish integer below `n` by reduction modulo `n`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn elem(&mut self, ctx: &FieldCtx) -> FieldElem {
        FieldElem(self.below(ctx.size() as u64) as u32)
    }

    /// An element of the subfield listed in `pool`.
    pub fn pick<T: Copy>(&mut self, pool: &[T]) -> T {
        pool[self.below(pool.len() as u64) as usize]
    }
}
