//! Counter-based deterministic randomness.
//!
//! Every draw is a pure function of `(seed, stream, counter)`, so results do
//! not depend on sampling order, platform, or thread count. Streams separate
//! independent uses of the same seed.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0xD1B5_4A32_D192_ED03;

/// SplitMix64 finalizer.
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The `counter`-th value of the stream identified by `(seed, stream)`.
#[inline]
pub fn draw(seed: u64, stream: u64, counter: u64) -> u64 {
    let base = seed
        .wrapping_add(stream.wrapping_mul(STREAM_SALT))
        .wrapping_add(counter.wrapping_mul(GAMMA));
    mix(mix(base))
}

/// Uniform in `[0, 1)` with 53-bit resolution.
#[inline]
pub fn unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Stream identifiers. Fixed constants keep archived runs reproducible.
pub mod streams {
    pub const EDGES: u64 = 1;
    pub const PARTITION: u64 = 2;
    pub const TRIAL: u64 = 3;
    pub const FUNCTIONS: u64 = 4;
    pub const SETS: u64 = 5;
    pub const LAMBDAS: u64 = 6;
    pub const TABLES: u64 = 7;
    pub const POINTS: u64 = 8;
}

/// Sequential convenience wrapper over one stream.
#[derive(Clone, Debug)]
pub struct CounterRng {
    seed: u64,
    stream: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        CounterRng { seed, stream, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let value = draw(self.seed, self.stream, self.counter);
        self.counter += 1;
        value
    }

    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        unit(self.next_u64())
    }

    /// Uniform in `[0, bound)`. Modulo bias is below 2^-52 at the bounds this
    /// crate uses (all far under 2^12).
    #[inline]
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.next_u64() % bound
    }
}
