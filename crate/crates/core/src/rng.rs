//! Seeded random streams.
//!
//! Every consumer of randomness derives its own ChaCha stream from the
//! experiment seed plus a purpose tag and coordinates, so results never depend
//! on the order in which streams are created or on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for; keeps otherwise-equal coordinates apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Init = 1,
    Partition = 2,
    ClientBatches = 3,
    Waveform = 4,
    Test = 0xff,
}

/// Stream for `(seed, purpose, round, client)`.
pub fn stream(seed: u64, purpose: Purpose, round: u32, client: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = ((purpose as u64) << 56) | ((round as u64 & 0xff_ffff) << 32) | client as u64;
    rng.set_stream(id);
    rng
}
