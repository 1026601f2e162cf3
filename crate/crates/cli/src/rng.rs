//! Seed splitting.
//!
//! Every stage draws from `ChaCha8(seed_from_u64(root))` with the ChaCha
//! stream id set to the stage's fixed id. Streams are independent 2^64-block
//! sequences of one keyed generator, so a stage's draws depend only on the
//! root seed and its id: adding or reordering stages never perturbs others.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stage {
    SourceCounts = 1,
    StoredCounts = 2,
    SourceBellSearch = 3,
    StoredBellSearch = 4,
    BellCounts = 5,
    ReferenceProcessCounts = 6,
    MemoryProcessCounts = 7,
}

#[derive(Debug, Clone, Copy)]
pub struct Streams {
    root: u64,
}

impl Streams {
    pub fn new(root: u64) -> Self {
        Self { root }
    }

    pub fn rng(&self, stage: Stage) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.root);
        rng.set_stream(stage as u64);
        rng
    }

    /// A derived seed for components that split their own streams.
    pub fn seed(&self, stage: Stage) -> u64 {
        self.rng(stage).next_u64()
    }
}
