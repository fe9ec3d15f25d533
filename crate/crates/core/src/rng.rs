//! Named random streams derived from one master seed.
//!
//! Every consumer of randomness asks for a stream by `(purpose, slot, index)`.
//! The stream seed is a SplitMix64 hash of that key and the master seed, so
//! streams are independent of the order in which they are requested and of
//! how many draws other streams made. That is what keeps policies paired:
//! two policies run over the same world see the same tasks and vehicles.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random generator handed out for every stream.
pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    /// Fixed per-scenario draws: cell assignment, C-UAV frequencies and task rates.
    Layout,
    /// Initial vehicle placement.
    Placement,
    /// Per-slot vehicle kinematics and idle-capacity draws.
    Mobility,
    /// Per-slot, per-C-UAV task generation.
    Tasks,
    /// Policy-internal draws (GA, random fog selection).
    Policy,
    /// Free-form streams for test and verification harnesses.
    Harness,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Layout => 0x4c41_594f,
            Purpose::Placement => 0x504c_4143,
            Purpose::Mobility => 0x4d4f_4249,
            Purpose::Tasks => 0x5441_534b,
            Purpose::Policy => 0x504f_4c49,
            Purpose::Harness => 0x4841_524e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedTree {
    master: u64,
}

impl SeedTree {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    pub fn stream(&self, purpose: Purpose, slot: u64, index: u64) -> StreamRng {
        let mut state = self.master ^ purpose.tag().rotate_left(32);
        let mut mix = |v: u64| {
            state = splitmix64(state ^ v);
            state
        };
        mix(slot);
        mix(index);
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            chunk.copy_from_slice(&mix(0x9e37_79b9_7f4a_7c15).to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
