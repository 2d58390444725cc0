//! Counter-based random streams.
//!
//! Every scalar noise increment gets its own stream, addressed by
//! `(seed, trajectory, mode, step)`. The stream key is a hash of that tuple
//! and the stream itself is a SplitMix64 counter walk from the key, so any
//! increment can be regenerated without replaying the ones before it and
//! trajectories are independent of scheduling.

use rand::RngCore;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Address of one random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub trajectory: u64,
    pub mode: i64,
    pub step: u64,
}

impl StreamKey {
    pub fn new(seed: u64, trajectory: u64, mode: i64, step: u64) -> Self {
        Self {
            seed,
            trajectory,
            mode,
            step,
        }
    }

    fn hash(&self) -> u64 {
        StepStreams::new(self.seed, self.trajectory, self.step).mode_key(self.mode)
    }

    pub fn rng(&self) -> StreamRng {
        StreamRng {
            key: self.hash(),
            counter: 0,
        }
    }
}

/// The streams of every mode at one `(seed, trajectory, step)`; hashing the
/// shared prefix once makes per-mode stream creation a single mix.
#[derive(Debug, Clone, Copy)]
pub struct StepStreams {
    prefix: u64,
}

impl StepStreams {
    pub fn new(seed: u64, trajectory: u64, step: u64) -> Self {
        let mut h = mix64(seed ^ 0x5851_f42d_4c95_7f2d);
        h = mix64(h ^ trajectory.wrapping_mul(GOLDEN));
        Self {
            prefix: mix64(h ^ step.wrapping_mul(0x8cb9_2ba7_2f3d_8dd7)),
        }
    }

    #[inline]
    fn mode_key(&self, mode: i64) -> u64 {
        mix64(self.prefix ^ (mode as u64).wrapping_mul(0xd1b5_4a32_d192_ed03))
    }

    /// Same stream as `StreamKey::new(seed, trajectory, mode, step).rng()`.
    #[inline]
    pub fn rng(&self, mode: i64) -> StreamRng {
        StreamRng {
            key: self.mode_key(mode),
            counter: 0,
        }
    }
}

/// SplitMix64 walk starting from a hashed [`StreamKey`].
#[derive(Debug, Clone)]
pub struct StreamRng {
    key: u64,
    counter: u64,
}

impl StreamRng {
    pub fn from_key(key: StreamKey) -> Self {
        key.rng()
    }
}

impl RngCore for StreamRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
