// Copyright 2026 qhpc Contributors
// SPDX-License-Identifier: Apache-2.0

//! Labelled, reproducible random streams.
//!
//! Each `(seed, label)` pair maps to its own ChaCha8 stream, so modules
//! draw from disjoint sequences and adding a consumer never shifts another
//! consumer's samples.

use alloc::string::String;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    label: String,
    rng: ChaCha8Rng,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, label: &str) -> Self {
        let mut state = seed ^ fnv1a(label.as_bytes());
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix(&mut state).to_le_bytes());
        }
        RngStream { seed, label: String::from(label), rng: ChaCha8Rng::from_seed(key) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Derived stream, e.g. one per job: `"twin.execute/17"`.
    pub fn substream(&self, suffix: &str) -> RngStream {
        let mut label = self.label.clone();
        label.push('/');
        label.push_str(suffix);
        RngStream::new(self.seed, &label)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_seed_and_label_repeat() {
        let mut a = RngStream::new(42, "twin.execute");
        let mut b = RngStream::new(42, "twin.execute");
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn labels_are_independent() {
        let mut a = RngStream::new(42, "twin.execute");
        let mut b = RngStream::new(42, "facility.faults");
        let xs: alloc::vec::Vec<f64> = (0..8).map(|_| a.random()).collect();
        let ys: alloc::vec::Vec<f64> = (0..8).map(|_| b.random()).collect();
        assert_ne!(xs, ys);
    }
}
