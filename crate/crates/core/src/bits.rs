//! Random bit sources with exact consumption accounting.
//!
//! Every randomized component draws its bits through [`BitSource`], so the
//! number of random bits a run uses can be read off afterwards. A single
//! 64-bit master seed is expanded into independent per-component sources by
//! [`SeededBits::derive`]:
//!
//! ```text
//! key = SHA-256("dyckham/seed/v1" || master_seed as 8 LE bytes || label)
//! bits = ChaCha20 keystream keyed by `key`, read as LE u64 words, low bit first
//! ```

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("random bit source exhausted")]
pub struct SourceExhausted;

pub trait BitSource {
    /// Next `nbits` bits (at most 64), first drawn bit in the lowest position.
    fn take(&mut self, nbits: u32) -> Result<u64, SourceExhausted>;

    /// Total bits handed out so far.
    fn consumed(&self) -> u64;

    fn take_bit(&mut self) -> Result<bool, SourceExhausted> {
        Ok(self.take(1)? == 1)
    }
}

const SPLITTER_DOMAIN: &[u8] = b"dyckham/seed/v1";

/// Unbounded pseudorandom bits derived from a master seed and a label.
#[derive(Clone, Debug)]
pub struct SeededBits {
    rng: ChaCha20Rng,
    buf: u64,
    avail: u32,
    consumed: u64,
}

fn split_key(master: u64, label: &str) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(SPLITTER_DOMAIN);
    h.update(master.to_le_bytes());
    h.update(label.as_bytes());
    h.finalize().into()
}

/// A general-purpose generator keyed like [`SeededBits::derive`]; used for
/// instance generation, never for algorithm randomness.
pub fn derive_rng(master: u64, label: &str) -> ChaCha20Rng {
    ChaCha20Rng::from_seed(split_key(master, label))
}

impl SeededBits {
    pub fn derive(master: u64, label: &str) -> Self {
        SeededBits { rng: ChaCha20Rng::from_seed(split_key(master, label)), buf: 0, avail: 0, consumed: 0 }
    }

    /// Same as [`SeededBits::derive`]; shorthand used in tests.
    pub fn from_seed(master: u64, label: &str) -> Self {
        Self::derive(master, label)
    }
}

impl BitSource for SeededBits {
    fn take(&mut self, nbits: u32) -> Result<u64, SourceExhausted> {
        assert!(nbits <= 64, "take() is limited to 64 bits per call");
        if nbits == 0 {
            return Ok(0);
        }
        let out = if nbits <= self.avail {
            let v = self.buf & low_mask(nbits);
            self.buf = if nbits == 64 { 0 } else { self.buf >> nbits };
            self.avail -= nbits;
            v
        } else {
            let have = self.avail;
            let lo = self.buf & low_mask(have);
            let fresh = self.rng.next_u64();
            let need = nbits - have;
            let hi = fresh & low_mask(need);
            self.buf = if need == 64 { 0 } else { fresh >> need };
            self.avail = 64 - need;
            lo | if have == 64 { 0 } else { hi << have }
        };
        self.consumed += nbits as u64;
        Ok(out)
    }

    fn consumed(&self) -> u64 {
        self.consumed
    }
}

/// A finite, explicit bit string. Used for exhaustive seed enumeration.
#[derive(Clone, Debug)]
pub struct FixedBits {
    bits: Vec<bool>,
    pos: usize,
}

impl FixedBits {
    pub fn new(bits: Vec<bool>) -> Self {
        FixedBits { bits, pos: 0 }
    }

    /// The low `nbits` bits of `value`, least significant first.
    pub fn from_u64(value: u64, nbits: u32) -> Self {
        Self::new((0..nbits).map(|i| (value >> i) & 1 == 1).collect())
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }
}

impl BitSource for FixedBits {
    fn take(&mut self, nbits: u32) -> Result<u64, SourceExhausted> {
        assert!(nbits <= 64);
        if self.remaining() < nbits as usize {
            return Err(SourceExhausted);
        }
        let mut v = 0u64;
        for i in 0..nbits as usize {
            if self.bits[self.pos + i] {
                v |= 1 << i;
            }
        }
        self.pos += nbits as usize;
        Ok(v)
    }

    fn consumed(&self) -> u64 {
        self.pos as u64
    }
}

fn low_mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}
