//! The sparse test distribution used by the outer Hamming algorithm.
//!
//! Bit `i` of a sample is the AND of `t` pseudorandom bits, where `2^t = 4k`
//! (with `k` rounded up to a power of two). The first bit comes from a
//! δ₁-biased string of length `n`; the other `t - 1` come from a single
//! δ'-biased string of length `n(t-1)`, laid out so that bit `j` of index `i`
//! sits at position `j·n + i`. Each coordinate is then 1 with probability
//! about `1/(4k)`, and parities of the sample against a fixed vector behave
//! as under truly independent coordinates up to δ₁ + δ₂.

use super::biased::{BiasedCursor, BiasedSeed, Direction, Recurrence};
use super::PrgError;
use crate::bits::BitSource;

/// Default biases for the two blocks.
pub const DEFAULT_DELTA1: f64 = 1.0 / 200.0;
pub const DEFAULT_DELTA2: f64 = 1.0 / 200.0;

#[derive(Debug, Clone, PartialEq)]
pub struct YaoSampleSeed {
    n_len: u64,
    k_pow: u64,
    t: u32,
    block1: BiasedSeed,
    block2: BiasedSeed,
}

/// `(k', t)` with `k'` the next power of two `>= k` and `2^t = 4k'`.
pub fn yao_t(k: u64) -> (u64, u32) {
    let kp = k.max(1).next_power_of_two();
    (kp, kp.trailing_zeros() + 2)
}

/// `log2(1/δ')` for `δ' = (n t)^{-⌈log2(1/δ₂)⌉}`.
pub fn block2_log_bias(n: u64, t: u32, delta2: f64) -> f64 {
    let e = (-delta2.log2()).ceil();
    e * ((n as f64) * t as f64).log2()
}

impl YaoSampleSeed {
    pub fn new<B: BitSource + ?Sized>(n: u64, k: u64, delta1: f64, delta2: f64, rng: &mut B) -> Result<Self, PrgError> {
        if k == 0 {
            return Err(PrgError::ZeroIndependence);
        }
        if n == 0 {
            return Err(PrgError::EmptyDomain);
        }
        for d in [delta1, delta2] {
            if !(d > 0.0 && d < 1.0) {
                return Err(PrgError::BadBias(d));
            }
        }
        let (k_pow, t) = yao_t(k);
        let block1 = BiasedSeed::new(n, delta1, rng)?;
        let block2 = BiasedSeed::with_log_bias(n * (t as u64 - 1), block2_log_bias(n, t, delta2), rng)?;
        Ok(YaoSampleSeed { n_len: n, k_pow, t, block1, block2 })
    }

    pub fn from_blocks(n: u64, k: u64, block1: BiasedSeed, block2: BiasedSeed) -> Result<Self, PrgError> {
        let (k_pow, t) = yao_t(k);
        if block1.m_len() != n || block2.m_len() != n * (t as u64 - 1) {
            return Err(PrgError::BlockLengthMismatch);
        }
        Ok(YaoSampleSeed { n_len: n, k_pow, t, block1, block2 })
    }

    pub fn n_len(&self) -> u64 {
        self.n_len
    }

    pub fn k_pow(&self) -> u64 {
        self.k_pow
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn block1(&self) -> &BiasedSeed {
        &self.block1
    }

    pub fn block2(&self) -> &BiasedSeed {
        &self.block2
    }

    pub fn seed_bits(&self) -> u64 {
        self.block1.seed_bits() + self.block2.seed_bits()
    }

    /// Random-access sample bit; stops at the first zero factor.
    pub fn sample_bit(&self, i: u64) -> Result<bool, PrgError> {
        if i >= self.n_len {
            return Err(PrgError::IndexOutOfRange { index: i, len: self.n_len });
        }
        if !self.block1.bit_unchecked(i) {
            return Ok(false);
        }
        for j in 0..(self.t as u64 - 1) {
            if !self.block2.bit_unchecked(j * self.n_len + i) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Peak working memory of [`YaoSampleSeed::sample_bit`] in bits.
    pub fn eval_footprint_bits(&self) -> u64 {
        self.block1.eval_footprint_bits().max(self.block2.eval_footprint_bits()) + 64
    }

    pub fn walker(&self) -> YaoWalker {
        YaoWalker::new(self)
    }
}

/// Sequential reader of sample words: indices `0, 1, ..., n-1`, then optionally
/// back from `n-1` down to `0`.
#[derive(Clone, Debug)]
pub struct YaoWalker {
    recs: [Recurrence; 2],
    cursors: Vec<BiasedCursor>,
    dir: Direction,
}

impl YaoWalker {
    pub fn new(seed: &YaoSampleSeed) -> Self {
        let recs = [seed.block1.recurrence(), seed.block2.recurrence()];
        let mut cursors = vec![BiasedCursor::new(&seed.block1, &recs[0], 0, Direction::Forward)];
        for j in 0..(seed.t as u64 - 1) {
            cursors.push(BiasedCursor::new(&seed.block2, &recs[1], j * seed.n_len, Direction::Forward));
        }
        YaoWalker { recs, cursors, dir: Direction::Forward }
    }

    /// Next 64 sample bits. Forward words cover indices `i..i+64`, backward
    /// words cover `i, i-1, ..., i-63`, each in bits `0..64`.
    #[inline]
    pub fn next_word(&mut self) -> u64 {
        let mut w = u64::MAX;
        for c in self.cursors.iter_mut() {
            w &= c.next_word();
        }
        w
    }

    /// Switches to the backward pass starting at index `n-1`.
    pub fn turn(&mut self, seed: &YaoSampleSeed) {
        assert_eq!(self.dir, Direction::Forward, "walker already reversed");
        let n = seed.n_len;
        let mut next = Vec::with_capacity(self.cursors.len());
        for (j, c) in self.cursors.iter().enumerate() {
            let (s, rec, pos) = if j == 0 { (&seed.block1, &self.recs[0], n - 1) } else { (&seed.block2, &self.recs[1], (j as u64 - 1) * n + n - 1) };
            next.push(c.reversed(s, rec, pos));
        }
        self.cursors = next;
        self.dir = Direction::Backward;
    }

    pub fn live_bytes(&self) -> u64 {
        self.recs.iter().map(|r| r.live_bytes()).sum::<u64>() + self.cursors.iter().map(|c| c.live_bytes()).sum::<u64>()
    }
}
