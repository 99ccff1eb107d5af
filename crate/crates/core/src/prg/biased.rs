//! Small-bias sample spaces (powering construction).
//!
//! A seed is a pair `(step, start)` of elements of GF(2^s); output bit `i` is
//! the GF(2) inner product `⟨step^i, start⟩`. For a nonzero test vector `w`
//! of length `m`, the test value is `⟨p_w(step), start⟩`, which is unbiased
//! unless `p_w(step) = 0`; that happens for at most `m - 1` values of `step`,
//! so the bias is at most `(m - 1) / 2^(s+1)`.
//!
//! The output is a linear recurring sequence whose feedback polynomial is the
//! minimal polynomial of `step`, so it can also be streamed word by word with
//! [`BiasedCursor`].

use super::lfsr::{berlekamp_massey, Poly, SeqGen};
use super::PrgError;
use crate::bits::BitSource;
use crate::gf2e::{supported_width_at_least, FieldCtx, FieldElem};

#[derive(Debug, Clone, PartialEq)]
pub struct BiasedSeed {
    m_len: u64,
    /// `log2(1/δ)`, kept in log form since δ' for block 2 can be far below f64 range.
    neg_log2_delta: f64,
    ctx: FieldCtx,
    step: FieldElem,
    start: FieldElem,
}

/// Seed width for output length `m` and bias `2^-neg_log2_delta`: `⌈log2(m/δ)⌉`,
/// rounded up to a supported field width.
pub fn biased_width(m_len: u64, neg_log2_delta: f64) -> Result<u32, PrgError> {
    let raw = ((m_len.max(2) as f64).log2() + neg_log2_delta).ceil().max(1.0);
    if raw > 256.0 {
        return Err(PrgError::SeedTooWide(raw as u64));
    }
    supported_width_at_least(raw as u32).ok_or(PrgError::SeedTooWide(raw as u64))
}

impl BiasedSeed {
    pub fn new<B: BitSource + ?Sized>(m_len: u64, delta: f64, rng: &mut B) -> Result<Self, PrgError> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(PrgError::BadBias(delta));
        }
        Self::with_log_bias(m_len, -delta.log2(), rng)
    }

    /// Bias given as `log2(1/δ)`.
    pub fn with_log_bias<B: BitSource + ?Sized>(m_len: u64, neg_log2_delta: f64, rng: &mut B) -> Result<Self, PrgError> {
        if m_len == 0 {
            return Err(PrgError::EmptyDomain);
        }
        let ctx = FieldCtx::exact(biased_width(m_len, neg_log2_delta)?).expect("supported width");
        let step = ctx.random_elem(rng)?;
        let start = ctx.random_elem(rng)?;
        Ok(BiasedSeed { m_len, neg_log2_delta, ctx, step, start })
    }

    pub fn from_parts(m_len: u64, neg_log2_delta: f64, step: FieldElem, start: FieldElem) -> Result<Self, PrgError> {
        let ctx = FieldCtx::exact(biased_width(m_len, neg_log2_delta)?).expect("supported width");
        if !ctx.contains(&step) || !ctx.contains(&start) {
            return Err(PrgError::SeedOutOfField);
        }
        Ok(BiasedSeed { m_len, neg_log2_delta, ctx, step, start })
    }

    pub fn m_len(&self) -> u64 {
        self.m_len
    }

    pub fn delta(&self) -> f64 {
        (-self.neg_log2_delta).exp2()
    }

    pub fn neg_log2_delta(&self) -> f64 {
        self.neg_log2_delta
    }

    pub fn width(&self) -> u32 {
        self.ctx.width()
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn step(&self) -> FieldElem {
        self.step
    }

    pub fn start(&self) -> FieldElem {
        self.start
    }

    pub fn seed_bits(&self) -> u64 {
        2 * self.ctx.width() as u64
    }

    /// Worst-case linear-test bias of this seed space: `(m - 1) / 2^(s+1)`.
    pub fn bias_bound(&self) -> f64 {
        (self.m_len - 1) as f64 / (self.ctx.width() as f64 + 1.0).exp2()
    }

    /// Working memory of [`BiasedSeed::bit`] in bits: accumulator, squaring
    /// register, one product temporary and the index.
    pub fn eval_footprint_bits(&self) -> u64 {
        3 * self.ctx.width() as u64 + 64
    }

    pub fn bit(&self, i: u64) -> Result<bool, PrgError> {
        if i >= self.m_len {
            return Err(PrgError::IndexOutOfRange { index: i, len: self.m_len });
        }
        Ok(self.bit_unchecked(i))
    }

    /// Random access by exponentiation; valid for any `i`, including beyond `m_len`.
    #[inline]
    pub fn bit_unchecked(&self, i: u64) -> bool {
        self.ctx.pow(self.step, i).dot(&self.start)
    }

    /// `len` consecutive outputs starting at `from`.
    pub fn window(&self, from: u64, len: usize) -> Vec<bool> {
        let mut p = self.ctx.pow(self.step, from);
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(p.dot(&self.start));
            p = self.ctx.mul(p, self.step);
        }
        out
    }

    /// Connection polynomial of the output sequence (from its first `2s` outputs).
    pub fn recurrence(&self) -> Recurrence {
        let seq = self.window(0, 2 * self.ctx.width() as usize);
        let (conn, l) = berlekamp_massey(&seq);
        let reversible = l == 0 || (conn.bit(l) && !self.step.is_zero());
        Recurrence { conn, l, reversible }
    }
}

/// Feedback data shared by all cursors over one seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recurrence {
    pub conn: Poly,
    pub l: usize,
    /// Whether the reciprocal polynomial generates the reversed sequence.
    pub reversible: bool,
}

impl Recurrence {
    pub fn live_bytes(&self) -> u64 {
        (self.l + 1).div_ceil(8) as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Streams 64 outputs at a time, forward from a position or backward from it.
///
/// Backward words hold positions `p, p-1, ..., p-63` in bits `0..64`.
/// Positions below zero in a backward word read as 0.
#[derive(Clone, Debug)]
pub enum BiasedCursor {
    Lfsr {
        gen: SeqGen,
        next_pos: i64,
        dir: Direction,
    },
    /// Fallback when the sequence has no usable reverse recurrence (`step = 0`).
    Direct {
        seed: BiasedSeed,
        next_pos: i64,
        dir: Direction,
    },
}

impl BiasedCursor {
    pub fn new(seed: &BiasedSeed, rec: &Recurrence, pos: u64, dir: Direction) -> Self {
        match dir {
            Direction::Forward => {
                let window = seed.window(pos, rec.l);
                BiasedCursor::Lfsr { gen: SeqGen::new(rec.conn, rec.l, &window), next_pos: pos as i64, dir }
            }
            Direction::Backward if rec.reversible && pos + 1 >= rec.l as u64 => {
                let first = pos + 1 - rec.l as u64;
                let mut window = seed.window(first, rec.l);
                window.reverse();
                BiasedCursor::Lfsr { gen: SeqGen::new(rec.conn.reciprocal(rec.l), rec.l, &window), next_pos: pos as i64, dir }
            }
            _ => BiasedCursor::Direct { seed: seed.clone(), next_pos: pos as i64, dir },
        }
    }

    /// Backward cursor starting at `pos`, derived from this forward cursor's
    /// state by running the recurrence backwards bit by bit. Avoids the
    /// exponentiation a fresh cursor needs. `self` is left untouched.
    pub fn reversed(&self, seed: &BiasedSeed, rec: &Recurrence, pos: u64) -> Self {
        let l = rec.l;
        let (gen, next_pos) = match self {
            BiasedCursor::Lfsr { gen, next_pos, dir: Direction::Forward } => (gen, *next_pos),
            _ => return Self::new(seed, rec, pos, Direction::Backward),
        };
        if !rec.reversible || l == 0 || pos + 1 < l as u64 || next_pos < pos as i64 + 1 - l as i64 {
            return Self::new(seed, rec, pos, Direction::Backward);
        }
        // bit i of `win` is the output at position base + i
        let mut ahead = gen.clone();
        let mut win = Poly::default();
        for w in 0..l.div_ceil(64) {
            win.0[w] = ahead.next_word();
        }
        let mut win = win.truncate(l);
        let taps = rec.conn.reciprocal(l).shr1();
        let target = pos as i64 + 1 - l as i64;
        let mut base = next_pos;
        while base > target {
            let prev = win.dot(&taps);
            win = win.shl(1).truncate(l);
            if prev {
                win.0[0] |= 1;
            }
            base -= 1;
        }
        let recent: Vec<bool> = (0..l).map(|i| win.bit(l - 1 - i)).collect();
        BiasedCursor::Lfsr { gen: SeqGen::new(rec.conn.reciprocal(l), l, &recent), next_pos: pos as i64, dir: Direction::Backward }
    }

    #[inline]
    pub fn next_word(&mut self) -> u64 {
        match self {
            BiasedCursor::Lfsr { gen, next_pos, dir } => {
                let mut w = gen.next_word();
                if *dir == Direction::Backward {
                    if *next_pos < 63 {
                        let valid = (*next_pos + 1).max(0) as u32;
                        w &= if valid == 0 { 0 } else { u64::MAX >> (64 - valid) };
                    }
                    *next_pos -= 64;
                } else {
                    *next_pos += 64;
                }
                w
            }
            BiasedCursor::Direct { seed, next_pos, dir } => {
                let mut w = 0u64;
                for b in 0..64i64 {
                    let p = if *dir == Direction::Forward { *next_pos + b } else { *next_pos - b };
                    if p >= 0 && seed.bit_unchecked(p as u64) {
                        w |= 1 << b;
                    }
                }
                *next_pos += if *dir == Direction::Forward { 64 } else { -64 };
                w
            }
        }
    }

    pub fn live_bytes(&self) -> u64 {
        match self {
            BiasedCursor::Lfsr { gen, .. } => gen.live_bytes() + 8,
            BiasedCursor::Direct { seed, .. } => seed.eval_footprint_bits().div_ceil(8) + 8,
        }
    }
}
