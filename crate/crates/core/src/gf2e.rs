//! Arithmetic in binary extension fields GF(2^ℓ).
//!
//! Elements are stored as four 64-bit limbs (bit `i` is the coefficient of
//! `x^i`), so every supported width up to 256 bits shares one value type.
//! Each width has exactly one modulus, taken from a fixed table of low-weight
//! irreducible polynomials (smallest trinomial, else smallest pentanomial), so
//! fingerprints computed on different runs are comparable.
//!
//! [`field_for`] is the entry point for fingerprint code: it rounds a requested
//! width up to the nearest supported width of at least 8 bits. Hash families
//! and small-bias generators need exact small widths and use
//! [`FieldCtx::exact`] instead.

use std::fmt;
use std::ops::{Add, AddAssign};

use thiserror::Error;

use crate::bits::{BitSource, SourceExhausted};

/// Largest supported field width in bits.
pub const MAX_WIDTH: u32 = 256;

const LIMBS: usize = 4;

/// Low-order terms of the modulus `x^ℓ + Σ x^t` for ℓ = 1..=64.
/// Index `ℓ - 1`; every entry ends with the constant term 0.
const SMALL_TAPS: [&[u32]; 64] = [
    &[0],
    &[1, 0],
    &[1, 0],
    &[1, 0],
    &[2, 0],
    &[1, 0],
    &[1, 0],
    &[4, 3, 1, 0],
    &[1, 0],
    &[3, 0],
    &[2, 0],
    &[3, 0],
    &[4, 3, 1, 0],
    &[5, 0],
    &[1, 0],
    &[5, 3, 1, 0],
    &[3, 0],
    &[3, 0],
    &[5, 2, 1, 0],
    &[3, 0],
    &[2, 0],
    &[1, 0],
    &[5, 0],
    &[4, 3, 1, 0],
    &[3, 0],
    &[4, 3, 1, 0],
    &[5, 2, 1, 0],
    &[1, 0],
    &[2, 0],
    &[1, 0],
    &[3, 0],
    &[7, 3, 2, 0],
    &[10, 0],
    &[7, 0],
    &[2, 0],
    &[9, 0],
    &[6, 4, 1, 0],
    &[6, 5, 1, 0],
    &[4, 0],
    &[5, 4, 3, 0],
    &[3, 0],
    &[7, 0],
    &[6, 4, 3, 0],
    &[5, 0],
    &[4, 3, 1, 0],
    &[1, 0],
    &[5, 0],
    &[5, 3, 2, 0],
    &[9, 0],
    &[4, 3, 2, 0],
    &[6, 3, 1, 0],
    &[3, 0],
    &[6, 2, 1, 0],
    &[9, 0],
    &[7, 0],
    &[7, 4, 2, 0],
    &[4, 0],
    &[19, 0],
    &[7, 4, 2, 0],
    &[1, 0],
    &[5, 2, 1, 0],
    &[29, 0],
    &[1, 0],
    &[4, 3, 1, 0],
];

const LARGE_TAPS: [(u32, &[u32]); 4] = [(96, &[10, 9, 6, 0]), (128, &[7, 2, 1, 0]), (192, &[7, 2, 1, 0]), (256, &[10, 5, 2, 0])];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("requested field width {0} exceeds the supported maximum of 256 bits")]
    RequestTooLarge(u32),
    #[error("field width must be positive")]
    ZeroWidth,
    #[error("no modulus is tabulated for width {0}")]
    UnsupportedWidth(u32),
}

/// A GF(2^ℓ) element. Bits at positions `>= ℓ` are always zero for elements
/// produced by a [`FieldCtx`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FieldElem([u64; LIMBS]);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem([0; LIMBS]);
    pub const ONE: FieldElem = FieldElem([1, 0, 0, 0]);

    pub const fn from_u64(v: u64) -> Self {
        FieldElem([v, 0, 0, 0])
    }

    pub const fn from_limbs(limbs: [u64; 4]) -> Self {
        FieldElem(limbs)
    }

    pub const fn limbs(&self) -> &[u64; 4] {
        &self.0
    }

    pub fn low_u64(&self) -> u64 {
        self.0[0]
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; LIMBS]
    }

    pub fn bit(&self, i: u32) -> bool {
        (self.0[(i / 64) as usize] >> (i % 64)) & 1 == 1
    }

    /// GF(2) inner product of the coefficient vectors: parity of `self & other`.
    pub fn dot(&self, other: &FieldElem) -> bool {
        let mut acc = 0u64;
        for i in 0..LIMBS {
            acc ^= self.0[i] & other.0[i];
        }
        acc.count_ones() & 1 == 1
    }

    /// Bytes in the little-endian limb encoding truncated to `width` bits.
    pub fn to_bytes(&self, width: u32) -> Vec<u8> {
        let nbytes = width.div_ceil(8) as usize;
        let mut out = Vec::with_capacity(nbytes);
        for i in 0..nbytes {
            out.push((self.0[i / 8] >> ((i % 8) * 8)) as u8);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut limbs = [0u64; LIMBS];
        for (i, b) in bytes.iter().take(LIMBS * 8).enumerate() {
            limbs[i / 8] |= (*b as u64) << ((i % 8) * 8);
        }
        FieldElem(limbs)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElem(0x")?;
        let mut started = false;
        for limb in self.0.iter().rev() {
            if started {
                write!(f, "{limb:016x}")?;
            } else if *limb != 0 {
                write!(f, "{limb:x}")?;
                started = true;
            }
        }
        if !started {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl Add for FieldElem {
    type Output = FieldElem;

    #[inline]
    fn add(self, rhs: FieldElem) -> FieldElem {
        FieldElem([self.0[0] ^ rhs.0[0], self.0[1] ^ rhs.0[1], self.0[2] ^ rhs.0[2], self.0[3] ^ rhs.0[3]])
    }
}

impl AddAssign for FieldElem {
    // addition in characteristic 2 is xor
    #[allow(clippy::suspicious_op_assign_impl)]
    #[inline]
    fn add_assign(&mut self, rhs: FieldElem) {
        for i in 0..LIMBS {
            self.0[i] ^= rhs.0[i];
        }
    }
}

/// Width and modulus of a binary field. Cheap to copy and share.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct FieldCtx {
    width: u32,
    limbs: usize,
    taps: [u32; 4],
    ntaps: usize,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod x^{}", self.width, self.width)?;
        for t in self.taps() {
            if *t == 0 {
                write!(f, " + 1")?;
            } else if *t == 1 {
                write!(f, " + x")?;
            } else {
                write!(f, " + x^{t}")?;
            }
        }
        Ok(())
    }
}

/// Smallest supported width `>= ell_requested`, never below 8 bits.
pub fn field_for(ell_requested: u32) -> Result<FieldCtx, FieldError> {
    if ell_requested > MAX_WIDTH {
        return Err(FieldError::RequestTooLarge(ell_requested));
    }
    let target = ell_requested.max(8);
    let width = supported_width_at_least(target).ok_or(FieldError::RequestTooLarge(ell_requested))?;
    FieldCtx::exact(width)
}

/// Smallest tabulated width `>= bits` (any width from 1 to 64, then 96, 128,
/// 192, 256).
pub fn supported_width_at_least(bits: u32) -> Option<u32> {
    let bits = bits.max(1);
    if bits <= 64 {
        return Some(bits);
    }
    LARGE_TAPS.iter().map(|(w, _)| *w).find(|w| *w >= bits)
}

impl FieldCtx {
    /// Field of exactly `width` bits. Fails for widths without a tabulated modulus.
    pub fn exact(width: u32) -> Result<Self, FieldError> {
        if width == 0 {
            return Err(FieldError::ZeroWidth);
        }
        if width > MAX_WIDTH {
            return Err(FieldError::RequestTooLarge(width));
        }
        let taps: &[u32] = if width <= 64 {
            SMALL_TAPS[(width - 1) as usize]
        } else {
            LARGE_TAPS.iter().find(|(w, _)| *w == width).map(|(_, t)| *t).ok_or(FieldError::UnsupportedWidth(width))?
        };
        let mut arr = [0u32; 4];
        arr[..taps.len()].copy_from_slice(taps);
        Ok(FieldCtx { width, limbs: width.div_ceil(64) as usize, taps: arr, ntaps: taps.len() })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Size of one element in bytes when stored compactly.
    pub fn elem_bytes(&self) -> usize {
        self.width.div_ceil(8) as usize
    }

    /// Exponents of the non-leading modulus terms, descending.
    pub fn taps(&self) -> &[u32] {
        &self.taps[..self.ntaps]
    }

    /// The modulus as a little-endian bit vector of `width + 1` bits (five limbs).
    pub fn modulus_bits(&self) -> [u64; 5] {
        let mut m = [0u64; 5];
        m[(self.width / 64) as usize] |= 1 << (self.width % 64);
        for t in self.taps() {
            m[(*t / 64) as usize] |= 1 << (t % 64);
        }
        m
    }

    /// Element whose low bits are `v`, reduced into the field.
    pub fn elem(&self, v: u64) -> FieldElem {
        if self.width >= 64 {
            FieldElem::from_u64(v)
        } else {
            FieldElem::from_u64(self.reduce_narrow(v as u128))
        }
    }

    pub fn contains(&self, a: &FieldElem) -> bool {
        let mut masked = *a;
        self.mask(&mut masked);
        masked == *a
    }

    fn mask(&self, a: &mut FieldElem) {
        for i in 0..LIMBS {
            let lo = (i as u32) * 64;
            if lo >= self.width {
                a.0[i] = 0;
            } else if self.width - lo < 64 {
                a.0[i] &= (1u64 << (self.width - lo)) - 1;
            }
        }
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        a + b
    }

    /// Carry-less product reduced modulo the field polynomial.
    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.limbs == 1 {
            let (lo, hi) = clmul64(a.0[0], b.0[0]);
            return FieldElem::from_u64(self.reduce_narrow(((hi as u128) << 64) | lo as u128));
        }
        let mut prod = [0u64; 2 * LIMBS];
        for i in 0..self.limbs {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..self.limbs {
                let (lo, hi) = clmul64(a.0[i], b.0[j]);
                prod[i + j] ^= lo;
                prod[i + j + 1] ^= hi;
            }
        }
        self.reduce(prod)
    }

    #[inline]
    pub fn square(&self, a: FieldElem) -> FieldElem {
        self.mul(a, a)
    }

    /// Multiplication by the generator `x`: one shift and at most one fold.
    #[inline]
    #[allow(clippy::needless_range_loop)]
    pub fn mul_by_x(&self, a: FieldElem) -> FieldElem {
        let top = a.bit(self.width - 1);
        let mut r = [0u64; LIMBS];
        let mut carry = 0u64;
        for i in 0..self.limbs {
            r[i] = (a.0[i] << 1) | carry;
            carry = a.0[i] >> 63;
        }
        let mut out = FieldElem(r);
        self.mask(&mut out);
        if top {
            for t in self.taps() {
                out.0[(*t / 64) as usize] ^= 1 << (t % 64);
            }
        }
        out
    }

    /// Square-and-multiply; `pow(a, 0) = 1` for every `a`, including zero.
    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        let mut result = FieldElem::ONE;
        if e == 0 {
            return result;
        }
        let top = 63 - e.leading_zeros();
        for bit in (0..=top).rev() {
            result = self.square(result);
            if (e >> bit) & 1 == 1 {
                result = self.mul(result, a);
            }
        }
        result
    }

    /// `a^(2^k)`, i.e. `k` applications of the Frobenius map.
    pub fn frobenius(&self, a: FieldElem, k: u32) -> FieldElem {
        let mut r = a;
        for _ in 0..k {
            r = self.square(r);
        }
        r
    }

    /// Multiplicative inverse via `a^(2^ℓ - 2)`; zero maps to zero.
    pub fn inv(&self, a: FieldElem) -> FieldElem {
        let mut acc = FieldElem::ONE;
        let mut sq = a;
        for _ in 1..self.width {
            sq = self.square(sq);
            acc = self.mul(acc, sq);
        }
        acc
    }

    /// Draws exactly `width` bits from `src`.
    pub fn random_elem<B: BitSource + ?Sized>(&self, src: &mut B) -> Result<FieldElem, SourceExhausted> {
        let mut limbs = [0u64; LIMBS];
        let mut remaining = self.width;
        let mut i = 0;
        while remaining > 0 {
            let take = remaining.min(64);
            limbs[i] = src.take(take)?;
            remaining -= take;
            i += 1;
        }
        Ok(FieldElem(limbs))
    }

    /// Reduces a product of at most `2·width - 1` bits when `width <= 64`.
    #[inline]
    fn reduce_narrow(&self, mut p: u128) -> u64 {
        let w = self.width;
        let mask: u128 = (1u128 << w) - 1;
        loop {
            let h = p >> w;
            if h == 0 {
                return p as u64;
            }
            p &= mask;
            for t in self.taps() {
                p ^= h << t;
            }
        }
    }

    fn reduce(&self, p: [u64; 2 * LIMBS]) -> FieldElem {
        match self.limbs {
            2 => self.reduce_sparse::<2>(p),
            3 => self.reduce_sparse::<3>(p),
            _ => self.reduce_sparse::<4>(p),
        }
    }

    /// Reduction for the wide moduli, whose taps all sit below bit 64 (below
    /// 11 in practice): one fold of the high half, then one fold of the few
    /// bits that spill past the width again.
    #[inline]
    fn reduce_sparse<const L: usize>(&self, p: [u64; 2 * LIMBS]) -> FieldElem {
        let w = self.width as usize;
        let limb = w / 64;
        let off = w % 64;
        debug_assert!(self.taps().iter().all(|t| *t < 54) && w > 64);
        // h = p >> w; the product has degree < 2w - 1, so h fits in L words.
        let mut h = [0u64; LIMBS];
        for (i, hi) in h.iter_mut().enumerate().take(L) {
            let lo = p[i + limb] >> off;
            let up = if off != 0 && i + limb + 1 < 2 * L { p[i + limb + 1] << (64 - off) } else { 0 };
            *hi = lo | up;
        }
        let mut r = [0u64; LIMBS + 1];
        r[..L].copy_from_slice(&p[..L]);
        if off == 0 {
            r[limb..].fill(0);
        } else {
            r[limb] &= (1u64 << off) - 1;
            r[limb + 1..].fill(0);
        }
        for &t in self.taps() {
            if t == 0 {
                for i in 0..L {
                    r[i] ^= h[i];
                }
            } else {
                let t = t as usize;
                r[0] ^= h[0] << t;
                for i in 1..L {
                    r[i] ^= (h[i] << t) | (h[i - 1] >> (64 - t));
                }
                r[L] ^= h[L - 1] >> (64 - t);
            }
        }
        // Bits at or above w now number fewer than the largest tap.
        let spill = (r[limb] >> off) | if off != 0 { r[limb + 1] << (64 - off) } else { 0 };
        if off == 0 {
            r[limb] = 0;
        } else {
            r[limb] &= (1u64 << off) - 1;
        }
        r[limb + 1..].fill(0);
        for &t in self.taps() {
            r[0] ^= spill << t;
        }
        FieldElem([r[0], r[1], r[2], r[3]])
    }
}

/// 64×64 → 128-bit carry-less multiplication, returned as `(low, high)`.
#[inline]
pub fn clmul64(a: u64, b: u64) -> (u64, u64) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("pclmulqdq") {
            // SAFETY: the required CPU feature was detected at runtime.
            return unsafe { clmul64_pclmul(a, b) };
        }
    }
    clmul64_soft(a, b)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq", enable = "sse2")]
unsafe fn clmul64_pclmul(a: u64, b: u64) -> (u64, u64) {
    use std::arch::x86_64::{_mm_clmulepi64_si128, _mm_cvtsi128_si64, _mm_set_epi64x, _mm_srli_si128};
    let va = _mm_set_epi64x(0, a as i64);
    let vb = _mm_set_epi64x(0, b as i64);
    let r = _mm_clmulepi64_si128::<0x00>(va, vb);
    let lo = _mm_cvtsi128_si64(r) as u64;
    let hi = _mm_cvtsi128_si64(_mm_srli_si128::<8>(r)) as u64;
    (lo, hi)
}

/// Portable 4-bit windowed carry-less multiply.
#[allow(clippy::needless_range_loop)]
pub fn clmul64_soft(a: u64, b: u64) -> (u64, u64) {
    let mut table = [0u128; 16];
    let a = a as u128;
    for i in 1..16usize {
        let mut v = 0u128;
        for bit in 0..4 {
            if (i >> bit) & 1 == 1 {
                v ^= a << bit;
            }
        }
        table[i] = v;
    }
    let mut r = 0u128;
    for nib in (0..16).rev() {
        r = (r << 4) ^ table[((b >> (nib * 4)) & 0xf) as usize];
    }
    (r as u64, (r >> 64) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{FixedBits, SeededBits};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Schoolbook product followed by long division, one bit at a time.
    fn naive_mul(ctx: &FieldCtx, a: FieldElem, b: FieldElem) -> FieldElem {
        let w = ctx.width() as usize;
        let mut prod = vec![false; 2 * w];
        for i in 0..w {
            if !a.bit(i as u32) {
                continue;
            }
            for j in 0..w {
                if b.bit(j as u32) {
                    prod[i + j] ^= true;
                }
            }
        }
        let modulus = ctx.modulus_bits();
        let mbit = |i: usize| (modulus[i / 64] >> (i % 64)) & 1 == 1;
        for top in (w..2 * w).rev() {
            if prod[top] {
                for i in 0..=w {
                    if mbit(i) {
                        prod[top - w + i] ^= true;
                    }
                }
            }
        }
        let mut limbs = [0u64; 4];
        for (i, b) in prod.iter().take(w).enumerate() {
            if *b {
                limbs[i / 64] |= 1 << (i % 64);
            }
        }
        FieldElem::from_limbs(limbs)
    }

    fn random(ctx: &FieldCtx, rng: &mut ChaCha8Rng) -> FieldElem {
        let mut e = FieldElem::from_limbs([rng.random(), rng.random(), rng.random(), rng.random()]);
        ctx.mask(&mut e);
        e
    }

    fn all_widths() -> Vec<u32> {
        (1..=64).chain([96, 128, 192, 256]).collect()
    }

    #[test]
    fn field_for_rounds_up() {
        assert_eq!(field_for(64).unwrap().width(), 64);
        assert_eq!(field_for(64).unwrap().taps(), &[4, 3, 1, 0]);
        assert_eq!(field_for(1).unwrap().width(), 8);
        assert_eq!(field_for(70).unwrap().width(), 96);
        assert_eq!(field_for(12).unwrap().width(), 12);
        assert_eq!(field_for(200).unwrap().width(), 256);
        assert_eq!(field_for(257), Err(FieldError::RequestTooLarge(257)));
    }

    #[test]
    fn exact_rejects_untabulated_widths() {
        assert_eq!(FieldCtx::exact(0), Err(FieldError::ZeroWidth));
        assert_eq!(FieldCtx::exact(100), Err(FieldError::UnsupportedWidth(100)));
    }

    #[test]
    fn add_examples() {
        let a = FieldElem::from_u64(0b011);
        let b = FieldElem::from_u64(0b101);
        assert_eq!(a + b, FieldElem::from_u64(0b110));
        assert_eq!(a + a, FieldElem::ZERO);
        assert_eq!(a + FieldElem::ZERO, a);
    }

    #[test]
    fn mul_small_example() {
        let ctx = FieldCtx::exact(3).unwrap();
        let x = FieldElem::from_u64(0b010);
        let x2 = FieldElem::from_u64(0b100);
        // x * x^2 = x^3 = x + 1 mod x^3 + x + 1
        assert_eq!(ctx.mul(x, x2), FieldElem::from_u64(0b011));
        assert_eq!(naive_mul(&ctx, x, x2), FieldElem::from_u64(0b011));
        assert_eq!(ctx.pow(x, 3), FieldElem::from_u64(0b011));
        assert_eq!(ctx.pow(x, 0), FieldElem::ONE);
        assert_eq!(ctx.pow(x, 1), x);
    }

    #[test]
    fn mul_identity_and_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for w in all_widths() {
            let ctx = FieldCtx::exact(w).unwrap();
            let a = random(&ctx, &mut rng);
            assert_eq!(ctx.mul(a, FieldElem::ONE), a);
            assert_eq!(ctx.mul(FieldElem::ZERO, a), FieldElem::ZERO);
        }
    }

    #[test]
    fn mul_matches_long_division_exhaustively_small() {
        for w in [3u32, 8] {
            let ctx = FieldCtx::exact(w).unwrap();
            for a in 0..(1u64 << w) {
                for b in 0..(1u64 << w) {
                    let (fa, fb) = (FieldElem::from_u64(a), FieldElem::from_u64(b));
                    assert_eq!(ctx.mul(fa, fb), naive_mul(&ctx, fa, fb), "w={w} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn mul_matches_long_division_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for w in all_widths() {
            let ctx = FieldCtx::exact(w).unwrap();
            for _ in 0..50 {
                let (a, b) = (random(&ctx, &mut rng), random(&ctx, &mut rng));
                assert_eq!(ctx.mul(a, b), naive_mul(&ctx, a, b), "w={w}");
            }
        }
    }

    #[test]
    fn ring_axioms_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for w in all_widths() {
            let ctx = FieldCtx::exact(w).unwrap();
            for _ in 0..10_000 {
                let (a, b, c) = (random(&ctx, &mut rng), random(&ctx, &mut rng), random(&ctx, &mut rng));
                assert_eq!(ctx.mul(a, ctx.mul(b, c)), ctx.mul(ctx.mul(a, b), c));
                assert_eq!(ctx.mul(a, b + c), ctx.mul(a, b) + ctx.mul(a, c));
            }
        }
    }

    #[test]
    fn multiplicative_order_exhaustive_up_to_16() {
        for w in 1..=16u32 {
            let ctx = FieldCtx::exact(w).unwrap();
            let order = (1u64 << w) - 1;
            for a in 1..(1u64 << w) {
                assert_eq!(ctx.pow(FieldElem::from_u64(a), order), FieldElem::ONE, "w={w} a={a}");
            }
        }
    }

    #[test]
    fn frobenius_fixes_every_element_sampled() {
        // a^(2^ℓ) = a also certifies the order property for widths beyond u64 exponents.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for w in all_widths().into_iter().filter(|w| *w > 16) {
            let ctx = FieldCtx::exact(w).unwrap();
            for _ in 0..20 {
                let a = random(&ctx, &mut rng);
                assert_eq!(ctx.frobenius(a, w), a);
                if !a.is_zero() {
                    assert_eq!(ctx.mul(a, ctx.inv(a)), FieldElem::ONE);
                }
            }
        }
    }

    #[test]
    fn mul_by_x_agrees_with_mul() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for w in all_widths() {
            let ctx = FieldCtx::exact(w).unwrap();
            let x = ctx.elem(2);
            for _ in 0..50 {
                let a = random(&ctx, &mut rng);
                assert_eq!(ctx.mul_by_x(a), ctx.mul(a, x), "w={w}");
            }
        }
    }

    #[test]
    fn soft_clmul_matches_dispatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let (a, b): (u64, u64) = (rng.random(), rng.random());
            assert_eq!(clmul64(a, b), clmul64_soft(a, b));
        }
    }

    #[test]
    fn random_elem_consumes_width_bits() {
        let ctx = FieldCtx::exact(64).unwrap();
        let mut src = SeededBits::from_seed(9, "test");
        ctx.random_elem(&mut src).unwrap();
        assert_eq!(src.consumed(), 64);

        let ctx = FieldCtx::exact(12).unwrap();
        let mut zeros = FixedBits::new(vec![false; 12]);
        assert_eq!(ctx.random_elem(&mut zeros).unwrap(), FieldElem::ZERO);
        let mut ones = FixedBits::new(vec![true; 12]);
        assert_eq!(ctx.random_elem(&mut ones).unwrap(), FieldElem::from_u64(0xfff));
        let mut short = FixedBits::new(vec![true; 11]);
        assert!(ctx.random_elem(&mut short).is_err());
    }

    /// Rabin's test on the tabulated moduli, using the field's own Frobenius.
    #[test]
    fn moduli_are_irreducible() {
        for w in all_widths().into_iter().filter(|w| *w > 1) {
            let ctx = FieldCtx::exact(w).unwrap();
            let x = ctx.elem(2);
            // x^(2^w) = x in GF(2)[x]/f
            assert_eq!(ctx.frobenius(x, w), x, "w={w}");
            // for each prime q | w: gcd(x^(2^(w/q)) - x, f) = 1, i.e. x^(2^(w/q)) - x is a unit.
            for q in prime_factors(w) {
                let d = ctx.frobenius(x, w / q) + x;
                assert!(!d.is_zero(), "w={w} q={q}");
                assert_eq!(ctx.mul(d, ctx.inv(d)), FieldElem::ONE, "w={w} q={q}: not a unit");
            }
        }
    }

    fn prime_factors(mut n: u32) -> Vec<u32> {
        let mut out = vec![];
        let mut p = 2;
        while n > 1 {
            if n.is_multiple_of(p) {
                out.push(p);
                while n.is_multiple_of(p) {
                    n /= p;
                }
            }
            p += 1;
        }
        out
    }

    #[test]
    fn bytes_round_trip() {
        let e = FieldElem::from_limbs([0x0102030405060708, 0xaa, 0, 0]);
        assert_eq!(FieldElem::from_bytes(&e.to_bytes(72)), e);
    }
}
