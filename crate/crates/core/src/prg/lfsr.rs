//! Word-at-a-time generation of GF(2) linear recurring sequences.
//!
//! A sequence with connection polynomial `C` (`C(0) = 1`, degree `L`) has the
//! generating function `A(x) = g(x) / C(x)` with `deg g < L`. The next 64
//! outputs are the low 64 coefficients of `g · C^{-1}`, and removing them
//! leaves the numerator `(g + C·O) / x^64`. Each word therefore costs a couple
//! of carry-less multiplies instead of 64 single-bit clock steps.
//!
//! Running the same machinery on the reciprocal polynomial yields the
//! sequence in reverse order.

use crate::gf2e::clmul64;

pub const POLY_LIMBS: usize = 5;

/// Polynomial over GF(2) of degree below 320; bit `i` is the coefficient of `x^i`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Poly(pub [u64; POLY_LIMBS]);

impl Poly {
    pub const ONE: Poly = Poly([1, 0, 0, 0, 0]);

    pub fn bit(&self, i: usize) -> bool {
        i < 64 * POLY_LIMBS && (self.0[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }

    pub fn degree(&self) -> Option<usize> {
        for l in (0..POLY_LIMBS).rev() {
            if self.0[l] != 0 {
                return Some(l * 64 + 63 - self.0[l].leading_zeros() as usize);
            }
        }
        None
    }

    pub fn xor(&self, o: &Poly) -> Poly {
        let mut r = *self;
        for i in 0..POLY_LIMBS {
            r.0[i] ^= o.0[i];
        }
        r
    }

    /// `self << s`, dropping anything beyond the fixed width.
    pub fn shl(&self, s: usize) -> Poly {
        let mut r = Poly::default();
        let limb = s / 64;
        let off = s % 64;
        for i in (limb..POLY_LIMBS).rev() {
            let src = i - limb;
            let mut w = self.0[src] << off;
            if off != 0 && src > 0 {
                w |= self.0[src - 1] >> (64 - off);
            }
            r.0[i] = w;
        }
        r
    }

    /// Division by `x`, dropping the constant term.
    pub fn shr1(&self) -> Poly {
        let mut r = Poly::default();
        for i in 0..POLY_LIMBS {
            r.0[i] = self.0[i] >> 1;
            if i + 1 < POLY_LIMBS {
                r.0[i] |= self.0[i + 1] << 63;
            }
        }
        r
    }

    /// Keeps coefficients of degree below `n`.
    pub fn truncate(&self, n: usize) -> Poly {
        let mut r = *self;
        for i in 0..POLY_LIMBS {
            let lo = i * 64;
            if lo >= n {
                r.0[i] = 0;
            } else if n - lo < 64 {
                r.0[i] &= (1u64 << (n - lo)) - 1;
            }
        }
        r
    }

    /// Parity of the coefficient-wise AND.
    pub fn dot(&self, o: &Poly) -> bool {
        let mut acc = 0u64;
        for i in 0..POLY_LIMBS {
            acc ^= self.0[i] & o.0[i];
        }
        acc.count_ones() & 1 == 1
    }

    /// `x^deg · self(1/x)`: coefficient `i` moves to `deg - i`.
    pub fn reciprocal(&self, deg: usize) -> Poly {
        let mut r = Poly::default();
        for i in 0..=deg {
            if self.bit(i) {
                r.set(deg - i);
            }
        }
        r
    }

    /// Product with a 64-bit polynomial; the result must fit in `POLY_LIMBS + 1` limbs.
    fn mul_word(&self, w: u64) -> [u64; POLY_LIMBS + 1] {
        let mut out = [0u64; POLY_LIMBS + 1];
        for i in 0..POLY_LIMBS {
            if self.0[i] == 0 {
                continue;
            }
            let (lo, hi) = clmul64(self.0[i], w);
            out[i] ^= lo;
            out[i + 1] ^= hi;
        }
        out
    }

    /// `(self · other) mod x^n` for `n <= 320`, schoolbook over limbs.
    pub fn mul_trunc(&self, other: &Poly, n: usize) -> Poly {
        let mut out = [0u64; 2 * POLY_LIMBS];
        for i in 0..POLY_LIMBS {
            if self.0[i] == 0 {
                continue;
            }
            for j in 0..POLY_LIMBS - i {
                let (lo, hi) = clmul64(self.0[i], other.0[j]);
                out[i + j] ^= lo;
                out[i + j + 1] ^= hi;
            }
        }
        let mut r = Poly::default();
        r.0.copy_from_slice(&out[..POLY_LIMBS]);
        r.truncate(n)
    }
}

/// Berlekamp–Massey over GF(2): shortest connection polynomial generating `seq`.
/// Returns `(C, L)` with `C(0) = 1` and `deg C <= L`.
pub fn berlekamp_massey(seq: &[bool]) -> (Poly, usize) {
    let mut c = Poly::ONE;
    let mut b = Poly::ONE;
    let mut l = 0usize;
    let mut m = 1usize;
    // window bit i holds seq[n - i]
    let mut window = Poly::default();
    for (n, &s) in seq.iter().enumerate() {
        window = window.shl(1);
        if s {
            window.0[0] |= 1;
        }
        let d = c.dot(&window);
        if !d {
            m += 1;
        } else if 2 * l <= n {
            let t = c;
            c = c.xor(&b.shl(m));
            l = n + 1 - l;
            b = t;
            m = 1;
        } else {
            c = c.xor(&b.shl(m));
            m += 1;
        }
    }
    (c, l)
}

/// `c^{-1} mod x^64` for `c(0) = 1`, by Newton iteration (`v ← c·v²` in characteristic 2).
pub fn inverse_mod_x64(c_low: u64) -> u64 {
    debug_assert_eq!(c_low & 1, 1);
    let mut v = 1u64;
    for _ in 0..6 {
        let (sq, _) = clmul64(v, v);
        v = clmul64(c_low, sq).0;
    }
    v
}

/// Generator for the sequence with connection polynomial `conn` starting from
/// a given window of `L` outputs.
#[derive(Clone, Debug)]
pub struct SeqGen {
    conn: Poly,
    l: usize,
    inv64: u64,
    num: Poly,
}

impl SeqGen {
    /// `window[i]` is output `i` of the sequence (from the starting point).
    pub fn new(conn: Poly, l: usize, window: &[bool]) -> Self {
        assert!(window.len() >= l);
        assert!(conn.bit(0), "connection polynomial needs a constant term");
        let mut w = Poly::default();
        for (i, b) in window.iter().take(l).enumerate() {
            if *b {
                w.set(i);
            }
        }
        let num = w.mul_trunc(&conn, l);
        SeqGen { conn, l, inv64: inverse_mod_x64(conn.0[0]), num }
    }

    /// Next 64 outputs, earliest in bit 0.
    #[inline]
    pub fn next_word(&mut self) -> u64 {
        if self.l == 0 {
            return 0;
        }
        let out = clmul64(self.num.0[0], self.inv64).0;
        let co = self.conn.mul_word(out);
        let mut next = Poly::default();
        for i in 0..POLY_LIMBS {
            next.0[i] = self.num.0.get(i + 1).copied().unwrap_or(0) ^ co[i + 1];
        }
        self.num = next;
        out
    }

    pub fn degree(&self) -> usize {
        self.l
    }

    /// Live state: numerator, connection polynomial and inverse word.
    pub fn live_bytes(&self) -> u64 {
        2 * self.l.div_ceil(8).max(1) as u64 + 8 + 8
    }
}
