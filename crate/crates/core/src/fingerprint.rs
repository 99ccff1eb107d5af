//! One-pass fingerprint test for Hamming distance at most `k`.
//!
//! The stream is `x_1 .. x_n` followed by `y_n .. y_1`. Both occurrences of
//! index `i` contribute `α^(i-1)`, so in characteristic 2 equal bits cancel and
//! the final value is `Σ_{i : x_i ≠ y_i} α^(i-1)`: a boolean polynomial whose
//! weight is exactly the Hamming distance. After the stream, a support of
//! size at most `k` with the same value is searched for.

use thiserror::Error;

use crate::bits::{BitSource, SourceExhausted};
use crate::gf2e::{field_for, FieldCtx, FieldElem, FieldError};
use crate::meter::Meter;
use crate::support::{SearchOutcome, SupportIndex};
use crate::verdict::{RejectReason, Verdict};

/// Default error exponent: failure probability at most `n^-c`.
pub const DEFAULT_C: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FpError {
    #[error("stream length must be positive")]
    EmptyStream,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Exhausted(#[from] SourceExhausted),
    #[error("stream already holds {0} items")]
    StreamOverflow(u64),
    #[error("stream incomplete: {seen} of {expected} items")]
    StreamIncomplete { seen: u64, expected: u64 },
}

/// `⌈log2 n⌉`, with `log2 1 = 0`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Field width request `(k + 1 + c)·⌈log2 n⌉`, rounded up to whole bytes.
pub fn fp_width_request(n: u64, k: u32, c: u32) -> u32 {
    let raw = (k as u64 + 1 + c as u64) * ceil_log2(n) as u64;
    raw.max(1).div_ceil(8).saturating_mul(8).min(u32::MAX as u64) as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpConfig {
    pub n: u64,
    pub k: u32,
    pub c: u32,
    pub ctx: FieldCtx,
}

impl FpConfig {
    pub fn new(n: u64, k: u32, c: u32) -> Result<Self, FpError> {
        if n == 0 {
            return Err(FpError::EmptyStream);
        }
        let ctx = field_for(fp_width_request(n, k, c))?;
        Ok(FpConfig { n, k, c, ctx })
    }

    /// Fingerprint collision bound `n^(k+1) / 2^ℓ`.
    pub fn failure_bound(&self) -> f64 {
        ((self.k as f64 + 1.0) * (self.n as f64).log2() - self.ctx.width() as f64).exp2()
    }
}

/// Running fingerprint of a stream `x` then `y^R`.
#[derive(Debug, Clone)]
pub struct FpState {
    alpha: FieldElem,
    /// `α^pos` while reading `x`.
    alpha_pow: FieldElem,
    /// `Σ x_j α^(j-1)` over the prefix of `x` read so far.
    acc: FieldElem,
    /// Horner accumulator for the reversed half: `Σ y_j α^(j-1)` once complete.
    acc_y: FieldElem,
    pos: u64,
    meter: Meter,
}

impl FpState {
    pub fn begin<B: BitSource + ?Sized>(cfg: &FpConfig, rng: &mut B) -> Result<Self, FpError> {
        let before = rng.consumed();
        let alpha = cfg.ctx.random_elem(rng)?;
        Ok(Self::with_alpha(cfg, alpha, rng.consumed() - before))
    }

    /// State for an explicit evaluation point (used by exhaustive tests).
    pub fn with_alpha(cfg: &FpConfig, alpha: FieldElem, randomness_bits: u64) -> Self {
        let mut s = FpState {
            alpha,
            alpha_pow: FieldElem::ONE,
            acc: FieldElem::ZERO,
            acc_y: FieldElem::ZERO,
            pos: 0,
            meter: Meter { randomness_bits, ..Meter::default() },
        };
        s.meter.observe_live(s.live_bytes(cfg));
        s
    }

    pub fn alpha(&self) -> FieldElem {
        self.alpha
    }

    pub fn pos(&self) -> u64 {
        self.pos
    }

    /// `q_{x,y}(α)` for the items read so far.
    pub fn value(&self) -> FieldElem {
        self.acc + self.acc_y
    }

    /// Bytes of streaming state: four field elements, the position and the
    /// configuration words.
    pub fn live_bytes(&self, cfg: &FpConfig) -> u64 {
        4 * cfg.ctx.elem_bytes() as u64 + 8 + 16
    }

    #[inline]
    pub fn push(&mut self, cfg: &FpConfig, bit: bool) -> Result<(), FpError> {
        let n = cfg.n;
        if self.pos >= 2 * n {
            return Err(FpError::StreamOverflow(self.pos));
        }
        if self.pos < n {
            if bit {
                self.acc += self.alpha_pow;
            }
            self.alpha_pow = cfg.ctx.mul(self.alpha_pow, self.alpha);
        } else {
            self.acc_y = cfg.ctx.mul(self.acc_y, self.alpha);
            if bit {
                self.acc_y += FieldElem::ONE;
            }
        }
        self.pos += 1;
        self.meter.items += 1;
        Ok(())
    }

    pub fn decide(&self, cfg: &FpConfig) -> Result<Verdict, FpError> {
        self.decide_with_budget(cfg, cfg.k as usize, None)
    }

    /// Decides with an explicit support-size bound and optional step budget.
    pub fn decide_with_budget(&self, cfg: &FpConfig, max_support: usize, budget: Option<u64>) -> Result<Verdict, FpError> {
        if self.pos != 2 * cfg.n {
            return Err(FpError::StreamIncomplete { seen: self.pos, expected: 2 * cfg.n });
        }
        let mut meter = self.meter;
        let target = self.value();
        if target.is_zero() {
            meter.postprocess_steps += 1;
            return Ok(Verdict::accept(Some(vec![]), meter));
        }
        let powers = power_table(&cfg.ctx, self.alpha, cfg.n as usize);
        meter.postprocess_steps += cfg.n;
        let index = SupportIndex::new(powers);
        let res = index.search(target, max_support, budget);
        meter.postprocess_steps += res.steps;
        Ok(match res.outcome {
            SearchOutcome::Found(s) => Verdict::accept(Some(s.into_iter().map(|i| i as u64).collect()), meter),
            SearchOutcome::NotFound => Verdict::reject(RejectReason::NoSmallSupport, meter),
            SearchOutcome::BudgetExceeded => Verdict::reject(RejectReason::BudgetExceeded { steps: res.steps }, meter),
        })
    }

    pub fn meter(&self) -> Meter {
        self.meter
    }
}

/// `[1, α, α², ..., α^(len-1)]`.
pub fn power_table(ctx: &FieldCtx, alpha: FieldElem, len: usize) -> Vec<FieldElem> {
    let mut out = Vec::with_capacity(len);
    let mut p = FieldElem::ONE;
    for _ in 0..len {
        out.push(p);
        p = ctx.mul(p, alpha);
    }
    out
}

/// Runs the whole test on in-memory `x` and `y` (fed as `x` then `y^R`).
pub fn fp_run_pair<B: BitSource + ?Sized>(x: &[bool], y: &[bool], k: u32, c: u32, rng: &mut B) -> Result<Verdict, FpError> {
    assert_eq!(x.len(), y.len());
    let cfg = FpConfig::new(x.len() as u64, k, c)?;
    let mut st = FpState::begin(&cfg, rng)?;
    for b in x.iter().chain(y.iter().rev()) {
        st.push(&cfg, *b)?;
    }
    st.decide(&cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::SeededBits;
    use proptest::prelude::*;

    fn bits(s: &str) -> Vec<bool> {
        s.bytes().map(|b| b == b'1').collect()
    }

    fn run_with_alpha(cfg: &FpConfig, alpha: FieldElem, x: &[bool], y: &[bool]) -> FpState {
        let mut st = FpState::with_alpha(cfg, alpha, 0);
        for b in x.iter().chain(y.iter().rev()) {
            st.push(cfg, *b).unwrap();
        }
        st
    }

    #[test]
    fn width_rule() {
        assert_eq!(FpConfig::new(8, 1, 2).unwrap().ctx.width(), 16);
        assert_eq!(FpConfig::new(1 << 12, 3, 2).unwrap().ctx.width(), 96);
        assert_eq!(FpConfig::new(1, 0, 2).unwrap().ctx.width(), 8);
        assert!(FpConfig::new(1 << 20, 20, 2).is_err());
    }

    #[test]
    fn begin_consumes_width_bits() {
        let cfg = FpConfig::new(1 << 16, 1, 2).unwrap();
        assert_eq!(cfg.ctx.width(), 64);
        let mut src = SeededBits::derive(1, "fp");
        let st = FpState::begin(&cfg, &mut src).unwrap();
        assert_eq!(st.meter().randomness_bits, 64);
        assert_eq!(st.value(), FieldElem::ZERO);
    }

    #[test]
    fn worked_example_n4() {
        let cfg = FpConfig::new(4, 2, 2).unwrap();
        let alpha = cfg.ctx.elem(0x1b3);
        let st = run_with_alpha(&cfg, alpha, &bits("0101"), &bits("0110"));
        // x and y differ at 1-based positions 3 and 4
        let want = cfg.ctx.pow(alpha, 2) + cfg.ctx.pow(alpha, 3);
        assert_eq!(st.value(), want);
        let v = st.decide(&cfg).unwrap();
        assert_eq!(v.support, Some(vec![2, 3]));
    }

    #[test]
    fn single_difference_is_a_power() {
        let cfg = FpConfig::new(10, 1, 2).unwrap();
        let alpha = cfg.ctx.elem(0x77);
        let x = bits("1100101011");
        let mut y = x.clone();
        y[6] = !y[6];
        let st = run_with_alpha(&cfg, alpha, &x, &y);
        assert_eq!(st.value(), cfg.ctx.pow(alpha, 6));
    }

    #[test]
    fn overflow_and_incomplete() {
        let cfg = FpConfig::new(2, 0, 2).unwrap();
        let mut st = FpState::with_alpha(&cfg, cfg.ctx.elem(3), 0);
        assert!(matches!(st.decide(&cfg), Err(FpError::StreamIncomplete { .. })));
        for _ in 0..4 {
            st.push(&cfg, true).unwrap();
        }
        assert_eq!(st.push(&cfg, true), Err(FpError::StreamOverflow(4)));
        assert!(st.decide(&cfg).unwrap().accepted);
    }

    #[test]
    fn live_bytes_do_not_grow_with_n() {
        let small = FpConfig::new(1 << 10, 2, 2).unwrap();
        let big = FpConfig::new(1 << 11, 2, 2).unwrap();
        assert_eq!(small.ctx.width(), big.ctx.width());
        let a = FpState::with_alpha(&small, FieldElem::ONE, 0);
        let b = FpState::with_alpha(&big, FieldElem::ONE, 0);
        assert_eq!(a.live_bytes(&small), b.live_bytes(&big));
    }

    proptest! {
        /// The fingerprint of x ⊕ x' against y ⊕ y' is the sum of both fingerprints.
        #[test]
        fn linear_in_the_stream(
            x in proptest::collection::vec(any::<bool>(), 12),
            y in proptest::collection::vec(any::<bool>(), 12),
            x2 in proptest::collection::vec(any::<bool>(), 12),
            y2 in proptest::collection::vec(any::<bool>(), 12),
            a in 1u64..u64::MAX,
        ) {
            let cfg = FpConfig::new(12, 2, 2).unwrap();
            let alpha = cfg.ctx.elem(a);
            let f1 = run_with_alpha(&cfg, alpha, &x, &y).value();
            let f2 = run_with_alpha(&cfg, alpha, &x2, &y2).value();
            let xs: Vec<bool> = x.iter().zip(&x2).map(|(a, b)| a ^ b).collect();
            let ys: Vec<bool> = y.iter().zip(&y2).map(|(a, b)| a ^ b).collect();
            prop_assert_eq!(run_with_alpha(&cfg, alpha, &xs, &ys).value(), f1 + f2);
        }

        /// Within distance k, the support found is the true difference set
        /// unless the fingerprint collides.
        #[test]
        fn recovers_difference_set(
            x in proptest::collection::vec(any::<bool>(), 64),
            flips in proptest::collection::btree_set(0usize..64, 0..4),
            seed in any::<u64>(),
        ) {
            let mut y = x.clone();
            for f in &flips {
                y[*f] = !y[*f];
            }
            let v = fp_run_pair(&x, &y, 3, 2, &mut SeededBits::derive(seed, "fp")).unwrap();
            prop_assert!(v.accepted);
            prop_assert_eq!(v.support.unwrap(), flips.iter().map(|f| *f as u64).collect::<Vec<_>>());
        }
    }
}
