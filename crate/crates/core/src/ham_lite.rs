//! Randomness-efficient Hamming test.
//!
//! Two subalgorithms read the same stream (`x` then `y^R`):
//!
//! * **inner**: hashes positions into `K1` buckets with a pairwise independent
//!   `h1` (so the differences land in distinct buckets), then spreads those into
//!   `K2 ≈ k^(1+δ)` fingerprint buckets with a `u`-wise independent `h2`. Each
//!   bucket keeps `Σ α^j` over the `h1` values `j` it received. After the
//!   stream, the minimum support weight of every bucket (capped at `u`) is
//!   summed; the inner test accepts iff that sum is at most `k`.
//! * **outer**: keeps `reps` parities `⟨x ⊕ y, z_r⟩` against sparse pseudorandom
//!   vectors `z_r` (each coordinate 1 with probability `1/4k`) and rejects when
//!   too many are odd, separating distance `≤ k` from distance `≥ 2k`.
//!
//! The combined test accepts iff both accept. For `k <= 3` the bucket
//! parameters degenerate, and the plain fingerprint test is used instead.

use thiserror::Error;

use crate::bits::{BitSource, SeededBits, SourceExhausted};
use crate::fingerprint::{FpConfig, FpError, FpState};
use crate::gf2e::{supported_width_at_least, FieldCtx, FieldElem};
use crate::meter::Meter;
use crate::prg::{HashFamilySeed, PrgError, YaoSampleSeed, YaoWalker, DEFAULT_DELTA1, DEFAULT_DELTA2};
use crate::support::{SearchOutcome, SupportIndex};
use crate::verdict::{RejectReason, Verdict};

pub const DEFAULT_GAMMA: f64 = 1.0 / 8.0;
pub const DEFAULT_EPSILON: f64 = 0.5;
/// Multiplier in `reps = ⌈c_r · log2(1/γ)⌉`.
pub const DEFAULT_REPS_CONSTANT: f64 = 48.0;
/// Multiplier in `ell2 = ⌈c_u · u · log2(k/γ)⌉`.
pub const DEFAULT_ELL2_CONSTANT: f64 = 1.0;
/// Largest `k` handled by the fingerprint fallback.
pub const FALLBACK_MAX_K: u32 = 3;
/// Bound on random bits per `log2 n`, covering `n <= 2^20`, `k <= 16`, `γ = 1/8`.
pub const RANDOMNESS_PER_LOG2_N: f64 = 6000.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiteError {
    #[error("epsilon must lie in (0, 1), got {0}")]
    BadEpsilon(f64),
    #[error("gamma must lie in (0, 1), got {0}")]
    BadGamma(f64),
    #[error("bucket parameters need k >= 2, got {0}")]
    KTooSmall(u32),
    #[error("per-bucket fingerprints would need {0} bits; at most 256 are supported")]
    FieldTooWide(u64),
    #[error("stream length must be positive")]
    EmptyStream,
    #[error("stream already holds {0} items")]
    StreamOverflow(u64),
    #[error("stream incomplete: {seen} of {expected} items")]
    StreamIncomplete { seen: u64, expected: u64 },
    #[error(transparent)]
    Prg(#[from] PrgError),
    #[error(transparent)]
    Fingerprint(#[from] FpError),
    #[error(transparent)]
    Exhausted(#[from] SourceExhausted),
}

/// Logical index of stream position `pos` for a stream `x` then `y^R`.
#[inline]
pub fn logical_index(n: u64, pos: u64) -> u64 {
    if pos < n {
        pos
    } else {
        2 * n - 1 - pos
    }
}

/// One element of an XOR representation: string position `j` gets `u` added.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XorUpdate {
    pub j: u64,
    pub u: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerConfig {
    pub n: u64,
    pub k: u32,
    pub gamma: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub k1: u64,
    pub k2: u64,
    pub u: u32,
    pub ell2: FieldCtx,
}

impl InnerConfig {
    pub fn new(n: u64, k: u32, epsilon: f64, gamma: f64) -> Result<Self, LiteError> {
        Self::with_constants(n, k, epsilon, epsilon / 2.0, gamma, DEFAULT_ELL2_CONSTANT)
    }

    pub fn with_constants(n: u64, k: u32, epsilon: f64, delta: f64, gamma: f64, c_u: f64) -> Result<Self, LiteError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(LiteError::BadEpsilon(epsilon));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(LiteError::BadGamma(gamma));
        }
        if k < 2 {
            return Err(LiteError::KTooSmall(k));
        }
        if n == 0 {
            return Err(LiteError::EmptyStream);
        }
        assert!(delta > 0.0 && delta < epsilon);
        let kf = k as f64;
        let k1 = ((16.0 * kf * kf / gamma).ceil() as u64).next_power_of_two();
        let k2 = (kf.powf(1.0 + delta).ceil() as u64).next_power_of_two();
        let u = ((2.0 / delta) * (2.0 + (8.0 / gamma).ln() / kf.ln())).ceil() as u32;
        let want = (c_u * u as f64 * (kf / gamma).log2()).ceil() as u64;
        let width = supported_width_at_least(want as u32).filter(|_| want <= 256).ok_or(LiteError::FieldTooWide(want))?;
        Ok(InnerConfig { n, k, gamma, epsilon, delta, k1, k2, u, ell2: FieldCtx::exact(width).expect("supported") })
    }

    /// Bits for the split power tables: `α^j = lo[j mod 2^a] · hi[j >> a]`.
    fn split_bits(&self) -> u32 {
        self.k1.trailing_zeros().div_ceil(2)
    }
}

/// Streaming state of the inner test.
#[derive(Debug, Clone)]
pub struct InnerState {
    h1: HashFamilySeed,
    h2: HashFamilySeed,
    alpha: FieldElem,
    lo: Vec<FieldElem>,
    hi: Vec<FieldElem>,
    buckets: Vec<FieldElem>,
    count: u64,
    randomness_bits: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InnerResult {
    pub accepted: bool,
    /// Sum of capped bucket weights; a lower bound when the search stopped early.
    pub estimate: u64,
    pub steps: u64,
}

impl InnerState {
    pub fn begin<B: BitSource + ?Sized>(cfg: &InnerConfig, rng: &mut B) -> Result<Self, LiteError> {
        let before = rng.consumed();
        let h1 = HashFamilySeed::new(2, cfg.n, cfg.k1, rng)?;
        let h2 = HashFamilySeed::new(cfg.u, cfg.k1, cfg.k2, rng)?;
        let alpha = cfg.ell2.random_elem(rng)?;
        let randomness_bits = rng.consumed() - before;
        Ok(Self::from_parts(cfg, h1, h2, alpha, randomness_bits))
    }

    pub fn from_parts(cfg: &InnerConfig, h1: HashFamilySeed, h2: HashFamilySeed, alpha: FieldElem, randomness_bits: u64) -> Self {
        let a = cfg.split_bits();
        let lo_len = 1usize << a;
        let hi_len = (cfg.k1 >> a).max(1) as usize;
        let lo = crate::fingerprint::power_table(&cfg.ell2, alpha, lo_len);
        let step = cfg.ell2.pow(alpha, lo_len as u64);
        let hi = crate::fingerprint::power_table(&cfg.ell2, step, hi_len);
        InnerState { h1, h2, alpha, lo, hi, buckets: vec![FieldElem::ZERO; cfg.k2 as usize], count: 0, randomness_bits }
    }

    pub fn randomness_bits(&self) -> u64 {
        self.randomness_bits
    }

    pub fn alpha(&self) -> FieldElem {
        self.alpha
    }

    pub fn buckets(&self) -> &[FieldElem] {
        &self.buckets
    }

    pub fn h1(&self) -> &HashFamilySeed {
        &self.h1
    }

    pub fn h2(&self) -> &HashFamilySeed {
        &self.h2
    }

    pub fn live_bytes(&self, cfg: &InnerConfig) -> u64 {
        let eb = cfg.ell2.elem_bytes() as u64;
        (self.buckets.len() + self.lo.len() + self.hi.len() + 1) as u64 * eb + self.h1.live_bytes() + self.h2.live_bytes() + 8
    }

    #[inline]
    fn alpha_pow(&self, cfg: &InnerConfig, j: u64) -> FieldElem {
        let a = cfg.split_bits();
        let lo = self.lo[(j & ((1 << a) - 1)) as usize];
        let hi = self.hi[(j >> a) as usize];
        cfg.ell2.mul(lo, hi)
    }

    /// First-stage hashing of one logical position.
    #[inline]
    pub fn bucketize(&self, index: u64, bit: bool) -> XorUpdate {
        XorUpdate { j: self.h1.eval_unchecked(index), u: bit }
    }

    #[inline]
    pub fn absorb(&mut self, cfg: &InnerConfig, upd: XorUpdate) {
        if upd.u {
            let b = self.h2.eval_unchecked(upd.j) as usize;
            let v = self.alpha_pow(cfg, upd.j);
            self.buckets[b] += v;
        }
    }

    /// Adds one set bit at `index` regardless of stream order.
    #[inline]
    pub fn toggle(&mut self, cfg: &InnerConfig, index: u64) {
        let upd = self.bucketize(index, true);
        self.absorb(cfg, upd);
    }

    #[inline]
    pub fn push(&mut self, cfg: &InnerConfig, bit: bool) -> Result<(), LiteError> {
        if self.count >= 2 * cfg.n {
            return Err(LiteError::StreamOverflow(self.count));
        }
        if bit {
            let i = logical_index(cfg.n, self.count);
            self.toggle(cfg, i);
        }
        self.count += 1;
        Ok(())
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Sum of per-bucket minimum weights, searched one weight level at a time
    /// across all buckets so a rejection needs only the levels that push the
    /// lower bound past `k`.
    pub fn decide(&self, cfg: &InnerConfig) -> InnerResult {
        self.decide_with_limit(cfg, cfg.k as u64)
    }

    /// As [`InnerState::decide`], accepting iff the sum is at most `k`.
    pub fn decide_with_limit(&self, cfg: &InnerConfig, k: u64) -> InnerResult {
        let nonzero: Vec<usize> = (0..self.buckets.len()).filter(|b| !self.buckets[*b].is_zero()).collect();
        let mut steps = 0u64;
        if nonzero.is_empty() {
            return InnerResult { accepted: true, estimate: 0, steps };
        }
        if nonzero.len() as u64 > k {
            return InnerResult { accepted: false, estimate: nonzero.len() as u64, steps };
        }
        let mut slot_of = vec![usize::MAX; self.buckets.len()];
        for (s, b) in nonzero.iter().enumerate() {
            slot_of[*b] = s;
        }
        let mut members: Vec<Vec<FieldElem>> = vec![vec![]; nonzero.len()];
        for j in 0..cfg.k1 {
            let b = self.h2.eval_unchecked(j) as usize;
            steps += 1;
            if slot_of[b] != usize::MAX {
                members[slot_of[b]].push(self.alpha_pow(cfg, j));
            }
        }
        let indexes: Vec<SupportIndex> = members.into_iter().map(SupportIndex::new).collect();
        let mut weight: Vec<Option<u64>> = vec![None; nonzero.len()];
        let mut lower: Vec<u64> = vec![1; nonzero.len()];
        let bound = |weight: &[Option<u64>], lower: &[u64]| -> u64 { weight.iter().zip(lower).map(|(w, l)| w.unwrap_or(*l)).sum() };
        for size in 1..=cfg.u as usize {
            for s in 0..nonzero.len() {
                if weight[s].is_some() {
                    continue;
                }
                let lb = bound(&weight, &lower);
                if lb > k {
                    return InnerResult { accepted: false, estimate: lb, steps };
                }
                let r = indexes[s].exists_size(self.buckets[nonzero[s]], size, None);
                steps += r.steps;
                match r.outcome {
                    SearchOutcome::Found(_) => weight[s] = Some(size as u64),
                    _ if size == cfg.u as usize => weight[s] = Some(cfg.u as u64),
                    _ => lower[s] = size as u64 + 1,
                }
            }
            if weight.iter().all(|w| w.is_some()) {
                break;
            }
        }
        let f = bound(&weight, &lower);
        InnerResult { accepted: f <= k, estimate: f, steps }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OuterConfig {
    pub n: u64,
    pub k: u32,
    pub gamma: f64,
    pub reps: u32,
    pub delta1: f64,
    pub delta2: f64,
    /// Odd-parity probability at distance exactly `k` under independent sampling.
    pub p1: f64,
    /// Odd-parity probability at distance exactly `2k`.
    pub p2: f64,
    /// Reject when at least this many parities are odd.
    pub threshold: f64,
}

/// `Pr[odd parity]` of `d` independent bits that are each 1 with probability `q`.
pub fn odd_parity_probability(q: f64, d: u64) -> f64 {
    (1.0 - (1.0 - 2.0 * q).powi(d as i32)) / 2.0
}

impl OuterConfig {
    pub fn new(n: u64, k: u32, gamma: f64) -> Result<Self, LiteError> {
        Self::with_constants(n, k, gamma, DEFAULT_REPS_CONSTANT, DEFAULT_DELTA1, DEFAULT_DELTA2)
    }

    pub fn with_constants(n: u64, k: u32, gamma: f64, c_r: f64, delta1: f64, delta2: f64) -> Result<Self, LiteError> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(LiteError::BadGamma(gamma));
        }
        if n == 0 {
            return Err(LiteError::EmptyStream);
        }
        let k = k.max(1);
        let reps = (c_r * (1.0 / gamma).log2()).ceil() as u32;
        let (kp, _) = crate::prg::yao::yao_t(k as u64);
        let q = 1.0 / (4.0 * kp as f64);
        let p1 = odd_parity_probability(q, k as u64);
        let p2 = odd_parity_probability(q, 2 * k as u64);
        let threshold = reps as f64 * (p1 + p2) / 2.0;
        Ok(OuterConfig { n, k, gamma, reps, delta1, delta2, p1, p2, threshold })
    }
}

/// Streaming state of the outer test.
#[derive(Debug, Clone)]
pub struct OuterState {
    seeds: Vec<YaoSampleSeed>,
    /// Sequential readers, present while consuming an ordered stream.
    walkers: Option<Vec<YaoWalker>>,
    words: Vec<u64>,
    parity: Vec<u64>,
    count: u64,
    randomness_bits: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterResult {
    pub accepted: bool,
    pub ones: u64,
    pub threshold: f64,
}

impl OuterState {
    pub fn begin<B: BitSource + ?Sized>(cfg: &OuterConfig, rng: &mut B) -> Result<Self, LiteError> {
        let before = rng.consumed();
        let seeds = (0..cfg.reps).map(|_| YaoSampleSeed::new(cfg.n, cfg.k as u64, cfg.delta1, cfg.delta2, rng)).collect::<Result<Vec<_>, _>>()?;
        let randomness_bits = rng.consumed() - before;
        Ok(Self::from_seeds(cfg, seeds, randomness_bits))
    }

    pub fn from_seeds(cfg: &OuterConfig, seeds: Vec<YaoSampleSeed>, randomness_bits: u64) -> Self {
        let reps = cfg.reps as usize;
        assert_eq!(seeds.len(), reps);
        OuterState { seeds, walkers: None, words: vec![0; reps], parity: vec![0; reps.div_ceil(64)], count: 0, randomness_bits }
    }

    pub fn randomness_bits(&self) -> u64 {
        self.randomness_bits
    }

    pub fn seeds(&self) -> &[YaoSampleSeed] {
        &self.seeds
    }

    pub fn parity(&self, r: usize) -> bool {
        (self.parity[r / 64] >> (r % 64)) & 1 == 1
    }

    pub fn live_bytes(&self) -> u64 {
        let seeds: u64 = self.seeds.iter().map(|s| s.seed_bits().div_ceil(8)).sum();
        let walkers: u64 = match &self.walkers {
            Some(ws) => ws.iter().map(|w| w.live_bytes()).sum::<u64>() + 8 * self.words.len() as u64,
            None => self.seeds.iter().map(|s| s.eval_footprint_bits().div_ceil(8)).max().unwrap_or(0),
        };
        seeds + walkers + 8 * self.parity.len() as u64 + 8
    }

    /// Reads the next stream item; the stream must be `x` then `y^R`.
    #[inline]
    pub fn push(&mut self, cfg: &OuterConfig, bit: bool) -> Result<(), LiteError> {
        let n = cfg.n;
        if self.count >= 2 * n {
            return Err(LiteError::StreamOverflow(self.count));
        }
        if self.count == 0 {
            self.walkers = Some(self.seeds.iter().map(|s| s.walker()).collect());
        }
        if self.count == n {
            let ws = self.walkers.as_mut().expect("walkers exist after the first item");
            for (w, s) in ws.iter_mut().zip(&self.seeds) {
                w.turn(s);
            }
        }
        let off = if self.count < n { self.count % 64 } else { (self.count - n) % 64 };
        if off == 0 {
            let ws = self.walkers.as_mut().expect("walkers exist after the first item");
            for (slot, w) in self.words.iter_mut().zip(ws.iter_mut()) {
                *slot = w.next_word();
            }
        }
        if bit {
            for (r, w) in self.words.iter().enumerate() {
                self.parity[r / 64] ^= ((w >> off) & 1) << (r % 64);
            }
        }
        self.count += 1;
        if self.count == 2 * n {
            self.walkers = None;
        }
        Ok(())
    }

    /// Flips parities for a set bit at `index`, in any order.
    pub fn toggle(&mut self, index: u64) -> Result<(), LiteError> {
        for (r, s) in self.seeds.iter().enumerate() {
            if s.sample_bit(index)? {
                self.parity[r / 64] ^= 1 << (r % 64);
            }
        }
        Ok(())
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn decide(&self, cfg: &OuterConfig) -> OuterResult {
        let ones: u64 = self.parity.iter().map(|w| w.count_ones() as u64).sum();
        OuterResult { accepted: (ones as f64) < cfg.threshold, ones, threshold: cfg.threshold }
    }
}

/// Accept iff both subalgorithms accept.
pub fn ham_lite_decide(inner_accepts: bool, outer_accepts: bool) -> bool {
    inner_accepts && outer_accepts
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamLiteConfig {
    pub n: u64,
    pub k: u32,
    pub engine: Engine,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Engine {
    Lite { inner: InnerConfig, outer: OuterConfig },
    Fingerprint(FpConfig),
}

impl HamLiteConfig {
    pub fn new(n: u64, k: u32, epsilon: f64, gamma: f64, c: u32) -> Result<Self, LiteError> {
        let engine = if k <= FALLBACK_MAX_K {
            Engine::Fingerprint(FpConfig::new(n, k, c)?)
        } else {
            Engine::Lite { inner: InnerConfig::new(n, k, epsilon, gamma)?, outer: OuterConfig::new(n, k, gamma)? }
        };
        Ok(HamLiteConfig { n, k, engine })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiteVerdict {
    pub verdict: Verdict,
    pub inner: Option<InnerResult>,
    pub outer: Option<OuterResult>,
}

/// Both subalgorithms advanced in lockstep on one stream.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum HamLiteState {
    Lite { inner: InnerState, outer: OuterState, meter: Meter },
    Fingerprint(FpState),
}

impl HamLiteState {
    /// Seeds each subalgorithm from its own labelled stream derived from `master`.
    pub fn begin(cfg: &HamLiteConfig, master: u64) -> Result<Self, LiteError> {
        match &cfg.engine {
            Engine::Fingerprint(fp) => Ok(HamLiteState::Fingerprint(FpState::begin(fp, &mut SeededBits::derive(master, "fp/alpha"))?)),
            Engine::Lite { inner, outer } => {
                let mut r_inner = SeededBits::derive(master, "lite/inner");
                let mut r_outer = SeededBits::derive(master, "lite/outer");
                let inner_state = InnerState::begin(inner, &mut r_inner)?;
                let outer_state = OuterState::begin(outer, &mut r_outer)?;
                let mut meter = Meter { randomness_bits: inner_state.randomness_bits() + outer_state.randomness_bits(), ..Meter::default() };
                meter.observe_live(inner_state.live_bytes(inner) + outer_state.live_bytes());
                Ok(HamLiteState::Lite { inner: inner_state, outer: outer_state, meter })
            }
        }
    }

    #[inline]
    pub fn push(&mut self, cfg: &HamLiteConfig, bit: bool) -> Result<(), LiteError> {
        match (self, &cfg.engine) {
            (HamLiteState::Fingerprint(st), Engine::Fingerprint(fp)) => Ok(st.push(fp, bit)?),
            (HamLiteState::Lite { inner, outer, meter }, Engine::Lite { inner: ic, outer: oc }) => {
                inner.push(ic, bit)?;
                outer.push(oc, bit)?;
                meter.items += 1;
                if meter.items == 1 {
                    meter.observe_live(inner.live_bytes(ic) + outer.live_bytes());
                }
                Ok(())
            }
            _ => unreachable!("state and config engines always match"),
        }
    }

    pub fn meter(&self) -> Meter {
        match self {
            HamLiteState::Lite { meter, .. } => *meter,
            HamLiteState::Fingerprint(st) => st.meter(),
        }
    }

    pub fn decide(&self, cfg: &HamLiteConfig) -> Result<LiteVerdict, LiteError> {
        match (self, &cfg.engine) {
            (HamLiteState::Fingerprint(st), Engine::Fingerprint(fp)) => Ok(LiteVerdict { verdict: st.decide(fp)?, inner: None, outer: None }),
            (HamLiteState::Lite { inner, outer, meter }, Engine::Lite { inner: ic, outer: oc }) => {
                if inner.count() != 2 * cfg.n {
                    return Err(LiteError::StreamIncomplete { seen: inner.count(), expected: 2 * cfg.n });
                }
                let ir = inner.decide(ic);
                let or = outer.decide(oc);
                let mut meter = *meter;
                meter.postprocess_steps += ir.steps;
                let verdict = if ham_lite_decide(ir.accepted, or.accepted) {
                    Verdict::accept(None, meter)
                } else if !ir.accepted {
                    Verdict::reject(RejectReason::InnerCount { estimate: ir.estimate }, meter)
                } else {
                    Verdict::reject(RejectReason::OuterParity { ones: or.ones, threshold: or.threshold }, meter)
                };
                Ok(LiteVerdict { verdict, inner: Some(ir), outer: Some(or) })
            }
            _ => unreachable!("state and config engines always match"),
        }
    }
}

/// Runs the combined test on in-memory strings (fed as `x` then `y^R`).
pub fn ham_lite_run_pair(cfg: &HamLiteConfig, x: &[bool], y: &[bool], master: u64) -> Result<LiteVerdict, LiteError> {
    assert_eq!(x.len() as u64, cfg.n);
    assert_eq!(y.len() as u64, cfg.n);
    let mut st = HamLiteState::begin(cfg, master)?;
    for b in x.iter().chain(y.iter().rev()) {
        st.push(cfg, *b)?;
    }
    st.decide(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::index::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair_at_distance(rng: &mut ChaCha8Rng, n: usize, d: usize) -> (Vec<bool>, Vec<bool>) {
        let x: Vec<bool> = (0..n).map(|_| rng.random()).collect();
        let mut y = x.clone();
        for i in sample(rng, n, d).into_iter() {
            y[i] = !y[i];
        }
        (x, y)
    }

    #[test]
    fn inner_parameters_k8() {
        let c = InnerConfig::new(1 << 14, 8, 0.5, 0.125).unwrap();
        assert_eq!(c.k1, 8192);
        assert_eq!(c.k2, 16);
        assert_eq!(c.u, 32);
        assert_eq!(c.ell2.width(), 192);
    }

    #[test]
    fn outer_parameters_k8() {
        let c = OuterConfig::new(1 << 14, 8, 0.125).unwrap();
        assert_eq!(c.reps, 144);
        // direct arithmetic: (1 - (15/16)^8)/2 and (1 - (15/16)^16)/2
        let p1 = (1.0 - (15.0f64 / 16.0).powi(8)) / 2.0;
        let p2 = (1.0 - (15.0f64 / 16.0).powi(16)) / 2.0;
        assert!((c.p1 - p1).abs() < 1e-12 && (c.p1 - 0.20163).abs() < 1e-4);
        assert!((c.p2 - p2).abs() < 1e-12 && (c.p2 - 0.32195).abs() < 1e-4);
        let ratio = c.threshold / c.reps as f64;
        assert!(c.p1 < ratio && ratio < c.p2);
        // finite-k values sit just above the asymptotic ones
        assert!(c.p1 > (1.0 - (-0.5f64).exp()) / 2.0);
        assert!(c.p2 > (1.0 - (-1.0f64).exp()) / 2.0);
    }

    #[test]
    fn combination_rule() {
        assert!(ham_lite_decide(true, true));
        assert!(!ham_lite_decide(true, false));
        assert!(!ham_lite_decide(false, true));
    }

    #[test]
    fn absorb_semantics() {
        let cfg = InnerConfig::new(64, 4, 0.5, 0.125).unwrap();
        let mut st = InnerState::begin(&cfg, &mut SeededBits::derive(3, "inner")).unwrap();
        st.absorb(&cfg, XorUpdate { j: 5, u: false });
        assert!(st.buckets().iter().all(|b| b.is_zero()));
        st.absorb(&cfg, XorUpdate { j: 5, u: true });
        let b = st.h2().eval(5).unwrap() as usize;
        assert_eq!(st.buckets()[b], cfg.ell2.pow(st.alpha, 5));
        st.absorb(&cfg, XorUpdate { j: 5, u: true });
        assert!(st.buckets().iter().all(|b| b.is_zero()));
    }

    #[test]
    fn inner_single_bucket_weight_one() {
        let cfg = InnerConfig::new(64, 4, 0.5, 0.125).unwrap();
        let mut st = InnerState::begin(&cfg, &mut SeededBits::derive(4, "inner")).unwrap();
        assert_eq!(st.decide(&cfg), InnerResult { accepted: true, estimate: 0, steps: 0 });
        st.absorb(&cfg, XorUpdate { j: 77, u: true });
        let r = st.decide(&cfg);
        assert!(r.accepted);
        assert_eq!(r.estimate, 1);
    }

    /// Six differences planted at K1 positions in six distinct buckets.
    #[test]
    fn inner_planted_six_rejects_at_k4() {
        let cfg = InnerConfig::with_constants(64, 4, 0.5, 0.25, 0.125, 1.0).unwrap();
        let mut st = InnerState::begin(&cfg, &mut SeededBits::derive(5, "inner")).unwrap();
        let mut used = std::collections::BTreeSet::new();
        let mut planted = 0;
        let mut j = 0;
        while planted < 6 && j < cfg.k1 {
            let b = st.h2().eval(j).unwrap();
            if used.insert(b) {
                st.absorb(&cfg, XorUpdate { j, u: true });
                planted += 1;
            }
            j += 1;
        }
        assert_eq!(planted, 6);
        let r = st.decide(&cfg);
        assert!(!r.accepted);
        assert!(r.estimate > 4);
    }

    #[test]
    fn inner_exact_count_when_spread() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 1 << 10;
        let cfg = InnerConfig::new(n, 8, 0.5, 0.125).unwrap();
        let mut exact = 0;
        let trials = 40;
        for t in 0..trials {
            let d = rng.random_range(0..=8);
            let (x, y) = pair_at_distance(&mut rng, n as usize, d);
            let mut st = InnerState::begin(&cfg, &mut SeededBits::derive(t, "inner")).unwrap();
            for b in x.iter().chain(y.iter().rev()) {
                st.push(&cfg, *b).unwrap();
            }
            let r = st.decide(&cfg);
            if r.accepted && r.estimate == d as u64 {
                exact += 1;
            }
        }
        assert!(exact >= trials - 4, "{exact}/{trials}");
    }

    #[test]
    fn outer_equal_strings_have_even_parities() {
        let cfg = OuterConfig::new(300, 4, 0.125).unwrap();
        let mut st = OuterState::begin(&cfg, &mut SeededBits::derive(1, "outer")).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x: Vec<bool> = (0..300).map(|_| rng.random()).collect();
        for b in x.iter().chain(x.iter().rev()) {
            st.push(&cfg, *b).unwrap();
        }
        let r = st.decide(&cfg);
        assert_eq!(r.ones, 0);
        assert!(r.accepted);
    }

    #[test]
    fn outer_single_difference_reads_the_sample() {
        let n = 200u64;
        let cfg = OuterConfig::new(n, 2, 0.125).unwrap();
        let mut st = OuterState::begin(&cfg, &mut SeededBits::derive(7, "outer")).unwrap();
        let i = 137;
        for pos in 0..2 * n {
            st.push(&cfg, pos == i).unwrap();
        }
        for r in 0..cfg.reps as usize {
            assert_eq!(st.parity(r), st.seeds()[r].sample_bit(i).unwrap());
        }
        let mut toggled = OuterState::begin(&cfg, &mut SeededBits::derive(7, "outer")).unwrap();
        toggled.toggle(i).unwrap();
        for r in 0..cfg.reps as usize {
            assert_eq!(toggled.parity(r), st.parity(r));
        }
    }

    #[test]
    fn outer_all_odd_rejects_all_even_accepts() {
        let cfg = OuterConfig::new(100, 4, 0.125).unwrap();
        let mut st = OuterState::begin(&cfg, &mut SeededBits::derive(1, "outer")).unwrap();
        assert!(st.decide(&cfg).accepted);
        for w in st.parity.iter_mut() {
            *w = u64::MAX;
        }
        let reps = cfg.reps as usize;
        if !reps.is_multiple_of(64) {
            let last = st.parity.len() - 1;
            st.parity[last] = (1 << (reps % 64)) - 1;
        }
        let r = st.decide(&cfg);
        assert_eq!(r.ones, cfg.reps as u64);
        assert!(!r.accepted);
    }

    #[test]
    fn small_k_uses_fingerprint() {
        let cfg = HamLiteConfig::new(128, 3, 0.5, 0.125, 2).unwrap();
        assert!(matches!(cfg.engine, Engine::Fingerprint(_)));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (x, y) = pair_at_distance(&mut rng, 128, 3);
        let v = ham_lite_run_pair(&cfg, &x, &y, 5).unwrap();
        assert!(v.verdict.accepted);
    }

    #[test]
    fn combined_end_to_end_small() {
        let n = 1 << 10;
        let cfg = HamLiteConfig::new(n, 4, 0.5, 0.125, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut errors = 0;
        for t in 0..30 {
            let d = [0usize, 2, 4, 8, 12][t % 5];
            let (x, y) = pair_at_distance(&mut rng, n as usize, d);
            let v = ham_lite_run_pair(&cfg, &x, &y, t as u64).unwrap();
            if v.verdict.accepted != (d <= 4) {
                errors += 1;
            }
        }
        assert!(errors <= 6, "{errors} errors");
    }
}
