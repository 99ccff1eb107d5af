//! One-pass test for membership in the set of strings within `k` type flips
//! of a Dyck₂ word.
//!
//! The stream is cut into blocks of about `√(n log n)` symbols. Pairs matched
//! inside a block are checked directly and their type mismatches counted in
//! `Err`. What remains of a block is a run of closers followed by a run of
//! openers. Every remaining opener gets the next *index* (1, 2, ...); every
//! remaining closer gets the index of the opener it matches by shape, found
//! through a stack of index intervals that grows by at most one entry per
//! block. Each indexed symbol is reported to an [`IndexSink`]: the fingerprint
//! sink adds `α^h` for every square bracket of index `h`, so matched pairs of
//! equal type cancel and the final sum has weight equal to the number of
//! mismatched pairs that crossed a block boundary.

use thiserror::Error;

use crate::bits::{BitSource, SeededBits};
use crate::dyck_codec::Sym;
use crate::fingerprint::{fp_width_request, FpError};
use crate::gf2e::{field_for, FieldCtx, FieldElem, FieldError};
use crate::ham_lite::{InnerConfig, InnerResult, InnerState, LiteError, OuterConfig, OuterResult, OuterState, FALLBACK_MAX_K};
use crate::meter::Meter;
use crate::support::{SearchOutcome, SupportIndex};
use crate::verdict::{RejectReason, Verdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DyckError {
    #[error("stream length must be positive")]
    EmptyStream,
    #[error("block length must be positive")]
    ZeroBlock,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Fingerprint(#[from] FpError),
    #[error(transparent)]
    Lite(#[from] LiteError),
    #[error("stream already holds {0} symbols")]
    StreamOverflow(u64),
    #[error("stream incomplete: {seen} of {expected} symbols")]
    StreamIncomplete { seen: u64, expected: u64 },
}

/// `⌈√(n · log2 n)⌉`, at least 1.
pub fn default_block_len(n: u64) -> u64 {
    let nf = n as f64;
    ((nf * nf.log2().max(1.0)).sqrt().ceil() as u64).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyckConfig {
    pub n: u64,
    pub k: u32,
    pub c: u32,
    pub block_len: u64,
    pub ctx: FieldCtx,
}

impl DyckConfig {
    pub fn new(n: u64, k: u32, c: u32) -> Result<Self, DyckError> {
        if n == 0 {
            return Err(DyckError::EmptyStream);
        }
        let ctx = field_for(fp_width_request(n, k, c))?;
        Ok(DyckConfig { n, k, c, block_len: default_block_len(n), ctx })
    }

    pub fn with_block_len(mut self, block_len: u64) -> Result<Self, DyckError> {
        if block_len == 0 {
            return Err(DyckError::ZeroBlock);
        }
        self.block_len = block_len;
        Ok(self)
    }

    /// Uses an explicit field instead of the width rule.
    pub fn with_field(mut self, ctx: FieldCtx) -> Self {
        self.ctx = ctx;
        self
    }

    pub fn blocks(&self) -> u64 {
        self.n.div_ceil(self.block_len)
    }
}

/// A block after matching inside it: `u` closers then `v` openers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduced {
    /// Type mismatches among pairs matched inside the block.
    pub err: u64,
    /// Unmatched closers with their offsets in the block.
    pub u: Vec<(usize, Sym)>,
    /// Unmatched openers with their offsets in the block.
    pub v: Vec<(usize, Sym)>,
}

/// Mismatches exceeded the budget at block offset `offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockReject {
    pub offset: usize,
    pub errors: u64,
}

/// Matches by shape inside `block`; rejects once mismatches exceed `k_remaining`.
pub fn block_reduce(block: &[Sym], k_remaining: u64) -> Result<Reduced, BlockReject> {
    let mut err = 0u64;
    let mut u = vec![];
    let mut open: Vec<(usize, Sym)> = vec![];
    for (off, s) in block.iter().enumerate() {
        if s.is_open() {
            open.push((off, *s));
        } else if let Some((_, o)) = open.pop() {
            if o.bit() != s.bit() {
                err += 1;
                if err > k_remaining {
                    return Err(BlockReject { offset: off, errors: err });
                }
            }
        } else {
            u.push((off, *s));
        }
    }
    Ok(Reduced { err, u, v: open })
}

/// Inclusive ranges `[m, m']` of indices of openers not matched yet.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntervalStack {
    items: Vec<(u64, u64)>,
    pushes: u64,
    max_depth: usize,
}

impl IntervalStack {
    pub fn push(&mut self, m: u64, m2: u64) {
        debug_assert!(m <= m2);
        debug_assert!(self.items.last().is_none_or(|t| t.1 < m));
        self.items.push((m, m2));
        self.pushes += 1;
        self.max_depth = self.max_depth.max(self.items.len());
    }

    /// Index of the next closer: `m'` of the top interval, which then shrinks
    /// and is dropped once empty.
    pub fn take_closer(&mut self) -> Option<u64> {
        let top = self.items.last_mut()?;
        let h = top.1;
        if top.1 == top.0 {
            self.items.pop();
        } else {
            top.1 -= 1;
        }
        Some(h)
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.items.len()
    }

    pub fn pushes(&self) -> u64 {
        self.pushes
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// Openers still waiting for a closer.
    pub fn unmatched(&self) -> u64 {
        self.items.iter().map(|(m, m2)| m2 - m + 1).sum()
    }

    pub fn intervals(&self) -> &[(u64, u64)] {
        &self.items
    }

    pub fn live_bytes(&self) -> u64 {
        16 * self.items.len() as u64
    }
}

/// Receives every symbol that survives block reduction, with its index.
pub trait IndexSink {
    /// `pos` is the 1-based stream position, `h` the 1-based index and `bit`
    /// is true for square brackets.
    fn event(&mut self, pos: u64, h: u64, open: bool, bit: bool);

    fn live_bytes(&self) -> u64;
}

/// Records all events; for tests and traces.
#[derive(Debug, Clone, Default)]
pub struct RecordingSink {
    pub events: Vec<(u64, u64, bool, bool)>,
}

impl IndexSink for RecordingSink {
    fn event(&mut self, pos: u64, h: u64, open: bool, bit: bool) {
        self.events.push((pos, h, open, bit));
    }

    fn live_bytes(&self) -> u64 {
        0
    }
}

/// Accumulates `Σ α^h` over square brackets.
#[derive(Debug, Clone)]
pub struct FingerprintSink {
    ctx: FieldCtx,
    alpha: FieldElem,
    alpha_inv: FieldElem,
    sum: FieldElem,
    /// `(h, α^h)` for the last event, stepped by `α^{±1}` between neighbours.
    cache: Option<(u64, FieldElem)>,
}

impl FingerprintSink {
    pub fn new(ctx: FieldCtx, alpha: FieldElem) -> Self {
        let alpha_inv = if alpha.is_zero() { FieldElem::ZERO } else { ctx.inv(alpha) };
        FingerprintSink { ctx, alpha, alpha_inv, sum: FieldElem::ZERO, cache: None }
    }

    pub fn sum(&self) -> FieldElem {
        self.sum
    }

    pub fn alpha(&self) -> FieldElem {
        self.alpha
    }

    fn power(&mut self, h: u64) -> FieldElem {
        let p = match self.cache {
            Some((c, p)) if c == h => p,
            Some((c, p)) if c + 1 == h => self.ctx.mul(p, self.alpha),
            Some((c, p)) if h + 1 == c && !self.alpha.is_zero() => self.ctx.mul(p, self.alpha_inv),
            _ => self.ctx.pow(self.alpha, h),
        };
        self.cache = Some((h, p));
        p
    }
}

impl IndexSink for FingerprintSink {
    #[inline]
    fn event(&mut self, _pos: u64, h: u64, _open: bool, bit: bool) {
        let p = self.power(h);
        if bit {
            self.sum += p;
        }
    }

    fn live_bytes(&self) -> u64 {
        4 * self.ctx.elem_bytes() as u64 + 8
    }
}

/// Block buffering, in-block checking and index computation.
#[derive(Debug, Clone)]
pub struct IndexMachine {
    n: u64,
    k: u64,
    block_len: u64,
    block: Vec<Sym>,
    block_start: u64,
    pos: u64,
    c_open: u64,
    err: u64,
    stack: IntervalStack,
    rejected: Option<RejectReason>,
    blocks_done: u64,
}

impl IndexMachine {
    pub fn new(n: u64, k: u64, block_len: u64) -> Self {
        IndexMachine {
            n,
            k,
            block_len,
            block: Vec::with_capacity(block_len.min(n) as usize),
            block_start: 0,
            pos: 0,
            c_open: 0,
            err: 0,
            stack: IntervalStack::default(),
            rejected: None,
            blocks_done: 0,
        }
    }

    pub fn pos(&self) -> u64 {
        self.pos
    }

    pub fn c_open(&self) -> u64 {
        self.c_open
    }

    pub fn err(&self) -> u64 {
        self.err
    }

    pub fn stack(&self) -> &IntervalStack {
        &self.stack
    }

    pub fn rejected(&self) -> Option<&RejectReason> {
        self.rejected.as_ref()
    }

    pub fn blocks_done(&self) -> u64 {
        self.blocks_done
    }

    /// Block buffer (one byte per symbol), stack and counters.
    pub fn live_bytes(&self) -> u64 {
        self.block_len.min(self.n) + self.stack.live_bytes() + 6 * 8
    }

    /// Reads one symbol. After a rejection further symbols are only counted.
    #[inline]
    pub fn push<S: IndexSink + ?Sized>(&mut self, sym: Sym, sink: &mut S) -> Result<bool, DyckError> {
        if self.pos >= self.n {
            return Err(DyckError::StreamOverflow(self.pos));
        }
        self.pos += 1;
        if self.rejected.is_some() {
            return Ok(false);
        }
        self.block.push(sym);
        if self.block.len() as u64 == self.block_len || self.pos == self.n {
            self.flush(sink);
            return Ok(true);
        }
        Ok(false)
    }

    fn flush<S: IndexSink + ?Sized>(&mut self, sink: &mut S) {
        let red = match block_reduce(&self.block, self.k - self.err) {
            Ok(r) => r,
            Err(b) => {
                self.rejected = Some(RejectReason::TooManyErrors { position: self.block_start + b.offset as u64 + 1, errors: self.err + b.errors });
                return;
            }
        };
        self.err += red.err;
        for (off, s) in &red.u {
            let p = self.block_start + *off as u64 + 1;
            match self.stack.take_closer() {
                Some(h) => sink.event(p, h, false, s.bit()),
                None => {
                    self.rejected = Some(RejectReason::StackEmpty { position: p });
                    return;
                }
            }
        }
        if !red.v.is_empty() {
            let m = self.c_open + 1;
            for (off, s) in &red.v {
                self.c_open += 1;
                sink.event(self.block_start + *off as u64 + 1, self.c_open, true, s.bit());
            }
            self.stack.push(m, self.c_open);
        }
        self.block_start += self.block.len() as u64;
        self.block.clear();
        self.blocks_done += 1;
    }

    /// `Ok(None)` when the shape closed properly, else the rejection.
    pub fn finish(&self) -> Result<Option<RejectReason>, DyckError> {
        if let Some(r) = &self.rejected {
            return Ok(Some(r.clone()));
        }
        if self.pos != self.n {
            return Err(DyckError::StreamIncomplete { seen: self.pos, expected: self.n });
        }
        if !self.stack.is_empty() {
            return Ok(Some(RejectReason::Unclosed { open: self.stack.unmatched() }));
        }
        Ok(None)
    }
}

/// Index trace of a whole string: `(position, index)` for every symbol that
/// survives block reduction, in stream order within each block.
pub fn index_trace(w: &[Sym], block_len: u64) -> Result<Vec<(u64, u64)>, RejectReason> {
    let mut m = IndexMachine::new(w.len().max(1) as u64, u64::MAX / 2, block_len);
    let mut rec = RecordingSink::default();
    for s in w {
        m.push(*s, &mut rec).expect("length fits");
    }
    if w.is_empty() {
        return Ok(vec![]);
    }
    match m.finish().expect("complete") {
        Some(r) => Err(r),
        None => {
            let mut ev: Vec<(u64, u64)> = rec.events.iter().map(|e| (e.0, e.1)).collect();
            ev.sort();
            Ok(ev)
        }
    }
}

/// Streaming state of the fingerprint test.
#[derive(Debug, Clone)]
pub struct DyckState {
    machine: IndexMachine,
    fp: FingerprintSink,
    meter: Meter,
}

impl DyckState {
    pub fn begin<B: BitSource + ?Sized>(cfg: &DyckConfig, rng: &mut B) -> Result<Self, DyckError> {
        let before = rng.consumed();
        let alpha = cfg.ctx.random_elem(rng).map_err(FpError::from)?;
        Ok(Self::with_alpha(cfg, alpha, rng.consumed() - before))
    }

    pub fn with_alpha(cfg: &DyckConfig, alpha: FieldElem, randomness_bits: u64) -> Self {
        let mut s = DyckState {
            machine: IndexMachine::new(cfg.n, cfg.k as u64, cfg.block_len),
            fp: FingerprintSink::new(cfg.ctx, alpha),
            meter: Meter { randomness_bits, ..Meter::default() },
        };
        s.observe();
        s
    }

    fn observe(&mut self) {
        let live = self.machine.live_bytes() + self.fp.live_bytes();
        self.meter.observe_live(live);
    }

    #[inline]
    pub fn push(&mut self, sym: Sym) -> Result<(), DyckError> {
        if self.machine.push(sym, &mut self.fp)? {
            self.observe();
        }
        self.meter.items += 1;
        Ok(())
    }

    pub fn machine(&self) -> &IndexMachine {
        &self.machine
    }

    pub fn sum(&self) -> FieldElem {
        self.fp.sum()
    }

    pub fn alpha(&self) -> FieldElem {
        self.fp.alpha()
    }

    pub fn meter(&self) -> Meter {
        self.meter
    }

    pub fn decide(&self, cfg: &DyckConfig) -> Result<Verdict, DyckError> {
        dyck_decide(cfg, self, None)
    }
}

/// Accepts iff the sum equals `Σ_{h∈S} α^h` for some `S ⊆ [1..c_open]` with
/// `|S| <= k - Err`. On acceptance the support lists the indices of the
/// mismatched pairs that crossed block boundaries.
pub fn dyck_decide(cfg: &DyckConfig, st: &DyckState, budget: Option<u64>) -> Result<Verdict, DyckError> {
    let m = &st.machine;
    let mut meter = st.meter;
    if let Some(r) = m.finish()? {
        return Ok(Verdict::reject(r, meter).with_err_count(m.err()));
    }
    let left = cfg.k as u64 - m.err();
    let target = st.sum();
    if target.is_zero() {
        meter.postprocess_steps += 1;
        return Ok(Verdict::accept(Some(vec![]), meter).with_err_count(m.err()));
    }
    let mut powers = Vec::with_capacity(m.c_open() as usize);
    let mut p = st.alpha();
    for _ in 0..m.c_open() {
        powers.push(p);
        p = cfg.ctx.mul(p, st.alpha());
    }
    meter.postprocess_steps += m.c_open();
    let res = SupportIndex::new(powers).search(target, left as usize, budget);
    meter.postprocess_steps += res.steps;
    let v = match res.outcome {
        SearchOutcome::Found(s) => Verdict::accept(Some(s.into_iter().map(|i| i as u64 + 1).collect()), meter),
        SearchOutcome::NotFound => Verdict::reject(RejectReason::NoSmallSupport, meter),
        SearchOutcome::BudgetExceeded => Verdict::reject(RejectReason::BudgetExceeded { steps: res.steps }, meter),
    };
    Ok(v.with_err_count(m.err()))
}

/// Runs the fingerprint test on an in-memory string.
pub fn dyck_run<B: BitSource + ?Sized>(cfg: &DyckConfig, w: &[Sym], rng: &mut B) -> Result<Verdict, DyckError> {
    let mut st = DyckState::begin(cfg, rng)?;
    for s in w {
        st.push(*s)?;
    }
    st.decide(cfg)
}

/// Feeds indexed square brackets to the inner and outer Hamming tests as set
/// bits at position `h - 1`.
#[derive(Debug, Clone)]
pub struct LiteSink {
    inner_cfg: InnerConfig,
    inner: InnerState,
    outer: OuterState,
    outer_error: Option<LiteError>,
}

impl IndexSink for LiteSink {
    #[inline]
    fn event(&mut self, _pos: u64, h: u64, _open: bool, bit: bool) {
        if bit {
            self.inner.toggle(&self.inner_cfg, h - 1);
            if let Err(e) = self.outer.toggle(h - 1) {
                self.outer_error.get_or_insert(e);
            }
        }
    }

    fn live_bytes(&self) -> u64 {
        self.inner.live_bytes(&self.inner_cfg) + self.outer.live_bytes()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DyckLiteEngine {
    Lite {
        inner: InnerConfig,
        outer: OuterConfig,
    },
    /// Small `k`: the fingerprint test.
    Fingerprint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyckLiteConfig {
    pub dyck: DyckConfig,
    pub engine: DyckLiteEngine,
}

impl DyckLiteConfig {
    /// Indices never exceed `n/2`, which is the hashing domain.
    pub fn new(n: u64, k: u32, epsilon: f64, gamma: f64, c: u32) -> Result<Self, DyckError> {
        let dyck = DyckConfig::new(n, k, c)?;
        let engine = if k <= FALLBACK_MAX_K {
            DyckLiteEngine::Fingerprint
        } else {
            let domain = (n / 2).max(1);
            DyckLiteEngine::Lite { inner: InnerConfig::new(domain, k, epsilon, gamma)?, outer: OuterConfig::new(domain, k, gamma)? }
        };
        Ok(DyckLiteConfig { dyck, engine })
    }
}

#[derive(Debug, Clone)]
pub enum DyckLiteState {
    Lite { machine: IndexMachine, sink: Box<LiteSink>, meter: Meter },
    Fingerprint(DyckState),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyckLiteVerdict {
    pub verdict: Verdict,
    pub inner: Option<InnerResult>,
    pub outer: Option<OuterResult>,
}

impl DyckLiteState {
    pub fn begin(cfg: &DyckLiteConfig, master: u64) -> Result<Self, DyckError> {
        match &cfg.engine {
            DyckLiteEngine::Fingerprint => Ok(DyckLiteState::Fingerprint(DyckState::begin(&cfg.dyck, &mut SeededBits::derive(master, "fp/alpha"))?)),
            DyckLiteEngine::Lite { inner, outer } => {
                let inner_state = InnerState::begin(inner, &mut SeededBits::derive(master, "lite/inner"))?;
                let outer_state = OuterState::begin(outer, &mut SeededBits::derive(master, "lite/outer"))?;
                let sink = LiteSink { inner_cfg: inner.clone(), inner: inner_state, outer: outer_state, outer_error: None };
                let machine = IndexMachine::new(cfg.dyck.n, cfg.dyck.k as u64, cfg.dyck.block_len);
                let mut meter = Meter { randomness_bits: sink.inner.randomness_bits() + sink.outer.randomness_bits(), ..Meter::default() };
                meter.observe_live(machine.live_bytes() + sink.live_bytes());
                Ok(DyckLiteState::Lite { machine, sink: Box::new(sink), meter })
            }
        }
    }

    #[inline]
    pub fn push(&mut self, sym: Sym) -> Result<(), DyckError> {
        match self {
            DyckLiteState::Fingerprint(st) => st.push(sym),
            DyckLiteState::Lite { machine, sink, meter } => {
                if machine.push(sym, sink.as_mut())? {
                    meter.observe_live(machine.live_bytes() + sink.live_bytes());
                }
                meter.items += 1;
                Ok(())
            }
        }
    }

    pub fn rejected(&self) -> Option<&RejectReason> {
        match self {
            DyckLiteState::Fingerprint(st) => st.machine().rejected(),
            DyckLiteState::Lite { machine, .. } => machine.rejected(),
        }
    }

    /// Accepts iff the index pass succeeded, the inner estimate plus `Err`
    /// is at most `k`, and the outer test accepts.
    pub fn decide(&self, cfg: &DyckLiteConfig) -> Result<DyckLiteVerdict, DyckError> {
        match (self, &cfg.engine) {
            (DyckLiteState::Fingerprint(st), _) => Ok(DyckLiteVerdict { verdict: st.decide(&cfg.dyck)?, inner: None, outer: None }),
            (DyckLiteState::Lite { machine, sink, meter }, DyckLiteEngine::Lite { inner, outer }) => {
                if let Some(e) = &sink.outer_error {
                    return Err(e.clone().into());
                }
                let mut meter = *meter;
                if let Some(r) = machine.finish()? {
                    return Ok(DyckLiteVerdict { verdict: Verdict::reject(r, meter).with_err_count(machine.err()), inner: None, outer: None });
                }
                let ir = sink.inner.decide_with_limit(inner, cfg.dyck.k as u64 - machine.err());
                let or = sink.outer.decide(outer);
                meter.postprocess_steps += ir.steps;
                let verdict = if ir.accepted && or.accepted {
                    Verdict::accept(None, meter)
                } else if !ir.accepted {
                    Verdict::reject(RejectReason::InnerCount { estimate: ir.estimate + machine.err() }, meter)
                } else {
                    Verdict::reject(RejectReason::OuterParity { ones: or.ones, threshold: or.threshold }, meter)
                };
                Ok(DyckLiteVerdict { verdict: verdict.with_err_count(machine.err()), inner: Some(ir), outer: Some(or) })
            }
            _ => unreachable!("state and config engines always match"),
        }
    }
}

pub fn dyck_lite_run(cfg: &DyckLiteConfig, w: &[Sym], master: u64) -> Result<DyckLiteVerdict, DyckError> {
    let mut st = DyckLiteState::begin(cfg, master)?;
    for s in w {
        st.push(*s)?;
    }
    st.decide(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyck_codec::parse_syms;
    use crate::testkit::{exact_dyck_flip_distance, gen_flipped, random_dyck, shape_partners, Base};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn syms(s: &str) -> Vec<Sym> {
        parse_syms(s).unwrap()
    }

    fn reduced(s: &str, k: u64) -> (u64, String, String) {
        let r = block_reduce(&syms(s), k).unwrap();
        (r.err, r.u.iter().map(|p| p.1.to_char()).collect(), r.v.iter().map(|p| p.1.to_char()).collect())
    }

    #[test]
    fn block_reduce_examples() {
        assert_eq!(reduced("()", 0), (0, "".into(), "".into()));
        assert_eq!(reduced("(]", 1), (1, "".into(), "".into()));
        assert_eq!(reduced(")]((", 0), (0, ")]".into(), "((".into()));
        assert_eq!(reduced(")([)][", 5), (2, ")".into(), "[".into()));
        assert_eq!(block_reduce(&syms("(]([)"), 0), Err(BlockReject { offset: 1, errors: 1 }));
    }

    #[test]
    fn stack_examples() {
        let mut st = IntervalStack::default();
        st.push(1, 4);
        assert_eq!(st.take_closer(), Some(4));
        assert_eq!(st.take_closer(), Some(3));
        assert_eq!(st.intervals(), &[(1, 2)]);

        let mut st = IntervalStack::default();
        st.push(1, 2);
        assert_eq!(st.take_closer(), Some(2));
        assert_eq!(st.take_closer(), Some(1));
        assert_eq!(st.take_closer(), None);
    }

    #[test]
    fn stack_empty_rejects_with_position() {
        let cfg = DyckConfig::new(8, 2, 2).unwrap().with_block_len(2).unwrap();
        let mut st = DyckState::with_alpha(&cfg, cfg.ctx.elem(3), 0);
        for s in syms("[]))(())") {
            st.push(s).unwrap();
        }
        assert_eq!(st.decide(&cfg).unwrap().reject, Some(RejectReason::StackEmpty { position: 3 }));
    }

    #[test]
    fn unclosed_rejects() {
        let cfg = DyckConfig::new(4, 2, 2).unwrap().with_block_len(1).unwrap();
        let mut st = DyckState::with_alpha(&cfg, cfg.ctx.elem(3), 0);
        for s in syms("(([]") {
            st.push(s).unwrap();
        }
        assert_eq!(st.decide(&cfg).unwrap().reject, Some(RejectReason::Unclosed { open: 2 }));
    }

    #[test]
    fn openers_get_consecutive_indices() {
        let mut m = IndexMachine::new(2, 0, 2);
        let mut rec = RecordingSink::default();
        m.push(Sym::Round, &mut rec).unwrap();
        m.push(Sym::Square, &mut rec).unwrap();
        assert_eq!(rec.events, vec![(1, 1, true, false), (2, 2, true, true)]);
        assert_eq!(m.c_open(), 2);
        assert_eq!(m.stack().intervals(), &[(1, 2)]);

        let cfg = DyckConfig::new(2, 0, 2).unwrap().with_block_len(2).unwrap();
        let alpha = cfg.ctx.elem(0x1b);
        let mut st = DyckState::with_alpha(&cfg, alpha, 0);
        st.push(Sym::Round).unwrap();
        st.push(Sym::Square).unwrap();
        assert_eq!(st.sum(), cfg.ctx.mul(alpha, alpha));
    }

    #[test]
    fn worked_example_indices() {
        let t = index_trace(&syms("(([])[])"), 1).unwrap();
        let idx: Vec<u64> = t.iter().map(|e| e.1).collect();
        assert_eq!(idx, vec![1, 2, 3, 3, 2, 4, 4, 1]);
    }

    fn shapes(len: usize) -> Vec<Vec<bool>> {
        (0u32..1 << len)
            .map(|m| (0..len).map(|i| m >> i & 1 == 1).collect::<Vec<bool>>())
            .filter(|s| {
                let mut h = 0i32;
                s.iter().all(|o| {
                    h += if *o { 1 } else { -1 };
                    h >= 0
                }) && h == 0
            })
            .collect()
    }

    /// Partners get equal indices, distinct openers distinct indices, and
    /// exactly the pairs split across blocks are indexed.
    #[test]
    fn index_observation_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for len in (0..=16).step_by(2) {
            for shape in shapes(len) {
                let w: Vec<Sym> = shape.iter().map(|o| Sym::new(*o, rng.random())).collect();
                let partner = shape_partners(&w).unwrap();
                for b in [1u64, 2, 4, 8] {
                    let t = index_trace(&w, b).unwrap();
                    let at: std::collections::HashMap<u64, u64> = t.iter().copied().collect();
                    assert_eq!(at.len(), t.len());
                    for p in 0..len {
                        let q = partner[p];
                        let split = p as u64 / b != q as u64 / b;
                        assert_eq!(at.contains_key(&(p as u64 + 1)), split);
                        if split {
                            assert_eq!(at[&(p as u64 + 1)], at[&(q as u64 + 1)]);
                        }
                    }
                    let mut opens: Vec<u64> = (0..len).filter(|p| w[*p].is_open()).filter_map(|p| at.get(&(p as u64 + 1)).copied()).collect();
                    let count = opens.len();
                    opens.sort();
                    opens.dedup();
                    assert_eq!(opens.len(), count);
                    assert!(opens.iter().enumerate().all(|(i, h)| *h == i as u64 + 1));
                }
            }
        }
    }

    #[test]
    fn block_count_bound() {
        for n in [2u64, 16, 100, 1 << 10, 1 << 14, 1 << 16, 1 << 18, 1 << 20] {
            let cfg = DyckConfig::new(n, 2, 2).unwrap();
            let lg = (n as f64).log2().max(1.0);
            let bound = (n as f64 / lg).sqrt().ceil() as u64 + 1;
            assert!(cfg.blocks() <= bound, "n={n}: {} > {bound}", cfg.blocks());
        }
    }

    #[test]
    fn members_accept_with_empty_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2usize, 10, 64, 500] {
            let w = random_dyck(n, &mut rng);
            let cfg = DyckConfig::new(n as u64, 0, 2).unwrap();
            let v = dyck_run(&cfg, &w, &mut SeededBits::derive(n as u64, "t")).unwrap();
            assert!(v.accepted);
            assert_eq!(v.support, Some(vec![]));
            assert_eq!(v.err_count, Some(0));
        }
    }

    #[test]
    fn crossed_pairs() {
        // "([)]": shape (()), both pairs mismatched
        let w = syms("([)]");
        assert_eq!(exact_dyck_flip_distance(&w), Ok(2));
        for b in [1u64, 2, 4] {
            for k in 0..=3u32 {
                let cfg = DyckConfig::new(4, k, 2).unwrap().with_block_len(b).unwrap();
                let v = dyck_run(&cfg, &w, &mut SeededBits::derive(7, "t")).unwrap();
                assert_eq!(v.accepted, k >= 2, "block {b}, k {k}");
            }
        }
    }

    #[test]
    fn too_many_errors_position() {
        let cfg = DyckConfig::new(8, 1, 2).unwrap().with_block_len(8).unwrap();
        let v = dyck_run(&cfg, &syms("(][)()()"), &mut SeededBits::derive(1, "t")).unwrap();
        assert_eq!(v.reject, Some(RejectReason::TooManyErrors { position: 4, errors: 2 }));
    }

    #[test]
    fn support_names_crossing_indices() {
        // block length 1: every pair crosses; the flipped pair has index 3
        let w = syms("(([))[])");
        let cfg = DyckConfig::new(8, 2, 2).unwrap().with_block_len(1).unwrap();
        let v = dyck_run(&cfg, &w, &mut SeededBits::derive(3, "t")).unwrap();
        assert_eq!(v.support, Some(vec![3]));
        assert_eq!(v.err_count, Some(0));
    }

    #[test]
    fn stack_pushes_bounded_by_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 1 << 16;
        let cfg = DyckConfig::new(n, 4, 2).unwrap();
        for _ in 0..3 {
            let w = random_dyck(n as usize, &mut rng);
            let mut st = DyckState::begin(&cfg, &mut SeededBits::derive(1, "t")).unwrap();
            for s in &w {
                st.push(*s).unwrap();
            }
            assert!(st.machine().stack().pushes() <= cfg.blocks() + 1);
            assert!(st.decide(&cfg).unwrap().accepted);
            let live = st.meter().max_live_bytes;
            assert!(live <= cfg.block_len + 16 * (cfg.blocks() + 1) + 200, "{live}");
        }
    }

    #[test]
    fn lite_members_and_far_strings() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 512u64;
        let k = 4u32;
        let cfg = DyckLiteConfig::new(n, k, 0.5, 0.125, 2).unwrap();
        let mut errors = 0;
        for t in 0..12 {
            let w = random_dyck(n as usize, &mut rng);
            let d = [0usize, 1, 4, 10][t % 4];
            let inst = gen_flipped(&Base::Dyck(w), d, k as u64, &mut rng).unwrap();
            let v = dyck_lite_run(&cfg, &parse_syms(&inst.payload).unwrap(), t as u64).unwrap();
            if v.verdict.accepted != (d as u64 <= k as u64) {
                errors += 1;
            }
        }
        assert!(errors <= 3, "{errors}");
    }

    #[test]
    fn lite_member_has_zero_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let n = 256u64;
        let cfg = DyckLiteConfig::new(n, 4, 0.5, 0.125, 2).unwrap().clone();
        let w = random_dyck(n as usize, &mut rng);
        let v = dyck_lite_run(&cfg, &w, 1).unwrap();
        assert!(v.verdict.accepted);
        assert_eq!(v.inner.unwrap().estimate, 0);
        assert_eq!(v.outer.unwrap().ones, 0);
    }

    proptest! {
        /// Err plus the decoded support size is the flip distance, whatever the
        /// block length. Tiny n means GF(2^8), where α = 0 or a root of the
        /// difference is a real draw, so a mismatch gets one fresh α.
        #[test]
        fn decoded_distance_independent_of_block_len(seed in any::<u64>(), pairs in 1usize..24, d in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = random_dyck(2 * pairs, &mut rng);
            let inst = gen_flipped(&Base::Dyck(w), d.min(pairs), 4, &mut rng).unwrap();
            let w = parse_syms(&inst.payload).unwrap();
            for b in [1u64, 2, 3, 5, 8, 64] {
                let cfg = DyckConfig::new(w.len() as u64, 4, 2).unwrap().with_block_len(b).unwrap();
                let total = |label: &str| {
                    let v = dyck_run(&cfg, &w, &mut SeededBits::derive(seed, label)).unwrap();
                    assert!(v.accepted);
                    v.err_count.unwrap() + v.support.unwrap().len() as u64
                };
                let t = total("t");
                if t != inst.true_distance {
                    prop_assert_eq!(total("t/rerun"), inst.true_distance);
                }
            }
        }
    }
}
