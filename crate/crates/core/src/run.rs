//! Running one algorithm over one input stream and reporting the outcome.

use std::fmt;
use std::io::{BufRead, BufReader, Read};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::SeededBits;
use crate::dyck_codec::{CodecError, OneTurnSplitter, Sym};
use crate::dyck_stream::{dyck_decide, DyckConfig, DyckError, DyckLiteConfig, DyckLiteEngine, DyckLiteState, DyckState};
use crate::fingerprint::{FpConfig, FpError, FpState, DEFAULT_C};
use crate::ham_lite::{Engine, HamLiteConfig, HamLiteState, LiteError, DEFAULT_EPSILON, DEFAULT_GAMMA};
use crate::meter::Meter;
use crate::testkit::{exact_dyck_flip_distance, exact_ham, exact_one_turn_distance, Instance, InstanceKind, Label};
use crate::verdict::{RejectReason, Verdict};

pub const REPORT_SCHEMA: &str = "dyckham.report/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    HamFp,
    HamLite,
    DyckFp,
    DyckLite,
    Oracle,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::HamFp, Mode::HamLite, Mode::DyckFp, Mode::DyckLite, Mode::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Mode::HamFp => "ham-fp",
            Mode::HamLite => "ham-lite",
            Mode::DyckFp => "dyck-fp",
            Mode::DyckLite => "dyck-lite",
            Mode::Oracle => "oracle",
        }
    }

    /// Input kind used when none is given.
    pub fn default_kind(self) -> InstanceKind {
        match self {
            Mode::HamFp | Mode::HamLite => InstanceKind::Ham,
            Mode::DyckFp | Mode::DyckLite | Mode::Oracle => InstanceKind::Dyck,
        }
    }

    pub fn accepts_kind(self, kind: InstanceKind) -> bool {
        match self {
            Mode::HamFp | Mode::HamLite => kind != InstanceKind::Dyck,
            Mode::DyckFp | Mode::DyckLite => kind == InstanceKind::Dyck,
            Mode::Oracle => true,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| RunError::Usage(format!("unknown mode {s:?}")))
    }
}

/// Number of input symbols for `kind` at parameter `n`: `2n` for the Hamming
/// kinds (`x` then `y^R`), `n` for Dyck streams.
pub fn stream_len(kind: InstanceKind, n: u64) -> u64 {
    match kind {
        InstanceKind::Ham | InstanceKind::OneTurn => 2 * n,
        InstanceKind::Dyck => n,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub mode: Mode,
    pub kind: InstanceKind,
    /// `|x|` for the Hamming kinds, the stream length for Dyck.
    pub n: u64,
    pub k: u32,
    pub c: u32,
    pub epsilon: f64,
    pub gamma: f64,
    pub seed: u64,
    pub block_len: Option<u64>,
    /// Step budget for the post-stream support search.
    pub budget: Option<u64>,
}

impl RunSpec {
    pub fn new(mode: Mode, n: u64, k: u32) -> Self {
        RunSpec {
            mode,
            kind: mode.default_kind(),
            n,
            k,
            c: DEFAULT_C,
            epsilon: DEFAULT_EPSILON,
            gamma: DEFAULT_GAMMA,
            seed: 0,
            block_len: None,
            budget: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_kind(mut self, kind: InstanceKind) -> Self {
        self.kind = kind;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid symbol {ch:?} at position {position}")]
    BadSymbol { position: u64, ch: char },
    #[error("input has {got} symbols, expected {expected}")]
    Length { expected: u64, got: u64 },
    #[error("{0}")]
    Config(String),
    #[error("read error: {0}")]
    Io(String),
    #[error("replay line {line}: {msg}")]
    Replay { line: usize, msg: String },
}

macro_rules! config_error {
    ($($t:ty),*) => {$(
        impl From<$t> for RunError {
            fn from(e: $t) -> Self {
                RunError::Config(e.to_string())
            }
        }
    )*};
}
config_error!(FpError, LiteError, DyckError);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: u64,
    pub k: u32,
    pub c: u32,
    pub epsilon: f64,
    pub gamma: f64,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_len: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_width: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerSummary {
    pub accepted: bool,
    pub estimate: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterSummary {
    pub accepted: bool,
    pub ones: u64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub mode: Mode,
    /// `"accept"` or `"reject"`.
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub err_count: Option<u64>,
    /// Exact distance (oracle mode only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reject: Option<RejectReason>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner: Option<InnerSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer: Option<OuterSummary>,
    pub meter: Meter,
    pub params: Params,
    pub seed: u64,
}

impl Report {
    fn from_verdict(
        spec: &RunSpec,
        verdict: Verdict,
        params: Params,
        distance: Option<u64>,
        inner: Option<InnerSummary>,
        outer: Option<OuterSummary>,
    ) -> Self {
        Report {
            schema: REPORT_SCHEMA.into(),
            mode: spec.mode,
            verdict: if verdict.accepted { "accept" } else { "reject" }.into(),
            support: verdict.support,
            err_count: verdict.err_count,
            distance,
            reject: verdict.reject,
            inner,
            outer,
            meter: verdict.meter,
            params,
            seed: spec.seed,
        }
    }

    pub fn accepted(&self) -> bool {
        self.verdict == "accept"
    }

    /// 0 on accept, 1 on reject.
    pub fn exit_code(&self) -> i32 {
        if self.accepted() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_human(&self) -> String {
        let mut s = format!("{}: {}", self.mode, self.verdict);
        if let Some(r) = &self.reject {
            s.push_str(&format!(" ({})", describe_reject(r)));
        }
        s.push('\n');
        if let Some(d) = self.distance {
            s.push_str(&format!("distance: {d}\n"));
        }
        if let Some(sup) = &self.support {
            let list: Vec<String> = sup.iter().map(|i| i.to_string()).collect();
            s.push_str(&format!("support: [{}]\n", list.join(", ")));
        }
        if let Some(e) = self.err_count {
            s.push_str(&format!("in-block errors: {e}\n"));
        }
        if let Some(i) = &self.inner {
            s.push_str(&format!("inner: estimate {} ({})\n", i.estimate, if i.accepted { "accept" } else { "reject" }));
        }
        if let Some(o) = &self.outer {
            s.push_str(&format!("outer: {} odd of threshold {:.2} ({})\n", o.ones, o.threshold, if o.accepted { "accept" } else { "reject" }));
        }
        let m = &self.meter;
        s.push_str(&format!(
            "randomness_bits: {}\nmax_live_bytes: {}\nitems: {}\npostprocess_steps: {}\n",
            m.randomness_bits, m.max_live_bytes, m.items, m.postprocess_steps
        ));
        s
    }
}

pub fn describe_reject(r: &RejectReason) -> String {
    match r {
        RejectReason::NoSmallSupport => "no support within the error budget".into(),
        RejectReason::BudgetExceeded { steps } => format!("search budget exhausted after {steps} steps, undecided"),
        RejectReason::TooManyErrors { position, errors } => format!("{errors} mismatched pairs inside blocks by position {position}"),
        RejectReason::StackEmpty { position } => format!("unmatched closing bracket at position {position}"),
        RejectReason::Unclosed { open } => format!("{open} opening brackets never closed"),
        RejectReason::WrongSideSymbol { position } => format!("symbol on the wrong side of the turn at position {position}"),
        RejectReason::InnerCount { estimate } => format!("inner test counted {estimate} differences"),
        RejectReason::OuterParity { ones, threshold } => format!("outer test saw {ones} odd parities, threshold {threshold:.2}"),
    }
}

enum Active {
    HamFp(FpConfig, Box<FpState>),
    HamLite(HamLiteConfig, Box<HamLiteState>),
    DyckFp(DyckConfig, Box<DyckState>),
    DyckLite(DyckLiteConfig, Box<DyckLiteState>),
    Oracle(Vec<Sym>, Vec<bool>),
}

struct Runner {
    spec: RunSpec,
    engine: Active,
    splitter: Option<OneTurnSplitter>,
    /// First wrong-side symbol of a 1-turn stream; the rest is still read.
    wrong_side: Option<u64>,
}

impl Runner {
    fn new(spec: &RunSpec) -> Result<Self, RunError> {
        if !spec.mode.accepts_kind(spec.kind) {
            return Err(RunError::Usage(format!("mode {} does not take {} input", spec.mode, spec.kind)));
        }
        if spec.n == 0 {
            return Err(RunError::Usage("n must be positive".into()));
        }
        let s = spec.seed;
        let engine = match spec.mode {
            Mode::HamFp => {
                let cfg = FpConfig::new(spec.n, spec.k, spec.c)?;
                let st = FpState::begin(&cfg, &mut SeededBits::derive(s, "fp/alpha"))?;
                Active::HamFp(cfg, Box::new(st))
            }
            Mode::HamLite => {
                let cfg = HamLiteConfig::new(spec.n, spec.k, spec.epsilon, spec.gamma, spec.c)?;
                let st = HamLiteState::begin(&cfg, s)?;
                Active::HamLite(cfg, Box::new(st))
            }
            Mode::DyckFp => {
                let mut cfg = DyckConfig::new(spec.n, spec.k, spec.c)?;
                if let Some(b) = spec.block_len {
                    cfg = cfg.with_block_len(b)?;
                }
                let st = DyckState::begin(&cfg, &mut SeededBits::derive(s, "fp/alpha"))?;
                Active::DyckFp(cfg, Box::new(st))
            }
            Mode::DyckLite => {
                let mut cfg = DyckLiteConfig::new(spec.n, spec.k, spec.epsilon, spec.gamma, spec.c)?;
                if let Some(b) = spec.block_len {
                    cfg.dyck = cfg.dyck.with_block_len(b)?;
                }
                let st = DyckLiteState::begin(&cfg, s)?;
                Active::DyckLite(cfg, Box::new(st))
            }
            Mode::Oracle => Active::Oracle(vec![], vec![]),
        };
        let splitter = match (spec.mode, spec.kind) {
            (Mode::HamFp | Mode::HamLite, InstanceKind::OneTurn) => {
                Some(OneTurnSplitter::new(2 * spec.n).map_err(|e| RunError::Config(e.to_string()))?)
            }
            _ => None,
        };
        Ok(Runner { spec: spec.clone(), engine, splitter, wrong_side: None })
    }

    fn push_char(&mut self, position: u64, ch: char) -> Result<(), RunError> {
        let bad = || RunError::BadSymbol { position, ch };
        match self.spec.kind {
            InstanceKind::Ham => {
                let b = match ch {
                    '0' => false,
                    '1' => true,
                    _ => return Err(bad()),
                };
                self.push_bit(b)
            }
            InstanceKind::OneTurn => {
                let sym = Sym::from_char(ch).ok_or_else(bad)?;
                if let Some(sp) = self.splitter.as_mut() {
                    match sp.push(sym) {
                        Ok(b) => {
                            if self.wrong_side.is_none() {
                                self.push_bit(b)?;
                            }
                        }
                        Err(CodecError::WrongSideSymbol { position }) => {
                            self.wrong_side.get_or_insert(position);
                        }
                        Err(e) => return Err(RunError::Config(e.to_string())),
                    }
                    Ok(())
                } else {
                    self.push_sym(sym)
                }
            }
            InstanceKind::Dyck => self.push_sym(Sym::from_char(ch).ok_or_else(bad)?),
        }
    }

    fn push_bit(&mut self, b: bool) -> Result<(), RunError> {
        match &mut self.engine {
            Active::HamFp(cfg, st) => st.push(cfg, b)?,
            Active::HamLite(cfg, st) => st.push(cfg, b)?,
            Active::Oracle(_, bits) => bits.push(b),
            _ => unreachable!("bit input only reaches Hamming engines"),
        }
        Ok(())
    }

    fn push_sym(&mut self, s: Sym) -> Result<(), RunError> {
        match &mut self.engine {
            Active::DyckFp(_, st) => st.push(s)?,
            Active::DyckLite(_, st) => st.push(s)?,
            Active::Oracle(w, _) => w.push(s),
            _ => unreachable!("symbol input only reaches Dyck engines"),
        }
        Ok(())
    }

    fn finish(self) -> Result<Report, RunError> {
        let spec = &self.spec;
        let mut params = Params {
            n: spec.n,
            k: spec.k,
            c: spec.c,
            epsilon: spec.epsilon,
            gamma: spec.gamma,
            kind: spec.kind.to_string(),
            block_len: None,
            field_width: None,
            engine: None,
        };
        if let Some(position) = self.wrong_side {
            let meter = match &self.engine {
                Active::HamFp(_, st) => st.meter(),
                Active::HamLite(_, st) => st.meter(),
                _ => Meter::default(),
            };
            let v = Verdict::reject(RejectReason::WrongSideSymbol { position }, meter);
            return Ok(Report::from_verdict(spec, v, params, None, None, None));
        }
        let (verdict, distance, inner, outer) = match self.engine {
            Active::HamFp(cfg, st) => {
                params.field_width = Some(cfg.ctx.width());
                (st.decide_with_budget(&cfg, cfg.k as usize, spec.budget)?, None, None, None)
            }
            Active::HamLite(cfg, st) => {
                let lv = st.decide(&cfg)?;
                params.engine = Some(match &cfg.engine {
                    Engine::Lite { .. } => "lite".into(),
                    Engine::Fingerprint(fp) => {
                        params.field_width = Some(fp.ctx.width());
                        "fingerprint".into()
                    }
                });
                let inner = lv.inner.map(|i| InnerSummary { accepted: i.accepted, estimate: i.estimate });
                let outer = lv.outer.map(|o| OuterSummary { accepted: o.accepted, ones: o.ones, threshold: o.threshold });
                (lv.verdict, None, inner, outer)
            }
            Active::DyckFp(cfg, st) => {
                params.block_len = Some(cfg.block_len);
                params.field_width = Some(cfg.ctx.width());
                (dyck_decide(&cfg, &st, spec.budget)?, None, None, None)
            }
            Active::DyckLite(cfg, st) => {
                params.block_len = Some(cfg.dyck.block_len);
                params.engine = Some(match cfg.engine {
                    DyckLiteEngine::Lite { .. } => "lite".into(),
                    DyckLiteEngine::Fingerprint => {
                        params.field_width = Some(cfg.dyck.ctx.width());
                        "fingerprint".into()
                    }
                });
                let lv = st.decide(&cfg)?;
                let inner = lv.inner.map(|i| InnerSummary { accepted: i.accepted, estimate: i.estimate });
                let outer = lv.outer.map(|o| OuterSummary { accepted: o.accepted, ones: o.ones, threshold: o.threshold });
                (lv.verdict, None, inner, outer)
            }
            Active::Oracle(w, bits) => {
                let meter = Meter { items: (w.len() + bits.len()) as u64, ..Meter::default() };
                let d = match spec.kind {
                    InstanceKind::Ham => {
                        let n = bits.len() / 2;
                        let y: Vec<bool> = bits[n..].iter().rev().copied().collect();
                        Ok(exact_ham(&bits[..n], &y).expect("halves"))
                    }
                    InstanceKind::OneTurn => exact_one_turn_distance(&w).map_err(|e| match e {
                        crate::testkit::OracleError::NotOneTurn { position } => RejectReason::WrongSideSymbol { position },
                        _ => RejectReason::Unclosed { open: 0 },
                    }),
                    InstanceKind::Dyck => exact_dyck_flip_distance(&w).map_err(|_| unbalanced_reason(&w)),
                };
                match d {
                    Ok(d) if d <= spec.k as u64 => (Verdict::accept(None, meter), Some(d), None, None),
                    Ok(d) => (Verdict::reject(RejectReason::NoSmallSupport, meter), Some(d), None, None),
                    Err(r) => (Verdict::reject(r, meter), None, None, None),
                }
            }
        };
        Ok(Report::from_verdict(spec, verdict, params, distance, inner, outer))
    }
}

/// Why a string fails the shape check, located like the streaming test would.
fn unbalanced_reason(w: &[Sym]) -> RejectReason {
    let mut depth = 0u64;
    for (i, s) in w.iter().enumerate() {
        if s.is_open() {
            depth += 1;
        } else if depth == 0 {
            return RejectReason::StackEmpty { position: i as u64 + 1 };
        } else {
            depth -= 1;
        }
    }
    RejectReason::Unclosed { open: depth }
}

/// Streams `input` through the algorithm selected by `spec`. ASCII whitespace
/// is skipped; positions in errors count symbols from 1.
pub fn run<R: Read>(spec: &RunSpec, input: R) -> Result<Report, RunError> {
    let mut runner = Runner::new(spec)?;
    let expected = stream_len(spec.kind, spec.n);
    let mut reader = BufReader::new(input);
    let mut got = 0u64;
    loop {
        let buf = reader.fill_buf().map_err(|e| RunError::Io(e.to_string()))?;
        if buf.is_empty() {
            break;
        }
        let len = buf.len();
        for (i, &b) in buf.iter().enumerate() {
            if b.is_ascii_whitespace() {
                continue;
            }
            got += 1;
            if got > expected {
                let here = buf[i + 1..].iter().filter(|b| !b.is_ascii_whitespace()).count() as u64;
                reader.consume(len);
                let rest = count_symbols(&mut reader)?;
                return Err(RunError::Length { expected, got: got + here + rest });
            }
            runner.push_char(got, b as char)?;
        }
        reader.consume(len);
    }
    if got != expected {
        return Err(RunError::Length { expected, got });
    }
    runner.finish()
}

pub fn run_str(spec: &RunSpec, input: &str) -> Result<Report, RunError> {
    run(spec, input.as_bytes())
}

/// Number of non-whitespace symbols in `input`.
pub fn count_symbols<R: Read>(input: R) -> Result<u64, RunError> {
    let mut reader = BufReader::new(input);
    let mut got = 0u64;
    loop {
        let buf = reader.fill_buf().map_err(|e| RunError::Io(e.to_string()))?;
        if buf.is_empty() {
            return Ok(got);
        }
        got += buf.iter().filter(|b| !b.is_ascii_whitespace()).count() as u64;
        let len = buf.len();
        reader.consume(len);
    }
}

/// `n` for a stream of `symbols` symbols of `kind`.
pub fn n_from_symbols(kind: InstanceKind, symbols: u64) -> Result<u64, RunError> {
    match kind {
        InstanceKind::Dyck => Ok(symbols),
        _ if symbols.is_multiple_of(2) => Ok(symbols / 2),
        _ => Err(RunError::Usage(format!("{kind} input needs an even number of symbols, got {symbols}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayRow {
    pub line: usize,
    pub kind: String,
    pub true_distance: u64,
    pub expected: String,
    pub agrees: bool,
    pub report: Report,
}

fn label_name(l: Label) -> &'static str {
    match l {
        Label::WithinK => "within-k",
        Label::BeyondK => "beyond-k",
        Label::Gap => "gap",
    }
}

/// Runs `template`'s mode on every instance line of `input` with the line's
/// own `n` and `k`; blank lines and lines starting with `#` are skipped.
pub fn replay<R: Read>(template: &RunSpec, input: R) -> Result<Vec<ReplayRow>, RunError> {
    let reader = BufReader::new(input);
    let mut rows = vec![];
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| RunError::Io(e.to_string()))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let inst = Instance::from_line(t).map_err(|e| RunError::Replay { line: i + 1, msg: e.to_string() })?;
        let kind = if template.mode == Mode::Oracle || template.mode.accepts_kind(inst.kind) {
            inst.kind
        } else {
            return Err(RunError::Replay { line: i + 1, msg: format!("mode {} does not take {} instances", template.mode, inst.kind) });
        };
        let k = u32::try_from(inst.k).map_err(|_| RunError::Replay { line: i + 1, msg: "k too large".into() })?;
        // instance lines count one_turn streams in symbols, run specs in halves
        let n = if inst.kind == InstanceKind::OneTurn { inst.n / 2 } else { inst.n };
        let spec = RunSpec { kind, n, k, ..template.clone() };
        let report = run_str(&spec, &inst.payload).map_err(|e| RunError::Replay { line: i + 1, msg: e.to_string() })?;
        let label = inst.label();
        rows.push(ReplayRow {
            line: i + 1,
            kind: inst.kind.to_string(),
            true_distance: inst.true_distance,
            expected: label_name(label).into(),
            agrees: report.accepted() == (label == Label::WithinK),
            report,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_on_member() {
        let r = run_str(&RunSpec::new(Mode::Oracle, 4, 0), "([])").unwrap();
        assert!(r.accepted());
        assert_eq!(r.distance, Some(0));
        let r = run_str(&RunSpec::new(Mode::Oracle, 4, 1), "([)]").unwrap();
        assert!(!r.accepted());
        assert_eq!(r.distance, Some(2));
        let r = run_str(&RunSpec::new(Mode::Oracle, 4, 1), "())(").unwrap();
        assert_eq!(r.reject, Some(RejectReason::StackEmpty { position: 3 }));
    }

    #[test]
    fn dyck_fp_member_accepts_with_empty_support() {
        let r = run_str(&RunSpec::new(Mode::DyckFp, 8, 0), "(([])[])\n").unwrap();
        assert!(r.accepted());
        assert_eq!(r.support, Some(vec![]));
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn replay_is_byte_identical() {
        let spec = RunSpec::new(Mode::HamFp, 8, 2).with_seed(42);
        let a = run_str(&spec, "0110100101101001").unwrap().to_json();
        let b = run_str(&spec, "0110100101101001").unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"schema\": \"dyckham.report/v1\""));
    }

    #[test]
    fn input_errors() {
        let spec = RunSpec::new(Mode::HamFp, 2, 1);
        assert_eq!(run_str(&spec, "01x1"), Err(RunError::BadSymbol { position: 3, ch: 'x' }));
        assert_eq!(run_str(&spec, "011"), Err(RunError::Length { expected: 4, got: 3 }));
        assert_eq!(run_str(&spec, "01101"), Err(RunError::Length { expected: 4, got: 5 }));
        assert!(matches!(run_str(&RunSpec::new(Mode::DyckFp, 2, 1).with_kind(InstanceKind::Ham), "01"), Err(RunError::Usage(_))));
    }

    #[test]
    fn one_turn_input_through_hamming_modes() {
        let spec = RunSpec::new(Mode::HamFp, 2, 2).with_kind(InstanceKind::OneTurn);
        let r = run_str(&spec, "((]]").unwrap();
        assert!(r.accepted());
        assert_eq!(r.support, Some(vec![0, 1]));
        let r = run_str(&spec, "()((").unwrap();
        assert_eq!(r.reject, Some(RejectReason::WrongSideSymbol { position: 2 }));
        let o = run_str(&RunSpec::new(Mode::Oracle, 2, 2).with_kind(InstanceKind::OneTurn), "((]]").unwrap();
        assert_eq!(o.distance, Some(2));
    }

    #[test]
    fn replay_lines() {
        let text = "# comment\ndyck 8 1 1 (([])(])\nham 2 0 1 0111\n";
        let rows = replay(&RunSpec::new(Mode::Oracle, 1, 0), text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.agrees));
        assert_eq!(rows[1].expected, "beyond-k");
        let bad = replay(&RunSpec::new(Mode::DyckFp, 1, 0), "ham 2 0 1 0111\n".as_bytes());
        assert!(matches!(bad, Err(RunError::Replay { line: 1, .. })));
    }

    #[test]
    fn mode_names_round_trip() {
        for m in Mode::ALL {
            assert_eq!(m.name().parse::<Mode>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.name()));
        }
    }
}
