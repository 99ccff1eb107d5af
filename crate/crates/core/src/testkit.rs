//! Ground-truth oracles, instance generators and the instance text format.
//!
//! The oracles store their whole input and share no code with the streaming
//! algorithms they are used to check.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use thiserror::Error;

use crate::dyck_codec::{format_syms, parse_syms, Sym};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("string is not balanced when types are ignored")]
    ShapeUnbalanced,
    #[error("not a 1-turn string: wrong-side symbol at position {position}")]
    NotOneTurn { position: u64 },
    #[error("k must divide n with n/k >= 2 (n = {n}, k = {k})")]
    DivisibilityViolation { n: u64, k: u64 },
    #[error("cannot flip {d} pairs of a string with {pairs}")]
    TooManyFlips { d: usize, pairs: usize },
}

/// Number of positions where `x` and `y` differ.
pub fn exact_ham(x: &[bool], y: &[bool]) -> Result<u64, OracleError> {
    if x.len() != y.len() {
        return Err(OracleError::LengthMismatch(x.len(), y.len()));
    }
    Ok(x.iter().zip(y).filter(|(a, b)| a != b).count() as u64)
}

/// Shape-matching partner of every position, or `None` if the shape is
/// unbalanced.
pub fn shape_partners(w: &[Sym]) -> Option<Vec<usize>> {
    let mut partner = vec![usize::MAX; w.len()];
    let mut stack = vec![];
    for (i, s) in w.iter().enumerate() {
        if s.is_open() {
            stack.push(i);
        } else {
            let j = stack.pop()?;
            partner[i] = j;
            partner[j] = i;
        }
    }
    stack.is_empty().then_some(partner)
}

/// Number of type changes needed to make `w` a Dyck₂ member: the number of
/// shape-matched pairs whose types disagree.
pub fn exact_dyck_flip_distance(w: &[Sym]) -> Result<u64, OracleError> {
    let partner = shape_partners(w).ok_or(OracleError::ShapeUnbalanced)?;
    Ok((0..w.len()).filter(|&i| w[i].is_open() && w[i].bit() != w[partner[i]].bit()).count() as u64)
}

/// Membership in Dyck₂.
pub fn is_dyck2(w: &[Sym]) -> bool {
    is_dyck2_flipped(w, 0)
}

/// Membership of `w` with the types at the set bits of `mask` flipped.
fn is_dyck2_flipped(w: &[Sym], mask: u32) -> bool {
    let mut stack = Vec::with_capacity(w.len());
    for (i, s) in w.iter().enumerate() {
        let bit = s.bit() ^ (i < 32 && mask >> i & 1 == 1);
        if s.is_open() {
            stack.push(bit);
        } else if stack.pop() != Some(bit) {
            return false;
        }
    }
    stack.is_empty()
}

/// Minimum number of type flips over all `2^|w|` retypings, tried in order of
/// weight. Exponential; used to check [`exact_dyck_flip_distance`] on short
/// strings.
pub fn brute_dyck_flip_distance(w: &[Sym]) -> Option<u64> {
    assert!(w.len() <= 24);
    let n = w.len() as u32;
    for d in 0..=n {
        // masks of weight d in increasing order (Gosper's hack)
        let mut m: u32 = (1u32 << d) - 1;
        while m < 1 << n {
            if is_dyck2_flipped(w, m) {
                return Some(d as u64);
            }
            if m == 0 {
                break;
            }
            let c = m & m.wrapping_neg();
            let r = m + c;
            m = (((r ^ m) >> 2) / c) | r;
        }
    }
    None
}

/// Distance of `w` from 1-turn-Dyck₂ (all openers, then the mirrored closers).
pub fn exact_one_turn_distance(w: &[Sym]) -> Result<u64, OracleError> {
    let n = w.len();
    for (i, s) in w.iter().enumerate() {
        if s.is_open() != (i < n / 2) || n % 2 == 1 {
            return Err(OracleError::NotOneTurn { position: i as u64 + 1 });
        }
    }
    Ok((0..n / 2).filter(|&i| w[i].bit() != w[n - 1 - i].bit()).count() as u64)
}

/// Uniform shape with `n/2` pairs (cycle lemma), each pair given a random type.
pub fn random_dyck<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Sym> {
    assert!(n.is_multiple_of(2));
    let m = n / 2;
    let mut steps: Vec<bool> = (0..2 * m + 1).map(|i| i < m).collect();
    for i in (1..steps.len()).rev() {
        let j = rng.random_range(0..=i);
        steps.swap(i, j);
    }
    // rotate to start just after the first minimum of the prefix sums
    let (mut h, mut min, mut at) = (0i64, 0i64, 0usize);
    for (i, s) in steps.iter().enumerate() {
        h += if *s { 1 } else { -1 };
        if h < min {
            min = h;
            at = i + 1;
        }
    }
    let len = steps.len();
    steps.rotate_left(at % len);
    steps.pop();
    let mut out = Vec::with_capacity(n);
    let mut stack = vec![];
    for open in steps {
        if open {
            let t: bool = rng.random();
            stack.push(t);
            out.push(Sym::new(true, t));
        } else {
            out.push(Sym::new(false, stack.pop().expect("cycle lemma gives a valid shape")));
        }
    }
    out
}

/// Random 1-turn-Dyck₂ member of length `n`.
pub fn random_one_turn<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Sym> {
    assert!(n.is_multiple_of(2));
    let half: Vec<bool> = (0..n / 2).map(|_| rng.random()).collect();
    half.iter().map(|b| Sym::new(true, *b)).chain(half.iter().rev().map(|b| Sym::new(false, *b))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    /// Payload is `x` then `y^R` over `01`; `n` is `|x|`.
    Ham,
    OneTurn,
    Dyck,
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InstanceKind::Ham => "ham",
            InstanceKind::OneTurn => "one_turn",
            InstanceKind::Dyck => "dyck",
        })
    }
}

impl FromStr for InstanceKind {
    type Err = InstanceParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ham" => Ok(InstanceKind::Ham),
            "one_turn" => Ok(InstanceKind::OneTurn),
            "dyck" => Ok(InstanceKind::Dyck),
            _ => Err(InstanceParseError::Kind(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    WithinK,
    BeyondK,
    /// Distance in `{2k, 2k+2}` from the augmented-indexing generator.
    Gap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub kind: InstanceKind,
    pub n: u64,
    pub k: u64,
    pub true_distance: u64,
    pub payload: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceParseError {
    #[error("expected `<kind> <n> <k> <true_distance> <payload>`")]
    Fields,
    #[error("unknown instance kind {0:?}")]
    Kind(String),
    #[error("bad number {0:?}")]
    Number(String),
    #[error("payload has {got} symbols, expected {want}")]
    Length { got: usize, want: u64 },
    #[error("bad payload: {0}")]
    Payload(String),
    #[error("recorded distance {recorded} disagrees with the oracle ({actual})")]
    Distance { recorded: u64, actual: u64 },
}

impl Instance {
    /// Builds an instance, computing its distance with the oracle.
    pub fn new(kind: InstanceKind, k: u64, payload: String) -> Result<Self, InstanceParseError> {
        let (n, true_distance) = Self::measure(kind, &payload)?;
        Ok(Instance { kind, n, k, true_distance, payload })
    }

    fn measure(kind: InstanceKind, payload: &str) -> Result<(u64, u64), InstanceParseError> {
        match kind {
            InstanceKind::Ham => {
                let bits = parse_bits(payload).map_err(InstanceParseError::Payload)?;
                if bits.len() % 2 == 1 {
                    return Err(InstanceParseError::Payload("ham payload must have even length".into()));
                }
                let n = bits.len() / 2;
                let y: Vec<bool> = bits[n..].iter().rev().copied().collect();
                Ok((n as u64, exact_ham(&bits[..n], &y).expect("equal halves")))
            }
            InstanceKind::OneTurn | InstanceKind::Dyck => {
                let w = parse_syms(payload).map_err(|e| InstanceParseError::Payload(e.to_string()))?;
                let d = if kind == InstanceKind::OneTurn { exact_one_turn_distance(&w) } else { exact_dyck_flip_distance(&w) };
                Ok((w.len() as u64, d.map_err(|e| InstanceParseError::Payload(e.to_string()))?))
            }
        }
    }

    pub fn label(&self) -> Label {
        if self.true_distance <= self.k {
            Label::WithinK
        } else {
            Label::BeyondK
        }
    }

    /// `<kind> <n> <k> <true_distance> <payload>`
    pub fn to_line(&self) -> String {
        format!("{} {} {} {} {}", self.kind, self.n, self.k, self.true_distance, self.payload)
    }

    /// Parses a line and recomputes the distance; a disagreeing record is an error.
    pub fn from_line(line: &str) -> Result<Self, InstanceParseError> {
        let f: Vec<&str> = line.split_whitespace().collect();
        let [kind, n, k, d, payload] = f[..] else {
            return Err(InstanceParseError::Fields);
        };
        let num = |s: &str| s.parse::<u64>().map_err(|_| InstanceParseError::Number(s.to_string()));
        let kind: InstanceKind = kind.parse()?;
        let (n, k, recorded) = (num(n)?, num(k)?, num(d)?);
        let want = if kind == InstanceKind::Ham { 2 * n } else { n };
        if payload.len() as u64 != want {
            return Err(InstanceParseError::Length { got: payload.len(), want });
        }
        let inst = Instance::new(kind, k, payload.to_string())?;
        if inst.true_distance != recorded {
            return Err(InstanceParseError::Distance { recorded, actual: inst.true_distance });
        }
        Ok(inst)
    }
}

pub fn parse_bits(s: &str) -> Result<Vec<bool>, String> {
    s.chars()
        .enumerate()
        .map(|(i, c)| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(format!("unexpected character {c:?} at position {}", i + 1)),
        })
        .collect()
}

pub fn format_bits(b: &[bool]) -> String {
    b.iter().map(|b| if *b { '1' } else { '0' }).collect()
}

/// Base for [`gen_flipped`].
#[derive(Debug, Clone)]
pub enum Base {
    /// `x`; `y` starts as a copy.
    Ham(Vec<bool>),
    OneTurn(Vec<Sym>),
    Dyck(Vec<Sym>),
}

/// Corrupts `base` at `d` places and records the oracle distance. For the
/// parenthesis kinds the flips land on distinct matched pairs (one side of
/// each, chosen at random), so `d` type changes raise the distance by `d`
/// when `base` is a member.
pub fn gen_flipped<R: Rng + ?Sized>(base: &Base, d: usize, k: u64, rng: &mut R) -> Result<Instance, OracleError> {
    match base {
        Base::Ham(x) => {
            if d > x.len() {
                return Err(OracleError::TooManyFlips { d, pairs: x.len() });
            }
            let mut y = x.clone();
            for i in sample(rng, x.len(), d) {
                y[i] = !y[i];
            }
            let mut payload = format_bits(x);
            payload.push_str(&format_bits(&y.iter().rev().copied().collect::<Vec<_>>()));
            Ok(Instance::new(InstanceKind::Ham, k, payload).expect("well-formed"))
        }
        Base::OneTurn(w) | Base::Dyck(w) => {
            let partner = shape_partners(w).ok_or(OracleError::ShapeUnbalanced)?;
            let openers: Vec<usize> = (0..w.len()).filter(|&i| w[i].is_open()).collect();
            if d > openers.len() {
                return Err(OracleError::TooManyFlips { d, pairs: openers.len() });
            }
            let mut v = w.clone();
            for p in sample(rng, openers.len(), d) {
                let o = openers[p];
                let at = if rng.random() { o } else { partner[o] };
                v[at] = v[at].flipped();
            }
            let kind = if matches!(base, Base::OneTurn(_)) { InstanceKind::OneTurn } else { InstanceKind::Dyck };
            Instance::new(kind, k, format_syms(&v)).map_err(|_| OracleError::ShapeUnbalanced)
        }
    }
}

/// A promise input of augmented indexing, encoded as a Hamming pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugIndexInstance {
    pub universe_size: u64,
    /// Alice's values in `0..universe_size`.
    pub x_vals: Vec<u64>,
    /// Bob's values; `None` is ⊥.
    pub y_vals: Vec<Option<u64>>,
    /// The unique coordinate (0-based) where Bob's input is informative.
    pub i: usize,
    pub ind_value: bool,
    /// `F_A(x)`, length `3n`.
    pub x_blocks: Vec<bool>,
    /// `F_B(y)`, length `3n`.
    pub y_blocks: Vec<bool>,
}

/// `f_A(u)`: block `u` is `110`, the others `000`.
pub fn f_a(u: u64, universe: u64) -> Vec<bool> {
    let mut out = vec![false; 3 * universe as usize];
    out[3 * u as usize] = true;
    out[3 * u as usize + 1] = true;
    out
}

/// `f_B(u)`: block `u` is `011`, the others `000`; `f_B(⊥)` is all zeros.
pub fn f_b(u: Option<u64>, universe: u64) -> Vec<bool> {
    let mut out = vec![false; 3 * universe as usize];
    if let Some(u) = u {
        out[3 * u as usize + 1] = true;
        out[3 * u as usize + 2] = true;
    }
    out
}

/// Draws a promise input with `k` coordinates over a universe of size `n/k`
/// and encodes it; the Hamming distance is `2k` when `ind_value` holds and
/// `2k + 2` otherwise.
pub fn gen_augmented_indexing<R: Rng + ?Sized>(n: u64, k: u64, ind_value: bool, rng: &mut R) -> Result<AugIndexInstance, OracleError> {
    if k == 0 || !n.is_multiple_of(k) || n / k < 2 {
        return Err(OracleError::DivisibilityViolation { n, k });
    }
    let universe = n / k;
    let x_vals: Vec<u64> = (0..k).map(|_| rng.random_range(0..universe)).collect();
    let i = rng.random_range(0..k as usize);
    let yi = if ind_value {
        x_vals[i]
    } else {
        let o = rng.random_range(0..universe - 1);
        if o >= x_vals[i] {
            o + 1
        } else {
            o
        }
    };
    let y_vals: Vec<Option<u64>> = (0..k as usize)
        .map(|j| match j.cmp(&i) {
            std::cmp::Ordering::Less => Some(x_vals[j]),
            std::cmp::Ordering::Equal => Some(yi),
            std::cmp::Ordering::Greater => None,
        })
        .collect();
    Ok(encode_aug(universe, x_vals, y_vals, i, ind_value))
}

fn encode_aug(universe: u64, x_vals: Vec<u64>, y_vals: Vec<Option<u64>>, i: usize, ind_value: bool) -> AugIndexInstance {
    let x_blocks: Vec<bool> = x_vals.iter().flat_map(|u| f_a(*u, universe)).collect();
    let y_blocks: Vec<bool> = y_vals.iter().flat_map(|u| f_b(*u, universe)).collect();
    let inst = AugIndexInstance { universe_size: universe, x_vals, y_vals, i, ind_value, x_blocks, y_blocks };
    let k = inst.x_vals.len() as u64;
    let d = exact_ham(&inst.x_blocks, &inst.y_blocks).expect("equal lengths");
    assert_eq!(d, if ind_value { 2 * k } else { 2 * k + 2 });
    inst
}

impl AugIndexInstance {
    /// As a Hamming instance with threshold `2k`.
    pub fn to_instance(&self) -> Instance {
        let k = self.x_vals.len() as u64;
        let mut payload = format_bits(&self.x_blocks);
        payload.push_str(&format_bits(&self.y_blocks.iter().rev().copied().collect::<Vec<_>>()));
        Instance::new(InstanceKind::Ham, 2 * k, payload).expect("well-formed")
    }

    pub fn label(&self) -> Label {
        Label::Gap
    }
}
