//! Symbol types and the two streaming reductions on parenthesis streams:
//! `l` bracket types down to two, and 1-turn Dyck₂ strings to Hamming pairs.
//!
//! Wire formats: two-type streams use the ASCII alphabet `([)]`. Streams with
//! more types write each symbol as `(` or `)` followed by a decimal type number
//! in `1..=l`, e.g. `(1(3)3)1`. Whitespace between tokens is ignored.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("type {type_id} out of range 1..={l}")]
    TypeOutOfRange { type_id: u32, l: u32 },
    #[error("symbol on the wrong side of the turn at position {position}")]
    WrongSideSymbol { position: u64 },
    #[error("1-turn strings have even length, got {0}")]
    OddLength(u64),
    #[error("unexpected character {ch:?} at position {position}")]
    BadChar { position: u64, ch: char },
    #[error("expected a type number after the bracket at position {position}")]
    MissingType { position: u64 },
    #[error("stream already holds {0} symbols")]
    StreamOverflow(u64),
}

/// A symbol over `([)]`: `(` and `)` are type 0, `[` and `]` type 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sym {
    Round,
    Square,
    CloseRound,
    CloseSquare,
}

impl Sym {
    pub const ALL: [Sym; 4] = [Sym::Round, Sym::Square, Sym::CloseRound, Sym::CloseSquare];

    pub fn new(open: bool, square: bool) -> Sym {
        match (open, square) {
            (true, false) => Sym::Round,
            (true, true) => Sym::Square,
            (false, false) => Sym::CloseRound,
            (false, true) => Sym::CloseSquare,
        }
    }

    #[inline]
    pub fn is_open(self) -> bool {
        matches!(self, Sym::Round | Sym::Square)
    }

    /// The bit used by the fingerprints: 1 for `[` and `]`.
    #[inline]
    pub fn bit(self) -> bool {
        matches!(self, Sym::Square | Sym::CloseSquare)
    }

    /// Same side, other type.
    pub fn flipped(self) -> Sym {
        Sym::new(self.is_open(), !self.bit())
    }

    pub fn to_char(self) -> char {
        match self {
            Sym::Round => '(',
            Sym::Square => '[',
            Sym::CloseRound => ')',
            Sym::CloseSquare => ']',
        }
    }

    pub fn from_char(c: char) -> Option<Sym> {
        Some(match c {
            '(' => Sym::Round,
            '[' => Sym::Square,
            ')' => Sym::CloseRound,
            ']' => Sym::CloseSquare,
            _ => return None,
        })
    }
}

/// Parses a `([)]` string; positions in errors are 1-based.
pub fn parse_syms(s: &str) -> Result<Vec<Sym>, CodecError> {
    s.chars().enumerate().map(|(i, c)| Sym::from_char(c).ok_or(CodecError::BadChar { position: i as u64 + 1, ch: c })).collect()
}

pub fn format_syms(w: &[Sym]) -> String {
    w.iter().map(|s| s.to_char()).collect()
}

/// A bracket over `l` types; `type_id` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParenSymbol {
    pub open: bool,
    pub type_id: u32,
}

impl ParenSymbol {
    pub fn new(open: bool, type_id: u32, l: u32) -> Result<Self, CodecError> {
        if type_id == 0 || type_id > l {
            return Err(CodecError::TypeOutOfRange { type_id, l });
        }
        Ok(ParenSymbol { open, type_id })
    }
}

/// Parses the typed grammar `(3)3...`; positions in errors are 1-based
/// character offsets.
pub fn parse_typed(s: &str, l: u32) -> Result<Vec<ParenSymbol>, CodecError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = vec![];
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let open = match c {
            '(' => true,
            ')' => false,
            _ => return Err(CodecError::BadChar { position: i as u64 + 1, ch: c }),
        };
        let start = i + 1;
        let mut j = start;
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
        if j == start {
            return Err(CodecError::MissingType { position: i as u64 + 1 });
        }
        let digits: String = chars[start..j].iter().collect();
        let type_id = digits.parse::<u32>().unwrap_or(u32::MAX);
        out.push(ParenSymbol::new(open, type_id, l)?);
        i = j;
    }
    Ok(out)
}

pub fn format_typed(w: &[ParenSymbol]) -> String {
    w.iter().map(|p| format!("{}{}", if p.open { '(' } else { ')' }, p.type_id)).collect()
}

/// Image of one `l`-type symbol: open `i` is `(^(i-1) [ (^(l-i)`, close `i`
/// is `)^(l-i) ] )^(i-1)`.
pub fn encode_l_to_2(sym: ParenSymbol, l: u32) -> Result<Vec<Sym>, CodecError> {
    let i = sym.type_id;
    if i == 0 || i > l {
        return Err(CodecError::TypeOutOfRange { type_id: i, l });
    }
    let mut out = Vec::with_capacity(l as usize);
    if sym.open {
        out.extend(std::iter::repeat_n(Sym::Round, (i - 1) as usize));
        out.push(Sym::Square);
        out.extend(std::iter::repeat_n(Sym::Round, (l - i) as usize));
    } else {
        out.extend(std::iter::repeat_n(Sym::CloseRound, (l - i) as usize));
        out.push(Sym::CloseSquare);
        out.extend(std::iter::repeat_n(Sym::CloseRound, (i - 1) as usize));
    }
    Ok(out)
}

/// Encodes a whole `l`-type stream symbol by symbol.
pub fn encode_stream(w: &[ParenSymbol], l: u32) -> Result<Vec<Sym>, CodecError> {
    let mut out = Vec::with_capacity(w.len() * l as usize);
    for s in w {
        out.extend(encode_l_to_2(*s, l)?);
    }
    Ok(out)
}

/// Streams a 1-turn Dyck₂ candidate of known even length `n` into the bits
/// `x` (first half) then `y^R` (second half).
#[derive(Debug, Clone)]
pub struct OneTurnSplitter {
    n: u64,
    pos: u64,
}

impl OneTurnSplitter {
    pub fn new(n: u64) -> Result<Self, CodecError> {
        if n % 2 == 1 {
            return Err(CodecError::OddLength(n));
        }
        Ok(OneTurnSplitter { n, pos: 0 })
    }

    /// Length of each of `x` and `y`.
    pub fn half(&self) -> u64 {
        self.n / 2
    }

    pub fn pos(&self) -> u64 {
        self.pos
    }

    #[inline]
    pub fn push(&mut self, s: Sym) -> Result<bool, CodecError> {
        if self.pos >= self.n {
            return Err(CodecError::StreamOverflow(self.pos));
        }
        self.pos += 1;
        let first_half = self.pos <= self.n / 2;
        if s.is_open() != first_half {
            return Err(CodecError::WrongSideSymbol { position: self.pos });
        }
        Ok(s.bit())
    }
}

/// Splits a whole string; returns `(x, y^R)`.
pub fn one_turn_to_ham(w: &[Sym]) -> Result<(Vec<bool>, Vec<bool>), CodecError> {
    let mut sp = OneTurnSplitter::new(w.len() as u64)?;
    let mut bits = Vec::with_capacity(w.len());
    for s in w {
        bits.push(sp.push(*s)?);
    }
    let y_rev = bits.split_off(w.len() / 2);
    Ok((bits, y_rev))
}
