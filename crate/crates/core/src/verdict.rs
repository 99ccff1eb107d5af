//! Decision outcomes shared by all streaming algorithms.

use serde::{Deserialize, Serialize};

use crate::meter::Meter;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RejectReason {
    /// No support of admissible size matches the fingerprint.
    NoSmallSupport,
    /// The post-stream search hit its step budget; the instance is unresolved.
    BudgetExceeded { steps: u64 },
    /// Intra-block mismatches exceeded the budget. `position` is 1-based.
    TooManyErrors { position: u64, errors: u64 },
    /// A closing parenthesis had no opener to match. `position` is 1-based.
    StackEmpty { position: u64 },
    /// Openers left unmatched at the end of the stream.
    Unclosed { open: u64 },
    /// 1-turn input with a symbol on the wrong side. `position` is 1-based.
    WrongSideSymbol { position: u64 },
    /// The inner (exact counting) test estimated more than `k` differences.
    InnerCount { estimate: u64 },
    /// The outer (gap) test saw too many odd parities.
    OuterParity { ones: u64, threshold: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub accepted: bool,
    /// Sorted error locations; present only on acceptance by a fingerprint decoder.
    pub support: Option<Vec<u64>>,
    /// Intra-block mismatch count (Dyck modes).
    pub err_count: Option<u64>,
    pub reject: Option<RejectReason>,
    pub meter: Meter,
}

impl Verdict {
    pub fn accept(support: Option<Vec<u64>>, meter: Meter) -> Self {
        Verdict { accepted: true, support, err_count: None, reject: None, meter }
    }

    pub fn reject(reason: RejectReason, meter: Meter) -> Self {
        Verdict { accepted: false, support: None, err_count: None, reject: Some(reason), meter }
    }

    pub fn with_err_count(mut self, err: u64) -> Self {
        self.err_count = Some(err);
        self
    }

    /// True when the decoder gave up without deciding.
    pub fn is_unresolved(&self) -> bool {
        matches!(self.reject, Some(RejectReason::BudgetExceeded { .. }))
    }
}
