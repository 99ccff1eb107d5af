//! Resource counters attached to every verdict.

use serde::{Deserialize, Serialize};

/// Per-run resource usage.
///
/// `max_live_bytes` is the peak size of the streaming state (fields, seeds,
/// counters, stacks) as reported by the algorithm's own accounting. It never
/// includes the input stream or post-stream decoding scratch space.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meter {
    pub randomness_bits: u64,
    pub max_live_bytes: u64,
    pub items: u64,
    pub postprocess_steps: u64,
}

impl Meter {
    pub fn observe_live(&mut self, bytes: u64) {
        if bytes > self.max_live_bytes {
            self.max_live_bytes = bytes;
        }
    }

    /// Combines meters of subalgorithms that ran side by side on one stream.
    pub fn merge_parallel(&self, other: &Meter) -> Meter {
        Meter {
            randomness_bits: self.randomness_bits + other.randomness_bits,
            max_live_bytes: self.max_live_bytes + other.max_live_bytes,
            items: self.items.max(other.items),
            postprocess_steps: self.postprocess_steps + other.postprocess_steps,
        }
    }
}
