//! Post-stream search for a small support whose field values sum to a target.
//!
//! Given candidate values `v_0, .., v_{n-1}` (typically powers of the
//! fingerprint point) and a target `T`, find the first set `S` in
//! (size, lexicographic) order with `|S| <= k` and `Σ_{i∈S} v_i = T`.
//!
//! The search walks every `(s-1)`-subset in lexicographic order, keeping the
//! partial sums of the prefix so each step costs one field addition, and
//! resolves the last element with a hash lookup of `T + prefix_sum`. That is
//! `C(n, k-1)` steps for the full search instead of `C(n, k)`.

use std::sync::OnceLock;

use crate::gf2e::FieldElem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// Positions into the candidate list, ascending.
    Found(Vec<usize>),
    NotFound,
    /// The step budget ran out before the search finished.
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub steps: u64,
}

const EMPTY: u32 = u32::MAX;
const EMPTY_SLOT: u64 = u64::MAX;

/// Candidate values indexed by an open-addressing table (duplicates allowed).
pub struct SupportIndex {
    values: Vec<FieldElem>,
    /// `tag << 32 | position`; the tag is 32 further hash bits, checked
    /// before the value itself is fetched.
    slots: Vec<u64>,
    shift: u32,
    pairs: OnceLock<PairTable>,
}

/// All pairwise sums `v_i + v_j` (`i < j`), open-addressed by sum.
struct PairTable {
    sums: Vec<FieldElem>,
    ends: Vec<(u32, u32)>,
    slots: Vec<u32>,
    shift: u32,
}

impl PairTable {
    fn new(values: &[FieldElem]) -> Self {
        let n = values.len();
        let count = n * n.saturating_sub(1) / 2;
        assert!(count < EMPTY as usize, "too many pairs");
        let mut sums = Vec::with_capacity(count);
        let mut ends = Vec::with_capacity(count);
        for i in 0..n {
            for j in i + 1..n {
                sums.push(values[i] + values[j]);
                ends.push((i as u32, j as u32));
            }
        }
        let cap = (count * 2).next_power_of_two().max(16);
        let shift = 64 - cap.trailing_zeros();
        let mask = cap - 1;
        let mut slots = vec![EMPTY; cap];
        for (k, v) in sums.iter().enumerate() {
            let mut h = hash(v, shift);
            while slots[h] != EMPTY {
                h = (h + 1) & mask;
            }
            slots[h] = k as u32;
        }
        PairTable { sums, ends, slots, shift }
    }

    /// Some pair summing to `v` that avoids every position in `used`.
    fn find(&self, v: &FieldElem, used: &[usize]) -> Option<(usize, usize)> {
        let mask = self.slots.len() - 1;
        let mut h = hash(v, self.shift);
        loop {
            let s = self.slots[h];
            if s == EMPTY {
                return None;
            }
            let k = s as usize;
            if self.sums[k] == *v {
                let (a, b) = (self.ends[k].0 as usize, self.ends[k].1 as usize);
                if !used.contains(&a) && !used.contains(&b) {
                    return Some((a, b));
                }
            }
            h = (h + 1) & mask;
        }
    }
}

#[inline]
fn mix(v: &FieldElem) -> u64 {
    let l = v.limbs();
    let x = l[0] ^ l[1].rotate_left(17) ^ l[2].rotate_left(31) ^ l[3].rotate_left(47);
    x.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

#[inline]
fn hash(v: &FieldElem, shift: u32) -> usize {
    (mix(v) >> shift) as usize
}

#[inline]
fn tag(m: u64) -> u64 {
    (m as u32 as u64) << 32
}

impl SupportIndex {
    pub fn new(values: Vec<FieldElem>) -> Self {
        assert!(values.len() < EMPTY as usize);
        let cap = (values.len() * 2).next_power_of_two().max(16);
        let shift = 64 - cap.trailing_zeros();
        let mut slots = vec![EMPTY_SLOT; cap];
        let mask = cap - 1;
        for (i, v) in values.iter().enumerate() {
            let m = mix(v);
            let mut h = (m >> shift) as usize;
            while slots[h] != EMPTY_SLOT {
                h = (h + 1) & mask;
            }
            slots[h] = tag(m) | i as u64;
        }
        SupportIndex { values, slots, shift, pairs: OnceLock::new() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[FieldElem] {
        &self.values
    }

    /// Smallest position `p >= from` with `values[p] == v`.
    #[inline]
    pub fn lookup(&self, v: &FieldElem, from: usize) -> Option<usize> {
        let mask = self.slots.len() - 1;
        let m = mix(v);
        let t = tag(m);
        let mut h = (m >> self.shift) as usize;
        let mut best: Option<usize> = None;
        loop {
            let s = self.slots[h];
            if s == EMPTY_SLOT {
                return best;
            }
            if s & 0xffff_ffff_0000_0000 == t {
                let p = (s & 0xffff_ffff) as usize;
                if p >= from && self.values[p] == *v && best.is_none_or(|b| p < b) {
                    best = Some(p);
                }
            }
            h = (h + 1) & mask;
        }
    }

    /// First support of size at most `max_size` summing to `target`.
    pub fn search(&self, target: FieldElem, max_size: usize, budget: Option<u64>) -> SearchResult {
        let mut steps = 0u64;
        for size in 0..=max_size.min(self.values.len()) {
            let left = budget.map(|b| b.saturating_sub(steps));
            let r = self.search_size(target, size, left);
            steps += r.steps;
            match r.outcome {
                SearchOutcome::NotFound => continue,
                outcome => return SearchResult { outcome, steps },
            }
        }
        SearchResult { outcome: SearchOutcome::NotFound, steps }
    }

    /// First support of size exactly `size` (lexicographic) summing to `target`.
    pub fn search_size(&self, target: FieldElem, size: usize, budget: Option<u64>) -> SearchResult {
        let n = self.values.len();
        let mut steps = 0u64;
        let over = |steps: u64| budget.is_some_and(|b| steps > b);
        let found = |s: Vec<usize>, steps: u64| SearchResult { outcome: SearchOutcome::Found(s), steps };
        let none = |steps: u64| SearchResult { outcome: SearchOutcome::NotFound, steps };
        let exceeded = |steps: u64| SearchResult { outcome: SearchOutcome::BudgetExceeded, steps };

        if size == 0 {
            return if target.is_zero() { found(vec![], 1) } else { none(1) };
        }
        if size > n {
            return none(0);
        }
        let p = size - 1;
        if p == 0 {
            steps += 1;
            if over(steps) {
                return exceeded(steps);
            }
            return match self.lookup(&target, 0) {
                Some(last) => found(vec![last], steps),
                None => none(steps),
            };
        }
        // prefix idx[0..p], each idx[d] <= n - 1 - (p - d) so a last element fits
        let mut idx: Vec<usize> = (0..p).collect();
        let mut psum = vec![FieldElem::ZERO; p];
        let mut acc = FieldElem::ZERO;
        for d in 0..p {
            acc += self.values[idx[d]];
            psum[d] = acc;
        }
        loop {
            steps += 1;
            if over(steps) {
                return exceeded(steps);
            }
            let need = target + psum[p - 1];
            if let Some(last) = self.lookup(&need, idx[p - 1] + 1) {
                let mut s = idx.clone();
                s.push(last);
                return found(s, steps);
            }
            let mut d = p;
            let mut advanced = false;
            while d > 0 {
                d -= 1;
                if idx[d] < n - 1 - (p - d) {
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                return none(steps);
            }
            idx[d] += 1;
            for e in d + 1..p {
                idx[e] = idx[e - 1] + 1;
            }
            let mut acc = if d == 0 { FieldElem::ZERO } else { psum[d - 1] };
            for e in d..p {
                acc += self.values[idx[e]];
                psum[e] = acc;
            }
        }
    }
}

impl SupportIndex {
    /// Some support of size exactly `size` summing to `target`, not
    /// necessarily the lexicographically first. From size 4 on this walks
    /// `(size-2)`-subsets against a table of pair sums, so it costs
    /// `C(n, size-2)` steps plus a one-off `C(n, 2)` build instead of
    /// `C(n, size-1)`.
    pub fn exists_size(&self, target: FieldElem, size: usize, budget: Option<u64>) -> SearchResult {
        let n = self.values.len();
        if size < 4 || size > n {
            return self.search_size(target, size, budget);
        }
        let pairs = self.pairs.get_or_init(|| PairTable::new(&self.values));
        let mut steps = (n * (n - 1) / 2) as u64;
        let over = |steps: u64| budget.is_some_and(|b| steps > b);
        if over(steps) {
            return SearchResult { outcome: SearchOutcome::BudgetExceeded, steps };
        }
        let p = size - 2;
        let mut idx: Vec<usize> = (0..p).collect();
        loop {
            steps += 1;
            if over(steps) {
                return SearchResult { outcome: SearchOutcome::BudgetExceeded, steps };
            }
            let mut need = target;
            for &i in &idx {
                need += self.values[i];
            }
            if let Some((a, b)) = pairs.find(&need, &idx) {
                let mut s = idx.clone();
                s.push(a);
                s.push(b);
                s.sort_unstable();
                return SearchResult { outcome: SearchOutcome::Found(s), steps };
            }
            let mut d = p;
            loop {
                if d == 0 {
                    return SearchResult { outcome: SearchOutcome::NotFound, steps };
                }
                d -= 1;
                if idx[d] < n - (p - d) {
                    break;
                }
            }
            idx[d] += 1;
            for e in d + 1..p {
                idx[e] = idx[e - 1] + 1;
            }
        }
    }
}

/// Plain enumeration of all subsets in (size, lex) order. Test oracle only.
pub fn naive_search(values: &[FieldElem], target: FieldElem, max_size: usize) -> Option<Vec<usize>> {
    fn rec(values: &[FieldElem], target: FieldElem, start: usize, left: usize, chosen: &mut Vec<usize>, sum: FieldElem) -> bool {
        if left == 0 {
            return sum == target;
        }
        for i in start..values.len() {
            chosen.push(i);
            if rec(values, target, i + 1, left - 1, chosen, sum + values[i]) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    for size in 0..=max_size.min(values.len()) {
        let mut chosen = vec![];
        if rec(values, target, 0, size, &mut chosen, FieldElem::ZERO) {
            return Some(chosen);
        }
    }
    None
}
