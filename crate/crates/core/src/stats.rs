use serde::{Deserialize, Serialize};

use crate::key::lcp;

/// Measurements from one merge.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MergeStats {
    /// Number of input lists.
    pub lists: usize,
    /// Elements consumed from the inputs (M).
    pub m_in: u64,
    /// Records emitted (N); distinct values when deduplicating.
    pub n_out: u64,
    /// Mean lcp between consecutive extracted strings, when tracked.
    pub mean_lcp: Option<f64>,
    /// Charged lcp increments. Only the LCP-aware heaps and the trie count these.
    pub char_probes: u64,
    /// Final mismatching probes of each lcp scan.
    pub term_probes: u64,
    /// Descent-loop iterations (trie: nodes visited).
    pub sift_steps: u64,
    pub wall_ns: u64,
}

impl MergeStats {
    /// Collision ratio M/N.
    pub fn e_bar(&self) -> f64 {
        if self.n_out == 0 {
            0.0
        } else {
            self.m_in as f64 / self.n_out as f64
        }
    }
}

/// Running mean of lcp over the extraction sequence, fed one output record
/// (value and multiplicity) at a time.
#[derive(Clone, Debug, Default)]
pub struct LcpTracker<'a> {
    prev: Option<&'a [u8]>,
    sum: u64,
    pairs: u64,
}

impl<'a> LcpTracker<'a> {
    pub fn push(&mut self, value: &'a [u8], count: u32) {
        if let Some(prev) = self.prev {
            self.sum += lcp(prev, value) as u64;
            self.pairs += 1;
        }
        let repeats = count.saturating_sub(1) as u64;
        self.sum += repeats * value.len() as u64;
        self.pairs += repeats;
        self.prev = Some(value);
    }

    pub fn mean(&self) -> Option<f64> {
        (self.pairs > 0).then(|| self.sum as f64 / self.pairs as f64)
    }
}
