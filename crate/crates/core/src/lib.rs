//! K-way merging of sorted string lists into one sorted, deduplicated list.
//!
//! Five interchangeable backends:
//!
//! * [`BasicHeap`]: the classic array heap, O(M log T) string comparisons.
//! * [`StringHeap`]: keeps the lcp of every node with its parent, so the
//!   characters compared over a merge are bounded by the total input length.
//! * [`CollisionHeap`]: keeps per-node equality flags and extracts all copies
//!   of the minimum together.
//! * [`StringCollisionHeap`]: both, with equality read off the lcp table.
//! * [`TriePq`]: a compact trie over the current list heads.
//!
//! [`merge`] runs any of them over a vector of [`SortedSource`]s.

pub mod datagen;
pub mod error;
pub mod harness;
pub mod heap;
pub mod key;
pub mod observe;
pub mod source;
pub mod stats;
pub mod trie;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};
pub use heap::{
    BasicHeap, CollisionCase, CollisionHeap, HeapView, Start, StringCase, StringCollisionHeap,
    StringHeap,
};
pub use key::{lcp, Key, Probes};
pub use observe::Observer;
pub use source::{open_sources, InputFile, LineSource, SliceSource, SortedSource};
pub use stats::{LcpTracker, MergeStats};
pub use trie::{Alphabet, TriePq};

/// Merge backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algo {
    #[serde(rename = "heap")]
    Heap,
    #[serde(rename = "sheap")]
    StringHeap,
    #[serde(rename = "cheap")]
    CollisionHeap,
    #[serde(rename = "scheap")]
    StringCollisionHeap,
    #[serde(rename = "trie")]
    Trie,
}

impl Algo {
    pub const ALL: [Algo; 5] = [
        Algo::Heap,
        Algo::StringHeap,
        Algo::CollisionHeap,
        Algo::StringCollisionHeap,
        Algo::Trie,
    ];

    /// Short identifier used on the command line and in stats tables.
    pub fn id(self) -> &'static str {
        match self {
            Algo::Heap => "heap",
            Algo::StringHeap => "sheap",
            Algo::CollisionHeap => "cheap",
            Algo::StringCollisionHeap => "scheap",
            Algo::Trie => "trie",
        }
    }

    /// Whether the backend can emit repeats one by one.
    pub fn supports_duplicates(self) -> bool {
        matches!(self, Algo::Heap | Algo::StringHeap)
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algo::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown backend {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct MergeOptions {
    /// Collapse equal values into one record with a count. The grouping
    /// backends require it.
    pub dedup: bool,
    /// Measure the mean lcp of the output sequence.
    pub track_lcp: bool,
    /// Trie alphabet; learned from the inputs when absent.
    pub alphabet: Option<Alphabet>,
}

impl Default for MergeOptions {
    fn default() -> Self {
        MergeOptions {
            dedup: true,
            track_lcp: false,
            alphabet: None,
        }
    }
}

/// Merges `sources` with `algo`, calling `emit(value, count)` once per output
/// record in increasing order. `count` is the number of lists holding the value
/// (always 1 without deduplication).
pub fn merge<'a, S, F>(
    algo: Algo,
    sources: Vec<S>,
    opts: &MergeOptions,
    mut emit: F,
) -> Result<MergeStats>
where
    S: SortedSource<'a>,
    F: FnMut(&'a [u8], u32),
{
    if !opts.dedup && !algo.supports_duplicates() {
        return Err(Error::Unsupported(
            "only heap and sheap can emit duplicates; the other backends always group",
        ));
    }
    let mut tracker = LcpTracker::default();
    let track = opts.track_lcp;
    let sink = |x: &'a [u8], e: u32| {
        if track {
            tracker.push(x, e);
        }
        emit(x, e);
    };
    let start = Instant::now();
    let mut stats = match algo {
        Algo::Heap => BasicHeap::merge(sources, opts.dedup, sink),
        Algo::StringHeap => StringHeap::merge(sources, opts.dedup, sink),
        Algo::CollisionHeap => CollisionHeap::merge(sources, sink),
        Algo::StringCollisionHeap => StringCollisionHeap::merge(sources, sink),
        Algo::Trie => {
            let alphabet = match &opts.alphabet {
                Some(a) => a.clone(),
                None => Alphabet::learn(&sources),
            };
            TriePq::merge(sources, alphabet, sink)
        }
    }?;
    stats.wall_ns = start.elapsed().as_nanos() as u64;
    if track {
        stats.mean_lcp = tracker.mean();
    }
    Ok(stats)
}

/// [`merge`] into a vector of `(value, count)` records.
pub fn merge_to_vec<'a, S: SortedSource<'a>>(
    algo: Algo,
    sources: Vec<S>,
    opts: &MergeOptions,
) -> Result<(Vec<(&'a [u8], u32)>, MergeStats)> {
    let mut out = Vec::new();
    let stats = merge(algo, sources, opts, |x, e| out.push((x, e)))?;
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::slice_sources;

    #[test]
    fn ids_round_trip() {
        for a in Algo::ALL {
            assert_eq!(a.id().parse::<Algo>().unwrap(), a);
        }
        assert!("heaps".parse::<Algo>().is_err());
    }

    #[test]
    fn all_backends_agree_on_a_small_case() {
        let lists = vec![
            vec!["a", "ab", "b"],
            vec!["ab", "c"],
            vec![],
            vec!["", "ab"],
        ];
        let opts = MergeOptions {
            track_lcp: true,
            ..Default::default()
        };
        let want: Vec<(&[u8], u32)> = vec![(b"", 1), (b"a", 1), (b"ab", 3), (b"b", 1), (b"c", 1)];
        for a in Algo::ALL {
            let (out, st) = merge_to_vec(a, slice_sources(&lists), &opts).unwrap();
            assert_eq!(out, want, "{a}");
            assert_eq!((st.m_in, st.n_out), (7, 5), "{a}");
            // lcps: 0,1,2,2,0,0 over 6 pairs
            assert_eq!(st.mean_lcp, Some(5.0 / 6.0), "{a}");
        }
    }

    #[test]
    fn grouping_backends_refuse_duplicate_output() {
        let lists = vec![vec!["a"]];
        let opts = MergeOptions {
            dedup: false,
            ..Default::default()
        };
        for a in [Algo::CollisionHeap, Algo::StringCollisionHeap, Algo::Trie] {
            assert!(matches!(
                merge_to_vec(a, slice_sources(&lists), &opts),
                Err(Error::Unsupported(_))
            ));
        }
        assert!(merge_to_vec(Algo::StringHeap, slice_sources(&lists), &opts).is_ok());
    }

    #[test]
    fn every_backend_reports_unsorted_input_with_its_line() {
        for bad in [vec!["a", "c", "b"], vec!["a", "b", "b"]] {
            let lists = vec![vec!["a", "b", "c", "d"], bad];
            for a in Algo::ALL {
                match merge_to_vec(a, slice_sources(&lists), &MergeOptions::default()) {
                    Err(Error::Unsorted { name, line }) => {
                        assert_eq!((name.as_str(), line), ("list2", 3), "{a}")
                    }
                    other => panic!("{a}: {other:?}"),
                }
            }
        }
    }
}
