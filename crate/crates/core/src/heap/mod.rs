//! Array heaps over list indices.
//!
//! All four variants share the layout of the classic merge heap: `h[1..=T]`
//! holds list indices, `v[0..=T]` holds each list's current head, and
//! `v[0]` is permanently the sentinel so exhausted lists can be parked under
//! index 0.

pub mod basic;
pub mod collision;
pub mod string;
pub mod string_collision;

use crate::error::{Error, Result};
use crate::key::Key;
use crate::source::SortedSource;

pub use basic::BasicHeap;
pub use collision::{CollisionCase, CollisionHeap};
pub use string::{Start, StringCase, StringHeap};
pub use string_collision::StringCollisionHeap;

/// Read access to heap state, for checkers and observers.
pub trait HeapView<'a> {
    fn lists(&self) -> usize;
    /// List index stored at `node` (1-based).
    fn list_at(&self, node: usize) -> usize;
    /// Current head of `list`; index 0 is the sentinel.
    fn value(&self, list: usize) -> Key<'a>;
    /// Lowest node initialized so far. Construction fills nodes from `T` down
    /// to 1; nodes above this one are not yet meaningful.
    fn built_from(&self) -> usize;

    fn key_at(&self, node: usize) -> Key<'a> {
        self.value(self.list_at(node))
    }
}

/// Pops the next head of list `t` (1-based) as a `(value, list)` pair ready for
/// heapify, with exhausted lists mapped to `(Infinity, 0)`.
#[inline]
pub(crate) fn next_head<'a, S: SortedSource<'a>>(
    sources: &mut [S],
    t: usize,
) -> Result<(Key<'a>, usize)> {
    Ok(match sources[t - 1].pop()? {
        Some(s) => (Key::Str(s), t),
        None => (Key::Infinity, 0),
    })
}

/// Reports a string-heap order violation through the source it came from,
/// which knows the file and line.
pub(crate) fn source_error<'a, S: SortedSource<'a>>(sources: &[S], e: Error) -> Error {
    match e {
        Error::Monotonicity { list } if (1..=sources.len()).contains(&list) => {
            sources[list - 1].unsorted()
        }
        e => e,
    }
}

/// Folds the extraction sequence into output records, merging adjacent
/// duplicates when deduplicating.
pub(crate) struct Grouper<'a, F> {
    emit: F,
    dedup: bool,
    pending: Option<(&'a [u8], u32)>,
    pub(crate) n_out: u64,
}

impl<'a, F: FnMut(&'a [u8], u32)> Grouper<'a, F> {
    pub(crate) fn new(emit: F, dedup: bool) -> Self {
        Grouper {
            emit,
            dedup,
            pending: None,
            n_out: 0,
        }
    }

    /// Whether anything has been extracted yet.
    #[inline]
    pub(crate) fn last(&self) -> Option<&'a [u8]> {
        self.pending.map(|(s, _)| s)
    }

    #[inline]
    pub(crate) fn push(&mut self, x: &'a [u8], duplicate: bool) {
        if !self.dedup {
            (self.emit)(x, 1);
            self.n_out += 1;
            return;
        }
        match &mut self.pending {
            Some((_, e)) if duplicate => *e += 1,
            pending => {
                if let Some((s, e)) = pending.take() {
                    (self.emit)(s, e);
                    self.n_out += 1;
                }
                *pending = Some((x, 1));
            }
        }
    }

    pub(crate) fn finish(mut self) -> u64 {
        if self.dedup {
            if let Some((s, e)) = self.pending.take() {
                (self.emit)(s, e);
                self.n_out += 1;
            }
        }
        self.n_out
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::HeapView;
    use crate::key::Key;

    /// Heap property over live and sentinel values, within the built part.
    pub fn assert_heap_property<'a>(h: &impl HeapView<'a>) {
        let n = h.lists();
        for i in (2 * h.built_from()).max(2)..=n {
            assert!(
                h.key_at(i / 2) <= h.key_at(i),
                "heap property broken at node {i}"
            );
        }
    }

    pub fn keys<'a>(h: &impl HeapView<'a>) -> Vec<Key<'a>> {
        (1..=h.lists()).map(|i| h.key_at(i)).collect()
    }
}
