//! The string heap with collision grouping. No flags are stored: a node equals
//! its parent exactly when its lcp entry covers its whole string, so the group
//! of copies of the minimum is read off the lcp table. Each group member is then
//! refilled with an lcp-seeded heapify, deepest first.

use super::string::{Start, StringCase, StringHeap};
use super::{next_head, source_error, HeapView};
use crate::error::Result;
use crate::key::{Key, TERMINATOR};
use crate::observe::Observer;
use crate::source::SortedSource;
use crate::stats::MergeStats;

#[derive(Clone, Debug)]
pub struct StringCollisionHeap<'a> {
    inner: StringHeap<'a>,
    g: Vec<usize>,
    stack: Vec<usize>,
}

impl<'a> StringCollisionHeap<'a> {
    pub fn new(lists: usize) -> Self {
        StringCollisionHeap {
            inner: StringHeap::new(lists),
            g: Vec::with_capacity(lists),
            stack: Vec::with_capacity(lists),
        }
    }

    /// The underlying string heap.
    pub fn heap(&self) -> &StringHeap<'a> {
        &self.inner
    }

    /// Whether the value at `node` (not the root) equals its parent's.
    #[inline]
    pub fn equals_parent(&self, node: usize) -> bool {
        let h = &self.inner;
        let x = h.v[h.h[node]];
        let eq = h.p[node] == x.len();
        debug_assert_eq!(eq, !x.is_infinity() && x.at(h.p[node]) == TERMINATOR);
        eq
    }

    /// Collects, in post-order, every node whose value equals the root's.
    #[inline]
    pub fn cohort(&mut self) -> usize {
        self.g.clear();
        let n = self.inner.lists;
        if n == 0 {
            return 0;
        }
        let down = |c: usize| c <= n && self.equals_parent(c);
        if !down(2) && !down(3) {
            self.g.push(1);
            return 1;
        }
        // Pre-order (node, left, right) reversed is post-order with the
        // right subtree first.
        self.stack.clear();
        self.stack.push(1);
        while let Some(c) = self.stack.pop() {
            self.g.push(c);
            let (l, r) = (2 * c, 2 * c + 1);
            if r <= n && self.equals_parent(r) {
                self.stack.push(r);
            }
            if l <= n && self.equals_parent(l) {
                self.stack.push(l);
            }
        }
        self.g.reverse();
        self.g.len()
    }

    pub fn cohort_nodes(&self) -> &[usize] {
        &self.g
    }

    pub fn merge<S, F>(sources: Vec<S>, emit: F) -> Result<MergeStats>
    where
        S: SortedSource<'a>,
        F: FnMut(&'a [u8], u32),
    {
        Self::merge_observed(sources, emit, &mut ())
    }

    /// Merges with duplicates removed; `emit` receives each distinct value with
    /// the number of lists it came from.
    pub fn merge_observed<S, F, O>(
        mut sources: Vec<S>,
        mut emit: F,
        obs: &mut O,
    ) -> Result<MergeStats>
    where
        S: SortedSource<'a>,
        F: FnMut(&'a [u8], u32),
        O: Observer<Self, StringCase>,
    {
        let lists = sources.len();
        for s in &mut sources {
            s.trust_order();
        }
        let mut heap = StringCollisionHeap::new(lists);
        for t in (1..=lists).rev() {
            let (x, list) = next_head(&mut sources, t)?;
            heap.inner
                .heapify_traced(t, x, list, Start::Build, &mut |c| obs.case(c))?;
            obs.updated(&heap);
        }
        let (mut m_in, mut n_out) = (0u64, 0u64);
        while let Some(&t) = heap.inner.h.get(1).filter(|&&t| t != 0) {
            let Key::Str(x) = heap.inner.v[t] else {
                unreachable!("live list holds the sentinel")
            };
            let e = heap.cohort();
            obs.extracting(&heap);
            emit(x, e as u32);
            m_in += e as u64;
            n_out += 1;
            // Every group member's parent still holds the old minimum when
            // the member is refilled, so seeding from it keeps the lcp table
            // relative to the parent.
            for k in 0..e {
                let node = heap.g[k];
                let t = heap.inner.h[node];
                let (next, list) = next_head(&mut sources, t)?;
                heap.inner
                    .heapify_traced(node, next, list, Start::Replace, &mut |c| obs.case(c))
                    .map_err(|e| source_error(&sources, e))?;
                obs.updated(&heap);
            }
            obs.round(&heap);
        }
        let inner = &heap.inner;
        Ok(MergeStats {
            lists,
            m_in,
            n_out,
            char_probes: inner.probes.charged,
            term_probes: inner.probes.terminal,
            sift_steps: inner.sift_steps,
            ..Default::default()
        })
    }
}

impl<'a> HeapView<'a> for StringCollisionHeap<'a> {
    fn lists(&self) -> usize {
        self.inner.lists
    }
    fn list_at(&self, node: usize) -> usize {
        self.inner.h[node]
    }
    fn value(&self, list: usize) -> Key<'a> {
        self.inner.v[list]
    }
    fn built_from(&self) -> usize {
        self.inner.built
    }
}
