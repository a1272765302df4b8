//! The classic merge heap: full string comparisons, O(M log T).

use super::{next_head, Grouper, HeapView};
use crate::error::Result;
use crate::key::Key;
use crate::observe::Observer;
use crate::source::SortedSource;
use crate::stats::MergeStats;

#[derive(Clone, Debug)]
pub struct BasicHeap<'a> {
    lists: usize,
    h: Vec<usize>,
    v: Vec<Key<'a>>,
    sift_steps: u64,
    built: usize,
}

impl<'a> BasicHeap<'a> {
    pub fn new(lists: usize) -> Self {
        BasicHeap {
            lists,
            h: vec![0; lists + 1],
            v: vec![Key::Infinity; lists + 1],
            sift_steps: 0,
            built: lists + 1,
        }
    }

    pub fn sift_steps(&self) -> u64 {
        self.sift_steps
    }

    /// Places `x` (the new head of list `t`) at node `i` and sifts it down.
    /// Nodes below `i` must already satisfy the heap property.
    #[inline]
    pub fn heapify(&mut self, i: usize, x: Key<'a>, t: usize) {
        debug_assert!(i >= 1 && i <= self.lists && t <= self.lists);
        debug_assert!(t != 0 || x.is_infinity());
        let n = self.lists;
        self.built = self.built.min(i);
        let (hs, vs) = (&mut self.h[..=n], &mut self.v[..=n]);
        let mut c = i;
        vs[t] = x;
        loop {
            let mut u = 2 * c;
            if u > n {
                break;
            }
            self.sift_steps += 1;
            if u < n && vs[hs[u + 1]] < vs[hs[u]] {
                u += 1;
            }
            if x <= vs[hs[u]] {
                break;
            }
            hs[c] = hs[u];
            c = u;
        }
        hs[c] = t;
    }

    pub fn merge<S, F>(sources: Vec<S>, dedup: bool, emit: F) -> Result<MergeStats>
    where
        S: SortedSource<'a>,
        F: FnMut(&'a [u8], u32),
    {
        Self::merge_observed(sources, dedup, emit, &mut ())
    }

    pub fn merge_observed<S, F, O>(
        mut sources: Vec<S>,
        dedup: bool,
        emit: F,
        obs: &mut O,
    ) -> Result<MergeStats>
    where
        S: SortedSource<'a>,
        F: FnMut(&'a [u8], u32),
        O: Observer<Self>,
    {
        let lists = sources.len();
        let mut heap = BasicHeap::new(lists);
        let mut out = Grouper::new(emit, dedup);
        let mut m_in = 0u64;
        if lists > 0 {
            for t in (1..=lists).rev() {
                let (x, list) = next_head(&mut sources, t)?;
                heap.heapify(t, x, list);
                obs.updated(&heap);
            }
            loop {
                let t = heap.h[1];
                if t == 0 {
                    break;
                }
                let Key::Str(x) = heap.v[t] else {
                    unreachable!("live list holds the sentinel")
                };
                obs.extracting(&heap);
                m_in += 1;
                let duplicate = out.last().is_some_and(|last| x <= last);
                out.push(x, duplicate);
                let (next, list) = next_head(&mut sources, t)?;
                heap.heapify(1, next, list);
                obs.updated(&heap);
                obs.round(&heap);
            }
        }
        Ok(MergeStats {
            lists,
            m_in,
            n_out: out.finish(),
            sift_steps: heap.sift_steps,
            ..Default::default()
        })
    }
}

impl<'a> HeapView<'a> for BasicHeap<'a> {
    fn lists(&self) -> usize {
        self.lists
    }
    fn list_at(&self, node: usize) -> usize {
        self.h[node]
    }
    fn value(&self, list: usize) -> Key<'a> {
        self.v[list]
    }
    fn built_from(&self) -> usize {
        self.built
    }
}
