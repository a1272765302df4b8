//! The collision heap: each node carries two flags recording whether its
//! value equals its left and right child's. The flags let every copy of the
//! current minimum be found in time proportional to their number, and the
//! whole group is replaced at once. A group of `e` equal heads costs
//! O(e log(T/e)), so the merge runs in O(M log(T/ē)).

use super::{next_head, HeapView};
use crate::error::Result;
use crate::key::Key;
use crate::observe::Observer;
use crate::source::SortedSource;
use crate::stats::MergeStats;

/// Branch labels of the collision-heap descent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CollisionCase {
    /// `vl < vr`, `x > vl`: descend left.
    Case1L,
    Case1R,
    /// `vl < vr`, `x = vl`: stop, equal to the left child.
    Case2L,
    Case2R,
    /// `vl < vr`, `x < vl`: stop.
    Case3L,
    Case3R,
    /// `vl = vr`, `x < vl`: stop.
    Case3,
    /// `vl = vr`, `x > vl`: descend left, equal children.
    Case4,
    /// `vl = vr = x`: stop, equal to both.
    Case5,
}

impl CollisionCase {
    pub const ALL: [CollisionCase; 9] = [
        CollisionCase::Case1L,
        CollisionCase::Case1R,
        CollisionCase::Case2L,
        CollisionCase::Case2R,
        CollisionCase::Case3L,
        CollisionCase::Case3R,
        CollisionCase::Case3,
        CollisionCase::Case4,
        CollisionCase::Case5,
    ];

    pub fn label(self) -> &'static str {
        use CollisionCase::*;
        match self {
            Case1L => "1L",
            Case1R => "1R",
            Case2L => "2L",
            Case2R => "2R",
            Case3L => "3L",
            Case3R => "3R",
            Case3 => "3",
            Case4 => "4",
            Case5 => "5",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CollisionHeap<'a> {
    lists: usize,
    h: Vec<usize>,
    v: Vec<Key<'a>>,
    left: Vec<bool>,
    right: Vec<bool>,
    g: Vec<usize>,
    sift_steps: u64,
    built: usize,
}

impl<'a> CollisionHeap<'a> {
    pub fn new(lists: usize) -> Self {
        CollisionHeap {
            lists,
            h: vec![0; lists + 1],
            v: vec![Key::Infinity; lists + 1],
            left: vec![false; lists + 1],
            right: vec![false; lists + 1],
            g: Vec::with_capacity(lists),
            sift_steps: 0,
            built: lists + 1,
        }
    }

    /// Whether `node`'s value equals its left child's.
    pub fn left_equal(&self, node: usize) -> bool {
        self.left[node]
    }

    pub fn right_equal(&self, node: usize) -> bool {
        self.right[node]
    }

    /// Nodes found by the last [`cohort`](Self::cohort) call, in post-order.
    pub fn cohort_nodes(&self) -> &[usize] {
        &self.g
    }

    pub fn sift_steps(&self) -> u64 {
        self.sift_steps
    }

    pub fn heapify(&mut self, i: usize, x: Key<'a>, t: usize) {
        self.heapify_traced(i, x, t, &mut |_| {})
    }

    #[inline]
    pub fn heapify_traced(
        &mut self,
        i: usize,
        x: Key<'a>,
        t: usize,
        on_case: &mut impl FnMut(CollisionCase),
    ) {
        use std::cmp::Ordering::*;
        use CollisionCase::*;
        debug_assert!(i >= 1 && i <= self.lists && t <= self.lists);
        let n = self.lists;
        self.built = self.built.min(i);
        let (hs, vs) = (&mut self.h[..=n], &mut self.v[..=n]);
        let (ls, rs) = (&mut self.left[..=n], &mut self.right[..=n]);
        vs[t] = x;
        let mut c = i;
        while 2 * c <= n {
            self.sift_steps += 1;
            let l = 2 * c;
            let hl = hs[l];
            let vl = vs[hl];
            let (hr, vr) = if l < n {
                let hr = hs[l + 1];
                (hr, vs[hr])
            } else {
                (0, Key::Infinity)
            };
            match vr.cmp(&vl) {
                Greater => match x.cmp(&vl) {
                    Greater => {
                        on_case(Case1L);
                        hs[c] = hl;
                        ls[c] = ls[l] || rs[l];
                        rs[c] = false;
                        c = l;
                    }
                    Equal => {
                        on_case(Case2L);
                        hs[c] = t;
                        ls[c] = true;
                        rs[c] = false;
                        return;
                    }
                    Less => {
                        on_case(Case3L);
                        break;
                    }
                },
                Less => match x.cmp(&vr) {
                    Greater => {
                        on_case(Case1R);
                        hs[c] = hr;
                        rs[c] = ls[l + 1] || rs[l + 1];
                        ls[c] = false;
                        c = l + 1;
                    }
                    Equal => {
                        on_case(Case2R);
                        hs[c] = t;
                        rs[c] = true;
                        ls[c] = false;
                        return;
                    }
                    Less => {
                        on_case(Case3R);
                        break;
                    }
                },
                Equal => match x.cmp(&vl) {
                    Greater => {
                        on_case(Case4);
                        hs[c] = hl;
                        ls[c] = ls[l] || rs[l];
                        rs[c] = true;
                        c = l;
                    }
                    // Two sentinel children under a sentinel: equal in order
                    // only, so stop with the flags clear.
                    Equal if !vl.is_infinity() => {
                        on_case(Case5);
                        hs[c] = t;
                        ls[c] = true;
                        rs[c] = true;
                        return;
                    }
                    _ => {
                        on_case(Case3);
                        break;
                    }
                },
            }
        }
        hs[c] = t;
        ls[c] = false;
        rs[c] = false;
    }

    /// Collects, in post-order, every node whose value equals the root's.
    /// Returns the group size.
    #[inline]
    pub fn cohort(&mut self) -> usize {
        self.g.clear();
        if self.lists == 0 {
            return 0;
        }
        if !self.left[1] && !self.right[1] {
            self.g.push(1);
            return 1;
        }
        self.collect(1);
        self.g.len()
    }

    fn collect(&mut self, c: usize) {
        if self.right[c] {
            self.collect(2 * c + 1);
        }
        if self.left[c] {
            self.collect(2 * c);
        }
        self.g.push(c);
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
        O: Observer<Self, CollisionCase>,
    {
        let lists = sources.len();
        let mut heap = CollisionHeap::new(lists);
        for t in (1..=lists).rev() {
            let (x, list) = next_head(&mut sources, t)?;
            heap.heapify_traced(t, x, list, &mut |c| obs.case(c));
            obs.updated(&heap);
        }
        let (mut m_in, mut n_out) = (0u64, 0u64);
        while let Some(&t) = heap.h.get(1).filter(|&&t| t != 0) {
            let Key::Str(x) = heap.v[t] else {
                unreachable!("live list holds the sentinel")
            };
            let e = heap.cohort();
            obs.extracting(&heap);
            emit(x, e as u32);
            m_in += e as u64;
            n_out += 1;
            // Post-order: each node is refilled after its equal descendants,
            // so every heapify starts above a proper heap.
            for k in 0..e {
                let node = heap.g[k];
                let t = heap.h[node];
                let (next, list) = next_head(&mut sources, t)?;
                heap.heapify_traced(node, next, list, &mut |c| obs.case(c));
                obs.updated(&heap);
            }
            obs.round(&heap);
        }
        Ok(MergeStats {
            lists,
            m_in,
            n_out,
            sift_steps: heap.sift_steps,
            ..Default::default()
        })
    }
}

impl<'a> HeapView<'a> for CollisionHeap<'a> {
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
