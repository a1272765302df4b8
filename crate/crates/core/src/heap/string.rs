//! The string heap: a merge heap that also keeps, for every node, the length
//! of the longest common prefix between its string and its parent's.
//!
//! Those lcp values decide most orderings outright. When they do not, the new
//! lcp is computed starting from an offset already known to be common to all
//! arguments, so the characters of a string are never re-scanned while it sits
//! in the heap. The total number of charged character probes over a merge is
//! therefore the sum, over the extraction sequence, of each string's lcp with
//! the string extracted before it.
//!
//! The descent handles twenty-two branches, grouped by how the lcp `p` of the
//! descending value relates to the children's lcps `pl` and `pr` (all taken
//! against the value that just moved up out of the current node):
//!
//! | branch | condition | outcome |
//! |---|---|---|
//! | 1 | `pr < pl`, `p < pl` | left child is smallest, descend |
//! | 2 | `pr <= pl < p` | new value is smallest, stop |
//! | 3 | `pr < pl = p` | extend lcp(left, x) and decide |
//! | 4 | `pr = pl > p` | extend lcp(left, right), descend to the smaller |
//! | 5 | `pr = pl = p` | three-way lcp, then sub-branches 5.1 to 5.4 |
//!
//! Mirror images carry an `R` suffix. Ties between equal children descend left.

use super::{next_head, source_error, Grouper, HeapView};
use crate::error::{Error, Result};
use crate::key::{lcp3_from, lcp_from, Key, Probes};
use crate::observe::Observer;
use crate::source::SortedSource;
use crate::stats::MergeStats;

/// Branch labels of the string-heap descent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StringCase {
    Case1L,
    Case1R,
    Case2L,
    Case2R,
    Case2,
    Case3La,
    Case3Lb,
    Case3Ra,
    Case3Rb,
    Case4L,
    Case4R,
    Case51L,
    Case51R,
    Case52L,
    Case52R,
    Case52,
    Case53La,
    Case53Lb,
    Case53Ra,
    Case53Rb,
    Case54L,
    Case54R,
}

impl StringCase {
    pub const ALL: [StringCase; 22] = [
        StringCase::Case1L,
        StringCase::Case1R,
        StringCase::Case2L,
        StringCase::Case2R,
        StringCase::Case2,
        StringCase::Case3La,
        StringCase::Case3Lb,
        StringCase::Case3Ra,
        StringCase::Case3Rb,
        StringCase::Case4L,
        StringCase::Case4R,
        StringCase::Case51L,
        StringCase::Case51R,
        StringCase::Case52L,
        StringCase::Case52R,
        StringCase::Case52,
        StringCase::Case53La,
        StringCase::Case53Lb,
        StringCase::Case53Ra,
        StringCase::Case53Rb,
        StringCase::Case54L,
        StringCase::Case54R,
    ];

    pub fn label(self) -> &'static str {
        use StringCase::*;
        match self {
            Case1L => "1L",
            Case1R => "1R",
            Case2L => "2L",
            Case2R => "2R",
            Case2 => "2",
            Case3La => "3La",
            Case3Lb => "3Lb",
            Case3Ra => "3Ra",
            Case3Rb => "3Rb",
            Case4L => "4L",
            Case4R => "4R",
            Case51L => "5.1L",
            Case51R => "5.1R",
            Case52L => "5.2L",
            Case52R => "5.2R",
            Case52 => "5.2",
            Case53La => "5.3La",
            Case53Lb => "5.3Lb",
            Case53Ra => "5.3Ra",
            Case53Rb => "5.3Rb",
            Case54L => "5.4L",
            Case54R => "5.4R",
        }
    }
}

/// How heapify seeds the lcp of the descending value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Start {
    /// Initial construction: the value being displaced is taken to be the
    /// empty string, so every lcp at the start node is zero.
    Build,
    /// Replacement of the value at the start node by a greater one.
    Replace,
}

#[derive(Clone, Debug)]
pub struct StringHeap<'a> {
    pub(crate) lists: usize,
    pub(crate) h: Vec<usize>,
    pub(crate) v: Vec<Key<'a>>,
    pub(crate) p: Vec<usize>,
    pub(crate) probes: Probes,
    pub(crate) sift_steps: u64,
    pub(crate) built: usize,
}

impl<'a> StringHeap<'a> {
    pub fn new(lists: usize) -> Self {
        StringHeap {
            lists,
            h: vec![0; lists + 1],
            v: vec![Key::Infinity; lists + 1],
            p: vec![0; lists + 2],
            probes: Probes::default(),
            sift_steps: 0,
            built: lists + 1,
        }
    }

    /// lcp between the string at `node` and its parent's (for the root: the
    /// previously extracted string).
    pub fn lcp_at(&self, node: usize) -> usize {
        self.p[node]
    }

    pub fn probes(&self) -> Probes {
        self.probes
    }

    pub fn sift_steps(&self) -> u64 {
        self.sift_steps
    }

    pub fn heapify(&mut self, i: usize, x: Key<'a>, t: usize, start: Start) -> Result<()> {
        self.heapify_traced(i, x, t, start, &mut |_| {})
    }

    /// Places `x`, the new head of list `t`, at node `i` and sifts it down,
    /// keeping every lcp entry in the subtree current. With [`Start::Replace`]
    /// a value not greater than the one it replaces is rejected.
    #[inline]
    pub fn heapify_traced(
        &mut self,
        i: usize,
        x: Key<'a>,
        t: usize,
        start: Start,
        on_case: &mut impl FnMut(StringCase),
    ) -> Result<()> {
        use StringCase::*;
        debug_assert!(i >= 1 && i <= self.lists && t <= self.lists);
        let n = self.lists;
        self.built = self.built.min(i);
        let (hs, ps, vs) = (&mut self.h[..=n], &mut self.p[..n + 2], &mut self.v[..=n]);
        let mut p = match start {
            Start::Build => {
                if 2 * i <= n {
                    ps[2 * i] = 0;
                    ps[2 * i + 1] = 0;
                }
                0
            }
            Start::Replace => {
                let o = vs[hs[i]];
                let p = lcp_from(o, x, 0, &mut self.probes);
                if x.at(p) <= o.at(p) {
                    return Err(Error::Monotonicity { list: t });
                }
                p
            }
        };
        debug_assert_eq!(ps[n + 1], 0);
        let mut c = i;
        while 2 * c <= n {
            self.sift_steps += 1;
            let l = 2 * c;
            let r = l + 1;
            let has_right = r <= n;
            // p[n + 1] stays zero, so a missing right child reads as lcp 0.
            let (pl, pr) = (ps[l], ps[r]);
            let tie = has_right & (pr == pl);

            if !tie {
                // The child with the longer lcp is the smaller. Selecting it
                // arithmetically keeps the common descent free of a
                // data-dependent branch.
                let right = pr > pl;
                let b = l + right as usize;
                let pb = pl.max(pr);
                let hb = hs[b];
                if p < pb {
                    on_case(if right { Case1R } else { Case1L });
                    hs[c] = hb;
                    ps[c] = pb;
                    c = b;
                } else if p > pb {
                    on_case(if right { Case2R } else { Case2L });
                    break;
                } else {
                    let vb = vs[hb];
                    let px = lcp_from(vb, x, pb, &mut self.probes);
                    if vb.at(px) < x.at(px) {
                        on_case(if right { Case3Ra } else { Case3La });
                        hs[c] = hb;
                        ps[c] = pb;
                        p = px;
                        c = b;
                    } else {
                        on_case(if right { Case3Rb } else { Case3Lb });
                        ps[b] = px;
                        break;
                    }
                }
            } else if p > pl {
                on_case(Case2);
                break;
            } else if p < pl {
                let (hl, hr) = (hs[l], hs[r]);
                let (vl, vr) = (vs[hl], vs[hr]);
                let px = lcp_from(vr, vl, pl, &mut self.probes);
                if vl.at(px) <= vr.at(px) {
                    on_case(Case4L);
                    hs[c] = hl;
                    ps[c] = pl;
                    ps[r] = px;
                    c = l;
                } else {
                    on_case(Case4R);
                    hs[c] = hr;
                    ps[c] = pr;
                    ps[l] = px;
                    c = r;
                }
            } else {
                let (hl, hr) = (hs[l], hs[r]);
                let (vl, vr) = (vs[hl], vs[hr]);
                let px = lcp3_from(vl, vr, x, p, &mut self.probes);
                let (cl, cr, cx) = (vl.at(px), vr.at(px), x.at(px));
                if cr > cl {
                    if cx > cl {
                        on_case(Case51L);
                        hs[c] = hl;
                        ps[c] = pl;
                        ps[r] = px;
                        p = px;
                        c = l;
                    } else if cx < cl {
                        on_case(Case52L);
                        ps[l] = px;
                        ps[r] = px;
                        break;
                    } else {
                        let py = lcp_from(vl, x, px, &mut self.probes);
                        if vl.at(py) < x.at(py) {
                            on_case(Case53La);
                            hs[c] = hl;
                            ps[c] = pl;
                            ps[r] = px;
                            p = py;
                            c = l;
                        } else {
                            on_case(Case53Lb);
                            ps[l] = py;
                            ps[r] = px;
                            break;
                        }
                    }
                } else if cr < cl {
                    if cx > cr {
                        on_case(Case51R);
                        hs[c] = hr;
                        ps[c] = pr;
                        ps[l] = px;
                        p = px;
                        c = r;
                    } else if cx < cr {
                        on_case(Case52R);
                        ps[l] = px;
                        ps[r] = px;
                        break;
                    } else {
                        let py = lcp_from(vr, x, px, &mut self.probes);
                        if vr.at(py) < x.at(py) {
                            on_case(Case53Ra);
                            hs[c] = hr;
                            ps[c] = pr;
                            ps[l] = px;
                            p = py;
                            c = r;
                        } else {
                            on_case(Case53Rb);
                            ps[r] = py;
                            ps[l] = px;
                            break;
                        }
                    }
                } else if cx <= cl {
                    on_case(Case52);
                    ps[l] = px;
                    ps[r] = px;
                    break;
                } else {
                    let py = lcp_from(vl, vr, px, &mut self.probes);
                    if vl.at(py) <= vr.at(py) {
                        on_case(Case54L);
                        hs[c] = hl;
                        ps[c] = pl;
                        ps[r] = py;
                        p = px;
                        c = l;
                    } else {
                        on_case(Case54R);
                        hs[c] = hr;
                        ps[c] = pr;
                        ps[l] = py;
                        p = px;
                        c = r;
                    }
                }
            }
        }
        hs[c] = t;
        ps[c] = p;
        vs[t] = x;
        Ok(())
    }

    /// Heads of every list in reverse node order, each sifted down from its own node.
    pub(crate) fn build<S, O>(sources: &mut [S], obs: &mut O) -> Result<Self>
    where
        S: SortedSource<'a>,
        O: Observer<Self, StringCase>,
    {
        let lists = sources.len();
        let mut heap = StringHeap::new(lists);
        for t in (1..=lists).rev() {
            let (x, list) = next_head(sources, t)?;
            heap.heapify_traced(t, x, list, Start::Build, &mut |c| obs.case(c))?;
            obs.updated(&heap);
        }
        Ok(heap)
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
        O: Observer<Self, StringCase>,
    {
        // Seeding each replacement compares it with its predecessor anyway.
        for s in &mut sources {
            s.trust_order();
        }
        let mut heap = Self::build(&mut sources, obs)?;
        let mut out = Grouper::new(emit, dedup);
        let mut m_in = 0u64;
        while heap.lists > 0 {
            let t = heap.h[1];
            if t == 0 {
                break;
            }
            let Key::Str(x) = heap.v[t] else {
                unreachable!("live list holds the sentinel")
            };
            obs.extracting(&heap);
            m_in += 1;
            // The root's lcp is taken against the previous extraction, so a
            // full-length lcp means a repeat.
            let duplicate = out.last().is_some() && heap.p[1] == x.len();
            out.push(x, duplicate);
            let (next, list) = next_head(&mut sources, t)?;
            heap.heapify_traced(1, next, list, Start::Replace, &mut |c| obs.case(c))
                .map_err(|e| source_error(&sources, e))?;
            obs.updated(&heap);
            obs.round(&heap);
        }
        Ok(MergeStats {
            lists: heap.lists,
            m_in,
            n_out: out.finish(),
            char_probes: heap.probes.charged,
            term_probes: heap.probes.terminal,
            sift_steps: heap.sift_steps,
            ..Default::default()
        })
    }
}

impl<'a> HeapView<'a> for StringHeap<'a> {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heap::testutil::assert_heap_property;
    use crate::source::slice_sources;

    fn s(x: &'static str) -> Key<'static> {
        Key::Str(x.as_bytes())
    }

    fn naive_lcp(a: &[u8], b: &[u8]) -> usize {
        a.iter().zip(b).take_while(|(x, y)| x == y).count()
    }

    fn assert_lcps(h: &StringHeap<'_>) {
        for i in (2 * h.built).max(2)..=h.lists {
            if let (Key::Str(a), Key::Str(b)) = (h.key_at(i), h.key_at(i / 2)) {
                assert_eq!(h.p[i], naive_lcp(a, b), "P[{i}]");
            } else if let (Key::Infinity, Key::Str(_)) = (h.key_at(i), h.key_at(i / 2)) {
                assert_eq!(h.p[i], 0, "P[{i}] under a live parent");
            }
        }
    }

    struct Trace(Vec<StringCase>);
    impl Observer<StringHeap<'_>, StringCase> for Trace {
        fn case(&mut self, c: StringCase) {
            self.0.push(c);
        }
        fn updated(&mut self, h: &StringHeap<'_>) {
            assert_heap_property(h);
            assert_lcps(h);
        }
    }

    fn build(lists: &[Vec<&'static str>]) -> (StringHeap<'static>, Trace) {
        let lists: &'static [Vec<&'static str>] = Box::leak(lists.to_vec().into_boxed_slice());
        let mut srcs = slice_sources(lists);
        let mut trace = Trace(Vec::new());
        let h = StringHeap::build(&mut srcs, &mut trace).unwrap();
        (h, trace)
    }

    #[test]
    fn root_replacement_decided_by_lcps_alone() {
        let (mut h, _) = build(&[vec!["ab"], vec!["ac"]]);
        assert_eq!(h.key_at(1), s("ab"));
        assert_eq!(h.p[2], 1);
        let before = h.probes;
        let mut trace = Trace(Vec::new());
        let t = h.list_at(1);
        h.heapify_traced(1, s("abq"), t, Start::Replace, &mut |c| trace.case(c))
            .unwrap();
        assert_eq!(trace.0, vec![StringCase::Case2L]);
        // only the seeding lcp("ab", "abq") was charged
        assert_eq!(h.probes.charged - before.charged, 2);
        assert_eq!(h.key_at(1), s("abq"));
        assert_eq!(h.p[1], 2);
        assert_eq!(h.p[2], 1);
        assert_lcps(&h);
    }

    #[test]
    fn three_way_tie_decided_by_next_character() {
        let (mut h, _) = build(&[vec!["ab", "abc"], vec!["abd"], vec!["abe"]]);
        assert_eq!((h.p[2], h.p[3]), (2, 2));
        let mut trace = Trace(Vec::new());
        let before = h.probes;
        h.heapify_traced(1, s("abc"), 1, Start::Replace, &mut |c| trace.case(c))
            .unwrap();
        assert_eq!(trace.0, vec![StringCase::Case52L]);
        assert_eq!(h.probes.charged - before.charged, 2);
        assert_eq!(h.key_at(1), s("abc"));
        assert_eq!((h.p[2], h.p[3]), (2, 2));
        assert_lcps(&h);
    }

    #[test]
    fn construction_starts_from_the_empty_string() {
        let mut h = StringHeap::new(3);
        h.heapify(3, s("xy"), 3, Start::Build).unwrap();
        assert_eq!(h.p[3], 0);
        assert_eq!(h.probes.charged, 0);
    }

    #[test]
    fn decreasing_replacement_is_rejected() {
        let (mut h, _) = build(&[vec!["b"], vec!["c"]]);
        assert!(matches!(
            h.heapify(1, s("a"), 1, Start::Replace),
            Err(Error::Monotonicity { list: 1 })
        ));
        assert!(matches!(
            h.heapify(1, s(""), 1, Start::Replace),
            Err(Error::Monotonicity { .. })
        ));
        assert!(matches!(
            h.heapify(1, s("b"), 1, Start::Replace),
            Err(Error::Monotonicity { .. })
        ));
    }

    fn merge(lists: &[Vec<&'static str>]) -> (Vec<(&'static [u8], u32)>, MergeStats) {
        let lists: &'static [Vec<&'static str>] = Box::leak(lists.to_vec().into_boxed_slice());
        let mut out = Vec::new();
        let mut trace = Trace(Vec::new());
        let st = StringHeap::merge_observed(
            slice_sources(lists),
            true,
            |x, e| out.push((x, e)),
            &mut trace,
        )
        .unwrap();
        (out, st)
    }

    // Hand traces: construction charges lcp("abd","ab")=2 (3Lb), the first
    // replacement charges lcp("ab","abc")=2, then 3Lb from offset 2 charges 0.
    // The total is lcp(ab,abc) + lcp(abc,abd); the first extraction has the
    // empty string as its predecessor and is charged nothing.
    #[test]
    fn probe_total_follows_consecutive_lcps() {
        let (out, st) = merge(&[vec!["ab", "abc"], vec!["abd"]]);
        assert_eq!(out.len(), 3);
        assert_eq!(st.char_probes, 4);

        let (out, st) = merge(&[vec!["aaaa"], vec!["aaaa"], vec!["aaaa"], vec!["aaaa"]]);
        assert_eq!(out, vec![(&b"aaaa"[..], 4)]);
        assert_eq!(st.char_probes, 12);
    }

    #[test]
    fn single_list_degenerates_to_consecutive_lcps() {
        let list = vec!["a", "ab", "abc", "b", "ba"];
        let (out, st) = merge(std::slice::from_ref(&list));
        let vals: Vec<&[u8]> = out.iter().map(|(x, _)| *x).collect();
        let want: Vec<&[u8]> = list.iter().map(|x| x.as_bytes()).collect();
        assert_eq!(vals, want);
        let sum: usize = want.windows(2).map(|w| naive_lcp(w[0], w[1])).sum();
        assert_eq!(st.char_probes, sum as u64);
    }

    #[test]
    fn duplicates_detected_from_root_lcp() {
        let (out, st) = merge(&[vec!["", "a", "b"], vec!["", "a", "c"], vec!["b"]]);
        assert_eq!(out, vec![(&b""[..], 2), (b"a", 2), (b"b", 2), (b"c", 1)]);
        assert_eq!((st.m_in, st.n_out), (7, 4));
    }
}
