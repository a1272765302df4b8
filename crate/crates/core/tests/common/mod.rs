//! Shared oracle, instance generators and instrumented checkers.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use heapmerge::key::lcp;
use heapmerge::source::slice_sources;
use heapmerge::{
    CollisionCase, CollisionHeap, HeapView, Key, Observer, StringCase, StringCollisionHeap,
    StringHeap, TriePq,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub type Lists = Vec<Vec<Vec<u8>>>;

/// Concatenate, sort, count.
pub fn oracle(lists: &Lists) -> Vec<(Vec<u8>, u32)> {
    let mut counts: BTreeMap<&[u8], u32> = BTreeMap::new();
    for l in lists {
        for s in l {
            *counts.entry(s).or_default() += 1;
        }
    }
    counts.into_iter().map(|(s, e)| (s.to_vec(), e)).collect()
}

/// Every element with repeats, in order: the extraction sequence.
pub fn extraction_sequence(lists: &Lists) -> Vec<Vec<u8>> {
    let mut all: Vec<Vec<u8>> = lists.iter().flatten().cloned().collect();
    all.sort();
    all
}

pub fn owned(out: Vec<(&[u8], u32)>) -> Vec<(Vec<u8>, u32)> {
    out.into_iter().map(|(s, e)| (s.to_vec(), e)).collect()
}

#[derive(Clone, Copy, Debug)]
pub enum Shape {
    Random,
    Identical,
    Unique,
}

/// A random instance: `t` sorted duplicate-free lists of strings of length
/// `0..=max_len` over the first `sigma` lowercase letters.
pub fn random_lists<R: Rng>(
    rng: &mut R,
    t: usize,
    sigma: u8,
    max_len: usize,
    max_per_list: usize,
    shape: Shape,
) -> Lists {
    let word = |rng: &mut R| -> Vec<u8> {
        let len = rng.random_range(0..=max_len);
        (0..len)
            .map(|_| b'a' + rng.random_range(0..sigma))
            .collect()
    };
    match shape {
        Shape::Random => (0..t)
            .map(|_| {
                let n = rng.random_range(0..=max_per_list);
                let mut l: Vec<Vec<u8>> = (0..n).map(|_| word(rng)).collect();
                l.sort();
                l.dedup();
                l
            })
            .collect(),
        Shape::Identical => {
            let n = rng.random_range(0..=max_per_list);
            let mut l: Vec<Vec<u8>> = (0..n).map(|_| word(rng)).collect();
            l.sort();
            l.dedup();
            vec![l; t]
        }
        Shape::Unique => {
            let want = rng.random_range(0..=max_per_list * t);
            let mut pool: Vec<Vec<u8>> = (0..want).map(|_| word(rng)).collect();
            pool.sort();
            pool.dedup();
            pool.shuffle(rng);
            let mut lists = vec![Vec::new(); t];
            for (i, s) in pool.into_iter().enumerate() {
                lists[i % t].push(s);
            }
            for l in &mut lists {
                l.sort();
            }
            lists
        }
    }
}

pub fn sources(lists: &Lists) -> Vec<heapmerge::SliceSource<'_, Vec<u8>>> {
    slice_sources(lists)
}

/// Summary of one instrumented string-heap merge.
#[derive(Default, Debug)]
pub struct StringReport {
    pub cases: HashSet<StringCase>,
    pub failures: Vec<String>,
    pub updates: usize,
    pub root_checks: usize,
}

/// After every update: heap order and every lcp entry against its definition.
/// At every extraction: the root's entry against the previous extraction.
pub struct StringChecker {
    pub report: StringReport,
    prev: Option<Vec<u8>>,
    pub check_p: bool,
}

impl StringChecker {
    pub fn new(check_p: bool) -> Self {
        StringChecker {
            report: StringReport::default(),
            prev: None,
            check_p,
        }
    }

    fn fail(&mut self, msg: String) {
        if self.report.failures.len() < 5 {
            self.report.failures.push(msg);
        }
    }

    fn check_heap<'a>(&mut self, h: &impl HeapView<'a>, lcp_at: impl Fn(usize) -> usize) {
        self.report.updates += 1;
        let n = h.lists();
        for i in (2 * h.built_from()).max(2)..=n {
            let (c, p) = (h.key_at(i), h.key_at(i / 2));
            if p > c {
                self.fail(format!("heap order broken at node {i}"));
            }
            if !self.check_p {
                continue;
            }
            match (c, p) {
                (Key::Str(a), Key::Str(b)) => {
                    if lcp_at(i) != lcp(a, b) {
                        self.fail(format!("P[{i}] = {} but lcp is {}", lcp_at(i), lcp(a, b)));
                    }
                }
                (Key::Infinity, Key::Str(_)) if lcp_at(i) != 0 => {
                    self.fail(format!(
                        "P[{i}] = {} under a live parent for the sentinel",
                        lcp_at(i)
                    ));
                }
                _ => {}
            }
        }
    }

    fn check_root<'a>(&mut self, h: &impl HeapView<'a>, p1: usize) {
        let Key::Str(x) = h.key_at(1) else { return };
        self.report.root_checks += 1;
        let want = self.prev.as_deref().map_or(0, |prev| lcp(prev, x));
        if p1 != want {
            self.fail(format!(
                "root lcp {p1}, lcp with previous extraction {want}"
            ));
        }
        self.prev = Some(x.to_vec());
    }
}

impl Observer<StringHeap<'_>, StringCase> for StringChecker {
    fn case(&mut self, c: StringCase) {
        self.report.cases.insert(c);
    }
    fn updated(&mut self, h: &StringHeap<'_>) {
        self.check_heap(h, |i| h.lcp_at(i));
    }
    fn extracting(&mut self, h: &StringHeap<'_>) {
        self.check_root(h, h.lcp_at(1));
    }
}

/// Summary of one instrumented collision-style merge.
#[derive(Default, Debug)]
pub struct CollisionReport {
    pub cases: HashSet<CollisionCase>,
    pub failures: Vec<String>,
    pub cohort_total: u64,
    pub cohorts: usize,
}

/// Flags against their definition after every update; every cohort against a
/// brute-force scan and for post-order.
#[derive(Default)]
pub struct CollisionChecker {
    pub report: CollisionReport,
    /// Group members not yet refilled; their flags describe the old minimum.
    pending: Vec<usize>,
}

impl CollisionChecker {
    fn fail(&mut self, msg: String) {
        if self.report.failures.len() < 5 {
            self.report.failures.push(msg);
        }
    }

    fn check_cohort<'a>(&mut self, h: &impl HeapView<'a>, nodes: &[usize]) {
        let root = h.key_at(1);
        let mut want: Vec<usize> = (1..=h.lists())
            .filter(|&i| h.key_at(i).same(root))
            .collect();
        let mut got = nodes.to_vec();
        // post-order: every node after its children
        let pos: BTreeMap<usize, usize> = got.iter().enumerate().map(|(k, &n)| (n, k)).collect();
        for (&n, &k) in &pos {
            for c in [2 * n, 2 * n + 1] {
                if let Some(&kc) = pos.get(&c) {
                    if kc > k {
                        self.fail(format!("cohort node {c} listed after its parent {n}"));
                    }
                }
            }
        }
        got.sort_unstable();
        want.sort_unstable();
        if got != want {
            self.fail(format!("cohort {got:?}, brute force {want:?}"));
        }
        self.report.cohort_total += nodes.len() as u64;
        self.report.cohorts += 1;
    }

    fn check_order<'a>(&mut self, h: &impl HeapView<'a>) {
        for i in (2 * h.built_from()).max(2)..=h.lists() {
            if h.key_at(i / 2) > h.key_at(i) {
                self.fail(format!("heap order broken at node {i}"));
            }
        }
    }
}

impl Observer<CollisionHeap<'_>, CollisionCase> for CollisionChecker {
    fn case(&mut self, c: CollisionCase) {
        self.report.cases.insert(c);
    }
    fn updated(&mut self, h: &CollisionHeap<'_>) {
        self.check_order(h);
        if !self.pending.is_empty() {
            self.pending.remove(0);
        }
        let n = h.lists();
        for i in h.built_from()..=n {
            if self.pending.contains(&i) {
                continue;
            }
            let want_l = 2 * i <= n && h.key_at(i).same(h.key_at(2 * i));
            let want_r = 2 * i < n && h.key_at(i).same(h.key_at(2 * i + 1));
            if h.left_equal(i) != want_l || h.right_equal(i) != want_r {
                self.fail(format!("flags at node {i} disagree with the values"));
            }
        }
    }
    fn extracting(&mut self, h: &CollisionHeap<'_>) {
        self.check_cohort(h, h.cohort_nodes());
        self.pending = h.cohort_nodes().to_vec();
    }
}

/// For the combined heap: lcp entries (and so the derived equality
/// predicate) after every update, plus the cohort checks.
pub struct CombinedChecker {
    pub strings: StringChecker,
    pub cohorts: CollisionChecker,
}

impl Default for CombinedChecker {
    fn default() -> Self {
        CombinedChecker {
            strings: StringChecker::new(true),
            cohorts: CollisionChecker::default(),
        }
    }
}

impl Observer<StringCollisionHeap<'_>, StringCase> for CombinedChecker {
    fn case(&mut self, c: StringCase) {
        self.strings.report.cases.insert(c);
    }
    fn updated(&mut self, h: &StringCollisionHeap<'_>) {
        self.strings.check_heap(h, |i| h.heap().lcp_at(i));
        for i in (2 * h.built_from()).max(2)..=h.lists() {
            let want = h.key_at(i).same(h.key_at(i / 2));
            if h.equals_parent(i) != want {
                self.cohorts
                    .fail(format!("derived equality at node {i} is wrong"));
            }
        }
    }
    fn extracting(&mut self, h: &StringCollisionHeap<'_>) {
        self.cohorts.check_cohort(h, h.cohort_nodes());
    }
}

#[derive(Default, Debug)]
pub struct TrieReport {
    pub failures: Vec<String>,
    pub max_nodes: usize,
    pub delete_mins: u64,
}

/// Trie structure after every operation, node count, delete-min count.
pub struct TrieChecker {
    pub report: TrieReport,
    pub lists: usize,
    pub full_check: bool,
}

impl TrieChecker {
    pub fn new(lists: usize, full_check: bool) -> Self {
        TrieChecker {
            report: TrieReport::default(),
            lists,
            full_check,
        }
    }
}

impl Observer<TriePq<'_>> for TrieChecker {
    fn updated(&mut self, t: &TriePq<'_>) {
        let nodes = t.node_count();
        self.report.max_nodes = self.report.max_nodes.max(nodes);
        if nodes > 2 * self.lists.max(1) && self.report.failures.len() < 5 {
            self.report
                .failures
                .push(format!("{nodes} nodes with {} lists", self.lists));
        }
        if self.full_check {
            if let Err(e) = t.check() {
                if self.report.failures.len() < 5 {
                    self.report.failures.push(e);
                }
            }
        }
    }
    fn extracting(&mut self, _t: &TriePq<'_>) {
        self.report.delete_mins += 1;
    }
}

/// Σ_{i≥2} lcp(s_{i-1}, s_i) over the extraction sequence.
pub fn consecutive_lcp_sum(seq: &[Vec<u8>]) -> u64 {
    seq.windows(2).map(|w| lcp(&w[0], &w[1]) as u64).sum()
}
