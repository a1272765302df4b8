//! A compact trie used as a priority queue over the list heads.
//!
//! Each node stores its edge label as a range into one of the stored strings,
//! a Σ-entry child array over a dense alphabet, its out-degree and its minimum
//! out-edge. Equal heads share one node, whose payload lists their source
//! lists, so the merge performs one delete-min per distinct value. Insert and
//! find-min cost O(s); delete-min adds one O(Σ) rescan, for O(NΣ + S) in total.
//!
//! A string that is a proper prefix of another is stored at an internal node
//! and ranks before all of that node's descendants.

use crate::error::{Error, Result};
use crate::observe::Observer;
use crate::source::SortedSource;
use crate::stats::MergeStats;

const NONE: u32 = u32::MAX;
const UNMAPPED: u16 = u16::MAX;
const ROOT: u32 = 0;

/// Order-preserving map from bytes to dense child indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    map: [u16; 256],
    symbols: Vec<u8>,
}

impl Alphabet {
    /// The alphabet made of the given bytes, in byte order. Repeats are ignored.
    pub fn from_symbols(symbols: &[u8]) -> Result<Self> {
        let mut seen = [false; 256];
        for &b in symbols {
            if b == 0 || b == b'\n' {
                return Err(Error::InvalidParameter(format!(
                    "byte 0x{b:02x} cannot be an alphabet symbol"
                )));
            }
            seen[b as usize] = true;
        }
        Ok(Self::from_set(&seen))
    }

    pub fn from_set(seen: &[bool; 256]) -> Self {
        let mut map = [UNMAPPED; 256];
        let mut symbols = Vec::new();
        for b in 0..256 {
            if seen[b] {
                map[b] = symbols.len() as u16;
                symbols.push(b as u8);
            }
        }
        Alphabet { map, symbols }
    }

    /// Every byte value.
    pub fn full() -> Self {
        Self::from_set(&[true; 256])
    }

    /// The bytes occurring in the unread part of every source, or the full
    /// byte range if some source cannot be scanned.
    pub fn learn<'a, S: SortedSource<'a>>(sources: &[S]) -> Self {
        let mut seen = [false; 256];
        for s in sources {
            if !s.scan_bytes(&mut seen) {
                return Self::full();
            }
        }
        if !seen.contains(&true) {
            // All strings empty: keep one slot so child arrays are non-empty.
            seen[b'a' as usize] = true;
        }
        Self::from_set(&seen)
    }

    /// Σ.
    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    #[inline]
    pub fn index(&self, b: u8) -> Result<usize> {
        match self.map[b as usize] {
            UNMAPPED => Err(Error::Alphabet { byte: b }),
            i => Ok(i as usize),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Node<'a> {
    /// The node's path string is `src[..end]`; its edge label is `src[start..end]`.
    src: &'a [u8],
    start: usize,
    end: usize,
    degree: u32,
    min_edge: u32,
    /// First payload list, chained through `TriePq::next`.
    head: u32,
    count: u32,
}

impl<'a> Node<'a> {
    fn new(src: &'a [u8], start: usize, end: usize) -> Self {
        Node {
            src,
            start,
            end,
            degree: 0,
            min_edge: NONE,
            head: NONE,
            count: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TriePq<'a> {
    alphabet: Alphabet,
    sigma: usize,
    nodes: Vec<Node<'a>>,
    children: Vec<u32>,
    free: Vec<u32>,
    live: usize,
    next: Vec<u32>,
    stored: usize,
    char_probes: u64,
    sift_steps: u64,
    path: Vec<(u32, u32)>,
}

impl<'a> TriePq<'a> {
    /// An empty trie whose payloads name lists `0..lists`.
    pub fn new(alphabet: Alphabet, lists: usize) -> Self {
        let sigma = alphabet.size().max(1);
        TriePq {
            alphabet,
            sigma,
            nodes: vec![Node::new(&[], 0, 0)],
            children: vec![NONE; sigma],
            free: Vec::new(),
            live: 1,
            next: vec![NONE; lists],
            stored: 0,
            char_probes: 0,
            sift_steps: 0,
            path: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Live nodes, the root included.
    pub fn node_count(&self) -> usize {
        self.live
    }

    /// Stored (string, list) pairs.
    pub fn len(&self) -> usize {
        self.stored
    }

    pub fn is_empty(&self) -> bool {
        self.stored == 0
    }

    /// Label characters compared during inserts.
    pub fn char_probes(&self) -> u64 {
        self.char_probes
    }

    /// Nodes visited by inserts and delete-mins.
    pub fn sift_steps(&self) -> u64 {
        self.sift_steps
    }

    #[inline]
    fn child(&self, node: u32, c: usize) -> u32 {
        self.children[node as usize * self.sigma + c]
    }

    #[inline]
    fn set_child(&mut self, node: u32, c: usize, to: u32) {
        self.children[node as usize * self.sigma + c] = to;
    }

    fn alloc(&mut self, node: Node<'a>) -> u32 {
        self.live += 1;
        if let Some(id) = self.free.pop() {
            self.nodes[id as usize] = node;
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.children.resize(self.children.len() + self.sigma, NONE);
        id
    }

    fn release(&mut self, id: u32) {
        let base = id as usize * self.sigma;
        self.children[base..base + self.sigma].fill(NONE);
        self.live -= 1;
        self.free.push(id);
    }

    fn add_edge(&mut self, node: u32, c: usize, to: u32) {
        self.set_child(node, c, to);
        let n = &mut self.nodes[node as usize];
        n.degree += 1;
        if n.min_edge == NONE || (c as u32) < n.min_edge {
            n.min_edge = c as u32;
        }
    }

    fn add_payload(&mut self, node: u32, t: usize) {
        let n = &mut self.nodes[node as usize];
        self.next[t] = n.head;
        n.head = t as u32;
        n.count += 1;
        self.stored += 1;
    }

    /// Stores `x` as the head of list `t`.
    pub fn insert(&mut self, x: &'a [u8], t: usize) -> Result<()> {
        for &b in x {
            self.alphabet.index(b)?;
        }
        let mut cur = ROOT;
        let mut depth = 0;
        loop {
            self.sift_steps += 1;
            if depth == x.len() {
                self.add_payload(cur, t);
                return Ok(());
            }
            let c = self.alphabet.index(x[depth])?;
            let child = self.child(cur, c);
            if child == NONE {
                let leaf = self.alloc(Node::new(x, depth, x.len()));
                self.add_payload(leaf, t);
                self.add_edge(cur, c, leaf);
                return Ok(());
            }
            let Node {
                src, start, end, ..
            } = self.nodes[child as usize];
            let label = &src[start..end];
            let rest = &x[depth..];
            let l = label.iter().zip(rest).take_while(|(a, b)| a == b).count();
            self.char_probes += l as u64;
            if l < label.len() {
                let mid = self.alloc(Node::new(src, start, start + l));
                let below = self.alphabet.index(src[start + l])?;
                self.nodes[child as usize].start = start + l;
                self.add_edge(mid, below, child);
                self.set_child(cur, c, mid);
                cur = mid;
            } else {
                cur = child;
            }
            depth += l;
        }
    }

    /// The smallest stored string, without removing it.
    pub fn find_min(&self) -> Option<&'a [u8]> {
        if self.is_empty() {
            return None;
        }
        let mut cur = ROOT;
        loop {
            let n = &self.nodes[cur as usize];
            if n.count > 0 {
                return Some(&n.src[..n.end]);
            }
            cur = self.child(cur, n.min_edge as usize);
        }
    }

    /// Removes the smallest stored string and appends its source lists to
    /// `lists`.
    pub fn delete_min_into(&mut self, lists: &mut Vec<usize>) -> Result<&'a [u8]> {
        if self.is_empty() {
            return Err(Error::EmptyTrie);
        }
        self.path.clear();
        let mut cur = ROOT;
        loop {
            self.sift_steps += 1;
            let n = self.nodes[cur as usize];
            if n.count > 0 {
                break;
            }
            self.path.push((cur, n.min_edge));
            cur = self.child(cur, n.min_edge as usize);
        }
        let node = self.nodes[cur as usize];
        let value = &node.src[..node.end];
        let mut t = node.head;
        while t != NONE {
            lists.push(t as usize);
            t = self.next[t as usize];
        }
        self.stored -= node.count as usize;
        {
            let n = &mut self.nodes[cur as usize];
            n.head = NONE;
            n.count = 0;
        }
        if cur == ROOT {
            return Ok(value);
        }
        let &(parent, edge) = self.path.last().expect("non-root node has a parent");
        match node.degree {
            0 => {
                self.set_child(parent, edge as usize, NONE);
                self.release(cur);
                self.rescan(parent);
                self.path.pop();
                if parent != ROOT {
                    let p = self.nodes[parent as usize];
                    if p.degree == 1 && p.count == 0 {
                        let &(grand, gedge) = self.path.last().expect("parent has a parent");
                        self.splice(grand, gedge, parent);
                    }
                }
            }
            1 => self.splice(parent, edge, cur),
            _ => {}
        }
        Ok(value)
    }

    /// Removes the smallest stored string, returning it with its source lists.
    pub fn delete_min(&mut self) -> Result<(&'a [u8], Vec<usize>)> {
        let mut lists = Vec::new();
        let x = self.delete_min_into(&mut lists)?;
        Ok((x, lists))
    }

    fn rescan(&mut self, node: u32) {
        let base = node as usize * self.sigma;
        let row = &self.children[base..base + self.sigma];
        let n = &mut self.nodes[node as usize];
        n.degree -= 1;
        n.min_edge = if n.degree == 0 {
            NONE
        } else {
            row.iter().position(|&c| c != NONE).unwrap() as u32
        };
    }

    /// Replaces unary, payload-free `node` (child `edge` of `parent`) by its
    /// only child, whose label absorbs `node`'s.
    fn splice(&mut self, parent: u32, edge: u32, node: u32) {
        let n = self.nodes[node as usize];
        debug_assert!(n.degree == 1 && n.count == 0);
        let only = self.child(node, n.min_edge as usize);
        self.nodes[only as usize].start = n.start;
        self.set_child(parent, edge as usize, only);
        self.release(node);
    }

    /// Every stored string with its sorted source lists, in min-edge-first order.
    pub fn enumerate(&self) -> Vec<(Vec<u8>, Vec<usize>)> {
        let mut out = Vec::new();
        self.walk(ROOT, &mut out);
        out
    }

    fn walk(&self, node: u32, out: &mut Vec<(Vec<u8>, Vec<usize>)>) {
        let n = &self.nodes[node as usize];
        if n.count > 0 {
            let mut lists = Vec::new();
            let mut t = n.head;
            while t != NONE {
                lists.push(t as usize);
                t = self.next[t as usize];
            }
            lists.sort_unstable();
            out.push((n.src[..n.end].to_vec(), lists));
        }
        for c in 0..self.sigma {
            let ch = self.child(node, c);
            if ch != NONE {
                self.walk(ch, out);
            }
        }
    }

    /// Checks compactness, degree, min-edge, label and count bookkeeping
    /// against the node contents.
    pub fn check(&self) -> std::result::Result<(), String> {
        let mut seen = 0;
        let mut stored = 0;
        self.check_node(ROOT, &[], &mut seen, &mut stored)?;
        if seen != self.live {
            return Err(format!("{} reachable nodes, {} live", seen, self.live));
        }
        if stored != self.stored {
            return Err(format!(
                "{stored} payload entries, {} recorded",
                self.stored
            ));
        }
        Ok(())
    }

    fn check_node(
        &self,
        id: u32,
        path: &[u8],
        seen: &mut usize,
        stored: &mut usize,
    ) -> std::result::Result<(), String> {
        *seen += 1;
        let n = &self.nodes[id as usize];
        if &n.src[..n.end] != path {
            return Err(format!("node {id}: path mismatch"));
        }
        let present: Vec<usize> = (0..self.sigma)
            .filter(|&c| self.child(id, c) != NONE)
            .collect();
        if present.len() != n.degree as usize {
            return Err(format!(
                "node {id}: degree {} but {} children",
                n.degree,
                present.len()
            ));
        }
        let want_min = present.first().map_or(NONE, |&c| c as u32);
        if n.min_edge != want_min {
            return Err(format!("node {id}: stale min edge"));
        }
        if id != ROOT && n.count == 0 && n.degree < 2 {
            return Err(format!("node {id}: not compact"));
        }
        if id != ROOT && n.start >= n.end {
            return Err(format!("node {id}: empty label"));
        }
        *stored += n.count as usize;
        for c in present {
            let ch = self.child(id, c);
            let cn = &self.nodes[ch as usize];
            if cn.start != n.end || self.alphabet.index(cn.src[cn.start]).ok() != Some(c) {
                return Err(format!("node {ch}: label does not hang off edge {c}"));
            }
            self.check_node(ch, &cn.src[..cn.end], seen, stored)?;
        }
        Ok(())
    }

    pub fn merge<S, F>(sources: Vec<S>, alphabet: Alphabet, emit: F) -> Result<MergeStats>
    where
        S: SortedSource<'a>,
        F: FnMut(&'a [u8], u32),
    {
        Self::merge_observed(sources, alphabet, emit, &mut ())
    }

    /// Merges with duplicates removed; `emit` receives each distinct value with
    /// the number of lists it came from. The observer sees the trie after every
    /// insert and delete-min.
    pub fn merge_observed<S, F, O>(
        mut sources: Vec<S>,
        alphabet: Alphabet,
        mut emit: F,
        obs: &mut O,
    ) -> Result<MergeStats>
    where
        S: SortedSource<'a>,
        F: FnMut(&'a [u8], u32),
        O: Observer<Self>,
    {
        let lists = sources.len();
        let mut trie = TriePq::new(alphabet, lists);
        for (t, s) in sources.iter_mut().enumerate() {
            if let Some(x) = s.pop()? {
                trie.insert(x, t)?;
                obs.updated(&trie);
            }
        }
        let (mut m_in, mut n_out) = (0u64, 0u64);
        let mut group = Vec::with_capacity(lists);
        while !trie.is_empty() {
            obs.extracting(&trie);
            group.clear();
            let x = trie.delete_min_into(&mut group)?;
            obs.updated(&trie);
            emit(x, group.len() as u32);
            m_in += group.len() as u64;
            n_out += 1;
            for &t in &group {
                if let Some(next) = sources[t].pop()? {
                    trie.insert(next, t)?;
                    obs.updated(&trie);
                }
            }
            obs.round(&trie);
        }
        Ok(MergeStats {
            lists,
            m_in,
            n_out,
            char_probes: trie.char_probes,
            sift_steps: trie.sift_steps,
            ..Default::default()
        })
    }
}
