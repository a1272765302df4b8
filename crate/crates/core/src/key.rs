//! String values and the character-level primitives every backend builds on.
//!
//! Strings are raw byte slices. Each one is conceptually followed by a
//! terminator that ranks below every byte, so a proper prefix sorts before its
//! extensions. The terminator is never stored: reading index `len` yields it.

use std::cmp::Ordering;

/// Character code returned for the virtual terminator.
pub const TERMINATOR: u16 = 0;

/// Character code returned for every position of [`Key::Infinity`]. It matches
/// no byte and no terminator, so lcp scans stop immediately on it.
pub const INFINITY_CHAR: u16 = 257;

/// The value held by a heap slot: a live string or the sentinel that retires
/// an exhausted list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Key<'a> {
    Str(&'a [u8]),
    Infinity,
}

impl<'a> Key<'a> {
    /// Character code at `i`: byte + 1, [`TERMINATOR`] at `len`, or
    /// [`INFINITY_CHAR`].
    #[inline]
    pub fn at(self, i: usize) -> u16 {
        match self {
            Key::Str(s) => match s.get(i) {
                Some(&b) => b as u16 + 1,
                None => TERMINATOR,
            },
            Key::Infinity => INFINITY_CHAR,
        }
    }

    #[inline]
    pub fn as_str(self) -> Option<&'a [u8]> {
        match self {
            Key::Str(s) => Some(s),
            Key::Infinity => None,
        }
    }

    #[inline]
    pub fn is_infinity(self) -> bool {
        matches!(self, Key::Infinity)
    }

    /// String length; `usize::MAX` for the sentinel so that no lcp can equal it.
    #[inline]
    pub fn len(self) -> usize {
        match self {
            Key::Str(s) => s.len(),
            Key::Infinity => usize::MAX,
        }
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    /// Equality in the collision sense: the sentinel equals nothing, itself included.
    #[inline]
    pub fn same(self, other: Key<'_>) -> bool {
        match (self, other) {
            (Key::Str(a), Key::Str(b)) => a == b,
            _ => false,
        }
    }
}

impl PartialOrd for Key<'_> {
    #[inline]
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key<'_> {
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Key::Str(a), Key::Str(b)) => a.cmp(b),
            (Key::Str(_), Key::Infinity) => Ordering::Less,
            (Key::Infinity, Key::Str(_)) => Ordering::Greater,
            (Key::Infinity, Key::Infinity) => Ordering::Equal,
        }
    }
}

/// Bytewise lexicographic order with the terminator convention.
#[inline]
pub fn compare(x: &[u8], y: &[u8]) -> Ordering {
    // Slice ordering already puts a proper prefix first.
    x.cmp(y)
}

/// Character probe tallies. `charged` counts lcp increments, the amortized
/// quantity bounded by the total input length; `terminal` counts the final
/// mismatching probe of each scan.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Probes {
    pub charged: u64,
    pub terminal: u64,
}

/// Smallest `ρ >= n` with `x[ρ] != y[ρ]` or both at the terminator.
///
/// The caller guarantees the first `n` characters already agree.
#[inline]
pub fn lcp_from(x: Key<'_>, y: Key<'_>, n: usize, probes: &mut Probes) -> usize {
    let end = match (x, y) {
        (Key::Str(a), Key::Str(b)) => {
            debug_assert!(n <= a.len() && n <= b.len());
            n + common_prefix(&a[n..], &b[n..])
        }
        _ => {
            debug_assert_eq!(n, 0);
            n
        }
    };
    probes.charged += (end - n) as u64;
    probes.terminal += 1;
    end
}

/// Three-way variant of [`lcp_from`]: stops where the three characters are not
/// all equal or `x` reaches its terminator. Two of the three arguments advance,
/// so each increment is charged twice.
#[inline]
pub fn lcp3_from(x: Key<'_>, y: Key<'_>, z: Key<'_>, n: usize, probes: &mut Probes) -> usize {
    let end = match (x, y, z) {
        (Key::Str(a), Key::Str(b), Key::Str(c)) => {
            debug_assert!(n <= a.len() && n <= b.len() && n <= c.len());
            let ab = common_prefix(&a[n..], &b[n..]);
            n + ab.min(common_prefix(&a[n..], &c[n..]))
        }
        _ => {
            debug_assert_eq!(n, 0);
            n
        }
    };
    probes.charged += 2 * (end - n) as u64;
    probes.terminal += 1;
    end
}

/// Length of the common prefix of two byte slices, eight bytes at a time.
#[inline]
fn common_prefix(a: &[u8], b: &[u8]) -> usize {
    let m = a.len().min(b.len());
    let (a, b) = (&a[..m], &b[..m]);
    let word = |s: &[u8], i: usize| u64::from_le_bytes(s[i..i + 8].try_into().unwrap());
    if m < 8 {
        return a.iter().zip(b).take_while(|(x, y)| x == y).count();
    }
    let mut i = 0;
    while i + 8 <= m {
        let diff = word(a, i) ^ word(b, i);
        if diff != 0 {
            return i + (diff.trailing_zeros() / 8) as usize;
        }
        i += 8;
    }
    if i == m {
        return m;
    }
    // The last word overlaps bytes already known to agree.
    let j = m - 8;
    let diff = word(a, j) ^ word(b, j);
    if diff != 0 {
        j + (diff.trailing_zeros() / 8) as usize
    } else {
        m
    }
}

/// Plain lcp of two strings, without probe accounting.
#[inline]
pub fn lcp(x: &[u8], y: &[u8]) -> usize {
    common_prefix(x, y)
}
