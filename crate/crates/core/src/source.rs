//! Pull-only input lists.
//!
//! Every source yields strictly increasing strings and reports a violation as
//! an input error at the offending pop. Strings borrow from buffers that
//! outlive the merge, so heaps can hold slices without copying.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// A one-sided queue of strictly increasing strings.
pub trait SortedSource<'a> {
    /// The next string, or `None` once the list is exhausted.
    fn pop(&mut self) -> Result<Option<&'a [u8]>>;

    /// Marks every byte in the strings not yet popped. Returns false when the
    /// source cannot look ahead.
    fn scan_bytes(&self, _seen: &mut [bool; 256]) -> bool {
        false
    }

    /// Stops comparing each string with its predecessor, for callers that
    /// make the same comparison themselves and report failures through
    /// [`SortedSource::unsorted`].
    fn trust_order(&mut self) {}

    /// The error for an order violation at the most recently popped string.
    fn unsorted(&self) -> Error {
        Error::Invariant("order violation reported by the caller".into())
    }
}

impl<'a, S: SortedSource<'a> + ?Sized> SortedSource<'a> for Box<S> {
    fn pop(&mut self) -> Result<Option<&'a [u8]>> {
        (**self).pop()
    }

    fn scan_bytes(&self, seen: &mut [bool; 256]) -> bool {
        (**self).scan_bytes(seen)
    }

    fn trust_order(&mut self) {
        (**self).trust_order()
    }

    fn unsorted(&self) -> Error {
        (**self).unsorted()
    }
}

/// Order check shared by the concrete sources.
#[derive(Debug, Default)]
struct Monotone<'a> {
    last: Option<&'a [u8]>,
    count: usize,
    trusted: bool,
}

impl<'a> Monotone<'a> {
    #[inline]
    fn admit(&mut self, name: &str, s: &'a [u8]) -> Result<()> {
        self.count += 1;
        if self.trusted {
            return Ok(());
        }
        if let Some(prev) = self.last {
            if s <= prev {
                return Err(self.error(name));
            }
        }
        self.last = Some(s);
        Ok(())
    }

    fn error(&self, name: &str) -> Error {
        Error::Unsorted {
            name: name.to_owned(),
            line: self.count,
        }
    }
}

fn check_bytes(name: &str, line: usize, s: &[u8]) -> Result<()> {
    match memchr::memchr2(0, b'\n', s) {
        Some(i) => Err(Error::InvalidByte {
            name: name.to_owned(),
            line,
            byte: s[i],
        }),
        None => Ok(()),
    }
}

/// Newline-delimited strings in a byte buffer. A missing final newline is accepted.
#[derive(Debug)]
pub struct LineSource<'a> {
    name: String,
    buf: &'a [u8],
    pos: usize,
    order: Monotone<'a>,
}

impl<'a> LineSource<'a> {
    pub fn new(name: impl Into<String>, buf: &'a [u8]) -> Self {
        LineSource {
            name: name.into(),
            buf,
            pos: 0,
            order: Monotone::default(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl<'a> SortedSource<'a> for LineSource<'a> {
    #[inline]
    fn pop(&mut self) -> Result<Option<&'a [u8]>> {
        if self.pos >= self.buf.len() {
            return Ok(None);
        }
        let rest = &self.buf[self.pos..];
        let (line, advance) = match memchr::memchr(b'\n', rest) {
            Some(i) => (&rest[..i], i + 1),
            None => (rest, rest.len()),
        };
        self.pos += advance;
        if memchr::memchr(0, line).is_some() {
            return Err(Error::InvalidByte {
                name: self.name.clone(),
                line: self.order.count + 1,
                byte: 0,
            });
        }
        self.order.admit(&self.name, line)?;
        Ok(Some(line))
    }

    fn scan_bytes(&self, seen: &mut [bool; 256]) -> bool {
        for &b in &self.buf[self.pos..] {
            seen[b as usize] = true;
        }
        seen[b'\n' as usize] = false;
        true
    }

    fn trust_order(&mut self) {
        self.order.trusted = true;
    }

    fn unsorted(&self) -> Error {
        self.order.error(&self.name)
    }
}

/// Strings held in a slice, mostly for tests and programmatic callers.
#[derive(Debug)]
pub struct SliceSource<'a, T> {
    name: String,
    items: &'a [T],
    idx: usize,
    order: Monotone<'a>,
}

impl<'a, T: AsRef<[u8]>> SliceSource<'a, T> {
    pub fn new(name: impl Into<String>, items: &'a [T]) -> Self {
        SliceSource {
            name: name.into(),
            items,
            idx: 0,
            order: Monotone::default(),
        }
    }
}

impl<'a, T: AsRef<[u8]>> SortedSource<'a> for SliceSource<'a, T> {
    #[inline]
    fn pop(&mut self) -> Result<Option<&'a [u8]>> {
        let Some(item) = self.items.get(self.idx) else {
            return Ok(None);
        };
        self.idx += 1;
        let s = item.as_ref();
        check_bytes(&self.name, self.idx, s)?;
        self.order.admit(&self.name, s)?;
        Ok(Some(s))
    }

    fn scan_bytes(&self, seen: &mut [bool; 256]) -> bool {
        for item in &self.items[self.idx..] {
            for &b in item.as_ref() {
                seen[b as usize] = true;
            }
        }
        true
    }

    fn trust_order(&mut self) {
        self.order.trusted = true;
    }

    fn unsorted(&self) -> Error {
        self.order.error(&self.name)
    }
}

/// One source per list, named `list1..listT`.
pub fn slice_sources<T: AsRef<[u8]>>(lists: &[Vec<T>]) -> Vec<SliceSource<'_, T>> {
    lists
        .iter()
        .enumerate()
        .map(|(i, l)| SliceSource::new(format!("list{}", i + 1), l))
        .collect()
}

/// A whole input file held in memory.
#[derive(Debug, Clone)]
pub struct InputFile {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

impl InputFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(InputFile {
            path: path.to_owned(),
            bytes,
        })
    }

    pub fn source(&self) -> LineSource<'_> {
        LineSource::new(self.path.display().to_string(), &self.bytes)
    }
}

/// Reads every file. Ordering and byte checks happen lazily as lines are popped.
pub fn open_sources<P: AsRef<Path>>(paths: &[P]) -> Result<Vec<InputFile>> {
    paths.iter().map(InputFile::read).collect()
}

/// Drains a source, validating it completely.
pub fn drain<'a, S: SortedSource<'a>>(mut source: S) -> Result<Vec<&'a [u8]>> {
    let mut out = Vec::new();
    while let Some(s) = source.pop()? {
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_are_yielded_in_order() {
        let got = drain(LineSource::new("f", b"a\nb\n")).unwrap();
        assert_eq!(got, vec![&b"a"[..], b"b"]);
    }

    #[test]
    fn unsorted_input_reports_line() {
        let mut src = LineSource::new("f", b"b\na\n");
        assert_eq!(src.pop().unwrap(), Some(&b"b"[..]));
        match src.pop() {
            Err(Error::Unsorted { name, line }) => {
                assert_eq!(name, "f");
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicates_within_a_list_are_rejected() {
        assert!(matches!(
            drain(LineSource::new("f", b"a\na\n")),
            Err(Error::Unsorted { line: 2, .. })
        ));
    }

    #[test]
    fn empty_file_is_immediately_empty() {
        let mut src = LineSource::new("f", b"");
        assert_eq!(src.pop().unwrap(), None);
    }

    #[test]
    fn empty_line_is_the_empty_string() {
        let got = drain(LineSource::new("f", b"\na\nab")).unwrap();
        assert_eq!(got, vec![&b""[..], b"a", b"ab"]);
    }

    #[test]
    fn nul_byte_rejected() {
        assert!(matches!(
            drain(LineSource::new("f", b"a\nb\0c\n")),
            Err(Error::InvalidByte {
                line: 2,
                byte: 0,
                ..
            })
        ));
        let lists = [vec![b"a\nb".to_vec()]];
        assert!(matches!(
            drain(SliceSource::new("s", &lists[0])),
            Err(Error::InvalidByte { byte: b'\n', .. })
        ));
    }

    #[test]
    fn files_round_trip_through_open_sources() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        fs::write(&p, b"ab\nac\n").unwrap();
        let files = open_sources(&[&p]).unwrap();
        assert_eq!(drain(files[0].source()).unwrap(), vec![&b"ab"[..], b"ac"]);
        assert!(matches!(
            open_sources(&[dir.path().join("missing")]),
            Err(Error::Io { .. })
        ));
    }
}
