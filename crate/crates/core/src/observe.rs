//! Hooks into the merge loops for instrumented runs. The unit observer `()`
//! compiles to nothing.

/// Receives events from a merge over heap type `H` whose descent loop reports
/// branch labels of type `C`.
pub trait Observer<H: ?Sized, C = ()> {
    /// A descent-loop branch was taken.
    fn case(&mut self, _case: C) {}
    /// One heapify (or trie operation) completed.
    fn updated(&mut self, _heap: &H) {}
    /// The current minimum is about to be consumed.
    fn extracting(&mut self, _heap: &H) {}
    /// A full pop-and-replace round finished.
    fn round(&mut self, _heap: &H) {}
}

impl<H: ?Sized, C> Observer<H, C> for () {}
