//! Datasets shared by the criterion benches.

use heapmerge::datagen::{generate, Dataset, GenSpec};

/// Elements per benchmark dataset. Small enough that criterion's sampling
/// finishes in minutes on one core.
pub const M: u64 = 200_000;

pub fn uniform(lists: usize) -> Dataset {
    generate(&GenSpec::uniform(lists, 20, 4, M, 7)).expect("valid uniform spec")
}

pub fn shotgun(lists: usize, coverage: u32) -> Dataset {
    generate(&GenSpec::shotgun(lists, 20, 4, M, coverage, 7)).expect("valid shotgun spec")
}
