use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    /// A source produced a value that is not strictly greater than its predecessor.
    #[error("{name}:{line}: input is not strictly increasing")]
    Unsorted { name: String, line: usize },

    #[error("{name}:{line}: forbidden byte 0x{byte:02x} in string")]
    InvalidByte { name: String, line: usize, byte: u8 },

    /// The string heap was asked to replace the root with a smaller value.
    #[error("list {list}: replacement value is smaller than the value it replaces")]
    Monotonicity { list: usize },

    #[error("byte 0x{byte:02x} is not in the trie alphabet")]
    Alphabet { byte: u8 },

    #[error("delete-min on an empty trie")]
    EmptyTrie,

    #[error("{0}")]
    Unsupported(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
