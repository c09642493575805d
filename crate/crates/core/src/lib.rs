//! Dynamic compressed self-index over byte strings.
//!
//! The text is stored as a restricted-recompression run-length SLP. Pattern
//! occurrences are found through a two-sided grid of split points plus an
//! occurrence-offset walk over the grammar DAG. Insertions and deletions
//! rebuild only the nonterminals near the edit.
//!
//! ```
//! use rrindex::{Index, Params};
//!
//! let mut idx = Index::build(b"abaaacbaaa", Params::default()).unwrap();
//! assert_eq!(idx.locate(b"aa"), vec![3, 4, 8, 9]);
//! idx.insert(3, b"b").unwrap();
//! assert_eq!(idx.extract(1, idx.len()).unwrap(), b"abbaaacbaaa");
//! ```

pub mod dag;
mod error;
pub mod format;
pub mod grammar;
pub mod grid;
mod index;
pub mod locate;
pub mod opscript;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod par;
pub mod structures;
pub mod text_access;
pub mod update;
pub mod verify;

pub use error::Error;
pub use grammar::{Assign, Fingerprint, NodeId, Rule};
pub use index::{Index, IndexStats, Params};
pub use locate::{LocateOptions, LocateReport, Primary};

pub type Result<T> = std::result::Result<T, Error>;
