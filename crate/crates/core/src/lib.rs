//! Reverse spatio-textual k-nearest-neighbor (RSTkNN) queries over an
//! IUR-tree.
//!
//! Given a database of located, weighted-term objects and a query, the
//! result is every object that ranks the query strictly above its own k-th
//! nearest neighbor. [`engine::rstknn_query`] answers this with a
//! branch-and-bound traversal; [`oracle::rknn_bruteforce`] answers it by
//! exhaustive comparison and is the reference the traversal is tested
//! against. Two legacy traversals with known faults are kept for comparison.

pub mod cli;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod generate;
pub mod nn_list;
pub mod object;
pub mod oracle;
pub mod similarity;
pub mod tree;

pub use engine::{rstknn_query, Mode, QueryOutcome};
pub use error::{Error, Result};
pub use object::{Point, QueryObject, StObject, TermVector};
pub use similarity::{NormStats, SimParams};
pub use tree::{build_tree, Entry, IurTree};
