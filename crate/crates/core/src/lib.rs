//! Compressed storage for labeled, directed, attributed multigraphs.
//!
//! The store has three layers. The schema layer maps element ids to types,
//! the data layer holds attribute values, and the relations layer is a
//! k²-tree over (origin, target) pairs extended to carry edge ids.
//! [`graph::AttK2Graph`] is the immutable store and
//! [`dyngraph::DynAttK2Graph`] the updatable one; both answer the queries
//! of [`graph::GraphQueries`].

pub mod attrstore;
pub mod bits;
pub mod cli;
pub mod dyngraph;
pub mod error;
pub mod graph;
pub mod io;
pub mod k2;
pub mod multiedge;
pub mod oracle;
pub mod schema;

pub use error::{Error, Result};
pub use graph::{AttK2Graph, AttrValue, GraphQueries, Kind, Selection};
