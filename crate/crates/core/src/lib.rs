//! Order-invariant hash reduction over a 128-bit prime field, marker
//! validity sets, and M-Sets: hash-keyed containers that summarize and
//! compare collections whose contents vary along a marker axis.
//!
//! The [`ibdgraph`] module applies these to node-unlabeled graphs whose
//! edges move between nodes along the marker axis, and [`dedup`] extracts
//! one representative per distinct graph configuration from a collection.

pub mod dedup;
pub mod graphfile;
pub mod hashspace;
pub mod ibdgraph;
pub mod intervals;
pub mod mset;
pub mod oracle;
pub mod simulate;

pub use hashspace::{hash_object, negate, reduce, rehash, scalar_mul, HashValue, MODULUS};
pub use ibdgraph::{GraphSummary, IbdGraph, UniqueGraphRecord};
pub use intervals::{IntervalError, MarkedKey, Marker, ValiditySet};
pub use mset::{MSet, MSetError};
