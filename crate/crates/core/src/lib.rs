//! Joint routing–assignment: pair `n` items with `n` placeholders and find
//! the cheapest closed tour that alternates between them.
//!
//! The pipeline builds an initial tour from a two-way Hungarian assignment
//! and greedy cycle merging, refines it by partial path reconstruction
//! (break the tour around a node set, re-solve the reduced problem exactly,
//! stitch the result back), polishes it with circular windows walked along
//! the tour, and finishes with an exact solve that must keep most of the
//! incumbent's edges.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assignment;
pub mod bench;
pub mod error;
pub mod exact;
pub mod instance;
pub mod merging;
pub mod metrics;
pub mod pipeline;
pub mod ppr;
pub mod render;
pub mod slppr;
pub mod tour;

pub use error::{Error, Result};
pub use instance::{CostMatrix, Instance, NodeId, Point};
pub use tour::{Edge, EdgeSet, Tour};
