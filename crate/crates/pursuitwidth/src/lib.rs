//! Cops-and-robbers width measures on digraphs: exact game solving,
//! strategy transformations, the multi-robber strategy multiplier, and the
//! knowledge-game reduction for parity games with imperfect information.

pub mod arena;
pub mod cli;
pub mod corpus;
pub mod digraph;
pub mod error;
pub mod families;
pub mod multiply;
pub mod parity;
pub mod strategy;
pub mod suites;

pub use digraph::{Digraph, VertexSet};
pub use error::{Error, Result};
