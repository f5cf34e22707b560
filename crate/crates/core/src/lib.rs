//! Node-level k-core resilience.
//!
//! Quantifies how firmly each node holds its core number when a single edge
//! is removed from, or inserted into, an undirected graph. The building
//! blocks are a removal and an insertion *dependency graph*: a directed edge
//! `v -> u` records that changing the edge `(u, v)` moves `K(u)`. In- and
//! out-degrees in those graphs give the four strength measures, which feed
//! two applications: budgeted critical-edge selection and influential
//! spreader seeding evaluated with an SIR simulator.

pub mod applications;
pub mod cores;
pub mod dependency;
pub mod error;
pub mod generate;
pub mod graph;
pub mod incremental;
pub mod insertion;
pub mod removal;
pub mod sir;

pub use cores::{core_decompose, Core, CoreChange, CoreState};
pub use error::{Error, Result};
pub use graph::{Edge, Graph, NodeId};
