//! Exact graph width parameters and random-graph experiments.
//!
//! - [`gf2`]: packed GF(2) matrices, rank, echelon bases, sparse rank bound.
//! - [`graph`]: simple graphs, G(n,p) sampling, cutrank, components, edge lists.
//! - [`width`]: exact rank-width and treewidth DPs, rank-decompositions,
//!   balanced separations.
//! - [`expansion`]: Cheeger constants, degree-tail thresholds and the
//!   expansion-based rank-width certificate.
//! - [`matrix_stats`]: subspace membership probabilities and random-matrix
//!   rank-defect tails.
//! - [`experiments`]: seeded regime sweeps producing CSV records.

pub mod error;
pub mod expansion;
pub mod experiments;
pub mod gf2;
pub mod graph;
pub mod matrix_stats;
pub mod rng;
pub mod width;

pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector, Gf2Basis, SparseRankBound};
pub use graph::{Adjacency, ComponentKind, GnpConfig, Graph, SparseGraph};
