//! Exact k-forest solver for undirected multigraphs.
//!
//! Given a multigraph and `k ≥ 1`, [`forests`] returns `k` edge-disjoint
//! forests of maximum total size, together with per-round statistics.
//! The supporting pieces (max flow, indegree-bounded pseudoforests,
//! matroid-union augmentation, top-clump extraction and contraction) are
//! exposed for testing and instrumentation.

pub mod clump;
pub mod error;
pub mod exact;
pub mod format;
pub mod generate;
pub mod graph;
pub mod maxflow;
pub mod pseudoforest;
pub mod solver;
pub mod unionfind;

pub use clump::{brute_force_top_clump, is_clump, top_clump, ClumpComponent, ClumpReport};
pub use error::{Error, Result};
pub use exact::{
    bounded_indegree_forests, partition_opt_certificate, solve_kforest, PartitionCertificate,
};
pub use graph::{
    contract, orient_forests, uncontract, ContractionRecord, EdgeId, ForestFamily, MultiGraph,
    Orientation, Vertex,
};
pub use pseudoforest::{pseudoforests, Pseudoforest};
pub use solver::{
    forests, iteration_bound, verify_assignments, verify_solution, CheckFailure, OptimalityCheck,
    SolveStats, Solver, VerificationReport,
};
