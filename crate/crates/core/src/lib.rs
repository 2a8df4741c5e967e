//! Maximal mixed Hamming packings: models, exact search, and bound tables.
//!
//! A mixed space is a product of alphabets of different sizes; a packing
//! with minimum distance `d` is a set of words pairwise at Hamming distance
//! at least `d`. This crate builds the binary optimization models for the
//! largest such packings, shrinks them by pinning a contact pair, solves
//! them exactly as maximum independent set problems, writes them as LP/MPS
//! files for external solvers, and propagates upper bounds across a grid of
//! binary-ternary parameters.

pub mod bitset;
pub mod bounds;
pub mod branch;
pub mod code;
mod cover;
pub mod emit;
pub mod error;
pub mod model;
pub mod solver;
pub mod space;
pub mod tables;

pub use code::{
    connectify, connectify_traced, contact_graph, is_connected, min_distance, symbol_swap, verify,
    Code, ContactGraph, SeedChoice, VerifyReport,
};
pub use error::{Error, Result};
pub use model::{
    build_full, build_pair, build_profile_forbidding, build_reduced, build_zero_fixed,
    model_stats, ModelKind, ModelStats, PackingModel,
};
pub use solver::{
    oracle, solve, solve_forced, solve_with, SolveBudget, SolveOptions, SolveResult, SolveStatus,
};
pub use space::{ball, distance, make_space, marginal_distances, Codeword, MarginalProfile, MixedSpace};
