//! Desk-scale machinery for bilipschitz parametrizations of intrinsic
//! graphs in Heisenberg groups.
//!
//! The crate is organized around the pipeline:
//! group arithmetic ([`group`]) → intrinsic graphs and their regularity
//! ([`graph`]) → fat Cantor sets in the model group ([`cubes`]) →
//! correspondence oracles (flags in ℍ¹: [`flags`]; vertical tangent
//! planes in ℍⁿ, n ≥ 2: [`planes`]) → the iterative bilipschitz map and
//! its audit ([`builder`]) → batch driver ([`cli`]).

pub mod builder;
pub mod cli;
pub mod cubes;
pub mod error;
pub mod fit;
pub mod flags;
pub mod graph;
pub mod group;
pub mod minimize;
pub mod planes;
pub mod sampling;
