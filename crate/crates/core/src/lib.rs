//! Hamilton cycle packing and covering for expander and random graphs.
//!
//! Bottom-up: [`graph`] and [`random`] provide graphs and seeded G(n, p)
//! samples, [`expansion`] checks expander properties, [`posa`] finds Hamilton
//! cycles by rotation-extension while protecting chosen edges, [`concatenate`]
//! merges path families, [`cover`] assembles packings and covers, and
//! [`verify`] holds the exact oracles used to test everything else.

pub mod concatenate;
pub mod cover;
pub mod expansion;
pub mod graph;
pub mod posa;
pub mod random;
pub mod verify;

pub use cover::{cover_graph, CoverCertificate, CoverOptions, Matching};
pub use graph::{Edge, Graph, HamiltonCycle, Path};
pub use posa::{find_hamilton_cycle, HamiltonConfig, RotationConstraints, SeedPath};
pub use random::RngSeed;
