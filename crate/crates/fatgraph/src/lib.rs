//! Fat-vertex intersection graphs on the annulus and the torus.
//!
//! A pair of essential surfaces intersecting a common solid-torus filling
//! region induces a pair of labeled fat-vertex graphs, one on an annulus and
//! one on a torus, sharing a single edge set. This crate models those graphs
//! as rotation systems, implements the label calculus and the constraint
//! suite that governs admissible pairs, and exhaustively enumerates all
//! admissible pairs for small vertex counts, producing machine-checkable
//! elimination certificates.
//!
//! Modules:
//! - [`maps`]: embedded graphs as rotation systems; faces, genus, parallel
//!   families, reduced graphs, essential cycles, canonical codes.
//! - [`labels`]: boundary label calculus — distances, edge signs,
//!   equidistant pairs, family permutations.
//! - [`pairing`]: the shared-edge structure between the two graphs; parity,
//!   jumping order, distance transfer.
//! - [`lemmas`]: the constraint registry and certificates.
//! - [`disk`]: graphs in a disk — vertex classification, the sigma/tau
//!   statistics, and their brute-force oracle.
//! - [`census`]: exhaustive enumeration with pruning, survivors, derived
//!   results, fixtures.

pub mod census;
pub mod disk;
pub mod labels;
pub mod lemmas;
pub mod maps;
pub mod pairing;

pub use maps::{EmbeddedGraph, FaceSystem, Sign, SurfaceKind};
pub use pairing::GraphPair;
