//! Computations with finite diversities: multi-way metrics given by a value
//! on every subset of a small ground set.
//!
//! The crate builds the standard diversity families ([`zoo`]), decides and
//! certifies ℓ1-embeddability through the cut cone ([`splits`]), computes
//! minimal-distortion ℓ1 approximations by LP ([`embed`]), and solves the
//! hypergraph Steiner packing and hypergraph cut problems whose gap those
//! distortions govern ([`flowcut`]). A small dense simplex with row duals
//! ([`linprog`]) backs all LP-based operations.

#![allow(clippy::needless_range_loop)]

pub mod diversity;
pub mod embed;
pub mod flowcut;
pub mod ground;
pub mod linprog;
pub mod random;
pub mod splits;
pub mod verify;
pub mod zoo;

pub use diversity::{
    count_diversity, distortion_between, DistortionReport, TabulatedDiversity, TabulatedMetric,
};
pub use ground::{GroundSet, Subset};
pub use splits::SplitSystem;
