//! Finite-model laboratory for information structures in stochastic games.
//!
//! The crate computes game values (zero-sum via behavioral-strategy linear
//! programs, team optima via exhaustive search and person-by-person descent),
//! distances between information structures (total variation, Wasserstein-1,
//! the kernel value-distance, Le Cam deficiency), and runs the convergence
//! experiments that probe how game values behave as information structures
//! converge.
//!
//! Conventions used throughout:
//!
//! - An information structure is a joint probability tensor over the state
//!   space (factor 0) and one measurement space per player (factors 1..=n).
//! - Total variation is the sum of absolute mass differences, so its maximum
//!   value is 2, not 1.
//! - Weak convergence is measured by Wasserstein-1 on the coordinate
//!   embedding of each space; on a fixed finite space TV, setwise, and weak
//!   convergence coincide, so sequences that converge weakly but not in TV
//!   are realized by moving support points inside a common embedded grid.
//! - All operations are pure functions over immutable data; everything can be
//!   shared freely across threads.

pub mod compare;
pub mod error;
pub mod game;
pub mod joint;
pub mod lp;
pub mod measure;
pub mod model;
pub mod sample;
pub mod scenarios;
pub mod space;
pub mod transport;

pub use error::{Error, Result};
pub use joint::{join, JointMeasure, NullRows};
pub use measure::{Channel, Measure};
pub use space::Space;

/// Default seed for every randomized routine in the crate and the CLI.
pub const DEFAULT_SEED: u64 = 20250809;
