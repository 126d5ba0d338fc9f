//! Constraint-preserving QAOA for graph multi-coloring channel allocation.
//!
//! The crate simulates three ansätze on the same allocation problem: a
//! penalty-based baseline on the full statevector, a Dicke-initialized
//! ansatz with node-wise XY mixers on the product of Johnson bases, and a
//! plaquette-mixer ansatz on the set of allocations with fixed row and
//! column sums. Exact and greedy classical baselines and the canned
//! experiment drivers live alongside.

pub mod baselines;
pub mod combinatorics;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod qaoa;
pub mod rng;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use model::{AllocationBits, ProblemInstance};
pub use scalar::Scalar;

use combinatorics::{DualBasis, ProductBasis};

pub type FullState64 = engine::full::FullState<f64>;
pub type FullState32 = engine::full::FullState<f32>;
pub type ProductState64<'b> = engine::subspace::SubspaceState<'b, f64, ProductBasis>;
pub type DualState64<'b> = engine::subspace::SubspaceState<'b, f64, DualBasis>;
pub type XyMixerSpec64 = engine::subspace::XyMixerSpec<f64>;
pub type QaoaRunner64<'i> = qaoa::QaoaRunner<'i, f64>;
pub type QaoaRunner32<'i> = qaoa::QaoaRunner<'i, f32>;
