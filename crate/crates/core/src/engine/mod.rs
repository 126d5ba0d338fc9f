//! Statevector engines.

pub mod full;
pub mod noise;
pub mod subspace;
