//! Plant propagation experiments, hard Hamiltonian-cycle instance forging, and
//! the subset-sum to polygon-compositing reduction.

pub mod benchmark;
pub mod error;
pub mod evolve;
pub mod graph;
pub mod hamiltonian;
pub mod ppa;
pub mod rng;
pub mod spfp;
pub mod sweep;

pub use error::{Error, Result};
