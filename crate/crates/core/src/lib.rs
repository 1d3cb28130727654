//! Exact diagonalization of the ferromagnetic XXZ chain with boundary fields
//! (kink, antikink and droplet states), small-lattice XXZ interface probes,
//! and the Falicov–Kimball model through free-fermion reduction.

pub mod droplet;
pub mod eigensolve;
pub mod error;
pub mod fk;
pub mod hilbert;
pub mod interface;
pub mod lattice;
pub mod sparse;
pub mod xxz;

pub use error::{Error, Result};
