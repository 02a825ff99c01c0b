//! Exact-arithmetic tools for Lasserre relaxations of 0/1 programs: subset
//! lattices, moment matrices and their zeta diagonalization, almost-diagonal
//! forms, and PSD certificates built from rank-one pivots and Gershgorin disks.

pub mod almost_diag;
pub mod error;
pub mod gap;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod moment;
pub mod psd;
pub mod rational;
pub mod subset;

pub use error::{Error, Result};
pub use rational::Rational;
pub use subset::SubsetIndex;
