//! Mean-field simulation of Bose–Einstein-condensate qubits.
//!
//! Units are ħ = m = 1 throughout. Every stored wavefunction is unit-normalized;
//! the particle number N is carried separately and multiplies the mean-field terms.

// NaN-rejecting `!(x > 0.0)` checks and index loops over 2×2 blocks are intended.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod gpe;
pub mod modes;
pub mod numerics;
pub mod pairfield;
pub mod qubit_dynamics;
pub mod spinor;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
