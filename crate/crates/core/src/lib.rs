//! Weighted mixed quasi-norms, matrix classes defined by diagonal decay,
//! Schatten quasi-norms, and their counterparts for pseudo-differential
//! operators on the cyclic group `ℤ_N`.

mod codec;

pub mod bench;
pub mod error;
pub mod gabor;
pub mod matrix_bank;
pub mod mixed_norms;
pub mod psido;
pub mod schatten;
pub mod weights_lattices;

pub use error::{Error, Result};
pub use num_complex::Complex64;
