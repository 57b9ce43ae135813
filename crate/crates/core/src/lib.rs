//! Quasienergy spectra and dephasing of a two-level system under a
//! bichromatic periodic drive.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod floquet;
pub mod noise;
pub mod sensitivity;
pub mod serde_float;
pub mod sweep;

pub use error::{FloquetError, Result};
