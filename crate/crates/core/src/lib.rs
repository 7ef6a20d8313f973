//! Spectral analysis of the PT-symmetric two-mode Bose-Hubbard Hamiltonian
//! `H = −2iγL_z + 2vL_x + 2cL_z²` in the spin-`N/2` representation.

pub mod acceptance;
pub mod ep;
pub mod error;
pub mod exact;
pub mod export;
pub mod grid;
pub mod newton;
pub mod operators;
pub mod spectra;

pub use error::{Error, Result};
