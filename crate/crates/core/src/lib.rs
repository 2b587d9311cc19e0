//! Scattering of a single particle off a bound pair in extended Bose-Hubbard
//! and Fermi-Hubbard chains.
//!
//! The crate computes the same physics three ways: exact many-body wavepacket
//! dynamics ([`dynamics`]), the equivalent single-particle impurity chain
//! ([`effective`], [`transport`]) and closed-form transmission and resonance
//! formulas ([`transport::analytic_t12`], [`transport::resonance_v`]).

pub mod dynamics;
pub mod effective;
pub mod error;
pub mod model;
pub mod output;
pub mod spectrum;
pub mod transport;

pub use error::{Error, Result};
