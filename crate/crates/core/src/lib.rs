//! Action and frequency variables of periodic Toda chains, their Hill/KdV
//! limits at the spectral edges, and a harness that checks the asymptotics.

pub mod abelian_differentials;
pub mod cli;
mod dd;
pub mod error;
pub mod harness;
pub mod hill_kdv;
pub mod jacobi_spectral;
pub mod quadrature;
pub mod roots;
pub mod toda_actions;
pub mod toda_model;

pub use error::{Error, Result};
