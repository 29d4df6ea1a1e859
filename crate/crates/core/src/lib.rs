//! Neumann Laplacian spectra of spherical shells and planar domains.

pub mod cli;
pub mod error;
pub mod exec;
pub mod fem;
pub mod geometry;
pub mod harmonics;
pub mod numerics;
pub mod radial;
pub mod shell;
pub mod sl_oracle;
pub mod specialfn;
pub mod trial;

pub use error::{Error, Result};
