//! Spectral simulator for the 3D Schrödinger equation with a Yukawa potential
//! and a Yukawa-Hartree nonlinearity (plus its semi-relativistic variant), and
//! the inverse pipeline that recovers the nonlinearity parameters from
//! numerically computed scattering data.

pub mod error;
pub mod harness;
pub mod model;
pub mod oracles;
pub mod propagate;
pub mod recon;
pub mod scattering;
pub mod spectral;
pub mod yukawa;

pub use error::{Error, Result};
pub use model::{Family, ModelParams};
pub use spectral::{ComplexField, Grid3, Multiplier, ProfileSpec, Space};
pub use yukawa::YukawaParams;
