//! Periodic 3D grid, unitary transforms, multipliers and norms.

mod fft;
mod field;
mod grid;
mod multiplier;
mod norms;
mod profile;

pub use fft::Fft3;
pub use field::{
    fft_forward, fft_inverse, read_field_dump, translate, write_field_dump, ComplexField, Space,
    DUMP_MAGIC,
};
pub use grid::Grid3;
pub use multiplier::{apply_multiplier, Multiplier};
pub use norms::{
    inner, norm, spacetime_norm, spacetime_norm_from_spatial, trapezoid_weights, Exponent,
};
pub use profile::{dilate, dilate_with_tolerance, Profile, ProfileSpec, DEFAULT_TAIL_TOLERANCE};
