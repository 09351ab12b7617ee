//! Periodic grids, Fourier-coefficient fields and the basic spectral
//! operators on the torus `[0, L)^n`.

mod exponent;
mod fft;
mod field;
mod grid;
pub mod snapshot;

pub use exponent::Exponent;
pub use field::{forward_transform, PhysicalField, SpectralField, ZERO_MODE_TOLERANCE};
pub use grid::GridSpec;
