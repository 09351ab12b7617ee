//! Fixtures shared by the benchmarks in `benches/`.

use besov_ns::corpus::{random_field, FieldSpec};
use besov_ns::{GridSpec, SpectralField};

pub const SEED: u64 = 17;

pub fn grid(size: usize) -> GridSpec {
    GridSpec::periodic_2pi(3, size).expect("power of two")
}

/// Dealias-safe scalar field.
pub fn scalar(size: usize, seed: u64) -> SpectralField {
    let g = grid(size);
    random_field(&g, &FieldSpec::dealias_safe(&g), seed).expect("valid spec")
}

/// Dealias-safe divergence-free velocity with unit `L^2` norm.
pub fn velocity(size: usize, seed: u64) -> SpectralField {
    let g = grid(size);
    let spec = FieldSpec::dealias_safe(&g).components(3).solenoidal(true);
    random_field(&g, &spec, seed).expect("valid spec")
}
