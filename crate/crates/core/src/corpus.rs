//! Seeded random fields.
//!
//! Every random draw descends from one `u64` seed. Named streams are split
//! off with a splitmix64 mix of the seed and a label hash, and each stream
//! drives a ChaCha8 generator, so results do not depend on the order in
//! which streams are used.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::spectral::{Exponent, GridSpec, SpectralField};

/// One splitmix64 step.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Seed of the stream `label` under `seed`.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    splitmix64(seed ^ splitmix64(fnv1a(label)))
}

/// Seed of the `index`-th member of stream `label`.
pub fn indexed_seed(seed: u64, label: &str, index: u64) -> u64 {
    splitmix64(derive_seed(seed, label).wrapping_add(splitmix64(index)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of a random field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSpec {
    pub components: usize,
    /// Largest `|m_i|` per axis. `N / 6` keeps products alias-free.
    pub max_mode: usize,
    /// Smallest `|m_i|` allowed on the largest axis; 0 keeps everything.
    pub min_mode: usize,
    /// Amplitude envelope `|k|^{-slope}`.
    pub slope: f64,
    /// Leray-project vector fields.
    pub solenoidal: bool,
    /// Target `L^2` norm; non-positive leaves the raw draw.
    pub amplitude: f64,
}

impl FieldSpec {
    /// Scalar field whose pairwise products are free of aliasing.
    pub fn dealias_safe(grid: &GridSpec) -> Self {
        FieldSpec {
            components: 1,
            max_mode: grid.size() / 6,
            min_mode: 0,
            slope: 0.0,
            solenoidal: false,
            amplitude: 1.0,
        }
    }

    pub fn components(mut self, c: usize) -> Self {
        self.components = c;
        self
    }

    pub fn max_mode(mut self, k: usize) -> Self {
        self.max_mode = k;
        self
    }

    pub fn min_mode(mut self, k: usize) -> Self {
        self.min_mode = k;
        self
    }

    pub fn slope(mut self, beta: f64) -> Self {
        self.slope = beta;
        self
    }

    pub fn solenoidal(mut self, yes: bool) -> Self {
        self.solenoidal = yes;
        self
    }

    pub fn amplitude(mut self, a: f64) -> Self {
        self.amplitude = a;
        self
    }
}

/// i.i.d. complex Gaussian coefficients inside the mode box, made Hermitian,
/// with a zero mean and the optional slope, projection and normalization.
pub fn random_field(grid: &GridSpec, spec: &FieldSpec, seed: u64) -> Result<SpectralField> {
    let half = (grid.size() / 2) as isize;
    let k = (spec.max_mode as isize).min(half - 1);
    let kmin = spec.min_mode as isize;
    let dim = grid.dim();
    let mut rng = rng(seed);
    let mut out = SpectralField::zeros(*grid, spec.components);
    let range = |active: bool| if active { -k..=k } else { 0..=0 };
    for c in 0..spec.components {
        for m0 in range(true) {
            for m1 in range(true) {
                for m2 in range(dim == 3) {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    let modes = [m0, m1, m2];
                    let top = modes.iter().map(|m| m.abs()).max().unwrap_or(0);
                    if top == 0 || top < kmin {
                        continue;
                    }
                    let idx = grid.flat_index(&modes);
                    let env = if spec.slope == 0.0 {
                        1.0
                    } else {
                        grid.magnitude(idx).powf(-spec.slope)
                    };
                    out.component_mut(c)[idx] = Complex64::new(re, im) * (env / std::f64::consts::SQRT_2);
                }
            }
        }
    }
    out.hermitian_symmetrize();
    if spec.solenoidal && spec.components == dim {
        out = out.leray_project()?;
    }
    if spec.amplitude > 0.0 {
        let norm = out.lp_norm(Exponent::TWO);
        if norm > 0.0 {
            out *= spec.amplitude / norm;
        }
    }
    Ok(out)
}
