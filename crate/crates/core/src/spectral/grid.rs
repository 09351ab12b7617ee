use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic grid on the torus `[0, L)^n` with `N` points per axis.
///
/// Flat indices are row-major over the `n` axes (axis 0 slowest). Integer
/// modes run over `{-N/2, ..., N/2 - 1}` and the physical wavenumber is
/// `2 pi m / L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    dim: usize,
    size: usize,
    length: f64,
}

impl GridSpec {
    pub fn new(dim: usize, size: usize, length: f64) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if size < 2 || !size.is_power_of_two() {
            return Err(Error::NonPowerOfTwo(size));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidLength(length));
        }
        Ok(GridSpec { dim, size, length })
    }

    /// `[0, 2 pi)^n` with `N` points per axis.
    pub fn periodic_2pi(dim: usize, size: usize) -> Result<Self> {
        Self::new(dim, size, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn num_points(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    /// Physical wavenumber of the unit integer mode, `2 pi / L`.
    pub fn wavenumber_unit(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.size as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Smallest nonzero resolved wavenumber magnitude.
    pub fn min_wavenumber(&self) -> f64 {
        self.wavenumber_unit()
    }

    /// Largest resolved wavenumber magnitude (the corner mode).
    pub fn max_wavenumber(&self) -> f64 {
        (self.dim as f64).sqrt() * (self.size / 2) as f64 * self.wavenumber_unit()
    }

    /// Radius of the largest ball of wavenumbers fully contained in the grid.
    pub fn nyquist_radius(&self) -> f64 {
        (self.size / 2) as f64 * self.wavenumber_unit()
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.dim == other.dim && self.size == other.size && self.length.to_bits() == other.length.to_bits()
    }

    /// The same mode array on a box `2^{-m}` times as large per side:
    /// re-indexing the coefficients this way realizes the dilation
    /// `u(x) -> u(2^m x)`.
    pub fn dilated(&self, m: i32) -> GridSpec {
        GridSpec {
            length: self.length * 2f64.powi(-m),
            ..*self
        }
    }

    pub fn with_size(&self, size: usize) -> Result<GridSpec> {
        GridSpec::new(self.dim, size, self.length)
    }

    #[inline]
    pub fn signed_mode(&self, i: usize) -> isize {
        let n = self.size as isize;
        let i = i as isize;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    #[inline]
    pub fn mode_index(&self, m: isize) -> usize {
        m.rem_euclid(self.size as isize) as usize
    }

    /// Integer modes of a flat index; unused trailing axes are zero.
    #[inline]
    pub fn modes(&self, idx: usize) -> [isize; 3] {
        let mut out = [0isize; 3];
        for (axis, m) in out.iter_mut().enumerate().take(self.dim) {
            *m = self.signed_mode(self.axis_index(idx, axis));
        }
        out
    }

    /// Unsigned index along `axis` of a flat index.
    #[inline]
    pub fn axis_index(&self, idx: usize, axis: usize) -> usize {
        let bits = self.size.trailing_zeros() as usize;
        (idx >> (bits * (self.dim - 1 - axis))) & (self.size - 1)
    }

    #[inline]
    pub fn flat_index(&self, modes: &[isize]) -> usize {
        modes[..self.dim]
            .iter()
            .fold(0, |acc, &m| acc * self.size + self.mode_index(m))
    }

    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let unit = self.wavenumber_unit();
        let m = self.modes(idx);
        [m[0] as f64 * unit, m[1] as f64 * unit, m[2] as f64 * unit]
    }

    #[inline]
    pub fn magnitude(&self, idx: usize) -> f64 {
        let k = self.wavevector(idx);
        (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt()
    }

    /// Flat index of `-k`.
    #[inline]
    pub fn negated(&self, idx: usize) -> usize {
        let m = self.modes(idx);
        self.flat_index(&[-m[0], -m[1], -m[2]])
    }

    /// True if any axis sits on the unpaired Nyquist mode `-N/2`.
    #[inline]
    pub fn touches_nyquist(&self, idx: usize) -> bool {
        let half = (self.size / 2) as isize;
        self.modes(idx)[..self.dim].iter().any(|&m| m == -half)
    }

    /// Largest per-axis integer mode kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> isize {
        (self.size / 3) as isize
    }

    /// 2/3-rule mask: true if every axis satisfies `|m_i| <= N/3`.
    #[inline]
    pub fn dealias_keeps(&self, idx: usize) -> bool {
        let cut = self.dealias_cutoff();
        (0..self.dim).all(|axis| self.signed_mode(self.axis_index(idx, axis)).abs() <= cut)
    }

    /// Physical coordinates of a flat grid index.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let n = self.size;
        let mut out = [0.0; 3];
        let mut rest = idx;
        for axis in (0..self.dim).rev() {
            out[axis] = (rest % n) as f64 * h;
            rest /= n;
        }
        out
    }
}
