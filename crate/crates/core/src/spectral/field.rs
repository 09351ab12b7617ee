use std::ops::{AddAssign, Mul, MulAssign, Neg, SubAssign};

use num_complex::Complex64;

use super::fft;
use super::{Exponent, GridSpec};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative size of the zero mode (against the coefficient l2 norm) below
/// which a field counts as mean-free.
pub const ZERO_MODE_TOLERANCE: f64 = 1e-12;

/// A periodic field stored as Fourier-series coefficients,
/// `f(x) = sum_k c_k exp(i k.x)`, one `N^n` block per component.
///
/// Scalars have one component, vectors `n`, and rank-2 tensors `n*n`
/// stored row-major in `(i, j)`.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: GridSpec,
    components: usize,
    coeffs: Vec<Complex64>,
}

/// Real grid samples, one `N^n` block per component.
#[derive(Clone, Debug)]
pub struct PhysicalField {
    grid: GridSpec,
    components: usize,
    values: Vec<f64>,
}

/// `forward_transform`: real samples on the grid to Fourier coefficients.
pub fn forward_transform(grid: GridSpec, components: usize, samples: &[f64]) -> Result<SpectralField> {
    PhysicalField::from_values(grid, components, samples.to_vec())?.into_spectral()
}

impl SpectralField {
    pub fn zeros(grid: GridSpec, components: usize) -> Self {
        assert!(components > 0, "a field needs at least one component");
        SpectralField {
            grid,
            components,
            coeffs: vec![ZERO; components * grid.num_points()],
        }
    }

    pub fn from_coeffs(grid: GridSpec, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let expected = components * grid.num_points();
        if components == 0 || coeffs.len() != expected {
            return Err(Error::ComponentMismatch {
                expected,
                found: coeffs.len(),
            });
        }
        Ok(SpectralField { grid, components, coeffs })
    }

    /// Samples `f(x, component)` on the grid and transforms.
    pub fn from_fn(grid: GridSpec, components: usize, f: impl Fn(&[f64], usize) -> f64) -> Self {
        let m = grid.num_points();
        let mut values = Vec::with_capacity(components * m);
        for c in 0..components {
            for idx in 0..m {
                let x = grid.position(idx);
                values.push(f(&x[..grid.dim()], c));
            }
        }
        PhysicalField { grid, components, values }
            .to_spectral()
            .expect("sizes are consistent by construction")
    }

    /// Stacks scalar (or multi-component) fields into one field.
    pub fn stack(parts: &[SpectralField]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::param("cannot stack zero fields"))?;
        let mut coeffs = Vec::new();
        let mut components = 0;
        for p in parts {
            if !p.grid.same_as(&first.grid) {
                return Err(Error::GridMismatch);
            }
            coeffs.extend_from_slice(&p.coeffs);
            components += p.components;
        }
        Ok(SpectralField {
            grid: first.grid,
            components,
            coeffs,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let m = self.grid.num_points();
        &self.coeffs[c * m..(c + 1) * m]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let m = self.grid.num_points();
        &mut self.coeffs[c * m..(c + 1) * m]
    }

    pub fn component_field(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid,
            components: 1,
            coeffs: self.component(c).to_vec(),
        }
    }

    /// Coefficient at an integer mode.
    pub fn coeff_at(&self, component: usize, modes: &[isize]) -> Complex64 {
        self.component(component)[self.grid.flat_index(modes)]
    }

    pub fn set_coeff(&mut self, component: usize, modes: &[isize], value: Complex64) {
        let idx = self.grid.flat_index(modes);
        self.component_mut(component)[idx] = value;
    }

    pub fn check_compatible(&self, other: &SpectralField) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        if self.components != other.components {
            return Err(Error::ComponentMismatch {
                expected: self.components,
                found: other.components,
            });
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Largest zero-mode magnitude over the components.
    pub fn zero_mode_magnitude(&self) -> f64 {
        (0..self.components)
            .map(|c| self.component(c)[0].norm())
            .fold(0.0, f64::max)
    }

    pub fn coeff_l2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero_mean(&self) -> bool {
        self.zero_mode_magnitude() <= ZERO_MODE_TOLERANCE * self.coeff_l2()
    }

    pub fn require_zero_mean(&self) -> Result<()> {
        if self.is_zero_mean() {
            Ok(())
        } else {
            Err(Error::NonzeroMean(self.zero_mode_magnitude()))
        }
    }

    /// Copy with every coefficient below `tol * max |c|` set to zero; strips
    /// the round-off floor left by sampling and transforming.
    pub fn chopped(&self, tol: f64) -> SpectralField {
        let cut = tol * self.max_abs_coeff();
        let mut out = self.clone();
        for v in &mut out.coeffs {
            if v.norm() <= cut {
                *v = ZERO;
            }
        }
        out
    }

    /// Copy with the zero mode of every component set to exactly zero.
    pub fn without_mean(&self) -> SpectralField {
        let mut out = self.clone();
        for c in 0..out.components {
            out.component_mut(c)[0] = ZERO;
        }
        out
    }

    /// `inverse_transform`: coefficients to grid samples. Only the real part
    /// is kept, i.e. the Hermitian part of the coefficients is synthesized.
    pub fn to_physical(&self) -> PhysicalField {
        let (dim, size) = (self.grid.dim(), self.grid.size());
        let m = self.grid.num_points();
        let mut values = Vec::with_capacity(self.coeffs.len());
        for c in 0..self.components {
            let block = &self.coeffs[c * m..(c + 1) * m];
            if block.iter().all(|v| *v == ZERO) {
                values.resize(values.len() + m, 0.0);
            } else if self.components == 1 {
                values = fft::inverse_real(block, dim, size);
            } else {
                values.extend(fft::inverse_real(block, dim, size));
            }
        }
        PhysicalField {
            grid: self.grid,
            components: self.components,
            values,
        }
    }

    /// Samples of the field masked by a sparse real symbol, or `None` when
    /// the masked field vanishes.
    pub(crate) fn masked_physical(&self, entries: &[(u32, f64)]) -> Option<PhysicalField> {
        let (dim, size) = (self.grid.dim(), self.grid.size());
        let m = self.grid.num_points();
        let blocks: Vec<Option<Vec<f64>>> = (0..self.components)
            .map(|c| fft::inverse_real_masked(&self.coeffs[c * m..(c + 1) * m], entries, dim, size))
            .collect();
        if blocks.iter().all(Option::is_none) {
            return None;
        }
        let values = if self.components == 1 {
            blocks.into_iter().next().flatten().expect("checked above")
        } else {
            blocks.into_iter().flat_map(|b| b.unwrap_or_else(|| vec![0.0; m])).collect()
        };
        Some(PhysicalField {
            grid: self.grid,
            components: self.components,
            values,
        })
    }

    /// `(sum_x |f(x)|^p (L/N)^n)^{1/p}` with the pointwise Euclidean magnitude
    /// over components; grid maximum for `p = inf`. For `p = 2` this is
    /// evaluated through the discrete Parseval identity, which equals the
    /// grid sum exactly for trigonometric polynomials.
    pub fn lp_norm(&self, p: Exponent) -> f64 {
        if p.get() == 2.0 {
            (self.grid.volume() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
        } else {
            self.to_physical().lp_norm(p)
        }
    }

    /// Spectral inner product `Re sum_k c_k conj(d_k) L^n`, i.e. `int f.g dx`
    /// for real fields, summed over components.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        self.check_compatible(other)?;
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        Ok(s * self.grid.volume())
    }

    /// Largest violation of `c(-k) = conj(c(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let m = self.grid.num_points();
        let mut worst: f64 = 0.0;
        for c in 0..self.components {
            let block = self.component(c);
            for idx in 0..m {
                let partner = self.grid.negated(idx);
                worst = worst.max((block[idx] - block[partner].conj()).norm());
            }
        }
        worst
    }

    /// Projects onto real fields by averaging each coefficient with the
    /// conjugate of its partner.
    pub fn hermitian_symmetrize(&mut self) {
        let m = self.grid.num_points();
        let grid = self.grid;
        for c in 0..self.components {
            let block = self.component_mut(c);
            for idx in 0..m {
                let partner = grid.negated(idx);
                if partner < idx {
                    continue;
                }
                let avg = 0.5 * (block[idx] + block[partner].conj());
                block[idx] = avg;
                block[partner] = avg.conj();
            }
        }
    }

    /// Coefficient-wise product with `m(k)`; `at_zero` supplies the value at
    /// `k = 0`, where many symbols are not defined.
    pub fn apply_multiplier(&self, m: impl Fn(&[f64]) -> Complex64, at_zero: Complex64) -> Result<SpectralField> {
        let grid = self.grid;
        let dim = grid.dim();
        let npts = grid.num_points();
        if !(at_zero.re.is_finite() && at_zero.im.is_finite()) {
            return Err(Error::NonFiniteMultiplier(vec![0.0; dim]));
        }
        let mut symbol = Vec::with_capacity(npts);
        symbol.push(at_zero);
        for idx in 1..npts {
            let k = grid.wavevector(idx);
            let v = m(&k[..dim]);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteMultiplier(k[..dim].to_vec()));
            }
            symbol.push(v);
        }
        let mut out = self.clone();
        for c in 0..out.components {
            for (v, s) in out.component_mut(c).iter_mut().zip(&symbol) {
                *v *= s;
            }
        }
        Ok(out)
    }

    /// Applies a dense real symbol given per flat index.
    pub fn apply_real_symbol(&self, symbol: &[f64]) -> SpectralField {
        assert_eq!(symbol.len(), self.grid.num_points());
        let mut out = self.clone();
        for c in 0..out.components {
            for (v, s) in out.component_mut(c).iter_mut().zip(symbol) {
                *v *= *s;
            }
        }
        out
    }

    /// `d/dx_axis` of every component. The unpaired Nyquist mode along the
    /// differentiated axis is zeroed so real fields stay real.
    pub fn derivative(&self, axis: usize) -> SpectralField {
        assert!(axis < self.grid.dim());
        let grid = self.grid;
        let unit = grid.wavenumber_unit();
        let half = (grid.size() / 2) as isize;
        let factor: Vec<Complex64> = (0..grid.size())
            .map(|i| {
                let m = grid.signed_mode(i);
                if m == -half {
                    ZERO
                } else {
                    Complex64::new(0.0, m as f64 * unit)
                }
            })
            .collect();
        let mut out = self.clone();
        for c in 0..out.components {
            for (idx, v) in out.component_mut(c).iter_mut().enumerate() {
                *v *= factor[grid.axis_index(idx, axis)];
            }
        }
        out
    }

    /// Stacks `d_k f` for `k = 0..n`; a scalar gives a vector and a vector
    /// `u_i` gives the tensor `d_k u_i` laid out as `k * c + i`.
    pub fn gradient(&self) -> SpectralField {
        let parts: Vec<_> = (0..self.grid.dim()).map(|k| self.derivative(k)).collect();
        SpectralField::stack(&parts).expect("same grid")
    }

    pub fn divergence(&self) -> Result<SpectralField> {
        let n = self.grid.dim();
        if self.components != n {
            return Err(Error::ComponentMismatch {
                expected: n,
                found: self.components,
            });
        }
        let mut out = SpectralField::zeros(self.grid, 1);
        for k in 0..n {
            out += &self.component_field(k).derivative(k);
        }
        Ok(out)
    }

    /// `||div u||_{L^2}`, computed spectrally.
    pub fn divergence_norm(&self) -> Result<f64> {
        Ok(self.divergence()?.lp_norm(Exponent::TWO))
    }

    pub fn laplacian(&self) -> SpectralField {
        let grid = self.grid;
        let symbol: Vec<f64> = (0..grid.num_points())
            .map(|idx| {
                let r = grid.magnitude(idx);
                -r * r
            })
            .collect();
        self.apply_real_symbol(&symbol)
    }

    /// `(-Delta)^{-1}` with the zero mode kept at zero.
    pub fn inverse_laplacian(&self) -> Result<SpectralField> {
        self.require_zero_mean()?;
        let grid = self.grid;
        let symbol: Vec<f64> = (0..grid.num_points())
            .map(|idx| {
                if idx == 0 {
                    0.0
                } else {
                    let r = grid.magnitude(idx);
                    1.0 / (r * r)
                }
            })
            .collect();
        Ok(self.apply_real_symbol(&symbol))
    }

    /// Leray projection `u_hat - k (k . u_hat) / |k|^2`.
    pub fn leray_project(&self) -> Result<SpectralField> {
        let n = self.grid.dim();
        if self.components != n {
            return Err(Error::ComponentMismatch {
                expected: n,
                found: self.components,
            });
        }
        self.require_zero_mean()?;
        let grid = self.grid;
        let npts = grid.num_points();
        let mut out = self.without_mean();
        for idx in 1..npts {
            let k = grid.wavevector(idx);
            let k2: f64 = k[..n].iter().map(|v| v * v).sum();
            let dot: Complex64 = (0..n).map(|c| self.coeffs[c * npts + idx] * k[c]).sum();
            for (c, kc) in k[..n].iter().enumerate() {
                out.coeffs[c * npts + idx] -= dot * (kc / k2);
            }
        }
        Ok(out)
    }

    /// Zeros every mode removed by the 2/3 rule.
    pub fn dealias(&mut self) {
        let grid = self.grid;
        let n = grid.size();
        let cut = grid.dealias_cutoff();
        let keep: Vec<bool> = (0..n).map(|i| grid.signed_mode(i).abs() <= cut).collect();
        for c in 0..self.components {
            for (line, values) in self.component_mut(c).chunks_exact_mut(n).enumerate() {
                let start = line * n;
                if (0..grid.dim() - 1).all(|axis| keep[grid.axis_index(start, axis)]) {
                    for (v, &k) in values.iter_mut().zip(&keep) {
                        if !k {
                            *v = ZERO;
                        }
                    }
                } else {
                    values.fill(ZERO);
                }
            }
        }
    }

    pub fn dealiased(&self) -> SpectralField {
        let mut out = self.clone();
        out.dealias();
        out
    }

    /// Same coefficients on the box `L 2^{-m}`: the field `u(2^m x)`.
    pub fn dilated(&self, m: i32) -> SpectralField {
        SpectralField {
            grid: self.grid.dilated(m),
            components: self.components,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Re-samples onto a grid with a different number of points, keeping
    /// every mode both grids can represent. Nyquist modes are dropped.
    pub fn resized(&self, size: usize) -> Result<SpectralField> {
        let target = self.grid.with_size(size)?;
        let mut out = SpectralField::zeros(target, self.components);
        let half_src = (self.grid.size() / 2) as isize;
        let half_dst = (size / 2) as isize;
        let lim = half_src.min(half_dst);
        let dim = self.grid.dim();
        for c in 0..self.components {
            for idx in 0..self.grid.num_points() {
                let m = self.grid.modes(idx);
                if m[..dim].iter().any(|&v| v.abs() >= lim) {
                    continue;
                }
                let dst = target.flat_index(&m);
                out.component_mut(c)[dst] = self.component(c)[idx];
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, a: f64) -> SpectralField {
        let mut out = self.clone();
        out *= a;
        out
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        self.check_compatible(other).expect("axpy on incompatible fields");
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * a;
        }
    }

    /// `||self - other||_{L^2}`.
    pub fn l2_distance(&self, other: &SpectralField) -> f64 {
        let mut d = self.clone();
        d -= other;
        d.lp_norm(Exponent::TWO)
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        self.check_compatible(rhs).expect("adding incompatible fields");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        self.check_compatible(rhs).expect("subtracting incompatible fields");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl MulAssign<f64> for SpectralField {
    fn mul_assign(&mut self, rhs: f64) {
        for a in &mut self.coeffs {
            *a *= rhs;
        }
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scaled(rhs)
    }
}

impl Neg for SpectralField {
    type Output = SpectralField;
    fn neg(mut self) -> SpectralField {
        self *= -1.0;
        self
    }
}

impl PhysicalField {
    pub fn zeros(grid: GridSpec, components: usize) -> Self {
        PhysicalField {
            grid,
            components,
            values: vec![0.0; components * grid.num_points()],
        }
    }

    pub fn from_values(grid: GridSpec, components: usize, values: Vec<f64>) -> Result<Self> {
        let expected = components * grid.num_points();
        if components == 0 || values.len() != expected {
            return Err(Error::ComponentMismatch {
                expected,
                found: values.len(),
            });
        }
        Ok(PhysicalField { grid, components, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let m = self.grid.num_points();
        &self.values[c * m..(c + 1) * m]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let m = self.grid.num_points();
        &mut self.values[c * m..(c + 1) * m]
    }

    pub fn to_spectral(&self) -> Result<SpectralField> {
        self.clone().into_spectral()
    }

    pub fn into_spectral(self) -> Result<SpectralField> {
        let (dim, size) = (self.grid.dim(), self.grid.size());
        let m = self.grid.num_points();
        let scale = 1.0 / m as f64;
        let mut coeffs = Vec::with_capacity(self.values.len());
        for block in self.values.chunks_exact(m) {
            coeffs.extend(fft::forward_real(block, dim, size).into_iter().map(|c| c * scale));
        }
        SpectralField::from_coeffs(self.grid, self.components, coeffs)
    }

    /// `into_spectral` followed by the 2/3 rule, without transforming the
    /// discarded modes.
    pub fn into_spectral_dealiased(self) -> Result<SpectralField> {
        let (dim, size) = (self.grid.dim(), self.grid.size());
        let m = self.grid.num_points();
        let scale = 1.0 / m as f64;
        let cut = Some(self.grid.dealias_cutoff() as usize);
        let mut coeffs = Vec::with_capacity(self.values.len());
        for block in self.values.chunks_exact(m) {
            coeffs.extend(fft::forward_real_cut(block, dim, size, cut).into_iter().map(|c| c * scale));
        }
        SpectralField::from_coeffs(self.grid, self.components, coeffs)
    }

    /// Pointwise squared magnitude over components.
    pub fn magnitude_squared(&self) -> Vec<f64> {
        let m = self.grid.num_points();
        let mut out = vec![0.0; m];
        for c in 0..self.components {
            for (o, v) in out.iter_mut().zip(self.component(c)) {
                *o += v * v;
            }
        }
        out
    }

    pub fn lp_norm(&self, p: Exponent) -> f64 {
        if self.components == 1 {
            let v = &self.values;
            if p.is_infinite() {
                return v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            }
            let pv = p.get();
            let sum: f64 = if pv == 2.0 {
                v.iter().map(|x| x * x).sum()
            } else if pv == 1.0 {
                v.iter().map(|x| x.abs()).sum()
            } else {
                v.iter().map(|x| x.abs().powf(pv)).sum()
            };
            return (sum * self.grid.cell_volume()).powf(1.0 / pv);
        }
        let mag2 = self.magnitude_squared();
        if p.is_infinite() {
            return mag2.iter().fold(0.0f64, |a, &b| a.max(b)).sqrt();
        }
        let pv = p.get();
        let sum: f64 = if pv == 2.0 {
            mag2.iter().sum()
        } else if pv == 1.0 {
            mag2.iter().map(|v| v.sqrt()).sum()
        } else {
            mag2.iter().map(|v| v.powf(pv / 2.0)).sum()
        };
        (sum * self.grid.cell_volume()).powf(1.0 / pv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid3(n: usize) -> GridSpec {
        GridSpec::periodic_2pi(3, n).unwrap()
    }

    #[test]
    fn constant_maps_to_zero_mode() {
        let g = grid3(8);
        let f = SpectralField::from_fn(g, 1, |_, _| 1.0);
        assert!((f.coeffs()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(f.coeffs()[1..].iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn cosine_has_two_equal_modes() {
        let g = GridSpec::new(3, 8, 3.0).unwrap();
        let f = SpectralField::from_fn(g, 1, |x, _| (2.0 * PI * x[0] / 3.0).cos());
        let plus = f.coeff_at(0, &[1, 0, 0]);
        let minus = f.coeff_at(0, &[-1, 0, 0]);
        assert!((plus.re - 0.5).abs() < 1e-15 && (minus.re - 0.5).abs() < 1e-15);
        let rest: f64 = f.coeffs().iter().map(|c| c.norm()).sum::<f64>() - plus.norm() - minus.norm();
        assert!(rest < 1e-14);
    }

    #[test]
    fn lp_norm_of_constant_and_sine() {
        let g = grid3(16);
        let one = SpectralField::from_fn(g, 1, |_, _| 1.0);
        let expected = (2.0 * PI).powf(1.5);
        assert!((one.lp_norm(Exponent::TWO) - expected).abs() < 1e-12);
        let one_phys = one.to_physical().lp_norm(Exponent::new(3.0).unwrap());
        assert!((one_phys - (2.0 * PI)).abs() < 1e-12);
        let s = SpectralField::from_fn(g, 1, |x, _| x[0].sin());
        assert!((s.lp_norm(Exponent::TWO) - expected / 2f64.sqrt()).abs() < 1e-12);
        assert!((s.lp_norm(Exponent::INFINITY) - 1.0).abs() < 1e-12);
        assert_eq!(SpectralField::zeros(g, 1).lp_norm(Exponent::ONE), 0.0);
    }

    #[test]
    fn inverse_laplacian_on_eigenfunctions() {
        let g = grid3(16);
        let s1 = SpectralField::from_fn(g, 1, |x, _| x[0].sin());
        assert!(s1.inverse_laplacian().unwrap().l2_distance(&s1) < 1e-13);
        let s2 = SpectralField::from_fn(g, 1, |x, _| (2.0 * x[0]).sin());
        let expect = s2.scaled(0.25);
        assert!(s2.inverse_laplacian().unwrap().l2_distance(&expect) < 1e-13);
        let c = SpectralField::from_fn(g, 1, |_, _| 1.0);
        assert!(matches!(c.inverse_laplacian(), Err(Error::NonzeroMean(_))));
    }

    #[test]
    fn leray_annihilates_gradients() {
        let g = grid3(16);
        let pot = SpectralField::from_fn(g, 1, |x, _| (x[0] + 2.0 * x[1]).sin() + (3.0 * x[2]).cos());
        let grad = pot.gradient();
        let p = grad.leray_project().unwrap();
        assert!(p.lp_norm(Exponent::TWO) < 1e-12);
    }

    #[test]
    fn nonfinite_multiplier_rejected() {
        let g = grid3(8);
        let f = SpectralField::from_fn(g, 1, |x, _| x[0].sin());
        let r = f.apply_multiplier(|k| Complex64::new(1.0 / k[1], 0.0), Complex64::new(0.0, 0.0));
        assert!(matches!(r, Err(Error::NonFiniteMultiplier(_))));
    }

    #[test]
    fn derivative_of_sine() {
        let g = grid3(16);
        let s = SpectralField::from_fn(g, 1, |x, _| (3.0 * x[1]).sin());
        let c = SpectralField::from_fn(g, 1, |x, _| 3.0 * (3.0 * x[1]).cos());
        assert!(s.derivative(1).l2_distance(&c) < 1e-12);
        assert!(s.derivative(0).lp_norm(Exponent::TWO) < 1e-13);
    }
}
