//! Per-band `L^r` energy budget of the vorticity tensor.
//!
//! For `w_J = Delta_J omega` and
//! `Omega_J = [u . grad, Delta_J] omega - 2 Delta_J (omega . grad u)`,
//!
//! ```text
//! (1/r) d/dt ||w_J||_r^r - <Delta w_J, |w_J|^{r-2} w_J> = <Omega_J, |w_J|^{r-2} w_J>,
//! ```
//!
//! and the dissipation is bounded below by `||w_J||_{rn/(n-2)}^r`. The
//! budget is evaluated between two consecutive solver states: the time
//! derivative is the difference quotient, every other term the average of
//! the two end points.

use super::indices::IndexSelection;
use crate::check::Ratio;
use crate::error::{Error, Result};
use crate::lp::{band_range, LittlewoodPaley};
use crate::ns::{advect, vorticity_from_velocity, SolverState};
use crate::spectral::{GridSpec, PhysicalField, SpectralField};

/// Bands whose vorticity norm falls below this are left out on the `eps = 2` branch.
pub const BAND_FLOOR: f64 = 1e-14;

/// `(omega . grad u)_ij = omega_ik d_k u_j`.
pub fn stretching(u: &SpectralField, omega: &SpectralField) -> Result<SpectralField> {
    let n = u.grid().dim();
    let grad = u.gradient();
    let mut parts = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = SpectralField::zeros(*u.grid(), 1);
            for k in 0..n {
                let a = omega.component_field(i * n + k);
                if a.is_zero() {
                    continue;
                }
                acc += &crate::bony::pointwise_product(&a, &grad.component_field(k * n + j))?;
            }
            parts.push(acc);
        }
    }
    SpectralField::stack(&parts)
}

/// Vorticity and the band-independent products of one state.
pub struct VorticityTerms {
    pub u: SpectralField,
    pub omega: SpectralField,
    advected: SpectralField,
    stretched: SpectralField,
}

impl VorticityTerms {
    pub fn new(u: &SpectralField) -> Result<Self> {
        let omega = vorticity_from_velocity(u)?.omega;
        let advected = advect(u, &omega, true);
        let stretched = stretching(u, &omega)?;
        Ok(VorticityTerms {
            u: u.clone(),
            omega,
            advected,
            stretched,
        })
    }

    /// `(Delta_J omega, Omega_J)`.
    pub fn band(&self, lp: &LittlewoodPaley, j: i32) -> (SpectralField, SpectralField) {
        let w = lp.delta_proj(j, &self.omega);
        let mut big = advect(&self.u, &w, true);
        big -= &lp.delta_proj(j, &self.advected);
        big.axpy(-2.0, &lp.delta_proj(j, &self.stretched));
        (w, big)
    }
}

/// Band quantities of one state.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BandTerms {
    pub j: i32,
    /// `||w_J||_r^r`.
    pub power: f64,
    /// `||w_J||_{r5}^r`.
    pub dissipation: f64,
    /// `<Omega_J, |w_J|^{r-2} w_J>`.
    pub pairing: f64,
    /// `||w_J||_r`.
    pub norm: f64,
    /// `||Omega_J||_r`.
    pub omega_norm: f64,
}

fn integral(grid: &GridSpec, values: impl Iterator<Item = f64>) -> f64 {
    values.sum::<f64>() * grid.cell_volume()
}

/// `<a, |w|^{r-2} w>` summed over components, computed on the grid.
pub fn weighted_pairing(a: &PhysicalField, w: &PhysicalField, r: f64) -> f64 {
    let mag2 = w.magnitude_squared();
    let weight: Vec<f64> = mag2.iter().map(|&m| if r == 2.0 { 1.0 } else { m.powf(0.5 * (r - 2.0)) }).collect();
    let mut sum = 0.0;
    for c in 0..w.components() {
        for ((x, y), g) in a.component(c).iter().zip(w.component(c)).zip(&weight) {
            sum += x * y * g;
        }
    }
    sum * w.grid().cell_volume()
}

/// Band terms for every band of the grid.
pub fn band_terms(lp: &LittlewoodPaley, state: &SolverState, r: f64) -> Result<Vec<BandTerms>> {
    let grid = *state.grid();
    let n = grid.dim() as f64;
    let r5 = r * n / (n - 2.0);
    let terms = VorticityTerms::new(&state.u)?;
    let mut out = Vec::new();
    for j in band_range(&grid).iter() {
        let (w, big) = terms.band(lp, j);
        if w.is_zero() {
            out.push(BandTerms {
                j,
                omega_norm: big.lp_norm(crate::Exponent::new(r)?),
                ..Default::default()
            });
            continue;
        }
        let wp = w.to_physical();
        let bp = big.to_physical();
        let mag2 = wp.magnitude_squared();
        let power = integral(&grid, mag2.iter().map(|m| m.powf(0.5 * r)));
        let dissipation = integral(&grid, mag2.iter().map(|m| m.powf(0.5 * r5))).powf(r / r5);
        let big2 = bp.magnitude_squared();
        let omega_norm = integral(&grid, big2.iter().map(|m| m.powf(0.5 * r))).powf(1.0 / r);
        out.push(BandTerms {
            j,
            power,
            dissipation,
            pairing: weighted_pairing(&bp, &wp, r),
            norm: power.powf(1.0 / r),
            omega_norm,
        });
    }
    Ok(out)
}

/// Weighted band sums of the budget between two states.
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetTerms {
    /// Midpoint time.
    pub t: f64,
    /// Weighted time derivative (`sum 2^{J r s} d/dt ||w_J||_r^r`, or of
    /// `||w_J||_r` with weight `2^{J s}` at `eps = 2`).
    pub lhs: f64,
    /// Weighted dissipation surrogate; zero at `eps = 2`.
    pub dissipation: f64,
    /// Weighted pairing (`||Omega_J||_r` at `eps = 2`).
    pub pairing: f64,
    /// `(lhs + dissipation) / pairing`.
    pub ratio: Ratio,
    /// `pairing / (||omega||^alpha ||omega||_{r5}^beta)`, or
    /// `pairing / ||omega||^2_{B^{s_r+1}_{r,1}}` at `eps = 2`.
    pub rhs_ratio: Ratio,
    /// Per band: `(J, d/dt term, dissipation, pairing)`.
    pub bands: Vec<(i32, f64, f64, f64)>,
}

/// Budget between consecutive states `a` and `b` for the exponents in `sel`.
pub fn energy_budget(lp: &LittlewoodPaley, a: &SolverState, b: &SolverState, sel: &IndexSelection) -> Result<BudgetTerms> {
    let h = b.t - a.t;
    if !(h > 0.0) || !a.grid().same_as(b.grid()) || h > a.dt * (1.0 + 1e-9) {
        return Err(Error::param(format!(
            "states at t = {} and t = {} are not consecutive on one grid",
            a.t, b.t
        )));
    }
    if sel.n != a.grid().dim() {
        return Err(Error::param(format!("index selection is for n = {}, grid has n = {}", sel.n, a.grid().dim())));
    }
    let r = sel.r;
    let s = sel.vorticity_regularity();
    let ta = band_terms(lp, a, r)?;
    let tb = band_terms(lp, b, r)?;
    let mut bands = Vec::with_capacity(ta.len());
    let (mut lhs, mut diss, mut pair) = (0.0, 0.0, 0.0);
    let (mut na_r, mut nb_r, mut na_5, mut nb_5) = (0.0, 0.0, 0.0, 0.0);
    let two = sel.chain.is_none();
    for (x, y) in ta.iter().zip(&tb) {
        let j = x.j;
        if two {
            let w = 2f64.powf(j as f64 * s);
            let skip = x.norm < BAND_FLOOR || y.norm < BAND_FLOOR;
            let d = if skip { 0.0 } else { (y.norm - x.norm) / h };
            let p = 0.5 * (x.omega_norm + y.omega_norm);
            lhs += w * d;
            pair += w * p;
            na_r += w * x.norm;
            nb_r += w * y.norm;
            bands.push((j, d, 0.0, p));
        } else {
            let w = 2f64.powf(j as f64 * r * s);
            let d = (y.power - x.power) / h;
            let dis = 0.5 * (x.dissipation + y.dissipation);
            let p = 0.5 * (x.pairing + y.pairing);
            lhs += w * d;
            diss += w * dis;
            pair += w * p;
            na_r += w * x.power;
            nb_r += w * y.power;
            na_5 += w * x.dissipation;
            nb_5 += w * y.dissipation;
            bands.push((j, d, dis, p));
        }
    }
    let rhs_scale = if two {
        0.5 * (na_r * na_r + nb_r * nb_r)
    } else {
        let f = |nr: f64, n5: f64| nr.powf(sel.alpha() / r) * n5.powf(sel.beta() / r);
        0.5 * (f(na_r, na_5) + f(nb_r, nb_5))
    };
    Ok(BudgetTerms {
        t: 0.5 * (a.t + b.t),
        lhs,
        dissipation: diss,
        pairing: pair,
        ratio: Ratio::of(lhs + diss, pair),
        rhs_ratio: Ratio::of(pair, rhs_scale),
        bands,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::indices::select_indices;
    use crate::corpus::{random_field, FieldSpec};
    use crate::lp::default_lp;
    use crate::ns::{step, taylor_green};

    fn grid() -> GridSpec {
        GridSpec::periodic_2pi(3, 16).unwrap()
    }

    #[test]
    fn zero_field_has_zero_budget() {
        let a = SolverState::new(SpectralField::zeros(grid(), 3), 0.01).unwrap();
        let b = step(&a, 0.01).unwrap();
        let sel = select_indices(3, 1.5, 3.0).unwrap();
        let out = energy_budget(default_lp(), &a, &b, &sel).unwrap();
        assert_eq!((out.lhs, out.dissipation, out.pairing), (0.0, 0.0, 0.0));
        assert!(out.ratio.is_skipped());
    }

    #[test]
    fn quadratic_pairing_matches_spectral_inner_product() {
        let g = grid();
        let spec = FieldSpec::dealias_safe(&g).components(3).solenoidal(true);
        let u = random_field(&g, &spec, 11).unwrap();
        let terms = VorticityTerms::new(&u).unwrap();
        for j in band_range(&g).iter() {
            let (w, big) = terms.band(default_lp(), j);
            let direct = big.inner(&w).unwrap();
            let grid_path = weighted_pairing(&big.to_physical(), &w.to_physical(), 2.0);
            assert!((direct - grid_path).abs() <= 1e-12 * direct.abs().max(1e-300) + 1e-14);
        }
    }

    #[test]
    fn taylor_green_decay_rate() {
        let g = grid();
        let dt = 1e-3;
        let a = SolverState::new(taylor_green(&g, 0.0), dt).unwrap();
        let b = step(&a, dt).unwrap();
        let sel = select_indices(3, 1.0, 2.0).unwrap();
        let out = energy_budget(default_lp(), &a, &b, &sel).unwrap();
        // omega decays like exp(-2t), so d/dt ||w_J||_r^r = -2 r ||w_J||_r^r
        let mid = band_terms(default_lp(), &SolverState { u: taylor_green(&g, 0.5 * dt), ..a.clone() }, 2.0).unwrap();
        for ((j, d, _, _), m) in out.bands.iter().zip(&mid) {
            assert_eq!(*j, m.j);
            let expect = -4.0 * m.power;
            assert!((d - expect).abs() <= 1e-6 * expect.abs() + 1e-14, "{d} vs {expect}");
        }
    }
}
