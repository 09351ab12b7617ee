//! Pseudo-spectral incompressible Navier-Stokes on the periodic box,
//!
//! ```text
//! d_t u - Delta u + (u . grad) u + grad pi = 0,   div u = 0,
//! ```
//!
//! advanced with integrating-factor RK4 (the viscous factor `exp(-|k|^2 h)`
//! is exact). Products are formed on the grid and 2/3-dealiased.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::bony::pointwise_product;
use crate::error::{Error, Result};
use crate::lp::{band_range, LittlewoodPaley};
use crate::spectral::{snapshot, Exponent, GridSpec, SpectralField};

/// Divergence tolerance, relative to `||u||_2`, for states handed to the solver.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-12;
/// Top-band energy fraction above which a run is flagged as under-resolved.
pub const RESOLUTION_WARNING: f64 = 1e-6;
/// Advisory bound on `dt max|u| N / L`.
pub const CFL_ADVISORY: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct SolverState {
    /// Rescaled time (units of length squared).
    pub t: f64,
    pub dt: f64,
    pub u: SpectralField,
    pub dealias: bool,
}

impl SolverState {
    /// Checks that `u` is a real, mean-free, divergence-free vector field.
    pub fn new(u: SpectralField, dt: f64) -> Result<Self> {
        let n = u.grid().dim();
        if u.components() != n {
            return Err(Error::ComponentMismatch {
                expected: n,
                found: u.components(),
            });
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param(format!("time step must be positive, got {dt}")));
        }
        u.require_zero_mean()?;
        let scale = u.lp_norm(Exponent::TWO).max(f64::MIN_POSITIVE);
        let div = u.divergence_norm()?;
        if div > DIVERGENCE_TOLERANCE * scale.max(1.0) {
            return Err(Error::param(format!("initial velocity is not divergence-free: ||div u|| = {div:e}")));
        }
        Ok(SolverState {
            t: 0.0,
            dt,
            u,
            dealias: true,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }

    pub fn energy(&self) -> f64 {
        energy(&self.u)
    }

    /// `dt max|u| N / L`.
    pub fn cfl_number(&self) -> f64 {
        let g = self.grid();
        self.dt * self.u.lp_norm(Exponent::INFINITY) * g.size() as f64 / g.length()
    }
}

/// `||u||_2^2 / 2`.
pub fn energy(u: &SpectralField) -> f64 {
    0.5 * u.lp_norm(Exponent::TWO).powi(2)
}

/// `||grad u||_2^2 / 2`, which equals half the squared vorticity for
/// divergence-free `u`.
pub fn enstrophy(u: &SpectralField) -> f64 {
    0.5 * u.gradient().lp_norm(Exponent::TWO).powi(2)
}

fn product(a: &SpectralField, b: &SpectralField, dealias: bool) -> SpectralField {
    if dealias {
        pointwise_product(a, b).expect("fields share a grid")
    } else {
        let grid = *a.grid();
        let (pa, pb) = (a.to_physical(), b.to_physical());
        let values = pa.values().iter().zip(pb.values()).map(|(x, y)| x * y).collect();
        crate::spectral::PhysicalField::from_values(grid, 1, values)
            .and_then(|p| p.into_spectral())
            .expect("scalar product")
    }
}

/// `(u . grad) w` for a vector `u` and any field `w`, componentwise in `w`.
pub fn advect(u: &SpectralField, w: &SpectralField, dealias: bool) -> SpectralField {
    let n = u.grid().dim();
    let parts: Vec<SpectralField> = (0..w.components())
        .map(|c| {
            let wc = w.component_field(c);
            let mut acc = SpectralField::zeros(*u.grid(), 1);
            for k in 0..n {
                acc += &product(&u.component_field(k), &wc.derivative(k), dealias);
            }
            acc
        })
        .collect();
    SpectralField::stack(&parts).expect("components share a grid")
}

/// `-P[(u . grad) u]`.
pub fn nonlinear_term(u: &SpectralField) -> Result<SpectralField> {
    nonlinear_term_with(u, true)
}

fn nonlinear_term_with(u: &SpectralField, dealias: bool) -> Result<SpectralField> {
    Ok(-advect(u, u, dealias).without_mean().leray_project()?)
}

/// `pi = (-Delta)^{-1} d_i d_k (u_i u_k)`.
pub fn compute_pressure(u: &SpectralField) -> Result<SpectralField> {
    let n = u.grid().dim();
    if u.components() != n {
        return Err(Error::ComponentMismatch {
            expected: n,
            found: u.components(),
        });
    }
    let mut acc = SpectralField::zeros(*u.grid(), 1);
    for i in 0..n {
        for k in i..n {
            let uu = product(&u.component_field(i), &u.component_field(k), true);
            let term = uu.derivative(i).derivative(k);
            acc.axpy(if i == k { 1.0 } else { 2.0 }, &term);
        }
    }
    acc.without_mean().inverse_laplacian()
}

/// `exp(-|k|^2 h)` applied to every component.
fn heat(u: &SpectralField, h: f64) -> SpectralField {
    let grid = *u.grid();
    let symbol: Vec<f64> = (0..grid.num_points())
        .map(|idx| (-grid.magnitude(idx).powi(2) * h).exp())
        .collect();
    u.apply_real_symbol(&symbol)
}

fn all_finite(u: &SpectralField) -> bool {
    u.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// One integrating-factor RK4 step of size `dt`.
pub fn step(state: &SolverState, dt: f64) -> Result<SolverState> {
    let d = state.dealias;
    let h = dt;
    let u = &state.u;
    let nl = |v: &SpectralField| nonlinear_term_with(v, d);
    let k1 = nl(u)?;
    let mut a = u.clone();
    a.axpy(0.5 * h, &k1);
    let k2 = nl(&heat(&a, 0.5 * h))?;
    let mut b = heat(u, 0.5 * h);
    b.axpy(0.5 * h, &k2);
    let k3 = nl(&b)?;
    let mut c = heat(u, h);
    c.axpy(h, &heat(&k3, 0.5 * h));
    let k4 = nl(&c)?;
    let mut next = heat(u, h);
    next.axpy(h / 6.0, &heat(&k1, h));
    let mut mid = k2;
    mid += &k3;
    next.axpy(h / 3.0, &heat(&mid, 0.5 * h));
    next.axpy(h / 6.0, &k4);
    if !all_finite(&next) {
        return Err(Error::BlowupSuspected {
            t: state.t + dt,
            last_finite: Box::new(state.clone()),
        });
    }
    next.hermitian_symmetrize();
    Ok(SolverState {
        t: state.t + dt,
        dt: state.dt,
        u: next,
        dealias: d,
    })
}

/// Antisymmetric vorticity tensor `omega_ij = d_i u_j - d_j u_i`, stored as
/// a full `n x n` field with component `i * n + j`.
#[derive(Clone, Debug)]
pub struct VorticityTensor {
    pub omega: SpectralField,
}

impl VorticityTensor {
    pub fn dim(&self) -> usize {
        self.omega.grid().dim()
    }

    pub fn get(&self, i: usize, j: usize) -> SpectralField {
        self.omega.component_field(i * self.dim() + j)
    }

    /// For `n = 3`, the vorticity vector `(omega_23, omega_31, omega_12)`.
    pub fn vector(&self) -> Option<SpectralField> {
        if self.dim() != 3 {
            return None;
        }
        SpectralField::stack(&[self.get(1, 2), self.get(2, 0), self.get(0, 1)]).ok()
    }

    /// `max |omega_ij + omega_ji|` over coefficients.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (self.omega.component(i * n + j), self.omega.component(j * n + i));
                for (x, y) in a.iter().zip(b) {
                    worst = worst.max((x + y).norm());
                }
            }
        }
        worst
    }
}

pub fn vorticity_from_velocity(u: &SpectralField) -> Result<VorticityTensor> {
    let n = u.grid().dim();
    if u.components() != n {
        return Err(Error::ComponentMismatch {
            expected: n,
            found: u.components(),
        });
    }
    // gradient layout: d_k u_i at k * n + i
    let grad = u.gradient();
    let mut parts = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                parts.push(SpectralField::zeros(*u.grid(), 1));
            } else {
                let mut w = grad.component_field(i * n + j);
                w -= &grad.component_field(j * n + i);
                parts.push(w);
            }
        }
    }
    Ok(VorticityTensor {
        omega: SpectralField::stack(&parts)?,
    })
}

/// Biot-Savart: `u_i = (-Delta)^{-1} d_j omega_ij`.
pub fn velocity_from_vorticity(w: &VorticityTensor) -> Result<SpectralField> {
    let n = w.dim();
    let grid = *w.omega.grid();
    let mut parts = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = SpectralField::zeros(grid, 1);
        for j in 0..n {
            acc += &w.get(i, j).derivative(j);
        }
        parts.push(acc.without_mean().inverse_laplacian()?);
    }
    SpectralField::stack(&parts)
}

/// `Delta omega - (u . grad) omega - omega_ik d_k u_j + omega_jk d_k u_i`,
/// the right-hand side of the vorticity equation.
pub fn vorticity_rhs(u: &SpectralField, dealias: bool) -> Result<SpectralField> {
    let n = u.grid().dim();
    let w = vorticity_from_velocity(u)?;
    let grad = u.gradient();
    let mut out = w.omega.laplacian();
    out -= &advect(u, &w.omega, dealias);
    // stretching terms: (omega . grad u)_ij = omega_ik d_k u_j
    let mut parts = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = SpectralField::zeros(*u.grid(), 1);
            for k in 0..n {
                let dku_j = grad.component_field(k * n + j);
                let dku_i = grad.component_field(k * n + i);
                acc -= &product(&w.get(i, k), &dku_j, dealias);
                acc += &product(&w.get(j, k), &dku_i, dealias);
            }
            parts.push(acc);
        }
    }
    out += &SpectralField::stack(&parts)?;
    Ok(out)
}

/// Residual of the vorticity equation between two consecutive states:
/// the difference quotient against the trapezoidal average of the
/// right-hand side, which is second order at the midpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VorticityResidual {
    pub absolute: f64,
    /// `absolute / ||d_t omega||_2`; zero when the flow is steady.
    pub relative: f64,
}

pub fn vorticity_equation_residual(states: &[SolverState]) -> Result<VorticityResidual> {
    let [a, b] = states else {
        return Err(Error::TooFewSamples {
            needed: 2,
            found: states.len(),
        });
    };
    let h = b.t - a.t;
    if !(h > 0.0) || !a.grid().same_as(b.grid()) {
        return Err(Error::param("states must be consecutive on one grid"));
    }
    let wa = vorticity_from_velocity(&a.u)?.omega;
    let wb = vorticity_from_velocity(&b.u)?.omega;
    let mut dt = wb;
    dt -= &wa;
    dt *= 1.0 / h;
    let mut avg = vorticity_rhs(&a.u, a.dealias)?;
    avg += &vorticity_rhs(&b.u, b.dealias)?;
    avg *= 0.5;
    let scale = dt.lp_norm(Exponent::TWO);
    let absolute = dt.l2_distance(&avg);
    let relative = if scale > 0.0 { absolute / scale } else { 0.0 };
    Ok(VorticityResidual { absolute, relative })
}

/// Highest band reached by a 2/3-dealiased spectrum.
pub fn top_band(grid: &GridSpec) -> i32 {
    let cut = grid.dealias_cutoff() as f64 * grid.wavenumber_unit() * (grid.dim() as f64).sqrt();
    let bands = band_range(grid);
    bands
        .iter()
        .rev()
        .find(|&j| 2f64.powi(j) * 0.75 < cut)
        .unwrap_or(bands.j_min)
}

/// Share of the `L^2` energy carried by the top dealiased band.
pub fn resolution_fraction(lp: &LittlewoodPaley, u: &SpectralField) -> f64 {
    let total = u.lp_norm(Exponent::TWO).powi(2);
    if total == 0.0 {
        return 0.0;
    }
    lp.delta_proj(top_band(u.grid()), u).lp_norm(Exponent::TWO).powi(2) / total
}

/// 3D-embedded Taylor-Green field `e^{-2t} (sin x1 cos x2, -cos x1 sin x2, 0)`
/// on `[0, 2 pi)^n`. Its advection is a pure gradient, so it solves the
/// equations exactly with pressure `(cos 2x1 + cos 2x2) e^{-4t} / 4`.
pub fn taylor_green(grid: &GridSpec, t: f64) -> SpectralField {
    let a = (-2.0 * t).exp();
    SpectralField::from_fn(*grid, grid.dim(), |x, c| match c {
        0 => a * x[0].sin() * x[1].cos(),
        1 => -a * x[0].cos() * x[1].sin(),
        _ => 0.0,
    })
    .chopped(1e-14)
}

/// One row of the time-series CSV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeSample {
    pub t: f64,
    pub energy: f64,
    pub enstrophy: f64,
    pub max_velocity: f64,
    pub resolution_fraction: f64,
}

impl TimeSample {
    pub fn of(lp: &LittlewoodPaley, state: &SolverState) -> Self {
        let u = &state.u;
        TimeSample {
            t: state.t,
            energy: energy(u),
            enstrophy: enstrophy(u),
            max_velocity: u.lp_norm(Exponent::INFINITY),
            resolution_fraction: resolution_fraction(lp, u),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimulationConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Write a snapshot every this many steps; 0 writes none.
    pub snapshot_every: usize,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub struct SimulationOutcome {
    pub state: SolverState,
    pub series: Vec<TimeSample>,
    pub snapshots: Vec<(f64, PathBuf)>,
    pub warnings: Vec<String>,
    /// Steps on which the discrete energy increased by more than `1e-10 ||u||^2`.
    pub energy_increases: usize,
}

/// Name of a snapshot file for step `index`.
pub fn snapshot_name(index: usize) -> String {
    format!("snap_{index:06}.bsnap")
}

/// Time series header.
pub const SERIES_HEADER: [&str; 5] = ["t", "energy", "enstrophy", "max_u", "resolution_fraction"];

pub fn write_series(path: impl AsRef<Path>, series: &[TimeSample]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SERIES_HEADER)?;
    for s in series {
        w.write_record(
            [s.t, s.energy, s.enstrophy, s.max_velocity, s.resolution_fraction].map(|v| format!("{v:.17e}")),
        )?;
    }
    w.flush()?;
    Ok(())
}

fn write_snapshot(dir: &Path, index: usize, state: &SolverState, index_file: &mut impl Write) -> Result<PathBuf> {
    let path = dir.join(snapshot_name(index));
    snapshot::save(&state.u, &path)?;
    writeln!(index_file, "{},{:.17e}", snapshot_name(index), state.t)?;
    Ok(path)
}

/// Advances `u0` to `t_end` in steps of `dt` (the last step is shortened to
/// land on `t_end`), recording the time series and optional snapshots.
/// When `out_dir` is set, `series.csv`, the snapshots and `snapshots.csv`
/// (file, t) are written there. An instability is returned as
/// [`Error::BlowupSuspected`] after the last finite state has been saved.
pub fn simulate(lp: &LittlewoodPaley, u0: SpectralField, config: &SimulationConfig) -> Result<SimulationOutcome> {
    if !(config.t_end >= 0.0 && config.t_end.is_finite()) {
        return Err(Error::param(format!("t_end must be finite and non-negative, got {}", config.t_end)));
    }
    let mut state = SolverState::new(u0, config.dt)?;
    let mut warnings = Vec::new();
    let cfl = state.cfl_number();
    if cfl > CFL_ADVISORY {
        warnings.push(format!("CFL advisory exceeded: dt max|u| N / L = {cfl:.3} > {CFL_ADVISORY}"));
    }
    let mut index = match &config.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let mut f = BufWriter::new(File::create(dir.join("snapshots.csv"))?);
            writeln!(f, "file,t")?;
            Some(f)
        }
        None => None,
    };
    let mut snapshots = Vec::new();
    let mut series = vec![TimeSample::of(lp, &state)];
    let mut flagged = false;
    let mut energy_increases = 0;
    let mut n = 0usize;
    let save = |state: &SolverState, n: usize, index: &mut Option<BufWriter<File>>, snapshots: &mut Vec<(f64, PathBuf)>| -> Result<()> {
        if let (Some(dir), Some(f)) = (&config.out_dir, index.as_mut()) {
            let path = write_snapshot(dir, n, state, f)?;
            snapshots.push((state.t, path));
        }
        Ok(())
    };
    if config.snapshot_every > 0 {
        save(&state, 0, &mut index, &mut snapshots)?;
    }
    let tol = 1e-12 * config.t_end.max(1.0);
    while state.t < config.t_end - tol {
        let h = config.dt.min(config.t_end - state.t);
        let e0 = state.energy();
        let next = match step(&state, h) {
            Ok(s) => s,
            Err(err) => {
                if let Some(dir) = &config.out_dir {
                    let path = dir.join("last_finite.bsnap");
                    snapshot::save(&state.u, &path)?;
                    warnings.push(format!("instability at t = {:e}; last finite state in {}", state.t + h, path.display()));
                }
                return Err(err);
            }
        };
        state = next;
        n += 1;
        let sample = TimeSample::of(lp, &state);
        if sample.energy > e0 + 1e-10 * 2.0 * e0 {
            energy_increases += 1;
        }
        if sample.resolution_fraction > RESOLUTION_WARNING && !flagged {
            flagged = true;
            warnings.push(format!(
                "under-resolved from t = {:e}: top-band energy fraction {:e} exceeds {RESOLUTION_WARNING:e}; later samples are unreliable",
                state.t, sample.resolution_fraction
            ));
        }
        series.push(sample);
        if config.snapshot_every > 0 && n.is_multiple_of(config.snapshot_every) {
            save(&state, n, &mut index, &mut snapshots)?;
        }
    }
    if let Some(dir) = &config.out_dir {
        write_series(dir.join("series.csv"), &series)?;
    }
    if let Some(mut f) = index {
        f.flush()?;
    }
    Ok(SimulationOutcome {
        state,
        series,
        snapshots,
        warnings,
        energy_increases,
    })
}

/// Reads `snapshots.csv` from a simulation directory.
pub fn read_snapshot_index(dir: impl AsRef<Path>) -> Result<Vec<(f64, PathBuf)>> {
    let dir = dir.as_ref();
    let mut r = csv::Reader::from_path(dir.join("snapshots.csv"))?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let t: f64 = rec
            .get(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::param("malformed snapshot index"))?;
        out.push((t, dir.join(rec.get(0).unwrap_or_default())));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{random_field, FieldSpec};
    use crate::lp::default_lp;
    use std::f64::consts::PI;

    fn grid(n: usize) -> GridSpec {
        GridSpec::periodic_2pi(3, n).unwrap()
    }

    #[test]
    fn taylor_green_has_no_projected_advection() {
        let g = grid(16);
        let u = taylor_green(&g, 0.0);
        assert!(nonlinear_term(&u).unwrap().lp_norm(Exponent::TWO) < 1e-11);
        let pi = compute_pressure(&u).unwrap();
        let expect = SpectralField::from_fn(g, 1, |x, _| 0.25 * ((2.0 * x[0]).cos() + (2.0 * x[1]).cos()));
        assert!(pi.l2_distance(&expect) < 1e-11);
    }

    #[test]
    fn pressure_gradient_is_removed_part() {
        let g = grid(16);
        let spec = FieldSpec::dealias_safe(&g).components(3).solenoidal(true);
        let u = random_field(&g, &spec, 3).unwrap();
        let adv = advect(&u, &u, true).without_mean();
        let mut removed = adv.clone();
        removed -= &adv.leray_project().unwrap();
        let grad_pi = compute_pressure(&u).unwrap().gradient();
        // grad pi = -(I - P)(u . grad) u
        let mut sum = grad_pi;
        sum += &removed;
        assert!(sum.lp_norm(Exponent::TWO) < 1e-11 * removed.lp_norm(Exponent::TWO).max(1.0));
    }

    #[test]
    fn quadratic_homogeneity() {
        let g = grid(16);
        let spec = FieldSpec::dealias_safe(&g).components(3).solenoidal(true);
        let u = random_field(&g, &spec, 4).unwrap();
        let a = nonlinear_term(&u.scaled(2.0)).unwrap();
        let b = nonlinear_term(&u).unwrap().scaled(4.0);
        assert!(a.l2_distance(&b) < 1e-12 * b.lp_norm(Exponent::TWO));
        assert!(a.divergence_norm().unwrap() < 1e-12 * a.lp_norm(Exponent::TWO));
    }

    #[test]
    fn shear_mode_decays_at_heat_rate() {
        let g = grid(16);
        let u = SpectralField::from_fn(g, 3, |x, c| if c == 1 { x[0].cos() } else { 0.0 }).chopped(1e-14);
        let s = SolverState::new(u.clone(), 0.01).unwrap();
        let next = step(&s, 0.01).unwrap();
        assert!(next.u.l2_distance(&u.scaled((-0.01f64).exp())) < 1e-10);
    }

    #[test]
    fn zero_field_is_fixed() {
        let g = grid(8);
        let s = SolverState::new(SpectralField::zeros(g, 3), 0.1).unwrap();
        assert!(step(&s, 0.1).unwrap().u.is_zero());
    }

    #[test]
    fn vorticity_round_trip() {
        let g = grid(16);
        let spec = FieldSpec::dealias_safe(&g).components(3).solenoidal(true);
        let u = random_field(&g, &spec, 5).unwrap();
        let w = vorticity_from_velocity(&u).unwrap();
        assert_eq!(w.antisymmetry_defect(), 0.0);
        let back = velocity_from_vorticity(&w).unwrap();
        assert!(back.l2_distance(&u) < 1e-12 * u.lp_norm(Exponent::TWO));
    }

    #[test]
    fn vorticity_of_shear() {
        let g = grid(16);
        let u = SpectralField::from_fn(g, 3, |x, c| if c == 1 { x[0].sin() } else { 0.0 });
        let w = vorticity_from_velocity(&u).unwrap();
        let expect = SpectralField::from_fn(g, 1, |x, _| x[0].cos());
        assert!(w.get(0, 1).l2_distance(&expect) < 1e-12);
        assert!(w.get(1, 0).l2_distance(&expect.scaled(-1.0)) < 1e-12);
        assert!(w.get(0, 2).lp_norm(Exponent::TWO) < 1e-12);
        let vec = w.vector().unwrap();
        assert!(vec.component_field(2).l2_distance(&expect) < 1e-12);
        let grad = SpectralField::from_fn(g, 1, |x, _| (x[0] + 2.0 * x[2]).sin()).gradient();
        assert!(vorticity_from_velocity(&grad).unwrap().omega.lp_norm(Exponent::TWO) < 1e-12);
        let back = velocity_from_vorticity(&w).unwrap();
        assert!(back.l2_distance(&u) < 1e-12);
    }

    #[test]
    fn rejects_divergent_data() {
        let g = grid(8);
        let u = SpectralField::from_fn(g, 3, |x, c| if c == 0 { x[0].sin() } else { 0.0 });
        assert!(SolverState::new(u, 0.1).is_err());
    }

    #[test]
    fn steady_zero_has_zero_residual() {
        let g = grid(8);
        let a = SolverState::new(SpectralField::zeros(g, 3), 0.1).unwrap();
        let b = SolverState { t: 0.1, ..a.clone() };
        let r = vorticity_equation_residual(&[a.clone(), b]).unwrap();
        assert_eq!(r.absolute, 0.0);
        assert!(vorticity_equation_residual(&[a]).is_err());
    }

    #[test]
    fn simulation_writes_outputs() {
        let g = grid(8);
        let dir = tempfile::tempdir().unwrap();
        let cfg = SimulationConfig {
            dt: 0.05,
            t_end: 0.2,
            snapshot_every: 2,
            out_dir: Some(dir.path().to_path_buf()),
        };
        let out = simulate(default_lp(), taylor_green(&g, 0.0), &cfg).unwrap();
        assert_eq!(out.series.len(), 5);
        assert!((out.state.t - 0.2).abs() < 1e-14);
        assert_eq!(out.energy_increases, 0);
        let index = read_snapshot_index(dir.path()).unwrap();
        assert_eq!(index.len(), 3);
        let last = snapshot::load(&index[2].1).unwrap();
        assert!(last.l2_distance(&out.state.u) == 0.0);
        assert!(dir.path().join("series.csv").exists());
        let e = out.series.last().unwrap().energy;
        let exact = 0.25 * (2.0 * PI).powi(3) * (-0.8f64).exp();
        assert!((e - exact).abs() < 1e-10, "{e} vs {exact}");
    }
}
