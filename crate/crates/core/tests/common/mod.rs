//! Reference computations written independently of the library: direct
//! sums over integer modes, closed forms and plain quadrature.

#![allow(dead_code)]

use std::f64::consts::PI;

use besov_ns::{CutoffProfile, GridSpec, PhysicalField, SpectralField};

/// Signed integer mode of index `i` on an `n`-point axis.
pub fn signed(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Integer modes of a flat row-major index, last axis fastest.
pub fn modes(grid: &GridSpec, mut idx: usize) -> Vec<i64> {
    let (d, n) = (grid.dim(), grid.size());
    let mut out = vec![0; d];
    for a in (0..d).rev() {
        out[a] = signed(idx % n, n);
        idx /= n;
    }
    out
}

/// `|k|` for a flat index, from the integer modes.
pub fn wavenumber(grid: &GridSpec, idx: usize) -> f64 {
    let unit = 2.0 * PI / grid.length();
    let m2: i64 = modes(grid, idx).iter().map(|m| m * m).sum();
    unit * (m2 as f64).sqrt()
}

/// `(L^n sum_{k != 0} |k|^{2s} |c_k|^2)^{1/2}`.
pub fn sobolev(u: &SpectralField, s: f64) -> f64 {
    let grid = u.grid();
    let m = grid.num_points();
    let mut sum = 0.0;
    for c in 0..u.components() {
        for idx in 1..m {
            let a = u.coeffs()[c * m + idx].norm_sqr();
            if a > 0.0 {
                sum += wavenumber(grid, idx).powf(2.0 * s) * a;
            }
        }
    }
    (grid.length().powi(grid.dim() as i32) * sum).sqrt()
}

/// Range of `sqrt(sum_j 4^{js} phi(2^{-j}|k|)^2) / |k|^s` over the modes that
/// carry energy, with `phi` taken as `chi(r/2) - chi(r)` from the profile.
pub fn sobolev_envelope(profile: &CutoffProfile, u: &SpectralField, bands: (i32, i32), s: f64) -> (f64, f64) {
    let grid = u.grid();
    let m = grid.num_points();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for idx in 1..m {
        if (0..u.components()).all(|c| u.coeffs()[c * m + idx].norm() == 0.0) {
            continue;
        }
        let r = wavenumber(grid, idx);
        let mut sum = 0.0;
        for j in bands.0..=bands.1 {
            let x = r * 2f64.powi(-j);
            let ph = profile.chi(x / 2.0) - profile.chi(x);
            sum += 4f64.powf(j as f64 * s) * ph * ph;
        }
        let g = sum.sqrt() / r.powf(s);
        lo = lo.min(g);
        hi = hi.max(g);
    }
    (lo, hi)
}

/// Cell volume `(L/N)^n`.
pub fn cell(grid: &GridSpec) -> f64 {
    (grid.length() / grid.size() as f64).powi(grid.dim() as i32)
}

/// Grid point coordinates of a flat index.
pub fn point(grid: &GridSpec, mut idx: usize) -> Vec<f64> {
    let (d, n) = (grid.dim(), grid.size());
    let h = grid.length() / n as f64;
    let mut x = vec![0.0; d];
    for a in (0..d).rev() {
        x[a] = (idx % n) as f64 * h;
        idx /= n;
    }
    x
}

/// Closed-form Taylor-Green velocity `e^{-2t}(sin x cos y, -cos x sin y, 0)`.
pub fn taylor_green_at(x: &[f64], t: f64, c: usize) -> f64 {
    let a = (-2.0 * t).exp();
    match c {
        0 => a * x[0].sin() * x[1].cos(),
        1 => -a * x[0].cos() * x[1].sin(),
        _ => 0.0,
    }
}

/// `L^2` distance between grid samples and a pointwise reference, by the
/// rectangle rule (exact for trigonometric polynomials of low degree).
pub fn l2_error(u: &PhysicalField, exact: impl Fn(&[f64], usize) -> f64) -> f64 {
    let grid = u.grid();
    let m = grid.num_points();
    let mut sum = 0.0;
    for c in 0..u.components() {
        for idx in 0..m {
            let d = u.values()[c * m + idx] - exact(&point(grid, idx), c);
            sum += d * d;
        }
    }
    (sum * cell(grid)).sqrt()
}

/// `(gamma c (T - t))^{-1/gamma}`.
pub fn ode_bound(gamma: f64, c: f64, t_end: f64, t: f64) -> f64 {
    (gamma * c * (t_end - t)).powf(-1.0 / gamma)
}

/// Slope of the least-squares line through `(x, y)`.
pub fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
