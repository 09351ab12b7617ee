//! Smooth radial cutoffs `chi` and `phi` for the dyadic decomposition.
//!
//! `chi(xi) = eta(|xi|)` where `eta` is 1 on `[0, 3/4]`, 0 on `[4/3, inf)` and
//! in between follows the normalized integral of the bump
//! `exp(-1 / (s (1 - s)))`. The annular profile is
//! `phi(xi) = chi(xi / 2) - chi(xi)`, so both partition-of-unity sums
//! telescope exactly.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

pub const INNER_RADIUS: f64 = 0.75;
pub const OUTER_RADIUS: f64 = 4.0 / 3.0;
/// Support of `phi` is the open annulus `(3/4, 8/3)`.
pub const ANNULUS_INNER: f64 = 0.75;
pub const ANNULUS_OUTER: f64 = 8.0 / 3.0;

const GAUSS_POINTS: usize = 8;

fn bump(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        return 0.0;
    }
    (-1.0 / (s * (1.0 - s))).exp()
}

fn bump_derivative(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        return 0.0;
    }
    let q = s * (1.0 - s);
    let b = (-1.0 / q).exp();
    if b == 0.0 {
        0.0
    } else {
        b * (1.0 - 2.0 * s) / (q * q)
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Tabulated smooth step `S(t)`, rising from `S(0) = 0` to `S(1) = 1`.
#[derive(Clone, Debug)]
struct SmoothStep {
    /// Cumulative integral of the bump at the cell edges.
    integral: Vec<f64>,
    cells: usize,
}

impl SmoothStep {
    fn new(cells: usize) -> Self {
        let rule = gauss_legendre(GAUSS_POINTS);
        let h = 1.0 / cells as f64;
        let mut integral = Vec::with_capacity(cells + 1);
        integral.push(0.0);
        let mut acc = 0.0;
        for c in 0..cells {
            let mid = (c as f64 + 0.5) * h;
            let cell: f64 = rule.iter().map(|&(x, w)| w * bump(mid + 0.5 * h * x)).sum();
            acc += 0.5 * h * cell;
            integral.push(acc);
        }
        SmoothStep { integral, cells }
    }

    fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        let h = 1.0 / self.cells as f64;
        let c = ((t / h) as usize).min(self.cells - 1);
        let (a, b) = (c as f64 * h, (c + 1) as f64 * h);
        let u = (t - a) / h;
        // quintic Hermite through value, first and second derivative at both ends
        let (u2, u3) = (u * u, u * u * u);
        let (u4, u5) = (u3 * u, u3 * u2);
        let h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
        let h1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
        let h2 = 0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5;
        let h3 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
        let h4 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
        let h5 = 0.5 * u3 - u4 + 0.5 * u5;
        let f = self.integral[c] * h0
            + h * bump(a) * h1
            + h * h * bump_derivative(a) * h2
            + self.integral[c + 1] * h3
            + h * bump(b) * h4
            + h * h * bump_derivative(b) * h5;
        (f / self.integral[self.cells]).clamp(0.0, 1.0)
    }
}

/// The radial cutoff pair `(chi, phi)`.
#[derive(Clone, Debug)]
pub struct CutoffProfile {
    step: SmoothStep,
    smoothing: f64,
}

impl Default for CutoffProfile {
    fn default() -> Self {
        build_cutoffs(1.0)
    }
}

/// Builds the cutoff pair. `smoothing` scales the density of the table used
/// to evaluate the transition; the support and the profile shape are fixed.
pub fn build_cutoffs(smoothing: f64) -> CutoffProfile {
    assert!(smoothing > 0.0 && smoothing.is_finite(), "smoothing must be positive");
    let cells = ((1024.0 * smoothing).ceil() as usize).max(16);
    CutoffProfile {
        step: SmoothStep::new(cells),
        smoothing,
    }
}

impl CutoffProfile {
    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    /// Radial profile of `chi`.
    pub fn chi(&self, r: f64) -> f64 {
        if r <= INNER_RADIUS {
            1.0
        } else if r >= OUTER_RADIUS {
            0.0
        } else {
            1.0 - self.step.eval((r - INNER_RADIUS) / (OUTER_RADIUS - INNER_RADIUS))
        }
    }

    /// Radial profile of `phi(xi) = chi(xi / 2) - chi(xi)`.
    pub fn phi(&self, r: f64) -> f64 {
        self.chi(0.5 * r) - self.chi(r)
    }

    /// `chi(2^{-j} r)`, with the power of two applied exactly.
    pub fn chi_scaled(&self, j: i32, r: f64) -> f64 {
        self.chi(r * 2f64.powi(-j))
    }

    pub fn phi_scaled(&self, j: i32, r: f64) -> f64 {
        self.phi(r * 2f64.powi(-j))
    }

    /// Samples `(radius, chi, phi)` at `count` equispaced radii on `[0, r_max]`.
    pub fn samples(&self, count: usize, r_max: f64) -> Vec<(f64, f64, f64)> {
        (0..count)
            .map(|i| {
                let r = r_max * i as f64 / (count.max(2) - 1) as f64;
                (r, self.chi(r), self.phi(r))
            })
            .collect()
    }

    /// CSV with header `radius,chi,phi`, 10^4 samples on `[0, 3]`.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["radius", "chi", "phi"])?;
        for (r, c, p) in self.samples(10_000, 3.0) {
            out.write_record([format!("{r:.17e}"), format!("{c:.17e}"), format!("{p:.17e}")])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn export_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}
