//! Self-similar families `u(t, x) = (T - t)^{-1/2} U(x / sqrt(T - t))`.
//!
//! The profile `U` is given by a closed-form Fourier transform, so the
//! rescaled field is re-sampled exactly on the grid's wavenumbers
//! (periodising `U(x / lambda)` on the box) instead of being interpolated in
//! physical space.

use num_complex::Complex64;

use super::DiagnosticRecord;
use crate::besov::{BandNorms, BesovParams};
use crate::error::{Error, Result};
use crate::lp::{band_range, LittlewoodPaley};
use crate::spectral::{Exponent, GridSpec, SpectralField};

/// Relative coefficient size tolerated beyond the dealiasing cutoff.
pub const ESCAPE_TOLERANCE: f64 = 1e-6;

/// Divergence-free shell profile
///
/// ```text
/// U^(xi) = i (xi x e) (|xi| / k0)^4 exp(-2 (|xi|^2 / k0^2 - 1)) / k0
/// ```
///
/// (`xi x e` is replaced by `(-xi_2, xi_1)` in two dimensions). Its radial
/// envelope peaks at `|xi| = k0` and the profile decays like a Gaussian of
/// width `2 / k0` in space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShellProfile {
    pub k0: f64,
    pub axis: [f64; 3],
    pub amplitude: f64,
}

impl Default for ShellProfile {
    fn default() -> Self {
        let a = 1.0 / 3f64.sqrt();
        ShellProfile {
            k0: 1.0,
            axis: [a, a, a],
            amplitude: 1.0,
        }
    }
}

impl ShellProfile {
    fn envelope(&self, kappa: f64) -> f64 {
        let x = kappa * kappa / (self.k0 * self.k0);
        x * x * (-2.0 * (x - 1.0)).exp()
    }

    /// `U^(xi)` for one component.
    pub fn transform(&self, dim: usize, xi: &[f64; 3], c: usize) -> Complex64 {
        let kappa = (xi[..dim].iter().map(|v| v * v).sum::<f64>()).sqrt();
        let e = &self.axis;
        let v = match (dim, c) {
            (2, 0) => -xi[1],
            (2, 1) => xi[0],
            (3, 0) => xi[1] * e[2] - xi[2] * e[1],
            (3, 1) => xi[2] * e[0] - xi[0] * e[2],
            (3, 2) => xi[0] * e[1] - xi[1] * e[0],
            _ => 0.0,
        };
        Complex64::new(0.0, self.amplitude * v * self.envelope(kappa) / self.k0)
    }

    /// Spatial width `2 lambda / k0` of the rescaled profile.
    pub fn width(&self, lambda: f64) -> f64 {
        2.0 * lambda / self.k0
    }

    /// The profile on `grid` (`lambda = 1`).
    pub fn field(&self, grid: &GridSpec) -> Result<SpectralField> {
        self.rescaled(grid, 1.0)
    }

    /// `lambda^{-1} U(x / lambda)` periodised on the box. Fails when the
    /// rescaled profile is not resolved: too much mass past the dealiasing
    /// cutoff, or wider than a sixth of the box.
    pub fn rescaled(&self, grid: &GridSpec, lambda: f64) -> Result<SpectralField> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param(format!("scale must be positive, got {lambda}")));
        }
        if self.width(lambda) * 6.0 > grid.length() {
            return Err(Error::param(format!(
                "profile at scale {lambda} is wider than a sixth of the box (below the resolved bands)"
            )));
        }
        let n = grid.dim();
        let m = grid.num_points();
        // c_k = L^{-n} lambda^{n-1} U^(lambda k)
        let scale = lambda.powi(n as i32 - 1) / grid.volume();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n * m];
        let (mut kept, mut lost) = (0.0f64, 0.0f64);
        for idx in 1..m {
            let k = grid.wavevector(idx);
            let xi = [lambda * k[0], lambda * k[1], lambda * k[2]];
            for c in 0..n {
                let v = self.transform(n, &xi, c) * scale;
                if grid.dealias_keeps(idx) && !grid.touches_nyquist(idx) {
                    kept = kept.max(v.norm());
                    coeffs[c * m + idx] = v;
                } else {
                    lost = lost.max(v.norm());
                }
            }
        }
        if lost > ESCAPE_TOLERANCE * kept {
            return Err(Error::param(format!(
                "profile at scale {lambda} escapes the resolved bands (relative tail {:.2e})",
                lost / kept
            )));
        }
        SpectralField::from_coeffs(*grid, n, coeffs)
    }
}

/// One requested seminorm `B^{s_p + eps}_{p,q}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormRequest {
    pub eps: f64,
    pub p: Exponent,
    pub q: Exponent,
}

impl NormRequest {
    pub fn new(eps: f64, p: Exponent, q: Exponent) -> Self {
        NormRequest { eps, p, q }
    }

    pub fn params(&self, n: usize) -> BesovParams {
        BesovParams::critical_plus(n, self.eps, self.p, self.q)
    }

    /// Rate `-eps / 2` forced by the scaling of the family.
    pub fn target_slope(&self) -> f64 {
        -0.5 * self.eps
    }
}

/// Evaluates every request on one field, sharing band norms across equal `p`.
pub fn evaluate_norms(lp: &LittlewoodPaley, u: &SpectralField, requests: &[NormRequest]) -> Result<Vec<f64>> {
    u.require_zero_mean()?;
    let n = u.grid().dim();
    let bands = band_range(u.grid());
    let mut cache: Vec<BandNorms> = Vec::new();
    let mut out = Vec::with_capacity(requests.len());
    for req in requests {
        let norms = match cache.iter().position(|b| b.p == req.p) {
            Some(i) => &cache[i],
            None => {
                cache.push(BandNorms::compute(lp, u, req.p, bands));
                cache.last().expect("just pushed")
            }
        };
        let params = req.params(n);
        out.push(norms.besov(params.s, params.q));
    }
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct FamilySeries {
    pub requests: Vec<NormRequest>,
    pub records: Vec<DiagnosticRecord>,
    pub skipped: Vec<(f64, String)>,
}

impl FamilySeries {
    /// `(t, norm)` pairs for request `i`.
    pub fn series(&self, i: usize) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.t, r.norms[i].1)).collect()
    }
}

/// Norms of the family at each sample time; unresolved samples are skipped
/// with the reason recorded.
pub fn synthetic_blowup_family(
    lp: &LittlewoodPaley,
    profile: &ShellProfile,
    grid: &GridSpec,
    t_blowup: f64,
    requests: &[NormRequest],
    times: &[f64],
) -> Result<FamilySeries> {
    let n = grid.dim();
    let mut out = FamilySeries {
        requests: requests.to_vec(),
        ..Default::default()
    };
    for &t in times {
        if !(t < t_blowup) {
            return Err(Error::param(format!("sample time {t} is not before T = {t_blowup}")));
        }
        let lambda = (t_blowup - t).sqrt();
        let u = match profile.rescaled(grid, lambda) {
            Ok(u) => u,
            Err(Error::InvalidParameter(why)) => {
                out.skipped.push((t, why));
                continue;
            }
            Err(e) => return Err(e),
        };
        let values = evaluate_norms(lp, &u, requests)?;
        out.records.push(DiagnosticRecord {
            t,
            norms: requests.iter().map(|r| r.params(n)).zip(values).collect(),
            budget: None,
            fitted_exponent: None,
        });
    }
    Ok(out)
}

/// Times `T - lambda^2` for `count` scales spaced geometrically in `[lo, hi]`,
/// in increasing order.
pub fn geometric_times(t_blowup: f64, lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| {
            let f = if count > 1 { i as f64 / (count - 1) as f64 } else { 0.0 };
            let lambda = hi * (lo / hi).powf(f);
            t_blowup - lambda * lambda
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::default_lp;

    fn grid() -> GridSpec {
        GridSpec::new(3, 64, 8.0 * std::f64::consts::PI).unwrap()
    }

    #[test]
    fn profile_is_real_and_solenoidal() {
        let u = ShellProfile::default().field(&grid()).unwrap();
        assert!(u.hermitian_defect() < 1e-15);
        assert!(u.divergence_norm().unwrap() < 1e-13 * u.lp_norm(Exponent::TWO));
        assert!(u.is_zero_mean());
    }

    #[test]
    fn unit_scale_reproduces_profile() {
        let g = grid();
        let prof = ShellProfile::default();
        let req = [NormRequest::new(1.0, Exponent::TWO, Exponent::TWO)];
        let fam = synthetic_blowup_family(default_lp(), &prof, &g, 2.0, &req, &[1.0]).unwrap();
        let direct = evaluate_norms(default_lp(), &prof.field(&g).unwrap(), &req).unwrap();
        assert_eq!(fam.records[0].norms[0].1, direct[0]);
    }

    #[test]
    fn unresolved_scales_are_skipped() {
        let g = grid();
        let req = [NormRequest::new(1.0, Exponent::TWO, Exponent::TWO)];
        let fam = synthetic_blowup_family(default_lp(), &ShellProfile::default(), &g, 100.0, &req, &[0.0, 99.0, 99.9999])
            .unwrap();
        assert_eq!(fam.records.len(), 1);
        assert_eq!(fam.skipped.len(), 2);
    }
}
