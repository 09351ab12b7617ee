//! Homogeneous Besov seminorms, Sobolev norms and the inequality checks that
//! relate them.

use crate::check::{Ratio, Slack};
use crate::error::{Error, Result};
use crate::lp::{band_range, support_leak, BandRange, LittlewoodPaley};
use crate::spectral::{Exponent, SpectralField};

/// Critical regularity `s_p = -1 + n / p`.
pub fn critical_index(n: usize, p: Exponent) -> f64 {
    -1.0 + n as f64 * p.reciprocal()
}

/// Regularity and integrability of a homogeneous Besov seminorm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesovParams {
    pub s: f64,
    pub p: Exponent,
    pub q: Exponent,
}

impl BesovParams {
    pub fn new(s: f64, p: Exponent, q: Exponent) -> Self {
        BesovParams { s, p, q }
    }

    /// Parameters `(s_p + eps, p, q)`.
    pub fn critical_plus(n: usize, eps: f64, p: Exponent, q: Exponent) -> Self {
        BesovParams::new(critical_index(n, p) + eps, p, q)
    }

    /// Degree `n / p - s` under `u(x) -> u(lambda x)`.
    pub fn homogeneity_degree(&self, n: usize) -> f64 {
        n as f64 * self.p.reciprocal() - self.s
    }

    /// Excess regularity `s - s_p` over the critical index.
    pub fn excess(&self, n: usize) -> f64 {
        self.s - critical_index(n, self.p)
    }
}

/// `l^q` norm of a finite sequence; `q = inf` is the maximum.
pub fn lq_norm(values: impl IntoIterator<Item = f64>, q: Exponent) -> f64 {
    if q.is_infinite() {
        return values.into_iter().fold(0.0, |a, v| a.max(v.abs()));
    }
    let qv = q.get();
    if qv == 1.0 {
        return values.into_iter().map(f64::abs).sum();
    }
    values.into_iter().map(|v| v.abs().powf(qv)).sum::<f64>().powf(1.0 / qv)
}

/// `||Delta_j u||_{L^p}` for every band in a range; reusable for any `(s, q)`.
#[derive(Clone, Debug)]
pub struct BandNorms {
    pub p: Exponent,
    pub entries: Vec<(i32, f64)>,
}

impl BandNorms {
    pub fn compute(lp: &LittlewoodPaley, u: &SpectralField, p: Exponent, bands: BandRange) -> Self {
        let entries = bands
            .iter()
            .map(|j| {
                let band = lp.delta_proj(j, u);
                let norm = if band.is_zero() { 0.0 } else { band.lp_norm(p) };
                (j, norm)
            })
            .collect();
        BandNorms { p, entries }
    }

    /// `|| j -> 2^{js} ||Delta_j u||_p ||_{l^q}`.
    pub fn besov(&self, s: f64, q: Exponent) -> f64 {
        lq_norm(self.weighted(s).map(|(_, v)| v), q)
    }

    pub fn weighted(&self, s: f64) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.entries.iter().map(move |&(j, v)| (j, 2f64.powf(j as f64 * s) * v))
    }
}

/// `||u||_{B^s_{p,q}}` summed over `bands`.
pub fn besov_norm(lp: &LittlewoodPaley, u: &SpectralField, params: BesovParams, bands: BandRange) -> Result<f64> {
    u.require_zero_mean()?;
    Ok(BandNorms::compute(lp, u, params.p, bands).besov(params.s, params.q))
}

/// Besov seminorm over the grid's full band range.
pub fn besov_norm_full(lp: &LittlewoodPaley, u: &SpectralField, params: BesovParams) -> Result<f64> {
    besov_norm(lp, u, params, band_range(u.grid()))
}

/// `(L^n sum_k |k|^{2s} |c_k|^2)^{1/2}`; equals the `L^2` norm at `s = 0`.
pub fn sobolev_norm(u: &SpectralField, s: f64) -> Result<f64> {
    u.require_zero_mean()?;
    let grid = *u.grid();
    let m = grid.num_points();
    let mut sum = 0.0;
    for c in 0..u.components() {
        for (idx, v) in u.component(c).iter().enumerate().skip(1) {
            let w = if s == 0.0 { 1.0 } else { grid.magnitude(idx).powf(2.0 * s) };
            sum += w * v.norm_sqr();
        }
    }
    debug_assert!(m > 1);
    Ok((grid.volume() * sum).sqrt())
}

/// Range `[lo, hi]` of `sqrt(sum_j 2^{2js} phi^2(2^{-j}|k|) / |k|^{2s})` over
/// the nonzero shells where `u` has energy: the `B^s_{2,2} / H^s` ratio of
/// `u` always lies inside it.
pub fn sobolev_envelope(lp: &LittlewoodPaley, u: &SpectralField, s: f64) -> (f64, f64) {
    let grid = *u.grid();
    let bands = band_range(&grid);
    let m = grid.num_points();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for idx in 1..m {
        if (0..u.components()).all(|c| u.component(c)[idx].norm() == 0.0) {
            continue;
        }
        let r = grid.magnitude(idx);
        let sum: f64 = bands
            .iter()
            .map(|j| {
                let ph = lp.profile().phi_scaled(j, r);
                2f64.powf(2.0 * j as f64 * s) * ph * ph
            })
            .sum();
        let g = (sum / r.powf(2.0 * s)).sqrt();
        lo = lo.min(g);
        hi = hi.max(g);
    }
    (lo, hi)
}

/// `||u||_{B^{n/p2 + delta}_{p2,q2}} / ||u||_{B^{n/p1 + delta}_{p1,q1}}`.
#[allow(clippy::too_many_arguments)]
pub fn verify_embedding(
    lp: &LittlewoodPaley,
    u: &SpectralField,
    p1: Exponent,
    p2: Exponent,
    q1: Exponent,
    q2: Exponent,
    delta: f64,
) -> Result<Ratio> {
    if p1.get() > p2.get() || q1.get() > q2.get() {
        return Err(Error::param("embedding needs p1 <= p2 and q1 <= q2"));
    }
    let n = u.grid().dim() as f64;
    let bands = band_range(u.grid());
    let lhs = besov_norm(lp, u, BesovParams::new(n * p2.reciprocal() + delta, p2, q2), bands)?;
    let rhs = besov_norm(lp, u, BesovParams::new(n * p1.reciprocal() + delta, p1, q1), bands)?;
    Ok(Ratio::of(lhs, rhs))
}

/// Both sides of the comparison between `L^p` and the `B^0_{p,inf}`,
/// `B^0_{p,1}` seminorms.
#[derive(Clone, Debug)]
pub struct LebesgueComparison {
    /// `||u||_{B^0_{p,inf}} / ||u||_{L^p}`, bounded by an unstated constant.
    pub upper: Ratio,
    /// `||u||_{L^p} / ||u||_{B^0_{p,1}}`, at most one.
    pub lower: Ratio,
    pub lower_slack: Slack,
}

pub fn verify_lebesgue_comparison(lp: &LittlewoodPaley, u: &SpectralField, p: Exponent) -> Result<LebesgueComparison> {
    u.require_zero_mean()?;
    let norms = BandNorms::compute(lp, u, p, band_range(u.grid()));
    let lp_u = u.lp_norm(p);
    let b_inf = norms.besov(0.0, Exponent::INFINITY);
    let b_one = norms.besov(0.0, Exponent::ONE);
    Ok(LebesgueComparison {
        upper: Ratio::of(b_inf, lp_u),
        lower: Ratio::of(lp_u, b_one),
        lower_slack: Slack::new(lp_u, b_one),
    })
}

/// Exponents `(lambda s1 + (1 - lambda) s2, p, q)` with
/// `1/p = lambda/p1 + (1 - lambda)/p2` and likewise for `q`.
pub fn interpolate_params(a: BesovParams, b: BesovParams, lambda: f64) -> Result<BesovParams> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::param(format!("interpolation weight must lie in (0, 1), got {lambda}")));
    }
    let p = Exponent::from_reciprocal(lambda * a.p.reciprocal() + (1.0 - lambda) * b.p.reciprocal())?;
    let q = Exponent::from_reciprocal(lambda * a.q.reciprocal() + (1.0 - lambda) * b.q.reciprocal())?;
    Ok(BesovParams::new(lambda * a.s + (1.0 - lambda) * b.s, p, q))
}

/// Slack of `||u||_{interp} <= ||u||_a^lambda ||u||_b^{1 - lambda}`.
pub fn verify_interpolation_holder(
    lp: &LittlewoodPaley,
    u: &SpectralField,
    a: BesovParams,
    b: BesovParams,
    lambda: f64,
) -> Result<Slack> {
    let mid = interpolate_params(a, b, lambda)?;
    let bands = band_range(u.grid());
    let lhs = besov_norm(lp, u, mid, bands)?;
    let na = besov_norm(lp, u, a, bands)?;
    let nb = besov_norm(lp, u, b, bands)?;
    Ok(Slack::new(lhs, na.powf(lambda) * nb.powf(1.0 - lambda)))
}

/// `||u||_{B^{lambda s1 + (1-lambda) s2}_{p,1}} lambda (1-lambda) (s2 - s1)`
/// over `||u||_{B^{s1}_{p,inf}}^lambda ||u||_{B^{s2}_{p,inf}}^{1-lambda}`.
pub fn verify_interpolation_geometric(
    lp: &LittlewoodPaley,
    u: &SpectralField,
    p: Exponent,
    s1: f64,
    s2: f64,
    lambda: f64,
) -> Result<Ratio> {
    if s1 >= s2 {
        return Err(Error::param(format!("geometric interpolation needs s1 < s2, got {s1} >= {s2}")));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::param(format!("interpolation weight must lie in (0, 1), got {lambda}")));
    }
    u.require_zero_mean()?;
    let norms = BandNorms::compute(lp, u, p, band_range(u.grid()));
    let lhs = norms.besov(lambda * s1 + (1.0 - lambda) * s2, Exponent::ONE) * lambda * (1.0 - lambda) * (s2 - s1);
    let rhs = norms.besov(s1, Exponent::INFINITY).powf(lambda) * norms.besov(s2, Exponent::INFINITY).powf(1.0 - lambda);
    Ok(Ratio::of(lhs, rhs))
}

/// Relative coefficient size tolerated outside a declared annulus.
pub const SUPPORT_TOLERANCE: f64 = 1e-12;

/// `||sum_j u_j||_{B^s_{p,q}} / || j -> 2^{js} ||u_j||_p ||_{l^q}` for pieces
/// `u_j` supported in `2^j (inner, outer)`.
pub fn verify_convergence_bound(
    lp: &LittlewoodPaley,
    pieces: &[(i32, SpectralField)],
    params: BesovParams,
    annulus: (f64, f64),
) -> Result<Ratio> {
    let first = match pieces.first() {
        Some(p) => &p.1,
        None => return Ok(Ratio::skipped("no pieces")),
    };
    let mut sum = SpectralField::zeros(*first.grid(), first.components());
    let mut weighted = Vec::with_capacity(pieces.len());
    for (j, piece) in pieces {
        let leak = support_leak(piece, *j, annulus.0, annulus.1);
        if leak > SUPPORT_TOLERANCE {
            return Err(Error::SupportViolation(format!(
                "piece {j} has relative mass {leak:e} outside 2^{j} ({}, {})",
                annulus.0, annulus.1
            )));
        }
        sum += piece;
        weighted.push(2f64.powf(*j as f64 * params.s) * piece.lp_norm(params.p));
    }
    let rhs = lq_norm(weighted, params.q);
    if rhs == 0.0 {
        return Ok(Ratio::skipped("all pieces vanish"));
    }
    let lhs = besov_norm(lp, &sum.without_mean(), params, band_range(sum.grid()))?;
    Ok(Ratio::of(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::default_lp;
    use crate::spectral::GridSpec;
    use std::f64::consts::PI;

    fn grid() -> GridSpec {
        GridSpec::periodic_2pi(3, 16).unwrap()
    }

    #[test]
    fn critical_index_values() {
        assert_eq!(critical_index(3, Exponent::INFINITY), -1.0);
        assert!((critical_index(3, Exponent::new(3.0).unwrap())).abs() < 1e-15);
        let b = BesovParams::critical_plus(3, 1.0, Exponent::TWO, Exponent::TWO);
        assert!((b.s - 1.5).abs() < 1e-15);
        assert!((b.homogeneity_degree(3) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn lq_norms() {
        let v = [3.0, 4.0];
        assert_eq!(lq_norm(v, Exponent::ONE), 7.0);
        assert!((lq_norm(v, Exponent::TWO) - 5.0).abs() < 1e-15);
        assert_eq!(lq_norm(v, Exponent::INFINITY), 4.0);
    }

    #[test]
    fn zero_field_and_mean_rejection() {
        let lp = default_lp();
        let z = SpectralField::zeros(grid(), 1);
        let params = BesovParams::new(0.5, Exponent::TWO, Exponent::ONE);
        assert_eq!(besov_norm_full(lp, &z, params).unwrap(), 0.0);
        let c = SpectralField::from_fn(grid(), 1, |_, _| 1.0);
        assert!(matches!(besov_norm_full(lp, &c, params), Err(Error::NonzeroMean(_))));
    }

    #[test]
    fn cosine_besov_norm_from_profile() {
        let lp = default_lp();
        let u = SpectralField::from_fn(grid(), 1, |x, _| x[0].cos()).chopped(1e-14);
        let got = besov_norm_full(lp, &u, BesovParams::new(0.0, Exponent::TWO, Exponent::TWO)).unwrap();
        let p = lp.profile();
        let l2 = (2.0 * PI).powf(1.5) / 2f64.sqrt();
        let expect = (p.phi(1.0).powi(2) + p.phi(2.0).powi(2)).sqrt() * l2;
        assert!((got - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn sobolev_norm_cases() {
        let u = SpectralField::from_fn(grid(), 1, |x, _| (2.0 * x[0]).cos()).without_mean();
        let l2 = u.lp_norm(Exponent::TWO);
        assert!((sobolev_norm(&u, 0.0).unwrap() - l2).abs() < 1e-12);
        assert!((sobolev_norm(&u, 1.0).unwrap() - 2.0 * l2).abs() < 1e-12);
    }

    #[test]
    fn interpolation_identity_case_has_zero_slack() {
        let lp = default_lp();
        let u = SpectralField::from_fn(grid(), 1, |x, _| (x[0] + 2.0 * x[1]).sin() + (3.0 * x[2]).cos()).without_mean();
        let a = BesovParams::new(0.5, Exponent::TWO, Exponent::TWO);
        let s = verify_interpolation_holder(lp, &u, a, a, 0.3).unwrap();
        assert!(s.relative().abs() < 1e-13);
        assert!(verify_interpolation_holder(lp, &u, a, a, 1.0).is_err());
        assert!(verify_interpolation_geometric(lp, &u, Exponent::TWO, 1.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn convergence_bound_rejects_support_violation() {
        let lp = default_lp();
        let u = SpectralField::from_fn(grid(), 1, |x, _| (4.0 * x[0]).cos()).chopped(1e-14);
        let bad = [(0, u.clone())];
        assert!(matches!(
            verify_convergence_bound(lp, &bad, BesovParams::new(0.0, Exponent::TWO, Exponent::TWO), (0.75, 8.0 / 3.0)),
            Err(Error::SupportViolation(_))
        ));
        let good: Vec<_> = band_range(u.grid()).iter().map(|j| (j, lp.delta_proj(j, &u))).collect();
        let r = verify_convergence_bound(lp, &good, BesovParams::new(0.0, Exponent::TWO, Exponent::TWO), (0.75, 8.0 / 3.0))
            .unwrap();
        assert!(r.value().unwrap().is_finite());
    }
}
