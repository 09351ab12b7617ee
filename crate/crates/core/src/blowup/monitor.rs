//! Quantities entering the qualitative blow-up argument, sampled along a
//! series of fields.

use super::indices::{lambda, lambda_linf};
use crate::besov::BandNorms;
use crate::check::{Ratio, Slack};
use crate::error::Result;
use crate::lp::{band_range, LittlewoodPaley};
use crate::spectral::{Exponent, SpectralField};

#[derive(Clone, Debug, PartialEq)]
pub struct QualitativeSample {
    pub t: f64,
    /// `||u||_{B^{-1/2}_{inf,inf}}`.
    pub b_half: f64,
    /// `||u||_{B^{-n/2}_{inf,inf}}`.
    pub b_low: f64,
    /// `||u||_{B^{-1+eps}_{inf,inf}}`.
    pub b_eps: f64,
    /// `||u||_{B^0_{inf,1}}`.
    pub b_zero: f64,
    pub linf: f64,
    /// `B^{-1/2} <= B^{-n/2 lambda} B^{-1+eps (1-lambda)}`, constant one.
    pub interpolation: Slack,
    /// `||u||_inf <= ||u||_{B^0_{inf,1}}`, constant one.
    pub linf_embedding: Slack,
    /// `B^0_{inf,1}` over the interpolation with weight `(eps-1)/(eps-1+n/2)`;
    /// the constant is not one, so this is only recorded.
    pub linf_interpolation: Ratio,
}

pub fn qualitative_sample(lp: &LittlewoodPaley, t: f64, u: &SpectralField, eps: f64) -> Result<QualitativeSample> {
    u.require_zero_mean()?;
    let n = u.grid().dim();
    let norms = BandNorms::compute(lp, u, Exponent::INFINITY, band_range(u.grid()));
    let inf = Exponent::INFINITY;
    let b_half = norms.besov(-0.5, inf);
    let b_low = norms.besov(-0.5 * n as f64, inf);
    let b_eps = norms.besov(eps - 1.0, inf);
    let b_zero = norms.besov(0.0, Exponent::ONE);
    let linf = u.lp_norm(inf);
    let lam = lambda(n, eps);
    let lam2 = lambda_linf(n, eps);
    let linf_interpolation = if lam2 > 0.0 {
        Ratio::of(b_zero, b_low.powf(lam2) * b_eps.powf(1.0 - lam2))
    } else {
        Ratio::skipped("weight vanishes at eps = 1")
    };
    Ok(QualitativeSample {
        t,
        b_half,
        b_low,
        b_eps,
        b_zero,
        linf,
        interpolation: Slack::new(b_half, b_low.powf(lam) * b_eps.powf(1.0 - lam)),
        linf_embedding: Slack::new(linf, b_zero),
        linf_interpolation,
    })
}

/// One sample per `(t, u)`.
pub fn qualitative_blowup_monitor(
    lp: &LittlewoodPaley,
    series: &[(f64, SpectralField)],
    eps: f64,
) -> Result<Vec<QualitativeSample>> {
    series.iter().map(|(t, u)| qualitative_sample(lp, *t, u, eps)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::default_lp;
    use crate::ns::taylor_green;
    use crate::GridSpec;

    #[test]
    fn zero_field() {
        let g = GridSpec::periodic_2pi(3, 8).unwrap();
        let s = qualitative_sample(default_lp(), 0.0, &SpectralField::zeros(g, 3), 1.5).unwrap();
        assert_eq!(s.b_half, 0.0);
        assert!(s.interpolation.holds(0.0));
        assert!(s.linf_interpolation.is_skipped());
    }

    #[test]
    fn taylor_green_slacks() {
        let g = GridSpec::periodic_2pi(3, 16).unwrap();
        let series: Vec<_> = (0..4).map(|k| (k as f64 * 0.25, taylor_green(&g, k as f64 * 0.25))).collect();
        for s in qualitative_blowup_monitor(default_lp(), &series, 1.25).unwrap() {
            assert!(s.interpolation.holds(1e-10));
            assert!(s.linf_embedding.holds(1e-10));
        }
    }
}
