//! Library results against direct computations on small grids.

mod common;

use std::f64::consts::PI;

use besov_ns::besov::{besov_norm_full, BesovParams};
use besov_ns::blowup::{ode_lower_bound, select_indices};
use besov_ns::corpus::{random_field, FieldSpec};
use besov_ns::ns::taylor_green;
use besov_ns::{band_range, default_lp, Exponent, GridSpec, SpectralField};
use num_complex::Complex64;

fn field(size: usize, seed: u64) -> SpectralField {
    let g = GridSpec::periodic_2pi(3, size).unwrap();
    random_field(&g, &FieldSpec::dealias_safe(&g), seed).unwrap()
}

/// Grid samples by direct summation of the Fourier series.
fn naive_samples(u: &SpectralField) -> Vec<f64> {
    let g = u.grid();
    let m = g.num_points();
    let unit = 2.0 * PI / g.length();
    let active: Vec<(Vec<i64>, Complex64)> = (0..m)
        .filter(|&i| u.coeffs()[i].norm() > 0.0)
        .map(|i| (common::modes(g, i), u.coeffs()[i]))
        .collect();
    (0..m)
        .map(|idx| {
            let x = common::point(g, idx);
            active
                .iter()
                .map(|(k, c)| {
                    let phase: f64 = k.iter().zip(&x).map(|(&ki, xi)| ki as f64 * unit * xi).sum();
                    (c * Complex64::from_polar(1.0, phase)).re
                })
                .sum()
        })
        .collect()
}

#[test]
fn band_projection_matches_direct_multiplier() {
    let u = field(16, 3);
    let g = *u.grid();
    let profile = default_lp().profile();
    for j in band_range(&g).iter() {
        let d = default_lp().delta_proj(j, &u);
        for idx in 0..g.num_points() {
            let r = common::wavenumber(&g, idx);
            let x = r * 2f64.powi(-j);
            let phi = if idx == 0 { 0.0 } else { profile.chi(x / 2.0) - profile.chi(x) };
            let want = u.coeffs()[idx] * phi;
            assert!((d.coeffs()[idx] - want).norm() <= 1e-15 * (1.0 + want.norm()), "j={j} idx={idx}");
        }
    }
}

#[test]
fn lebesgue_norms_match_quadrature_of_the_series() {
    let u = field(8, 11);
    let vals = naive_samples(&u);
    let cell = common::cell(u.grid());
    for p in [1.0, 2.0, 3.0, 4.0] {
        let want = (vals.iter().map(|v| v.abs().powf(p)).sum::<f64>() * cell).powf(1.0 / p);
        let got = u.lp_norm(Exponent::new(p).unwrap());
        assert!((got / want - 1.0).abs() < 1e-12, "p={p}: {got} vs {want}");
    }
    let want = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    assert!((u.lp_norm(Exponent::INFINITY) / want - 1.0).abs() < 1e-12);
}

#[test]
fn besov_two_two_is_a_weighted_parseval_sum() {
    let u = field(16, 5);
    let g = *u.grid();
    let profile = default_lp().profile();
    for s in [-1.0, 0.0, 0.5, 1.5] {
        let mut sum = 0.0;
        for j in band_range(&g).iter() {
            let mut band = 0.0;
            for idx in 1..g.num_points() {
                let x = common::wavenumber(&g, idx) * 2f64.powi(-j);
                let phi = profile.chi(x / 2.0) - profile.chi(x);
                band += phi * phi * u.coeffs()[idx].norm_sqr();
            }
            sum += 4f64.powf(j as f64 * s) * band * g.volume();
        }
        let got = besov_norm_full(default_lp(), &u, BesovParams::new(s, Exponent::TWO, Exponent::TWO)).unwrap();
        assert!((got / sum.sqrt() - 1.0).abs() < 1e-12, "s={s}");
        let h = common::sobolev(&u, s);
        let (lo, hi) = common::sobolev_envelope(profile, &u, (band_range(&g).j_min, band_range(&g).j_max), s);
        assert!(got >= lo * h * (1.0 - 1e-12) && got <= hi * h * (1.0 + 1e-12));
    }
}

#[test]
fn taylor_green_matches_closed_form() {
    let g = GridSpec::periodic_2pi(3, 16).unwrap();
    for t in [0.0, 0.3, 1.0] {
        let err = common::l2_error(&taylor_green(&g, t).to_physical(), |x, c| common::taylor_green_at(x, t, c));
        assert!(err < 1e-13, "t={t}: {err}");
    }
}

#[test]
fn index_selection_worked_example() {
    // n = 3, eps = 1, r = 2: I = (2, 3), midpoint 5/2, so r1 = 12/5,
    // nu = 3 (5/12 - 1/6) = 3/4 and mu = 2 - 2 nu = 1/2.
    let sel = select_indices(3, 1.0, 2.0).unwrap();
    let chain = sel.chain.unwrap();
    assert!((chain.x - 2.5).abs() < 1e-15);
    assert!((chain.r1 - 2.4).abs() < 1e-14);
    assert!((chain.nu - 0.75).abs() < 1e-14);
    assert!((chain.mu - 0.5).abs() < 1e-14);
    assert!((sel.lambda - 1.0 / 3.0).abs() < 1e-15);
    assert!(select_indices(3, 1.5, 6.0).is_err());
}

#[test]
fn ode_bound_closed_form() {
    for (gamma, c) in [(0.5, 1.0), (1.0, 2.0), (2.0, 0.25)] {
        for t in [0.0, 0.5, 0.99] {
            let got = ode_lower_bound(gamma, c, 1.0, t).unwrap();
            let want = common::ode_bound(gamma, c, 1.0, t);
            assert!((got / want - 1.0).abs() < 1e-14);
        }
    }
}
