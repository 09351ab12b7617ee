//! Bony's decomposition `uv = T_u v + T_v u + R(u, v)` and monitors for the
//! paraproduct and remainder estimates.
//!
//! Products are accumulated on the grid band by band and transformed once,
//! then 2/3-dealiased like every other product in the crate.

use crate::besov::{lq_norm, BandNorms};
use crate::check::Ratio;
use crate::error::{Error, Result};
use crate::lp::{band_range, BandPieces, BandRange, LittlewoodPaley};
use crate::spectral::{Exponent, GridSpec, PhysicalField, SpectralField};

pub(crate) fn accumulate(acc: &mut [f64], a: &PhysicalField, b: &PhysicalField) {
    for ((o, x), y) in acc.iter_mut().zip(a.values()).zip(b.values()) {
        *o += x * y;
    }
}

pub(crate) fn finish(grid: GridSpec, acc: Vec<f64>) -> SpectralField {
    let phys = PhysicalField::from_values(grid, 1, acc).expect("accumulator has one component");
    phys.into_spectral_dealiased().expect("consistent sizes")
}

/// Physical product followed by 2/3-rule dealiasing. Fields must share a
/// grid and either have equal component counts (componentwise product) or
/// one of them must be scalar.
pub fn pointwise_product(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    if !u.grid().same_as(v.grid()) {
        return Err(Error::GridMismatch);
    }
    let (cu, cv) = (u.components(), v.components());
    let comps = if cu == cv || cv == 1 {
        cu
    } else if cu == 1 {
        cv
    } else {
        return Err(Error::ComponentMismatch { expected: cu, found: cv });
    };
    let (pu, pv) = (u.to_physical(), v.to_physical());
    let m = u.grid().num_points();
    let mut values = Vec::with_capacity(comps * m);
    for c in 0..comps {
        let a = pu.component(if cu == 1 { 0 } else { c });
        let b = pv.component(if cv == 1 { 0 } else { c });
        values.extend(a.iter().zip(b).map(|(x, y)| x * y));
    }
    PhysicalField::from_values(*u.grid(), comps, values)?.into_spectral_dealiased()
}

pub(crate) fn accumulator(grid: &GridSpec) -> Vec<f64> {
    vec![0.0; grid.num_points()]
}

/// Adds `sum_{j in window} S_{j-1} a  Delta_j b` on the grid.
pub(crate) fn add_paraproduct(acc: &mut [f64], a: &BandPieces<'_>, b: &BandPieces<'_>, window: Option<BandRange>) {
    let bands = window.unwrap_or_else(|| a.bands());
    for j in bands.iter() {
        if let (Some(low), Some(band)) = (a.low(j), b.delta(j)) {
            accumulate(acc, low, band);
        }
    }
}

/// Adds `sum_{j in window} Delta_j a (Delta_{j-1} + Delta_j + Delta_{j+1}) b` on the grid.
pub(crate) fn add_remainder(acc: &mut [f64], a: &BandPieces<'_>, b: &BandPieces<'_>, window: Option<BandRange>) {
    let bands = window.unwrap_or_else(|| a.bands());
    for j in bands.iter() {
        if let (Some(x), Some(y)) = (a.delta(j), b.wide(j)) {
            accumulate(acc, x, y);
        }
    }
}

/// `sum_{j in window} S_{j-1} a  Delta_j b` for cached scalar pieces.
pub fn paraproduct_pieces(a: &BandPieces<'_>, b: &BandPieces<'_>, window: Option<BandRange>) -> SpectralField {
    let grid = *a.field().grid();
    let mut acc = accumulator(&grid);
    add_paraproduct(&mut acc, a, b, window);
    finish(grid, acc)
}

/// `sum_{j in window} Delta_j a (Delta_{j-1} + Delta_j + Delta_{j+1}) b`.
pub fn remainder_pieces(a: &BandPieces<'_>, b: &BandPieces<'_>, window: Option<BandRange>) -> SpectralField {
    let grid = *a.field().grid();
    let mut acc = accumulator(&grid);
    add_remainder(&mut acc, a, b, window);
    finish(grid, acc)
}

fn check_scalar_pair(u: &SpectralField, v: &SpectralField) -> Result<()> {
    if !u.grid().same_as(v.grid()) {
        return Err(Error::GridMismatch);
    }
    for f in [u, v] {
        if f.components() != 1 {
            return Err(Error::ComponentMismatch {
                expected: 1,
                found: f.components(),
            });
        }
    }
    Ok(())
}

/// `T_u v = sum_j S_{j-1} u  Delta_j v` for scalar fields.
pub fn paraproduct(lp: &LittlewoodPaley, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    check_scalar_pair(u, v)?;
    Ok(paraproduct_pieces(&lp.pieces(u.clone()), &lp.pieces(v.clone()), None))
}

/// `R(u, v) = sum_j sum_{|nu| <= 1} Delta_j u  Delta_{j-nu} v` for scalar fields.
pub fn remainder(lp: &LittlewoodPaley, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    check_scalar_pair(u, v)?;
    Ok(remainder_pieces(&lp.pieces(u.clone()), &lp.pieces(v.clone()), None))
}

/// The three Bony pieces of `uv` together with the dealiased product.
#[derive(Clone, Debug)]
pub struct BonyPieces {
    pub tuv: SpectralField,
    pub tvu: SpectralField,
    pub ruv: SpectralField,
    pub product: SpectralField,
}

impl BonyPieces {
    pub fn sum(&self) -> SpectralField {
        let mut s = self.tuv.clone();
        s += &self.tvu;
        s += &self.ruv;
        s
    }

    /// `||T_u v + T_v u + R(u, v) - uv||_2 / ||uv||_2`.
    pub fn identity_defect(&self) -> f64 {
        let norm = self.product.lp_norm(Exponent::TWO);
        let d = self.sum().l2_distance(&self.product);
        if norm == 0.0 {
            d
        } else {
            d / norm
        }
    }
}

pub fn bony_decompose(lp: &LittlewoodPaley, u: &SpectralField, v: &SpectralField) -> Result<BonyPieces> {
    check_scalar_pair(u, v)?;
    let pu = lp.pieces(u.clone());
    let pv = lp.pieces(v.clone());
    Ok(BonyPieces {
        tuv: paraproduct_pieces(&pu, &pv, None),
        tvu: paraproduct_pieces(&pv, &pu, None),
        ruv: remainder_pieces(&pu, &pv, None),
        product: pointwise_product(u, v)?,
    })
}

/// Exponent triple split `s = s1 + s2`, `1/p = 1/p1 + 1/p2`, `1/q = 1/q1 + 1/q2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductExponents {
    pub s1: f64,
    pub s2: f64,
    pub p1: Exponent,
    pub p2: Exponent,
    pub q1: Exponent,
    pub q2: Exponent,
}

impl ProductExponents {
    pub fn new(s1: f64, s2: f64, p1: Exponent, p2: Exponent, q1: Exponent, q2: Exponent) -> Result<Self> {
        let e = ProductExponents { s1, s2, p1, p2, q1, q2 };
        e.p()?;
        e.q()?;
        Ok(e)
    }

    pub fn s(&self) -> f64 {
        self.s1 + self.s2
    }

    pub fn p(&self) -> Result<Exponent> {
        Exponent::holder_sum(self.p1, self.p2)
            .map_err(|_| Error::param(format!("1/p1 + 1/p2 exceeds one for p1 = {}, p2 = {}", self.p1, self.p2)))
    }

    pub fn q(&self) -> Result<Exponent> {
        Exponent::holder_sum(self.q1, self.q2)
            .map_err(|_| Error::param(format!("1/q1 + 1/q2 exceeds one for q1 = {}, q2 = {}", self.q1, self.q2)))
    }
}

/// Paraproduct bounds: `||T_u v||_{B^s_{p,q}}` against
/// `||u||_{L^{p1}} ||v||_{B^s_{p2,q}}` and, for `s1 < 0`, against
/// `||u||_{B^{s1}_{p1,q1}} ||v||_{B^{s2}_{p2,q2}} / (-s1)`.
#[derive(Clone, Debug)]
pub struct ParaproductRatios {
    pub lebesgue: Ratio,
    pub negative: Ratio,
}

/// Remainder bounds: `||R(u,v)||_{B^s_{p,q}}` against the product of norms
/// over `s` (for `s > 0`), and `||R(u,v)||_{B^s_{p,inf}}` against the product
/// of norms (for `q = 1`, `s >= 0`).
#[derive(Clone, Debug)]
pub struct RemainderRatios {
    pub positive: Ratio,
    pub endpoint: Ratio,
}

fn norms_for(lp: &LittlewoodPaley, f: &SpectralField, p: Exponent) -> BandNorms {
    BandNorms::compute(lp, f, p, band_range(f.grid()))
}

pub fn monitor_paraproduct_estimates(
    lp: &LittlewoodPaley,
    u: &SpectralField,
    v: &SpectralField,
    e: &ProductExponents,
) -> Result<ParaproductRatios> {
    check_scalar_pair(u, v)?;
    let (p, q, s) = (e.p()?, e.q()?, e.s());
    if u.is_zero() || v.is_zero() {
        let why = "zero input";
        return Ok(ParaproductRatios {
            lebesgue: Ratio::skipped(why),
            negative: Ratio::skipped(why),
        });
    }
    let t = paraproduct(lp, u, v)?.without_mean();
    let lhs = norms_for(lp, &t, p).besov(s, q);
    let v_p2 = norms_for(lp, v, e.p2);
    let lebesgue = Ratio::of(lhs, u.lp_norm(e.p1) * v_p2.besov(s, q));
    let negative = if e.s1 < 0.0 {
        let rhs = norms_for(lp, u, e.p1).besov(e.s1, e.q1) * v_p2.besov(e.s2, e.q2) / (-e.s1);
        Ratio::of(lhs, rhs)
    } else {
        Ratio::skipped("requires s1 < 0")
    };
    Ok(ParaproductRatios { lebesgue, negative })
}

pub fn monitor_remainder_estimates(
    lp: &LittlewoodPaley,
    u: &SpectralField,
    v: &SpectralField,
    e: &ProductExponents,
) -> Result<RemainderRatios> {
    check_scalar_pair(u, v)?;
    let (p, q, s) = (e.p()?, e.q()?, e.s());
    let r = remainder(lp, u, v)?.without_mean();
    let rn = norms_for(lp, &r, p);
    let rhs = norms_for(lp, u, e.p1).besov(e.s1, e.q1) * norms_for(lp, v, e.p2).besov(e.s2, e.q2);
    let positive = if s > 0.0 {
        Ratio::of(rn.besov(s, q), rhs / s)
    } else {
        Ratio::skipped("requires s > 0")
    };
    let endpoint = if q.get() == 1.0 && s >= 0.0 {
        Ratio::of(rn.besov(s, Exponent::INFINITY), rhs)
    } else {
        Ratio::skipped("requires q = 1 and s >= 0")
    };
    Ok(RemainderRatios { positive, endpoint })
}

/// `l^q` norm of `j -> 2^{js} ||X_j||_{L^p}` for a family indexed by band.
pub fn ladder_norm(pieces: &[(i32, f64)], s: f64, q: Exponent) -> f64 {
    lq_norm(pieces.iter().map(|&(j, v)| 2f64.powf(j as f64 * s) * v), q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{random_field, FieldSpec};
    use crate::lp::default_lp;

    fn grid() -> GridSpec {
        GridSpec::periodic_2pi(3, 32).unwrap()
    }

    #[test]
    fn cosine_squared() {
        let g = grid();
        let u = SpectralField::from_fn(g, 1, |x, _| x[0].cos());
        let expect = SpectralField::from_fn(g, 1, |x, _| 0.5 + 0.5 * (2.0 * x[0]).cos());
        assert!(pointwise_product(&u, &u).unwrap().l2_distance(&expect) < 1e-13);
    }

    #[test]
    fn product_with_one_is_dealiased_copy() {
        let g = grid();
        let one = SpectralField::from_fn(g, 1, |_, _| 1.0);
        let v = SpectralField::from_fn(g, 1, |x, _| (3.0 * x[1]).sin() + (14.0 * x[2]).cos());
        let got = pointwise_product(&one, &v).unwrap();
        assert!(got.l2_distance(&v.dealiased()) < 1e-12);
        // the |m| = 14 > 32/3 mode is removed
        assert!(got.coeff_at(0, &[0, 0, 14]).norm() < 1e-15);
    }

    #[test]
    fn bony_identity_random_pair() {
        let g = grid();
        let lp = default_lp();
        let spec = FieldSpec::dealias_safe(&g);
        let u = random_field(&g, &spec, 1).unwrap();
        let v = random_field(&g, &spec, 2).unwrap();
        let pieces = bony_decompose(lp, &u, &v).unwrap();
        assert!(pieces.identity_defect() < 1e-12, "{}", pieces.identity_defect());
        let r1 = remainder(lp, &u, &v).unwrap();
        let r2 = remainder(lp, &v, &u).unwrap();
        assert!(r1.l2_distance(&r2) <= 1e-13 * r1.lp_norm(Exponent::TWO));
    }

    #[test]
    fn exponent_arithmetic_is_checked() {
        let one = Exponent::ONE;
        assert!(ProductExponents::new(0.0, 0.0, one, one, Exponent::TWO, Exponent::TWO).is_err());
        let e = ProductExponents::new(0.5, 0.5, Exponent::new(4.0).unwrap(), Exponent::new(4.0).unwrap(), Exponent::TWO, Exponent::TWO)
            .unwrap();
        assert!((e.p().unwrap().get() - 2.0).abs() < 1e-14);
        assert_eq!(e.q().unwrap(), Exponent::ONE);
    }
}
