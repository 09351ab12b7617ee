//! The commutator `R_j = [v . grad, Delta_j] f`, its six-piece paraproduct
//! decomposition and the monitors for the associated Besov estimates.
//!
//! With summation over `k`:
//!
//! ```text
//! R1 = [T_{v_k}, Delta_j] d_k f        R2 = T_{d_k Delta_j f} v_k
//! R3 = -Delta_j T_{d_k f} v_k          R4 = R(v_k, d_k Delta_j f)
//! R5 = -d_k Delta_j R(v_k, f)          R6 = Delta_j R(d_k v_k, f)
//! ```
//!
//! Terms that `Delta_j` annihilates by frequency support are never formed:
//! paraproduct bands outside `|j' - j| <= 4` and remainder bands below `j - 3`.

use std::cell::OnceCell;

use crate::besov::{lq_norm, BandNorms};
use crate::bony::{accumulate, accumulator, add_paraproduct, add_remainder, finish, pointwise_product};
use crate::check::Ratio;
use crate::error::{Error, Result};
use crate::lp::{band_range, BandPieces, BandRange, LittlewoodPaley};
use crate::spectral::{Exponent, GridSpec, SpectralField};

pub use crate::bony::ProductExponents;

/// `R_j` and its six pieces. Multi-component `f` is handled componentwise.
#[derive(Clone, Debug)]
pub struct CommutatorPieces {
    pub j: i32,
    pub r: SpectralField,
    pub parts: [SpectralField; 6],
}

impl CommutatorPieces {
    pub fn sum(&self) -> SpectralField {
        let mut s = self.parts[0].clone();
        for p in &self.parts[1..] {
            s += p;
        }
        s
    }

    /// `||R - sum_i R^i||_2 / ||R||_2`, or the absolute defect when `R = 0`.
    pub fn identity_defect(&self) -> f64 {
        let d = self.sum().l2_distance(&self.r);
        let n = self.r.lp_norm(Exponent::TWO);
        if n == 0.0 {
            d
        } else {
            d / n
        }
    }

    /// Piece `R^i` for `i` in `1..=6`.
    pub fn part(&self, i: usize) -> &SpectralField {
        &self.parts[i - 1]
    }
}

fn check_pair(v: &SpectralField, f: &SpectralField) -> Result<()> {
    if !v.grid().same_as(f.grid()) {
        return Err(Error::GridMismatch);
    }
    let n = v.grid().dim();
    if v.components() != n {
        return Err(Error::ComponentMismatch {
            expected: n,
            found: v.components(),
        });
    }
    Ok(())
}

struct ScalarPieces<'a> {
    f: BandPieces<'a>,
    df: Vec<BandPieces<'a>>,
    shared: OnceCell<Shared>,
}

/// Terms of the decomposition that do not depend on `j`, per band `j'`,
/// transformed once and combined spectrally for each `j`.
struct Shared {
    /// `sum_k v_k d_k f`.
    inner: SpectralField,
    /// `sum_k S_{j'-1} v_k  Delta_j' d_k f`.
    para_f: Vec<Option<SpectralField>>,
    /// `sum_k S_{j'-1} d_k f  Delta_j' v_k`.
    para_v: Vec<Option<SpectralField>>,
    /// `sum_k d_k (Delta_j' v_k  wide_j' f)`.
    rem_v: Vec<Option<SpectralField>>,
    /// `Delta_j' div v  wide_j' f`.
    rem_div: Vec<Option<SpectralField>>,
}

fn finish_touched(grid: GridSpec, acc: Vec<f64>, touched: bool) -> Option<SpectralField> {
    touched.then(|| finish(grid, acc))
}

/// Band samples of `v`, `div v` and `f` shared by every `j`.
pub struct CommutatorWorkspace<'a> {
    lp: &'a LittlewoodPaley,
    grid: GridSpec,
    v: Vec<BandPieces<'a>>,
    div: Option<BandPieces<'a>>,
    f: Vec<ScalarPieces<'a>>,
}

impl<'a> CommutatorWorkspace<'a> {
    pub fn new(lp: &'a LittlewoodPaley, v: &SpectralField, f: &SpectralField) -> Result<Self> {
        check_pair(v, f)?;
        let grid = *v.grid();
        let n = grid.dim();
        let div = v.divergence()?;
        let div = if div.is_zero() { None } else { Some(lp.pieces(div)) };
        let f = (0..f.components())
            .map(|c| {
                let fc = f.component_field(c);
                ScalarPieces {
                    df: (0..n).map(|k| lp.pieces(fc.derivative(k))).collect(),
                    f: lp.pieces(fc),
                    shared: OnceCell::new(),
                }
            })
            .collect();
        Ok(CommutatorWorkspace {
            lp,
            grid,
            v: (0..n).map(|k| lp.pieces(v.component_field(k))).collect(),
            div,
            f,
        })
    }

    pub fn bands(&self) -> BandRange {
        band_range(&self.grid)
    }

    fn window(&self, lo: i32, hi: i32) -> Option<BandRange> {
        Some(self.bands().clip(lo, hi))
    }

    /// `R_j` alone.
    pub fn commutator(&self, j: i32) -> SpectralField {
        let parts: Vec<SpectralField> = self.f.iter().map(|s| self.scalar_commutator(j, s)).collect();
        SpectralField::stack(&parts).expect("components share a grid")
    }

    fn scalar_commutator(&self, j: i32, s: &ScalarPieces<'_>) -> SpectralField {
        let n = self.grid.dim();
        let (mut outer, mut inner) = (accumulator(&self.grid), accumulator(&self.grid));
        let band = self.lp.delta_proj(j, s.f.field());
        for k in 0..n {
            let Some(vk) = self.v[k].full() else { continue };
            let dband = band.derivative(k);
            if !dband.is_zero() {
                accumulate(&mut outer, vk, &dband.to_physical());
            }
            if let Some(dk) = s.df[k].full() {
                accumulate(&mut inner, vk, dk);
            }
        }
        let mut r = finish(self.grid, outer);
        r -= &self.lp.delta_proj(j, &finish(self.grid, inner));
        r
    }

    fn shared<'s>(&self, s: &'s ScalarPieces<'_>) -> &'s Shared {
        s.shared.get_or_init(|| {
            let grid = self.grid;
            let n = grid.dim();
            let mut inner = accumulator(&grid);
            for k in 0..n {
                if let (Some(vk), Some(dk)) = (self.v[k].full(), s.df[k].full()) {
                    accumulate(&mut inner, vk, dk);
                }
            }
            let bands = self.bands();
            let (mut para_f, mut para_v, mut rem_v, mut rem_div) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
            for j in bands.iter() {
                let (mut pf, mut pv) = (accumulator(&grid), accumulator(&grid));
                let (mut tf, mut tv) = (false, false);
                let mut rv: Option<SpectralField> = None;
                for k in 0..n {
                    let vk = &self.v[k];
                    if let (Some(low), Some(d)) = (vk.low(j), s.df[k].delta(j)) {
                        accumulate(&mut pf, low, d);
                        tf = true;
                    }
                    if let (Some(low), Some(d)) = (s.df[k].low(j), vk.delta(j)) {
                        accumulate(&mut pv, low, d);
                        tv = true;
                    }
                    if let (Some(d), Some(w)) = (vk.delta(j), s.f.wide(j)) {
                        let mut acc = accumulator(&grid);
                        accumulate(&mut acc, d, w);
                        let term = finish(grid, acc).derivative(k);
                        match rv.as_mut() {
                            Some(r) => *r += &term,
                            None => rv = Some(term),
                        }
                    }
                }
                para_f.push(finish_touched(grid, pf, tf));
                para_v.push(finish_touched(grid, pv, tv));
                rem_v.push(rv);
                let rd = match &self.div {
                    Some(div) => match (div.delta(j), s.f.wide(j)) {
                        (Some(d), Some(w)) => {
                            let mut acc = accumulator(&grid);
                            accumulate(&mut acc, d, w);
                            Some(finish(grid, acc))
                        }
                        _ => None,
                    },
                    None => None,
                };
                rem_div.push(rd);
            }
            Shared {
                inner: finish(grid, inner),
                para_f,
                para_v,
                rem_v,
                rem_div,
            }
        })
    }

    /// `scale * Delta_j` of the sum of `terms` over the bands of `window`.
    fn windowed(&self, j: i32, terms: &[Option<SpectralField>], window: Option<BandRange>, scale: f64) -> SpectralField {
        let bands = self.bands();
        let picked: Vec<&SpectralField> = window
            .into_iter()
            .flat_map(|w| w.iter())
            .filter_map(|i| terms[(i - bands.j_min) as usize].as_ref())
            .collect();
        self.lp.delta_proj_sum(j, &self.grid, &picked, scale)
    }

    /// `R_j` together with its six pieces.
    pub fn decompose(&self, j: i32) -> CommutatorPieces {
        let per: Vec<CommutatorPieces> = self.f.iter().map(|s| self.scalar_decompose(j, s)).collect();
        if per.len() == 1 {
            return per.into_iter().next().unwrap();
        }
        let stack = |f: &dyn Fn(&CommutatorPieces) -> &SpectralField| {
            SpectralField::stack(&per.iter().map(|p| f(p).clone()).collect::<Vec<_>>()).expect("components share a grid")
        };
        CommutatorPieces {
            j,
            r: stack(&|p| &p.r),
            parts: std::array::from_fn(|i| stack(&|p: &CommutatorPieces| &p.parts[i])),
        }
    }

    fn scalar_decompose(&self, j: i32, s: &ScalarPieces<'_>) -> CommutatorPieces {
        let grid = self.grid;
        let n = grid.dim();
        let lp = self.lp;
        let shared = self.shared(s);
        let near = self.window(j - 4, j + 4);
        let above = self.window(j - 3, i32::MAX);
        let band = lp.delta_proj(j, s.f.field());

        let mut r = lp.delta_proj_sum(j, &grid, &[&shared.inner], -1.0);
        let mut r1 = self.windowed(j, &shared.para_f, near, -1.0);
        let mut r2 = SpectralField::zeros(grid, 1);
        let r3 = self.windowed(j, &shared.para_v, near, -1.0);
        let mut r4 = SpectralField::zeros(grid, 1);
        let r5 = self.windowed(j, &shared.rem_v, above, -1.0);
        let r6 = self.windowed(j, &shared.rem_div, above, 1.0);
        if !band.is_zero() {
            let dband: Vec<BandPieces<'_>> = (0..n).map(|k| lp.pieces(band.derivative(k))).collect();
            let mut r_outer = accumulator(&grid);
            let mut t1a = accumulator(&grid);
            let mut t2 = accumulator(&grid);
            let mut t4 = accumulator(&grid);
            for (vk, dk) in self.v.iter().zip(&dband) {
                let Some(vfull) = vk.full() else { continue };
                // d_k Delta_j f lives in the three bands around j
                for i in self.bands().clip(j - 1, j + 1).iter() {
                    if let Some(d) = dk.delta(i) {
                        accumulate(&mut r_outer, vfull, d);
                    }
                }
                add_paraproduct(&mut t1a, vk, dk, None);
                add_paraproduct(&mut t2, dk, vk, None);
                add_remainder(&mut t4, vk, dk, None);
            }
            r += &finish(grid, r_outer);
            r1 += &finish(grid, t1a);
            r2 = finish(grid, t2);
            r4 = finish(grid, t4);
        }
        CommutatorPieces {
            j,
            r,
            parts: [r1, r2, r3, r4, r5, r6],
        }
    }
}

/// `[v . grad, Delta_j] f` with every product dealiased.
pub fn commutator(lp: &LittlewoodPaley, j: i32, v: &SpectralField, f: &SpectralField) -> Result<SpectralField> {
    Ok(CommutatorWorkspace::new(lp, v, f)?.commutator(j))
}

pub fn decompose_commutator(lp: &LittlewoodPaley, j: i32, v: &SpectralField, f: &SpectralField) -> Result<CommutatorPieces> {
    Ok(CommutatorWorkspace::new(lp, v, f)?.decompose(j))
}

/// The seven commutator estimates and the kernel bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EstimateId {
    R1a,
    R1b,
    R2,
    R3,
    R4,
    R5,
    R6,
    KernelBound,
}

impl EstimateId {
    pub const COMMUTATOR: [EstimateId; 7] = [
        EstimateId::R1a,
        EstimateId::R1b,
        EstimateId::R2,
        EstimateId::R3,
        EstimateId::R4,
        EstimateId::R5,
        EstimateId::R6,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            EstimateId::R1a => "R1a",
            EstimateId::R1b => "R1b",
            EstimateId::R2 => "R2",
            EstimateId::R3 => "R3",
            EstimateId::R4 => "R4",
            EstimateId::R5 => "R5",
            EstimateId::R6 => "R6",
            EstimateId::KernelBound => "kernel-bound",
        }
    }

    /// Index of the piece the estimate bounds.
    pub fn piece(&self) -> Option<usize> {
        match self {
            EstimateId::R1a | EstimateId::R1b => Some(1),
            EstimateId::R2 => Some(2),
            EstimateId::R3 => Some(3),
            EstimateId::R4 => Some(4),
            EstimateId::R5 => Some(5),
            EstimateId::R6 => Some(6),
            EstimateId::KernelBound => None,
        }
    }

    /// Reason the estimate does not apply to `e`, if any.
    pub fn side_condition(&self, e: &ProductExponents) -> Option<&'static str> {
        let s = e.s();
        match self {
            EstimateId::R1b if e.s1 >= 0.0 => Some("requires s1 < 0"),
            EstimateId::R2 if e.s1 <= -1.0 => Some("requires s1 > -1"),
            EstimateId::R3 if e.s2 >= 1.0 => Some("requires s2 < 1"),
            EstimateId::R5 if s <= -1.0 => Some("requires s > -1"),
            EstimateId::R6 if s <= 0.0 => Some("requires s > 0"),
            _ => None,
        }
    }
}

impl std::fmt::Display for EstimateId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Ratios for every commutator estimate, in [`EstimateId::COMMUTATOR`] order.
#[derive(Clone, Debug)]
pub struct CommutatorRatios {
    pub entries: Vec<(EstimateId, Ratio)>,
    /// `j -> ||R_j^i||_{L^p}` for `i = 1..=6`.
    pub band_norms: Vec<(i32, [f64; 6])>,
}

impl CommutatorRatios {
    pub fn get(&self, id: EstimateId) -> Option<&Ratio> {
        self.entries.iter().find(|(i, _)| *i == id).map(|(_, r)| r)
    }
}

pub fn monitor_commutator_estimates(
    lp: &LittlewoodPaley,
    v: &SpectralField,
    f: &SpectralField,
    e: &ProductExponents,
) -> Result<CommutatorRatios> {
    let (p, q, s) = (e.p()?, e.q()?, e.s());
    let ws = CommutatorWorkspace::new(lp, v, f)?;
    v.require_zero_mean()?;
    f.require_zero_mean()?;
    let bands = ws.bands();
    let band_norms: Vec<(i32, [f64; 6])> = bands
        .iter()
        .map(|j| {
            let pieces = ws.decompose(j);
            (j, std::array::from_fn(|i| pieces.parts[i].lp_norm(p)))
        })
        .collect();
    let lhs = |i: usize| lq_norm(band_norms.iter().map(|(j, v)| 2f64.powf(*j as f64 * s) * v[i - 1]), q);

    let grad = v.gradient();
    let grad_lebesgue = grad.lp_norm(e.p1);
    let grad_besov = BandNorms::compute(lp, &grad, e.p1, bands).besov(e.s1, e.q1);
    let f_p2 = BandNorms::compute(lp, f, e.p2, bands);
    let split = grad_besov * f_p2.besov(e.s2, e.q2);

    let entries = EstimateId::COMMUTATOR
        .iter()
        .map(|&id| {
            let ratio = match id.side_condition(e) {
                Some(why) => Ratio::skipped(why),
                None => {
                    let rhs = match id {
                        EstimateId::R1a => grad_lebesgue * f_p2.besov(s, q),
                        _ => split,
                    };
                    Ratio::of(lhs(id.piece().unwrap()), rhs)
                }
            };
            (id, ratio)
        })
        .collect();
    Ok(CommutatorRatios { entries, band_norms })
}

/// `||[Delta_j, a] b||_{L^{pq/(p+q)}} / (2^{-j} ||grad a||_{L^p} ||b||_{L^q})`.
pub fn verify_commutator_kernel_bound(
    lp: &LittlewoodPaley,
    a: &SpectralField,
    b: &SpectralField,
    j: i32,
    p: Exponent,
    q: Exponent,
) -> Result<Ratio> {
    if a.components() != 1 {
        return Err(Error::ComponentMismatch {
            expected: 1,
            found: a.components(),
        });
    }
    let r = Exponent::holder_sum(p, q)?;
    let mut c = lp.delta_proj(j, &pointwise_product(a, b)?);
    c -= &pointwise_product(a, &lp.delta_proj(j, b))?;
    let rhs = 2f64.powi(-j) * a.gradient().lp_norm(p) * b.lp_norm(q);
    Ok(Ratio::of(c.lp_norm(r), rhs))
}
