//! Dyadic projections `S_j = chi(2^{-j} D)` and `Delta_j = phi(2^{-j} D)`.

use std::cell::OnceCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use once_cell::sync::Lazy;

use crate::check::Ratio;
use crate::cutoff::{build_cutoffs, CutoffProfile, ANNULUS_INNER, ANNULUS_OUTER};
use crate::spectral::{Exponent, GridSpec, PhysicalField, SpectralField};

/// Inclusive range of dyadic indices whose annulus meets the grid's
/// nonzero wavenumbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BandRange {
    pub j_min: i32,
    pub j_max: i32,
}

impl BandRange {
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = i32> + Clone {
        self.j_min..=self.j_max
    }

    pub fn contains(&self, j: i32) -> bool {
        (self.j_min..=self.j_max).contains(&j)
    }

    pub fn len(&self) -> usize {
        (self.j_max - self.j_min + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Intersection with `[lo, hi]`.
    pub fn clip(&self, lo: i32, hi: i32) -> BandRange {
        BandRange {
            j_min: self.j_min.max(lo),
            j_max: self.j_max.min(hi),
        }
    }
}

/// Every `j` with `(3/4, 8/3) 2^j` meeting `[2 pi / L, sqrt(n) pi N / L]`.
pub fn band_range(grid: &GridSpec) -> BandRange {
    let kmin = grid.min_wavenumber();
    let kmax = grid.max_wavenumber();
    // smallest j with 2^j 8/3 > kmin, largest with 2^j 3/4 < kmax
    let mut j_min = (kmin / ANNULUS_OUTER).log2().floor() as i32 - 1;
    while 2f64.powi(j_min) * ANNULUS_OUTER <= kmin {
        j_min += 1;
    }
    let mut j_max = (kmax / ANNULUS_INNER).log2().ceil() as i32 + 1;
    while 2f64.powi(j_max) * ANNULUS_INNER >= kmax {
        j_max -= 1;
    }
    BandRange { j_min, j_max }
}

/// False when the annulus of band `j` reaches past the largest ball of
/// wavenumbers the grid represents in every direction.
pub fn band_is_fully_resolved(grid: &GridSpec, j: i32) -> bool {
    2f64.powi(j) * ANNULUS_OUTER <= grid.nyquist_radius()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Kind {
    Low,
    Band,
    /// `Delta_{j-1} + Delta_j + Delta_{j+1}`.
    Wide,
}

type Key = (usize, usize, u64, i32, Kind);

/// A real Fourier multiplier stored only where it is nonzero.
#[derive(Debug)]
pub struct SparseMultiplier {
    entries: Vec<(u32, f64)>,
}

impl SparseMultiplier {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn apply(&self, u: &SpectralField) -> SpectralField {
        let m = u.grid().num_points();
        let mut out = SpectralField::zeros(*u.grid(), u.components());
        for c in 0..u.components() {
            let src = &u.coeffs()[c * m..(c + 1) * m];
            let dst = out.component_mut(c);
            for &(idx, val) in &self.entries {
                dst[idx as usize] = src[idx as usize] * val;
            }
        }
        out
    }
}

/// Cutoff profile plus a per-`(grid, j)` cache of its multipliers.
#[derive(Debug)]
pub struct LittlewoodPaley {
    profile: CutoffProfile,
    cache: RwLock<HashMap<Key, Arc<SparseMultiplier>>>,
}

static DEFAULT: Lazy<LittlewoodPaley> = Lazy::new(|| LittlewoodPaley::new(build_cutoffs(1.0)));

/// Shared instance built from the default cutoff profile.
pub fn default_lp() -> &'static LittlewoodPaley {
    &DEFAULT
}

impl LittlewoodPaley {
    pub fn new(profile: CutoffProfile) -> Self {
        LittlewoodPaley {
            profile,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn profile(&self) -> &CutoffProfile {
        &self.profile
    }

    fn multiplier(&self, grid: &GridSpec, j: i32, kind: Kind) -> Arc<SparseMultiplier> {
        let key = (grid.dim(), grid.size(), grid.length().to_bits(), j, kind);
        if let Some(m) = self.cache.read().expect("multiplier cache poisoned").get(&key) {
            return m.clone();
        }
        let built = Arc::new(self.build(grid, j, kind));
        self.cache
            .write()
            .expect("multiplier cache poisoned")
            .entry(key)
            .or_insert(built)
            .clone()
    }

    fn build(&self, grid: &GridSpec, j: i32, kind: Kind) -> SparseMultiplier {
        let p = &self.profile;
        let mut entries = Vec::new();
        for idx in 0..grid.num_points() {
            let r = grid.magnitude(idx);
            let v = match kind {
                Kind::Low => p.chi_scaled(j, r),
                Kind::Band => {
                    if idx == 0 {
                        0.0
                    } else {
                        p.phi_scaled(j, r)
                    }
                }
                Kind::Wide => {
                    if idx == 0 {
                        0.0
                    } else {
                        p.phi_scaled(j - 1, r) + p.phi_scaled(j, r) + p.phi_scaled(j + 1, r)
                    }
                }
            };
            if v != 0.0 {
                entries.push((idx as u32, v));
            }
        }
        SparseMultiplier { entries }
    }

    pub fn low_multiplier(&self, grid: &GridSpec, j: i32) -> Arc<SparseMultiplier> {
        self.multiplier(grid, j, Kind::Low)
    }

    pub fn band_multiplier(&self, grid: &GridSpec, j: i32) -> Arc<SparseMultiplier> {
        self.multiplier(grid, j, Kind::Band)
    }

    /// `S_j u = chi(2^{-j} D) u`.
    pub fn s_proj(&self, j: i32, u: &SpectralField) -> SpectralField {
        self.multiplier(u.grid(), j, Kind::Low).apply(u)
    }

    /// `Delta_j u = phi(2^{-j} D) u`.
    pub fn delta_proj(&self, j: i32, u: &SpectralField) -> SpectralField {
        self.multiplier(u.grid(), j, Kind::Band).apply(u)
    }

    /// `scale * Delta_j (sum_i u_i)`, touching only the band's modes.
    pub fn delta_proj_sum(&self, j: i32, grid: &GridSpec, terms: &[&SpectralField], scale: f64) -> SpectralField {
        let mult = self.multiplier(grid, j, Kind::Band);
        let components = terms.first().map_or(1, |t| t.components());
        let m = grid.num_points();
        let mut out = SpectralField::zeros(*grid, components);
        for c in 0..components {
            let dst = out.component_mut(c);
            for &(idx, val) in mult.entries() {
                let idx = idx as usize;
                let mut acc = Complex64::new(0.0, 0.0);
                for t in terms {
                    acc += t.coeffs()[c * m + idx];
                }
                dst[idx] = acc * (val * scale);
            }
        }
        out
    }

    /// `(Delta_{j-1} + Delta_j + Delta_{j+1}) u`.
    pub fn delta_wide(&self, j: i32, u: &SpectralField) -> SpectralField {
        self.multiplier(u.grid(), j, Kind::Wide).apply(u)
    }

    /// Physical-space band pieces of `u`, computed on demand.
    pub fn pieces(&self, u: SpectralField) -> BandPieces<'_> {
        BandPieces::new(self, u)
    }
}

pub fn s_proj(j: i32, u: &SpectralField) -> SpectralField {
    default_lp().s_proj(j, u)
}

pub fn delta_proj(j: i32, u: &SpectralField) -> SpectralField {
    default_lp().delta_proj(j, u)
}

/// Lazily evaluated grid samples of `Delta_j u`, `S_{j-1} u` and the widened
/// band of a fixed field. Pieces that vanish identically are recorded as
/// `None` so products with them can be skipped.
pub struct BandPieces<'a> {
    lp: &'a LittlewoodPaley,
    field: SpectralField,
    bands: BandRange,
    delta: Vec<OnceCell<Option<PhysicalField>>>,
    low: Vec<OnceCell<Option<Rc<PhysicalField>>>>,
    full: OnceCell<Option<Rc<PhysicalField>>>,
    wide: Vec<OnceCell<Option<PhysicalField>>>,
    support: OnceCell<Option<(f64, f64)>>,
}

impl<'a> BandPieces<'a> {
    pub fn new(lp: &'a LittlewoodPaley, field: SpectralField) -> Self {
        let bands = band_range(field.grid());
        let n = bands.len();
        BandPieces {
            lp,
            field,
            bands,
            delta: (0..n).map(|_| OnceCell::new()).collect(),
            low: (0..n).map(|_| OnceCell::new()).collect(),
            full: OnceCell::new(),
            wide: (0..n).map(|_| OnceCell::new()).collect(),
            support: OnceCell::new(),
        }
    }

    /// Smallest and largest `|k|` carrying a nonzero coefficient.
    fn support(&self) -> Option<(f64, f64)> {
        *self.support.get_or_init(|| {
            let grid = self.field.grid();
            let m = grid.num_points();
            let c = self.field.components();
            let coeffs = self.field.coeffs();
            let mut out: Option<(f64, f64)> = None;
            for idx in 0..m {
                if (0..c).all(|k| coeffs[k * m + idx] == Complex64::new(0.0, 0.0)) {
                    continue;
                }
                let r = grid.magnitude(idx);
                out = Some(out.map_or((r, r), |(lo, hi)| (lo.min(r), hi.max(r))));
            }
            out
        })
    }

    /// False when `Delta_j` annihilates the field by support.
    fn band_meets(&self, j: i32) -> bool {
        let scale = 2f64.powi(j);
        match self.support() {
            Some((lo, hi)) => hi > ANNULUS_INNER * scale && lo < ANNULUS_OUTER * scale,
            None => false,
        }
    }

    pub fn field(&self) -> &SpectralField {
        &self.field
    }

    pub fn bands(&self) -> BandRange {
        self.bands
    }

    fn slot(&self, j: i32) -> usize {
        assert!(self.bands.contains(j), "band {j} outside {:?}", self.bands);
        (j - self.bands.j_min) as usize
    }

    fn physical(spec: SpectralField) -> Option<PhysicalField> {
        if spec.is_zero() {
            None
        } else {
            Some(spec.to_physical())
        }
    }

    /// Samples of `Delta_j u`.
    pub fn delta(&self, j: i32) -> Option<&PhysicalField> {
        self.delta[self.slot(j)]
            .get_or_init(|| {
                if self.band_meets(j) {
                    let mult = self.lp.band_multiplier(self.field.grid(), j);
                    self.field.masked_physical(mult.entries())
                } else {
                    None
                }
            })
            .as_ref()
    }

    /// Samples of `u` itself.
    pub fn full(&self) -> Option<&PhysicalField> {
        self.full
            .get_or_init(|| Self::physical(self.field.clone()).map(Rc::new))
            .as_deref()
    }

    /// Samples of `S_{j-1} u`. Shares the samples of `u` when they exist
    /// and the cut keeps every mode unchanged; otherwise extends the partial
    /// sum of the lower bands by one band.
    pub fn low(&self, j: i32) -> Option<&PhysicalField> {
        self.low[self.slot(j)]
            .get_or_init(|| {
                let keeps_all = self.support().is_none_or(|(_, hi)| self.lp.profile().chi_scaled(j - 1, hi) == 1.0);
                if keeps_all && self.full.get().is_some() {
                    return self.full.get().cloned().flatten();
                }
                // S_{j-1} telescopes into the lower bands
                let top = j - 2;
                if top < self.bands.j_min {
                    return None;
                }
                let below = if top > self.bands.j_min {
                    self.low(j - 1);
                    self.low[self.slot(j - 1)].get().cloned().flatten()
                } else {
                    None
                };
                match (below, self.delta(top)) {
                    (None, None) => None,
                    (Some(b), None) => Some(b),
                    (None, Some(d)) => Some(Rc::new(d.clone())),
                    (Some(b), Some(d)) => {
                        let mut out = (*b).clone();
                        for (x, y) in out.values_mut().iter_mut().zip(d.values()) {
                            *x += y;
                        }
                        Some(Rc::new(out))
                    }
                }
            })
            .as_deref()
    }

    /// Samples of `(Delta_{j-1} + Delta_j + Delta_{j+1}) u`.
    pub fn wide(&self, j: i32) -> Option<&PhysicalField> {
        self.wide[self.slot(j)]
            .get_or_init(|| self.sum_deltas(j - 1, j + 1))
            .as_ref()
    }

    fn sum_deltas(&self, lo: i32, hi: i32) -> Option<PhysicalField> {
        let mut acc: Option<PhysicalField> = None;
        for i in self.bands.clip(lo, hi).iter() {
            let Some(d) = self.delta(i) else { continue };
            match acc.as_mut() {
                None => acc = Some(d.clone()),
                Some(a) => {
                    for (x, y) in a.values_mut().iter_mut().zip(d.values()) {
                        *x += y;
                    }
                }
            }
        }
        acc
    }
}

/// Homogeneous symbol `rho(D)` used in the Bernstein check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Symbol {
    /// The gradient, degree 1 (vector valued).
    Gradient,
    /// `|D|^lambda`.
    Power(f64),
}

impl Symbol {
    pub fn degree(&self) -> f64 {
        match self {
            Symbol::Gradient => 1.0,
            Symbol::Power(l) => *l,
        }
    }

    fn apply(&self, u: &SpectralField) -> SpectralField {
        match self {
            Symbol::Gradient => u.gradient(),
            Symbol::Power(l) => {
                let grid = *u.grid();
                let symbol: Vec<f64> = (0..grid.num_points())
                    .map(|idx| if idx == 0 { 0.0 } else { grid.magnitude(idx).powf(*l) })
                    .collect();
                u.apply_real_symbol(&symbol)
            }
        }
    }
}

/// The three ratios of the Bernstein-type bounds for band `j`.
#[derive(Clone, Debug)]
pub struct BernsteinRatios {
    /// `||S_j u||_p / ||u||_p`.
    pub low_cut: Ratio,
    /// `||rho(D) Delta_j u||_q / (2^{j lambda} 2^{j(n/p - n/q)} ||Delta_j u||_p)`.
    pub symbol: Ratio,
    /// `||Delta_j u||_p / (2^{-j} ||grad Delta_j u||_p)`.
    pub reverse: Ratio,
}

pub fn verify_bernstein(
    lp: &LittlewoodPaley,
    j: i32,
    u: &SpectralField,
    p: Exponent,
    q: Exponent,
    rho: Symbol,
) -> crate::Result<BernsteinRatios> {
    if p.get() > q.get() {
        return Err(crate::Error::param(format!("Bernstein check needs p <= q, got p = {p}, q = {q}")));
    }
    let n = u.grid().dim() as f64;
    let scale = 2f64.powi(j);
    let band = lp.delta_proj(j, u);
    let band_p = band.lp_norm(p);
    let low_cut = Ratio::of(lp.s_proj(j, u).lp_norm(p), u.lp_norm(p));
    if band_p == 0.0 {
        let why = format!("band {j} is empty");
        return Ok(BernsteinRatios {
            low_cut,
            symbol: Ratio::skipped(why.clone()),
            reverse: Ratio::skipped(why),
        });
    }
    let lhs = rho.apply(&band).lp_norm(q);
    let rhs = scale.powf(rho.degree()) * scale.powf(n * (p.reciprocal() - q.reciprocal())) * band_p;
    let symbol = Ratio::of(lhs, rhs);
    let reverse = Ratio::of(band_p, band.gradient().lp_norm(p) / scale);
    Ok(BernsteinRatios {
        low_cut,
        symbol,
        reverse,
    })
}

/// Exact evaluation of `sum_j phi(2^{-j} r)` over the given range, used by
/// tests and the partition-of-unity checks.
pub fn partition_sum(profile: &CutoffProfile, r: f64, bands: BandRange) -> (f64, f64) {
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for j in bands.iter() {
        let v = profile.phi_scaled(j, r);
        s1 += v;
        s2 += v * v;
    }
    (s1, s2)
}

/// Largest coefficient of `u` outside the closure of `2^j (a, b)`, relative
/// to the largest coefficient overall; zero means the support claim holds.
pub fn support_leak(u: &SpectralField, j: i32, inner: f64, outer: f64) -> f64 {
    let grid = *u.grid();
    let m = grid.num_points();
    let scale = 2f64.powi(j);
    let total = u.max_abs_coeff();
    if total == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for c in 0..u.components() {
        let block = &u.coeffs()[c * m..(c + 1) * m];
        for (idx, v) in block.iter().enumerate() {
            let r = grid.magnitude(idx) / scale;
            if r < inner || r > outer {
                worst = worst.max(v.norm());
            }
        }
    }
    worst / total
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn band_range_reference_grid() {
        let g = GridSpec::periodic_2pi(3, 64).unwrap();
        let b = band_range(&g);
        assert_eq!(b.j_min, -1);
        assert_eq!(b.j_max, 6);
        let g2 = GridSpec::periodic_2pi(3, 128).unwrap();
        assert_eq!(band_range(&g2).j_max, b.j_max + 1);
        let g3 = GridSpec::new(3, 64, 4.0 * PI).unwrap();
        assert_eq!(band_range(&g3).j_min, b.j_min - 1);
    }

    #[test]
    fn band_range_matches_enumeration() {
        let lp = default_lp();
        for (n, size, len) in [(3, 16, 2.0 * PI), (2, 32, 1.0), (3, 8, 7.5)] {
            let g = GridSpec::new(n, size, len).unwrap();
            let mut active = Vec::new();
            for j in -20..20 {
                if !lp.band_multiplier(&g, j).is_empty() {
                    active.push(j);
                }
            }
            let b = band_range(&g);
            assert_eq!(active.first().copied(), Some(b.j_min));
            assert_eq!(active.last().copied(), Some(b.j_max));
            assert_eq!(active.len(), b.len());
        }
    }

    #[test]
    fn single_mode_low_cut() {
        let g = GridSpec::periodic_2pi(3, 16).unwrap();
        let u = SpectralField::from_fn(g, 1, |x, _| x[0].cos()).chopped(1e-14);
        assert!(s_proj(3, &u).l2_distance(&u) < 1e-15);
        assert!(s_proj(-2, &u).is_zero());
        // every mode is kept once 2^j 3/4 exceeds the corner wavenumber
        let b = band_range(&g);
        let r = SpectralField::from_fn(g, 1, |x, _| (3.0 * x[1]).sin() + (7.0 * x[2] - x[0]).cos());
        assert!(s_proj(b.j_max + 1, &r).l2_distance(&r) < 1e-15);
    }

    #[test]
    fn constant_field_has_no_bands() {
        let g = GridSpec::periodic_2pi(3, 8).unwrap();
        let c = SpectralField::from_fn(g, 1, |_, _| 2.5);
        for j in band_range(&g).iter() {
            assert!(delta_proj(j, &c).is_zero());
        }
    }

    #[test]
    fn band_pieces_report_empty_bands() {
        let g = GridSpec::periodic_2pi(3, 16).unwrap();
        let u = SpectralField::from_fn(g, 1, |x, _| x[0].cos()).chopped(1e-14);
        let lp = default_lp();
        let pieces = lp.pieces(u.clone());
        assert!(pieces.delta(0).is_some());
        assert!(pieces.delta(3).is_none());
        assert!(pieces.low(-1).is_none());
        let direct = lp.delta_proj(0, &u).to_physical();
        for (a, b) in pieces.delta(0).unwrap().values().iter().zip(direct.values()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn bernstein_single_mode() {
        let g = GridSpec::periodic_2pi(3, 32).unwrap();
        let u = SpectralField::from_fn(g, 1, |x, _| (4.0 * x[0]).cos()).chopped(1e-14);
        let r = verify_bernstein(default_lp(), 2, &u, Exponent::TWO, Exponent::TWO, Symbol::Gradient).unwrap();
        assert!((r.symbol.value().unwrap() - 1.0).abs() < 1e-12);
        assert!((r.reverse.value().unwrap() - 1.0).abs() < 1e-12);
        let empty = verify_bernstein(default_lp(), -1, &u, Exponent::TWO, Exponent::TWO, Symbol::Gradient).unwrap();
        assert!(empty.symbol.is_skipped() && empty.reverse.is_skipped());
    }
}
