//! The identity and inequality suite behind `besov-ns verify`.
//!
//! Every check produces rows `(inequality-id, params, field-seed, lhs, rhs,
//! ratio)`. Exact identities store the defect against its tolerance,
//! constant-one inequalities the two sides, and monitors the two sides of an
//! estimate whose constant is unknown. Only the first two kinds can fail.

use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;

use crate::besov::{besov_norm_full, sobolev_envelope, sobolev_norm, verify_convergence_bound, verify_embedding,
    verify_interpolation_geometric, verify_interpolation_holder, verify_lebesgue_comparison, BesovParams};
use crate::blowup::indices::{admissible_interval, exponent_identity_check, nu_branch, select_indices_at, NuBranch};
use crate::blowup::monitor::qualitative_sample;
use crate::blowup::ode::{equality_solution, euler_trajectory, extrapolated_blowup_time, ode_lower_bound, verify_ode_lemma, OdeVerdict};
use crate::bony::{monitor_paraproduct_estimates, monitor_remainder_estimates, paraproduct_pieces, pointwise_product,
    remainder_pieces, BonyPieces, ProductExponents};
use crate::check::{Ratio, Slack};
use crate::commutator::{monitor_commutator_estimates, verify_commutator_kernel_bound, CommutatorWorkspace};
use crate::corpus::{derive_seed, indexed_seed, random_field, rng, FieldSpec};
use crate::error::{Error, Result};
use crate::lp::{band_range, partition_sum, verify_bernstein, BandRange, LittlewoodPaley, Symbol};
use crate::ns::{step, taylor_green, SolverState};
use crate::spectral::{Exponent, GridSpec, SpectralField};

/// Relative tolerance of the exact identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;
/// Per-mode tolerance of the partition of unity.
pub const PARTITION_TOLERANCE: f64 = 1e-14;
/// Smallest relative slack accepted for a constant-one inequality.
pub const SLACK_TOLERANCE: f64 = 1e-10;
/// Saturation tolerance of the closed-form ODE solution.
pub const ODE_TOLERANCE: f64 = 1e-9;

pub const HEADER: [&str; 6] = ["inequality-id", "params", "field-seed", "lhs", "rhs", "ratio"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    /// `lhs` is a defect, `rhs` its tolerance.
    Exact,
    /// `lhs <= rhs` with constant one.
    ConstantOne,
    /// Recorded only.
    Monitor,
}

impl CheckKind {
    pub fn label(&self) -> &'static str {
        match self {
            CheckKind::Exact => "exact",
            CheckKind::ConstantOne => "constant-one",
            CheckKind::Monitor => "monitor",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyRow {
    pub id: String,
    pub kind: CheckKind,
    pub params: String,
    pub seed: u64,
    pub outcome: Ratio,
}

impl VerifyRow {
    pub fn new(id: &str, kind: CheckKind, params: impl Into<String>, seed: u64, outcome: Ratio) -> Self {
        VerifyRow {
            id: id.to_string(),
            kind,
            params: params.into(),
            seed,
            outcome,
        }
    }

    pub fn exact(id: &str, params: impl Into<String>, seed: u64, defect: f64, tol: f64) -> Self {
        Self::new(id, CheckKind::Exact, params, seed, Ratio::Value { lhs: defect, rhs: tol })
    }

    pub fn slack(id: &str, params: impl Into<String>, seed: u64, s: Slack) -> Self {
        Self::new(id, CheckKind::ConstantOne, params, seed, Ratio::Value { lhs: s.lhs, rhs: s.rhs })
    }

    pub fn monitor(id: &str, params: impl Into<String>, seed: u64, r: Ratio) -> Self {
        Self::new(id, CheckKind::Monitor, params, seed, r)
    }

    pub fn passed(&self) -> bool {
        match (self.kind, &self.outcome) {
            (CheckKind::Monitor, _) => true,
            (CheckKind::Exact, Ratio::Value { lhs, rhs }) => lhs <= rhs,
            (CheckKind::Exact, Ratio::Skipped(_)) => false,
            (CheckKind::ConstantOne, Ratio::Value { lhs, rhs }) => Slack::new(*lhs, *rhs).holds(SLACK_TOLERANCE),
            (CheckKind::ConstantOne, Ratio::Skipped(_)) => true,
        }
    }

    fn record(&self) -> [String; 6] {
        let (lhs, rhs, ratio) = match &self.outcome {
            Ratio::Value { lhs, rhs } => {
                let ratio = if *rhs == 0.0 { String::new() } else { format!("{:e}", lhs / rhs) };
                (format!("{lhs:e}"), format!("{rhs:e}"), ratio)
            }
            Ratio::Skipped(why) => (String::new(), String::new(), format!("skipped: {why}")),
        };
        [self.id.clone(), self.params.clone(), self.seed.to_string(), lhs, rhs, ratio]
    }
}

/// Rows destined for one CSV file.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub name: &'static str,
    pub rows: Vec<VerifyRow>,
}

impl Table {
    pub fn new(name: &'static str) -> Self {
        Table { name, rows: Vec::new() }
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(HEADER)?;
        for row in &self.rows {
            out.write_record(row.record())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerifyRow> {
        self.rows.iter().filter(|r| !r.passed())
    }
}

/// Aggregate of all rows sharing a table and id.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckSummary {
    pub table: &'static str,
    pub id: String,
    pub kind: CheckKind,
    pub count: usize,
    pub skipped: usize,
    /// Largest defect, smallest relative slack, or largest ratio.
    pub worst: f64,
    pub failures: usize,
}

impl CheckSummary {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

pub fn summarize(tables: &[Table]) -> Vec<CheckSummary> {
    let mut out: Vec<CheckSummary> = Vec::new();
    for t in tables {
        for row in &t.rows {
            let pos = out.iter().position(|s| s.table == t.name && s.id == row.id);
            let s = match pos {
                Some(i) => &mut out[i],
                None => {
                    let worst = match row.kind {
                        CheckKind::ConstantOne => f64::INFINITY,
                        _ => f64::NEG_INFINITY,
                    };
                    out.push(CheckSummary {
                        table: t.name,
                        id: row.id.clone(),
                        kind: row.kind,
                        count: 0,
                        skipped: 0,
                        worst,
                        failures: 0,
                    });
                    out.last_mut().unwrap()
                }
            };
            if !row.passed() {
                s.failures += 1;
            }
            match &row.outcome {
                Ratio::Skipped(_) => s.skipped += 1,
                Ratio::Value { lhs, rhs } => {
                    s.count += 1;
                    s.worst = match row.kind {
                        CheckKind::Exact => s.worst.max(*lhs),
                        CheckKind::ConstantOne => s.worst.min(Slack::new(*lhs, *rhs).relative()),
                        CheckKind::Monitor => s.worst.max(lhs / rhs),
                    };
                }
            }
        }
    }
    out
}

pub fn write_summary(summary: &[CheckSummary], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["table", "inequality-id", "kind", "count", "skipped", "worst", "status"])?;
    for s in summary {
        let status = match (s.kind, s.passed()) {
            (CheckKind::Monitor, _) => "recorded",
            (_, true) => "pass",
            (_, false) => "fail",
        };
        out.write_record([
            s.table.to_string(),
            s.id.clone(),
            s.kind.label().to_string(),
            s.count.to_string(),
            s.skipped.to_string(),
            format!("{:e}", s.worst),
            status.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn fmt_exp(p: Exponent) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{}", p.get())
    }
}

fn fmt_params(b: &BesovParams) -> String {
    format!("s={};p={};q={}", b.s, fmt_exp(b.p), fmt_exp(b.q))
}

fn fmt_product(e: &ProductExponents) -> String {
    format!(
        "s1={};s2={};p1={};p2={};q1={};q2={}",
        e.s1,
        e.s2,
        fmt_exp(e.p1),
        fmt_exp(e.p2),
        fmt_exp(e.q1),
        fmt_exp(e.q2)
    )
}

fn exp(p: f64) -> Exponent {
    Exponent::new(p).expect("valid literal exponent")
}

/// One member of the random corpus: two scalars and a solenoidal vector
/// field, all dealias-safe with unit `L^2` norm.
#[derive(Clone, Debug)]
pub struct Member {
    pub seed: u64,
    pub u: SpectralField,
    pub v: SpectralField,
    pub vel: SpectralField,
}

pub fn corpus_member(grid: &GridSpec, seed: u64, index: u64, slope: f64) -> Result<Member> {
    let s = indexed_seed(seed, "corpus", index);
    let spec = FieldSpec::dealias_safe(grid).slope(slope);
    Ok(Member {
        seed: s,
        u: random_field(grid, &spec, derive_seed(s, "u"))?,
        v: random_field(grid, &spec, derive_seed(s, "v"))?,
        vel: random_field(grid, &spec.components(grid.dim()).solenoidal(true), derive_seed(s, "vel"))?,
    })
}

fn relative(d: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        d
    } else {
        d / scale
    }
}

/// Largest `|sum_j phi(2^{-j}|k|) - 1|` over the nonzero modes of the grid.
pub fn partition_rows(lp: &LittlewoodPaley, grid: &GridSpec) -> Vec<VerifyRow> {
    let bands = band_range(grid);
    let mut worst: f64 = 0.0;
    let mut radii: Vec<f64> = (1..grid.num_points()).map(|i| grid.magnitude(i)).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    for r in radii {
        worst = worst.max((partition_sum(lp.profile(), r, bands).0 - 1.0).abs());
    }
    let params = format!("N={};L={};modes=all", grid.size(), grid.length());
    vec![VerifyRow::exact("partition-of-unity", params, 0, worst, PARTITION_TOLERANCE)]
}

/// The exact identities for one corpus member.
pub fn exact_identity_rows(lp: &LittlewoodPaley, m: &Member) -> Result<Vec<VerifyRow>> {
    let u = &m.u;
    let bands = band_range(u.grid());
    let two = Exponent::TWO;
    let norm = u.lp_norm(two);
    let mut rows = Vec::new();

    let pieces: Vec<(i32, SpectralField)> = bands.iter().map(|j| (j, lp.delta_proj(j, u))).collect();
    let mut sum = SpectralField::zeros(*u.grid(), 1);
    for (_, p) in &pieces {
        sum += p;
    }
    rows.push(VerifyRow::exact("reconstruction", "sum over all bands", m.seed, relative(sum.l2_distance(u), norm), IDENTITY_TOLERANCE));

    let (mut worst, mut at) = (0.0f64, (0, 0));
    for (j, p) in &pieces {
        for k in bands.iter().filter(|k| (k - j).abs() >= 2) {
            let d = relative(lp.delta_proj(k, p).lp_norm(two), norm);
            if d > worst {
                (worst, at) = (d, (*j, k));
            }
        }
    }
    rows.push(VerifyRow::exact("band-orthogonality", format!("|j-j'|>=2;worst=({},{})", at.0, at.1), m.seed, worst, IDENTITY_TOLERANCE));

    let pu = lp.pieces(u.clone());
    let pv = lp.pieces(m.v.clone());
    let (mut worst, mut at) = (0.0f64, (0, 0));
    for j in bands.iter() {
        let term = paraproduct_pieces(&pu, &pv, Some(BandRange { j_min: j, j_max: j }));
        let scale = term.lp_norm(two);
        if scale == 0.0 {
            continue;
        }
        for k in bands.iter().filter(|k| (k - j).abs() >= 5) {
            let d = lp.delta_proj(k, &term).lp_norm(two) / scale;
            if d > worst {
                (worst, at) = (d, (j, k));
            }
        }
    }
    rows.push(VerifyRow::exact("paraproduct-support", format!("|j-j'|>=5;worst=({},{})", at.0, at.1), m.seed, worst, IDENTITY_TOLERANCE));

    let bony = BonyPieces {
        tuv: paraproduct_pieces(&pu, &pv, None),
        tvu: paraproduct_pieces(&pv, &pu, None),
        ruv: remainder_pieces(&pu, &pv, None),
        product: pointwise_product(u, &m.v)?,
    };
    rows.push(VerifyRow::exact("bony-identity", "uv = T_u v + T_v u + R(u,v)", m.seed, bony.identity_defect(), IDENTITY_TOLERANCE));

    let ws = CommutatorWorkspace::new(lp, &m.vel, u)?;
    // bands barely touching the support carry a commutator at roundoff
    // level, so the defect is measured against the whole family
    let (mut defect, mut scale, mut r6) = (0.0f64, 0.0f64, 0.0f64);
    for j in ws.bands().iter() {
        let c = ws.decompose(j);
        defect += c.sum().l2_distance(&c.r).powi(2);
        scale += c.r.lp_norm(two).powi(2);
        r6 = r6.max(c.part(6).lp_norm(two));
    }
    let defect = relative(defect.sqrt(), scale.sqrt());
    rows.push(VerifyRow::exact("commutator-identity", "R = sum R^i;l2 over j", m.seed, defect, IDENTITY_TOLERANCE));
    rows.push(VerifyRow::exact("commutator-r6", "div v = 0;absolute;all j", m.seed, r6, IDENTITY_TOLERANCE));
    Ok(rows)
}

pub const LEBESGUE_EXPONENTS: [f64; 4] = [1.0, 2.0, 4.0, f64::INFINITY];

pub fn lebesgue_rows(lp: &LittlewoodPaley, m: &Member) -> Result<Vec<VerifyRow>> {
    let mut rows = Vec::new();
    for p in LEBESGUE_EXPONENTS.map(exp) {
        let c = verify_lebesgue_comparison(lp, &m.u, p)?;
        let params = format!("p={}", fmt_exp(p));
        rows.push(VerifyRow::slack("lp-below-b0p1", params.clone(), m.seed, c.lower_slack));
        rows.push(VerifyRow::monitor("b0pinf-over-lp", params, m.seed, c.upper));
    }
    Ok(rows)
}

pub fn embedding_rows(lp: &LittlewoodPaley, m: &Member) -> Result<Vec<VerifyRow>> {
    let inf = f64::INFINITY;
    let mut rows = Vec::new();
    for (p1, p2, q1, q2, delta) in [(2.0, inf, 2.0, inf, -1.0), (1.0, 2.0, 1.0, 1.0, -1.5), (2.0, 4.0, 1.0, 2.0, -0.75), (2.0, 2.0, 2.0, 2.0, 0.0)] {
        let (p1, p2, q1, q2) = (exp(p1), exp(p2), exp(q1), exp(q2));
        let r = verify_embedding(lp, &m.u, p1, p2, q1, q2, delta)?;
        let params = format!("p1={};p2={};q1={};q2={};delta={delta}", fmt_exp(p1), fmt_exp(p2), fmt_exp(q1), fmt_exp(q2));
        rows.push(VerifyRow::monitor("embedding", params, m.seed, r));
    }
    Ok(rows)
}

pub fn holder_rows(lp: &LittlewoodPaley, m: &Member) -> Result<Vec<VerifyRow>> {
    let inf = Exponent::INFINITY;
    let cases = [
        (BesovParams::new(-0.5, Exponent::TWO, Exponent::TWO), BesovParams::new(1.0, inf, Exponent::ONE), 0.5),
        (BesovParams::new(0.0, Exponent::ONE, inf), BesovParams::new(1.5, exp(4.0), Exponent::TWO), 0.3),
        (BesovParams::new(-1.5, inf, inf), BesovParams::new(-0.5, inf, inf), 0.75),
    ];
    let mut rows = Vec::new();
    for (a, b, lam) in cases {
        let s = verify_interpolation_holder(lp, &m.u, a, b, lam)?;
        let params = format!("a=({});b=({});lambda={lam}", fmt_params(&a), fmt_params(&b));
        rows.push(VerifyRow::slack("interpolation-holder", params, m.seed, s));
    }
    Ok(rows)
}

pub fn geometric_rows(lp: &LittlewoodPaley, m: &Member) -> Result<Vec<VerifyRow>> {
    let mut rows = Vec::new();
    for (p, s1, s2, lam) in [(2.0, -1.0, 1.0, 0.25), (2.0, -1.0, 1.0, 0.5), (f64::INFINITY, -0.5, 0.5, 0.5)] {
        let p = exp(p);
        let r = verify_interpolation_geometric(lp, &m.u, p, s1, s2, lam)?;
        rows.push(VerifyRow::monitor(
            "interpolation-geometric",
            format!("p={};s1={s1};s2={s2};lambda={lam}", fmt_exp(p)),
            m.seed,
            r,
        ));
    }
    Ok(rows)
}

pub fn convergence_rows(lp: &LittlewoodPaley, m: &Member) -> Result<Vec<VerifyRow>> {
    let pieces: Vec<(i32, SpectralField)> = band_range(m.u.grid()).iter().map(|j| (j, lp.delta_proj(j, &m.u))).collect();
    let annulus = (crate::cutoff::ANNULUS_INNER, crate::cutoff::ANNULUS_OUTER);
    let mut rows = Vec::new();
    for (s, p, q) in [(0.5, 2.0, 2.0), (-0.5, f64::INFINITY, f64::INFINITY), (1.0, 1.0, 1.0)] {
        let params = BesovParams::new(s, exp(p), exp(q));
        let r = verify_convergence_bound(lp, &pieces, params, annulus)?;
        rows.push(VerifyRow::monitor("convergence-bound", fmt_params(&params), m.seed, r));
    }
    Ok(rows)
}

pub const SOBOLEV_INDICES: [f64; 4] = [-1.0, 0.0, 1.0, 2.0];

/// `B^s_{2,2} / H^s` against the shell envelope, from both sides.
pub fn sobolev_rows(lp: &LittlewoodPaley, m: &Member) -> Result<Vec<VerifyRow>> {
    let mut rows = Vec::new();
    for s in SOBOLEV_INDICES {
        let b = besov_norm_full(lp, &m.u, BesovParams::new(s, Exponent::TWO, Exponent::TWO))?;
        let h = sobolev_norm(&m.u, s)?;
        let (lo, hi) = sobolev_envelope(lp, &m.u, s);
        let ratio = b / h;
        rows.push(VerifyRow::slack("sobolev-envelope-lower", format!("s={s}"), m.seed, Slack::new(lo, ratio)));
        rows.push(VerifyRow::slack("sobolev-envelope-upper", format!("s={s}"), m.seed, Slack::new(ratio, hi)));
    }
    Ok(rows)
}

pub fn bernstein_rows(lp: &LittlewoodPaley, m: &Member) -> Result<Vec<VerifyRow>> {
    let bands = band_range(m.u.grid());
    let mut rows = Vec::new();
    for j in (0..=2).filter(|j| bands.contains(*j)) {
        for (p, q) in [(1.0, 2.0), (2.0, 2.0), (2.0, f64::INFINITY)] {
            let (p, q) = (exp(p), exp(q));
            for rho in [Symbol::Gradient, Symbol::Power(0.5)] {
                let b = verify_bernstein(lp, j, &m.u, p, q, rho)?;
                let sym = match rho {
                    Symbol::Gradient => "grad".to_string(),
                    Symbol::Power(l) => format!("|D|^{l}"),
                };
                let params = format!("j={j};p={};q={};rho={sym}", fmt_exp(p), fmt_exp(q));
                rows.push(VerifyRow::monitor("bernstein-symbol", params.clone(), m.seed, b.symbol));
                if matches!(rho, Symbol::Gradient) {
                    rows.push(VerifyRow::monitor("bernstein-low-cut", params.clone(), m.seed, b.low_cut));
                    rows.push(VerifyRow::monitor("bernstein-reverse", params, m.seed, b.reverse));
                }
            }
        }
    }
    Ok(rows)
}

/// Exponent splits used by the product and commutator monitors.
pub fn product_exponents() -> Vec<ProductExponents> {
    let (inf, two) = (Exponent::INFINITY, Exponent::TWO);
    vec![
        ProductExponents::new(-0.5, 1.0, inf, two, inf, two).unwrap(),
        ProductExponents::new(0.5, 0.5, exp(4.0), exp(4.0), two, two).unwrap(),
        ProductExponents::new(0.25, -0.25, two, two, two, two).unwrap(),
    ]
}

pub fn commutator_exponents() -> Vec<ProductExponents> {
    let (inf, two) = (Exponent::INFINITY, Exponent::TWO);
    vec![
        ProductExponents::new(-0.5, 0.75, inf, two, inf, two).unwrap(),
        ProductExponents::new(0.5, 0.25, exp(4.0), exp(4.0), two, two).unwrap(),
    ]
}

pub fn product_rows(lp: &LittlewoodPaley, m: &Member) -> Result<Vec<VerifyRow>> {
    let mut rows = Vec::new();
    for e in product_exponents() {
        let params = fmt_product(&e);
        let para = monitor_paraproduct_estimates(lp, &m.u, &m.v, &e)?;
        rows.push(VerifyRow::monitor("paraproduct-lebesgue", params.clone(), m.seed, para.lebesgue));
        rows.push(VerifyRow::monitor("paraproduct-negative", params.clone(), m.seed, para.negative));
        let rem = monitor_remainder_estimates(lp, &m.u, &m.v, &e)?;
        rows.push(VerifyRow::monitor("remainder-positive", params.clone(), m.seed, rem.positive));
        rows.push(VerifyRow::monitor("remainder-endpoint", params, m.seed, rem.endpoint));
    }
    Ok(rows)
}

pub fn commutator_rows(lp: &LittlewoodPaley, m: &Member) -> Result<Vec<VerifyRow>> {
    let mut rows = Vec::new();
    for e in commutator_exponents() {
        let params = fmt_product(&e);
        let c = monitor_commutator_estimates(lp, &m.vel, &m.u, &e)?;
        for (id, r) in c.entries {
            rows.push(VerifyRow::monitor(id.label(), params.clone(), m.seed, r));
        }
    }
    let bands = band_range(m.u.grid());
    for j in (1..=2).filter(|j| bands.contains(*j)) {
        for (p, q) in [(f64::INFINITY, 2.0), (4.0, 4.0)] {
            let (p, q) = (exp(p), exp(q));
            let r = verify_commutator_kernel_bound(lp, &m.u, &m.v, j, p, q)?;
            rows.push(VerifyRow::monitor("kernel-bound", format!("j={j};p={};q={}", fmt_exp(p), fmt_exp(q)), m.seed, r));
        }
    }
    Ok(rows)
}

/// A random admissible `(n, eps, r, 2n/r1)`: `n` in `3..=6`, `eps` in
/// `[1, 2)`, `r` in `[2, n/(2 - eps))` and `2n/r1` inside the open interval.
pub fn random_admissible(rng: &mut impl Rng) -> (usize, f64, f64, f64) {
    loop {
        let n = rng.random_range(3..=6usize);
        let eps: f64 = rng.random_range(1.0..2.0);
        let top = n as f64 / (2.0 - eps);
        let r = 2.0 + (top - 2.0) * rng.random::<f64>();
        let (lo, hi) = admissible_interval(n, eps, r);
        let x = lo + (hi - lo) * rng.random::<f64>();
        if r < top && x > lo && x < hi {
            return (n, eps, r, x);
        }
    }
}

/// Exponent identity and the index ordering for `count` random triples.
pub fn index_rows(seed: u64, count: usize) -> Vec<VerifyRow> {
    let mut g = rng(derive_seed(seed, "indices"));
    let mut rows = Vec::with_capacity(2 * count);
    for _ in 0..count {
        let (n, eps, r, x) = random_admissible(&mut g);
        let params = format!("n={n};eps={eps};r={r};2n/r1={x}");
        match select_indices_at(n, eps, r, x) {
            Ok(sel) => {
                let branch = match nu_branch(&sel) {
                    Some((_, NuBranch::Direct)) => "direct",
                    Some((_, NuBranch::Split { .. })) => "split",
                    None => "none",
                };
                let (lo, hi) = admissible_interval(n, eps, r);
                let mut bad = sel.violations().len();
                if !(lo < hi) {
                    bad += 1;
                }
                rows.push(VerifyRow::exact("exponent-identity", params.clone(), seed, exponent_identity_check(&sel), IDENTITY_TOLERANCE));
                rows.push(VerifyRow::exact("index-chain", format!("{params};nu-branch={branch}"), seed, bad as f64, 0.0));
            }
            Err(e) => {
                rows.push(VerifyRow::new("index-chain", CheckKind::Exact, params, seed, Ratio::skipped(e.to_string())));
            }
        }
    }
    rows
}

/// Saturation by the closed-form solution and the bound along Euler iterates.
pub fn ode_rows() -> Result<Vec<VerifyRow>> {
    let mut rows = Vec::new();
    for (gamma, c, t_end) in [(0.5, 2.0, 1.0), (2.0 / 3.0, 1.0, 0.5), (1.0, 0.3, 2.0)] {
        let mut worst: f64 = 0.0;
        for k in 0..100 {
            let t = t_end * k as f64 / 100.0;
            let x = equality_solution(gamma, c, t_end, t);
            worst = worst.max((x / ode_lower_bound(gamma, c, t_end, t)? - 1.0).abs());
        }
        let params = format!("gamma={gamma};c={c};T={t_end};samples=100");
        rows.push(VerifyRow::exact("ode-equality", params, 0, worst, ODE_TOLERANCE));
    }
    for (gamma, c, x0, dt) in [(0.7, 1.5, 2.0, 1e-4), (0.5, 1.0, 1.0, 1e-3), (2.0, 0.2, 0.5, 1e-3)] {
        let traj = euler_trajectory(gamma, c, 0.0, x0, dt, 1e8);
        let params = format!("gamma={gamma};c={c};x0={x0};dt={dt}");
        let t_end = extrapolated_blowup_time(&traj, gamma).ok_or_else(|| Error::param("Euler trajectory does not grow"))?;
        let row = match verify_ode_lemma(&traj, gamma, c, t_end, dt, 1e-12)? {
            OdeVerdict::Holds { min_ratio } => VerifyRow::exact("ode-euler", params, 0, (1.0 - min_ratio).max(0.0), 1e-12),
            OdeVerdict::Violated { x, bound, .. } => VerifyRow::exact("ode-euler", params, 0, 1.0 - x / bound, 1e-12),
            OdeVerdict::PreconditionUnmet(why) => VerifyRow::new("ode-euler", CheckKind::Exact, params, 0, Ratio::skipped(why)),
        };
        rows.push(row);
    }
    Ok(rows)
}

fn trajectory_rows_of(lp: &LittlewoodPaley, label: &str, seed: u64, u0: SpectralField, steps: usize, dt: f64) -> Result<Vec<VerifyRow>> {
    let mut rows = Vec::new();
    let mut state = SolverState::new(u0, dt)?;
    for k in 0..=steps {
        if k > 0 {
            state = step(&state, dt)?;
        }
        for eps in [1.25, 1.5, 1.75] {
            let q = qualitative_sample(lp, state.t, &state.u, eps)?;
            let params = format!("run={label};t={};eps={eps}", state.t);
            rows.push(VerifyRow::slack("interp-besov-half", params.clone(), seed, q.interpolation));
            rows.push(VerifyRow::slack("linf-below-b0inf1", params.clone(), seed, q.linf_embedding));
            rows.push(VerifyRow::monitor("linf-interpolation", params, seed, q.linf_interpolation));
        }
    }
    Ok(rows)
}

/// Interpolation slacks along a Taylor-Green run and a random solenoidal run
/// on a 16-point grid.
pub fn trajectory_rows(lp: &LittlewoodPaley, dim: usize, seed: u64) -> Result<Vec<VerifyRow>> {
    let g = GridSpec::periodic_2pi(dim, 16)?;
    let mut rows = Vec::new();
    if dim == 3 {
        rows.extend(trajectory_rows_of(lp, "taylor-green", 0, taylor_green(&g, 0.0), 20, 0.01)?);
    }
    let s = derive_seed(seed, "trajectory");
    let spec = FieldSpec::dealias_safe(&g).components(dim).solenoidal(true).amplitude(0.5);
    rows.extend(trajectory_rows_of(lp, "random", s, random_field(&g, &spec, s)?, 20, 0.01)?);
    Ok(rows)
}

/// Suite settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteConfig {
    pub grid: GridSpec,
    pub seed: u64,
    /// Corpus members for the exact identities and the monitors.
    pub count: usize,
    /// Members for the cheaper inequality checks (at least `count`).
    pub inequality_count: usize,
    pub slope: f64,
    pub index_samples: usize,
}

/// Per-member row builders in table order.
type Builder = fn(&LittlewoodPaley, &Member) -> Result<Vec<VerifyRow>>;

const MEMBER_TABLES: [(&str, Builder, bool); 10] = [
    ("exact_identities", exact_identity_rows, false),
    ("lebesgue", lebesgue_rows, true),
    ("embedding", embedding_rows, false),
    ("interpolation_holder", holder_rows, true),
    ("interpolation_geometric", geometric_rows, false),
    ("convergence_bound", convergence_rows, false),
    ("sobolev", sobolev_rows, true),
    ("bernstein", bernstein_rows, false),
    ("products", product_rows, false),
    ("commutator", commutator_rows, false),
];

/// Runs every check and returns the tables in output order.
pub fn run_suite(lp: &LittlewoodPaley, config: &SuiteConfig) -> Result<Vec<Table>> {
    let grid = config.grid;
    let mut tables: Vec<Table> = MEMBER_TABLES.iter().map(|(name, _, _)| Table::new(name)).collect();
    tables[0].rows.extend(partition_rows(lp, &grid));
    let members = config.count.max(config.inequality_count);
    for i in 0..members {
        let m = corpus_member(&grid, config.seed, i as u64, config.slope)?;
        for ((_, build, cheap), table) in MEMBER_TABLES.iter().zip(tables.iter_mut()) {
            if i < config.count || *cheap {
                table.rows.extend(build(lp, &m)?);
            }
        }
    }
    let mut traj = Table::new("trajectory");
    traj.rows = trajectory_rows(lp, grid.dim(), config.seed)?;
    tables.push(traj);
    let mut idx = Table::new("index_algebra");
    if grid.dim() >= 3 {
        idx.rows = index_rows(config.seed, config.index_samples);
    }
    tables.push(idx);
    let mut ode = Table::new("ode");
    ode.rows = ode_rows()?;
    tables.push(ode);
    Ok(tables)
}

/// Writes every table, the cutoff profile and `summary.csv` into `dir`.
pub fn write_suite(lp: &LittlewoodPaley, tables: &[Table], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let path = dir.join("cutoff_profile.csv");
    lp.profile().export_csv(&path)?;
    files.push(path);
    for t in tables {
        let path = dir.join(format!("{}.csv", t.name));
        t.write_csv(File::create(&path)?)?;
        files.push(path);
    }
    let path = dir.join("summary.csv");
    write_summary(&summarize(tables), File::create(&path)?)?;
    files.push(path);
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::default_lp;

    fn small() -> SuiteConfig {
        SuiteConfig {
            grid: GridSpec::periodic_2pi(3, 16).unwrap(),
            seed: 5,
            count: 2,
            inequality_count: 3,
            slope: 0.0,
            index_samples: 50,
        }
    }

    #[test]
    fn suite_passes_on_a_small_grid() {
        let tables = run_suite(default_lp(), &small()).unwrap();
        let failures: Vec<_> = tables.iter().flat_map(|t| t.failures()).collect();
        assert!(failures.is_empty(), "{failures:#?}");
        let summary = summarize(&tables);
        assert!(summary.iter().any(|s| s.id == "R6"));
        let holder = summary.iter().find(|s| s.id == "interpolation-holder").unwrap();
        assert_eq!(holder.count, 9);
    }

    #[test]
    fn rows_serialize_with_the_fixed_header() {
        let mut t = Table::new("x");
        t.rows.push(VerifyRow::exact("a", "p=1", 3, 1e-15, 1e-12));
        t.rows.push(VerifyRow::monitor("b", "p=2", 4, Ratio::skipped("empty")));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "inequality-id,params,field-seed,lhs,rhs,ratio");
        assert_eq!(lines[1], "a,p=1,3,1e-15,1e-12,1e-3");
        assert_eq!(lines[2], "b,p=2,4,,,skipped: empty");
    }

    #[test]
    fn failing_rows_are_counted() {
        let t = Table {
            name: "t",
            rows: vec![
                VerifyRow::exact("a", "", 0, 1e-9, 1e-12),
                VerifyRow::slack("b", "", 0, Slack::new(1.0, 0.5)),
                VerifyRow::monitor("c", "", 0, Ratio::of(1e6, 1.0)),
            ],
        };
        let s = summarize(&[t]);
        assert_eq!(s.iter().map(|s| s.failures).collect::<Vec<_>>(), vec![1, 1, 0]);
    }
}
