//! The subcommands. Each writes its CSV output under the configured output
//! directory and returns a one-line report per notable result.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use besov_ns::besov::{besov_norm_full, sobolev_norm, BesovParams};
use besov_ns::blowup::monitor::qualitative_sample;
use besov_ns::blowup::synthetic::{evaluate_norms, geometric_times};
use besov_ns::blowup::{energy_budget, fit_rate, select_indices, synthetic_blowup_family, NormRequest, ShellProfile};
use besov_ns::corpus::{derive_seed, random_field, FieldSpec};
use besov_ns::lp::band_is_fully_resolved;
use besov_ns::ns::{read_snapshot_index, simulate, taylor_green, SimulationConfig, SolverState};
use besov_ns::report::{run_suite, summarize, write_suite, SuiteConfig};
use besov_ns::spectral::snapshot;
use besov_ns::{band_range, build_cutoffs, Error, Exponent, LittlewoodPaley, SpectralField};

use crate::config::{ConfigError, ExperimentConfig, Init, Series};

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Assertion(String),
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

pub type Outcome = Result<Vec<String>, Failure>;

fn littlewood_paley(cfg: &ExperimentConfig) -> LittlewoodPaley {
    LittlewoodPaley::new(build_cutoffs(cfg.smoothing))
}

fn num(v: f64) -> String {
    format!("{v:.17e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// The field to analyse: a snapshot if given, else corpus member 0.
fn input_field(cfg: &ExperimentConfig, input: Option<&Path>) -> Result<SpectralField, Failure> {
    match input {
        Some(p) => Ok(snapshot::load(p)?),
        None => {
            let grid = cfg.grid()?;
            let spec = FieldSpec::dealias_safe(&grid).slope(cfg.slope);
            Ok(random_field(&grid, &spec, derive_seed(cfg.seed, "input"))?)
        }
    }
}

/// Per-band norms of one field and the reconstruction defect.
pub fn decompose(cfg: &ExperimentConfig, input: Option<&Path>) -> Outcome {
    cfg.validate()?;
    let lp = littlewood_paley(cfg);
    let u = input_field(cfg, input)?.without_mean();
    let grid = *u.grid();
    fs::create_dir_all(&cfg.out)?;
    let path = cfg.out.join("bands.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["j", "resolved", "l2", "linf", "energy_fraction"])?;
    let total = u.lp_norm(Exponent::TWO).powi(2);
    let mut sum = SpectralField::zeros(grid, u.components());
    for j in band_range(&grid).iter() {
        let d = lp.delta_proj(j, &u);
        let l2 = d.lp_norm(Exponent::TWO);
        let frac = if total > 0.0 { l2 * l2 / total } else { 0.0 };
        w.write_record([
            j.to_string(),
            band_is_fully_resolved(&grid, j).to_string(),
            num(l2),
            num(d.lp_norm(Exponent::INFINITY)),
            num(frac),
        ])?;
        sum += &d;
    }
    w.flush()?;
    let defect = sum.l2_distance(&u) / total.sqrt().max(f64::MIN_POSITIVE);
    Ok(vec![
        format!("bands {} in {}", band_range(&grid).len(), path.display()),
        format!("reconstruction defect (relative L2) {defect:e}"),
    ])
}

/// One Besov seminorm, and the Sobolev norm when `p = q = 2`.
pub fn norm(cfg: &ExperimentConfig, input: Option<&Path>, s: f64, p: Exponent, q: Exponent) -> Outcome {
    cfg.validate()?;
    if !s.is_finite() {
        return Err(ConfigError::new("--s", format!("must be finite, got {s}")).into());
    }
    let lp = littlewood_paley(cfg);
    let u = input_field(cfg, input)?.without_mean();
    let b = besov_norm_full(&lp, &u, BesovParams::new(s, p, q))?;
    let h = if p == Exponent::TWO && q == Exponent::TWO {
        Some(sobolev_norm(&u, s)?)
    } else {
        None
    };
    fs::create_dir_all(&cfg.out)?;
    let path = cfg.out.join("norms.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["s", "p", "q", "besov", "sobolev"])?;
    w.write_record([s.to_string(), p.to_string(), q.to_string(), num(b), opt(h)])?;
    w.flush()?;
    let mut lines = vec![format!("B^{s}_{{{p},{q}}} = {b:e}")];
    if let Some(h) = h {
        lines.push(format!("H^{s} = {h:e}"));
    }
    Ok(lines)
}

/// The identity and inequality suite. Fails iff an exact identity or a
/// constant-one inequality fails; monitors are only recorded.
pub fn verify(cfg: &ExperimentConfig) -> Outcome {
    cfg.validate()?;
    let lp = littlewood_paley(cfg);
    let suite = SuiteConfig {
        grid: cfg.grid()?,
        seed: cfg.seed,
        count: cfg.count,
        inequality_count: cfg.inequality_count,
        slope: cfg.slope,
        index_samples: cfg.index_samples,
    };
    let tables = run_suite(&lp, &suite)?;
    let files = write_suite(&lp, &tables, &cfg.out)?;
    let summary = summarize(&tables);
    let failed: Vec<String> = summary
        .iter()
        .filter(|s| !s.passed())
        .map(|s| format!("{}/{}: {} of {} rows failed (worst {:e})", s.table, s.id, s.failures, s.count, s.worst))
        .collect();
    let lines = vec![format!(
        "{} checks over {} tables, {} CSV files in {}",
        summary.len(),
        tables.len(),
        files.len(),
        cfg.out.display()
    )];
    if failed.is_empty() {
        Ok(lines)
    } else {
        Err(Failure::Assertion(failed.join("\n")))
    }
}

/// Runs the solver from the configured initial data.
pub fn run_simulation(cfg: &ExperimentConfig) -> Outcome {
    cfg.validate()?;
    let lp = littlewood_paley(cfg);
    let grid = cfg.grid()?;
    let u0 = match &cfg.init {
        Init::TaylorGreen => taylor_green(&grid, 0.0),
        Init::RandomSeeded => {
            let spec = FieldSpec::dealias_safe(&grid)
                .components(grid.dim())
                .solenoidal(true)
                .slope(cfg.slope)
                .amplitude(cfg.amplitude);
            random_field(&grid, &spec, derive_seed(cfg.seed, "simulate"))?
        }
        Init::Snapshot(p) => snapshot::load(p)?,
    };
    let config = SimulationConfig {
        dt: cfg.dt,
        t_end: cfg.t_end,
        snapshot_every: cfg.snapshot_every,
        out_dir: Some(cfg.out.clone()),
    };
    let out = match simulate(&lp, u0, &config) {
        Ok(o) => o,
        Err(Error::BlowupSuspected { t, .. }) => {
            return Err(Failure::Runtime(format!(
                "solver produced non-finite values at t = {t:e}; last finite state in {}",
                cfg.out.join("last_finite.bsnap").display()
            )))
        }
        Err(e) => return Err(e.into()),
    };
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    let last = out.series.last().expect("series has the initial sample");
    let mut lines = vec![
        format!("{} steps to t = {}, {} snapshots in {}", out.series.len() - 1, last.t, out.snapshots.len(), cfg.out.display()),
        format!("energy {:e} -> {:e}, {} increasing steps", out.series[0].energy, last.energy, out.energy_increases),
    ];
    if cfg.init == Init::TaylorGreen {
        let err = out.state.u.l2_distance(&taylor_green(&grid, out.state.t));
        lines.push(format!("Taylor-Green L2 error {err:e}"));
    }
    Ok(lines)
}

/// Window of scales at which the synthetic profile is resolved, scanned in
/// quarter octaves.
fn resolved_window(profile: &ShellProfile, cfg: &ExperimentConfig) -> Result<(f64, f64), Failure> {
    let grid = cfg.grid()?;
    let ok: Vec<f64> = (-24..=24)
        .map(|k| 2f64.powf(k as f64 / 4.0))
        .filter(|&l| profile.rescaled(&grid, l).is_ok())
        .collect();
    match (ok.first(), ok.last()) {
        (Some(&lo), Some(&hi)) if hi > lo => Ok((lo, hi)),
        _ => Err(Failure::Runtime(format!("the synthetic profile is not resolved at any scale on grid N = {}", cfg.size))),
    }
}

const DIAGNOSE_HEADER: [&str; 10] = [
    "t",
    "eps",
    "p",
    "q",
    "norm",
    "fitted_slope_running",
    "budget_lhs",
    "budget_rhs",
    "ratio",
    "interp_slack",
];

struct Row {
    t: f64,
    norm: f64,
    budget: Option<(f64, f64, Option<f64>)>,
    slack: Option<f64>,
}

struct Family {
    eps: f64,
    p: Exponent,
    q: Exponent,
    rows: Vec<Row>,
    skipped: usize,
}

fn running_slopes(rows: &[Row], t_blowup: Option<f64>) -> Vec<Option<f64>> {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.norm)).collect();
    (0..rows.len())
        .map(|i| t_blowup.and_then(|tb| fit_rate(&pts[..=i], tb).ok()).map(|f| f.slope))
        .collect()
}

fn synthetic_families(cfg: &ExperimentConfig, lp: &LittlewoodPaley) -> Result<Vec<Family>, Failure> {
    let grid = cfg.grid()?;
    let tb = cfg.t_blowup.expect("validated");
    let profile = ShellProfile::default();
    let (lo, hi) = resolved_window(&profile, cfg)?;
    let times = geometric_times(tb, lo, hi, cfg.samples);
    let requests: Vec<NormRequest> = cfg
        .eps
        .iter()
        .flat_map(|&e| cfg.pq.iter().map(move |&(p, q)| NormRequest::new(e, p, q)))
        .collect();
    let fam = synthetic_blowup_family(lp, &profile, &grid, tb, &requests, &times)?;
    Ok(requests
        .iter()
        .enumerate()
        .map(|(i, r)| Family {
            eps: r.eps,
            p: r.p,
            q: r.q,
            rows: fam.series(i).into_iter().map(|(t, norm)| Row { t, norm, budget: None, slack: None }).collect(),
            skipped: fam.skipped.len(),
        })
        .collect())
}

fn snapshot_families(cfg: &ExperimentConfig, lp: &LittlewoodPaley, dir: &Path) -> Result<Vec<Family>, Failure> {
    let index = read_snapshot_index(dir)?;
    if index.is_empty() {
        return Err(Failure::Runtime(format!("no snapshots listed in {}", dir.join("snapshots.csv").display())));
    }
    let mut fields = Vec::with_capacity(index.len());
    for (t, p) in &index {
        fields.push((*t, snapshot::load(p)?));
    }
    let n = fields[0].1.grid().dim();
    let mut out = Vec::new();
    for &eps in &cfg.eps {
        let sel = select_indices(n, eps, cfg.r)?;
        for &(p, q) in &cfg.pq {
            let req = [NormRequest::new(eps, p, q)];
            let mut rows = Vec::with_capacity(fields.len());
            for (i, (t, u)) in fields.iter().enumerate() {
                let norm = evaluate_norms(lp, u, &req)?[0];
                let slack = qualitative_sample(lp, *t, u, eps)?.interpolation.relative();
                let budget = if i > 0 {
                    let (ta, ua) = &fields[i - 1];
                    let h = t - ta;
                    let mut a = SolverState::new(ua.clone(), h)?;
                    a.t = *ta;
                    let mut b = SolverState::new(u.clone(), h)?;
                    b.t = *t;
                    let terms = energy_budget(lp, &a, &b, &sel)?;
                    Some((terms.lhs + terms.dissipation, terms.pairing, terms.ratio.value()))
                } else {
                    None
                };
                rows.push(Row { t: *t, norm, budget, slack: Some(slack) });
            }
            out.push(Family { eps, p, q, rows, skipped: 0 });
        }
    }
    Ok(out)
}

/// `t,norm` pairs from a CSV file, fitted for the first configured family.
fn csv_family(cfg: &ExperimentConfig, path: &Path) -> Result<Vec<Family>, Failure> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Failure::Runtime(format!("{} has no {name:?} column", path.display())))
    };
    let (ct, cn) = (col("t")?, col("norm")?);
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |c: usize| {
            rec.get(c)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| Failure::Runtime(format!("{}: bad number in record {rec:?}", path.display())))
        };
        rows.push(Row { t: parse(ct)?, norm: parse(cn)?, budget: None, slack: None });
    }
    if rows.is_empty() {
        return Err(Failure::Runtime(format!("{} has no samples", path.display())));
    }
    let (p, q) = cfg.pq[0];
    Ok(vec![Family { eps: cfg.eps[0], p, q, rows, skipped: 0 }])
}

/// Norm series, budget terms and rate fits; `emit` overrides the CSV path.
pub fn diagnose(cfg: &ExperimentConfig, emit: Option<&Path>) -> Outcome {
    cfg.validate_diagnostics()?;
    let lp = littlewood_paley(cfg);
    let families = match &cfg.series {
        Series::Synthetic => synthetic_families(cfg, &lp)?,
        Series::Path(p) if p.is_dir() => snapshot_families(cfg, &lp, p)?,
        Series::Path(p) if p.is_file() => csv_family(cfg, p)?,
        Series::Path(p) => return Err(Failure::Runtime(format!("series {} does not exist", p.display()))),
    };
    fs::create_dir_all(&cfg.out)?;
    let path: PathBuf = emit.map_or_else(|| cfg.out.join("diagnostics.csv"), Path::to_path_buf);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_writer(File::create(&path)?);
    w.write_record(DIAGNOSE_HEADER)?;
    let summary_path = cfg.out.join("diagnose_summary.csv");
    let mut s = csv::Writer::from_path(&summary_path)?;
    s.write_record(["eps", "p", "q", "samples", "skipped", "slope", "slope_stderr", "target", "deviation"])?;
    let mut lines = Vec::new();
    for f in &families {
        let slopes = running_slopes(&f.rows, cfg.t_blowup);
        for (row, slope) in f.rows.iter().zip(&slopes) {
            let (lhs, rhs, ratio) = match row.budget {
                Some((l, r, q)) => (Some(l), Some(r), q),
                None => (None, None, None),
            };
            w.write_record([
                num(row.t),
                f.eps.to_string(),
                f.p.to_string(),
                f.q.to_string(),
                num(row.norm),
                opt(*slope),
                opt(lhs),
                opt(rhs),
                opt(ratio),
                opt(row.slack),
            ])?;
        }
        let target = -0.5 * f.eps;
        let fit = cfg
            .t_blowup
            .map(|tb| fit_rate(&f.rows.iter().map(|r| (r.t, r.norm)).collect::<Vec<_>>(), tb))
            .transpose()?;
        let (slope, err) = (fit.map(|x| x.slope), fit.map(|x| x.slope_stderr));
        s.write_record([
            f.eps.to_string(),
            f.p.to_string(),
            f.q.to_string(),
            f.rows.len().to_string(),
            f.skipped.to_string(),
            opt(slope),
            opt(err),
            num(target),
            opt(slope.map(|v| v - target)),
        ])?;
        lines.push(match slope {
            Some(v) => format!(
                "eps={} p={} q={}: slope {v:.4} (target {target}, deviation {:+.4}) over {} samples",
                f.eps,
                f.p,
                f.q,
                v - target,
                f.rows.len()
            ),
            None => format!("eps={} p={} q={}: {} samples, no blow-up time given", f.eps, f.p, f.q, f.rows.len()),
        });
    }
    w.flush()?;
    s.flush()?;
    lines.push(format!("series in {}, summary in {}", path.display(), summary_path.display()));
    Ok(lines)
}
