use std::path::PathBuf;
use std::process::ExitCode;

use besov_ns::Exponent;
use besov_ns_cli::commands;
use besov_ns_cli::{ExperimentConfig, Failure};
use clap::{Parser, Subcommand};

#[global_allocator]
static ALLOC: mimalloc::MiMalloc = mimalloc::MiMalloc;

/// Littlewood-Paley, Besov and Navier-Stokes experiments on periodic grids.
#[derive(Parser, Debug)]
#[command(name = "besov-ns", version)]
struct Cli {
    /// Config file of dotted `key=value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed (overrides `corpus.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Extra `key=value` overrides, applied after the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-band norms of a field and the reconstruction defect.
    Decompose {
        /// BSNAP1 snapshot; a seeded random field when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// One homogeneous Besov seminorm of a field.
    Norm {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, default_value = "2")]
        p: Exponent,
        #[arg(long, default_value = "2")]
        q: Exponent,
    },
    /// Exact identities, constant-one inequalities and implied-constant monitors.
    Verify,
    /// Pseudo-spectral Navier-Stokes run with snapshots and a time series.
    Simulate {
        #[arg(long = "n")]
        dim: Option<String>,
        #[arg(long = "N")]
        size: Option<String>,
        #[arg(long = "L")]
        length: Option<String>,
        #[arg(long)]
        dt: Option<String>,
        #[arg(long)]
        t_end: Option<String>,
        /// taylor-green, random-seeded or bsnap:<path>.
        #[arg(long)]
        init: Option<String>,
        #[arg(long)]
        snapshot_every: Option<String>,
        #[arg(long)]
        out_dir: Option<String>,
    },
    /// Norm series, energy budget and blow-up rate fits.
    Diagnose {
        /// `synthetic`, a simulate output directory or a `t,norm` CSV.
        #[arg(long)]
        series: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        r: Option<String>,
        #[arg(long = "T")]
        t_blowup: Option<String>,
        /// Path of the diagnostics CSV.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

fn apply(cfg: &mut ExperimentConfig, pairs: &[(&str, &Option<String>)]) -> Result<(), Failure> {
    for (key, v) in pairs {
        if let Some(v) = v {
            cfg.set(key, v)?;
        }
    }
    Ok(())
}

fn configure(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| besov_ns_cli::ConfigError::new("--set", format!("expected key=value, got {kv:?}")))?;
        cfg.set(k.trim(), v)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    match &cli.command {
        Command::Simulate {
            dim,
            size,
            length,
            dt,
            t_end,
            init,
            snapshot_every,
            out_dir,
        } => apply(
            &mut cfg,
            &[
                ("grid.n", dim),
                ("grid.N", size),
                ("grid.L", length),
                ("solver.dt", dt),
                ("solver.t_end", t_end),
                ("solver.init", init),
                ("solver.snapshot_every", snapshot_every),
                ("output.dir", out_dir),
            ],
        )?,
        Command::Diagnose {
            series,
            eps,
            p,
            q,
            r,
            t_blowup,
            ..
        } => {
            apply(
                &mut cfg,
                &[
                    ("diagnostics.series", series),
                    ("diagnostics.eps", eps),
                    ("diagnostics.r", r),
                    ("diagnostics.T", t_blowup),
                ],
            )?;
            if p.is_some() || q.is_some() {
                let (p0, q0) = cfg.pq[0];
                let pq = format!(
                    "{}:{}",
                    p.clone().unwrap_or_else(|| p0.to_string()),
                    q.clone().unwrap_or_else(|| q0.to_string())
                );
                cfg.set("diagnostics.pq", &pq)?;
            }
        }
        _ => {}
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> commands::Outcome {
    let cfg = configure(cli)?;
    match &cli.command {
        Command::Decompose { input } => commands::decompose(&cfg, input.as_deref()),
        Command::Norm { input, s, p, q } => commands::norm(&cfg, input.as_deref(), *s, *p, *q),
        Command::Verify => commands::verify(&cfg),
        Command::Simulate { .. } => commands::run_simulation(&cfg),
        Command::Diagnose { emit, .. } => commands::diagnose(&cfg, emit.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
