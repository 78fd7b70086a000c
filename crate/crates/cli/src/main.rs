use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use orbitconf::stats_engine::{run, Mode, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(
    name = "orbitconf",
    version,
    about = "Twisted point counts and orbit configuration cohomology"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Average of a statistic over Poly_n(F_q^*), by exhaustive scan.
    Pointcount(Common),
    /// Stable inner products with H^i and the resulting series.
    Cohomology(Common),
    /// Both sides of the twisted Grothendieck-Lefschetz identity at fixed n.
    VerifyGlt(Common),
    /// Delta count, norm-form witness counts and the cohomological count.
    Normform(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    q: u32,
    #[arg(long, default_value_t = 1)]
    d: u32,
    /// Single degree; use --n-range for several.
    #[arg(long, conflicts_with = "n_range")]
    n: Option<u32>,
    /// Inclusive degree range `A..B`.
    #[arg(long)]
    n_range: Option<String>,
    /// Statistic such as `X[1,chi 1]*X[1,chi -1] - X[1,chi 0]`, or `delta`.
    #[arg(long, default_value = "1")]
    stat: String,
    #[arg(long, default_value_t = 2)]
    imax: usize,
    /// Upper bound on n when searching for plateaus.
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long, default_value_t = 1)]
    shards: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn parse_range(text: &str) -> Result<(u32, u32)> {
    let (a, b) = text
        .split_once("..")
        .with_context(|| format!("expected A..B, got `{text}`"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn config(mode: Mode, c: &Common) -> Result<RunConfig> {
    let (lo, hi) = match (&c.n_range, c.n) {
        (Some(r), _) => parse_range(r)?,
        (None, Some(n)) => (n, n),
        (None, None) if mode == Mode::Cohomology => (1, 1),
        (None, None) => bail!("one of --n or --n-range is required"),
    };
    let mut cfg = RunConfig::new(mode, c.q, c.d, lo)
        .with_n_range(lo, hi)
        .with_stat(&c.stat)
        .with_shards(c.shards);
    cfg.n_max = c.n_max;
    // fixed-n modes take every degree up to n unless told otherwise
    cfg.i_max = if matches!(mode, Mode::VerifyGlt | Mode::Normform) {
        c.imax.min(lo as usize)
    } else {
        c.imax
    };
    Ok(cfg)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<bool> {
    let cli = Cli::parse();
    let (mode, common) = match &cli.command {
        Command::Pointcount(c) => (Mode::Pointcount, c),
        Command::Cohomology(c) => (Mode::Cohomology, c),
        Command::VerifyGlt(c) => (Mode::VerifyGlt, c),
        Command::Normform(c) => (Mode::Normform, c),
    };
    let cfg = config(mode, common)?;
    let report = run(&cfg)?;
    let format = match common.format {
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
    };
    let text = report.render(format);
    match &common.out {
        Some(path) => {
            std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?
        }
        None => println!("{text}"),
    }
    Ok(report.all_pass())
}
