//! Batch command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::certify::{certify, Verdict};
use crate::config::RunConfig;
use crate::dispersion::{attenuation, phase_speed};
use crate::error::{Error, Result};
use crate::kernels::kernel_time_domain;
use crate::kk::{kk_phase_speed, kk_residual};
use crate::solve::{superpose, PointSource, PointSourceSum};
use crate::synth::{assemble_green_with, suggest_grid, DEFAULT_TAIL_FLOOR};

/// Usage and configuration errors.
pub const EXIT_USAGE: i32 = 64;
/// Numerical failures inside a module.
pub const EXIT_SOFTWARE: i32 = 70;
pub const EXIT_IO: i32 = 74;

const DEFAULT_GREEN_N: usize = 1 << 16;

#[derive(Debug, Parser)]
#[command(name = "attenuwave", version, about = "Causality checks and Green functions for attenuated waves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads; all cores when unset.
    #[arg(long, global = true, env = "ATTENUWAVE_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// alpha*, attenuation and phase speed on the grid (dispersion.csv).
    Dispersion,
    /// Causality report (certify.json); exit 0 causal, 1 refuted, 2 inconclusive.
    Certify,
    /// Green function shells over a radius table (green.csv).
    Green,
    /// Time-domain kernel of a spectral multiplier (kernel.csv).
    Kernel,
    /// Kramers-Kronig phase speed against the model's own (kk.csv).
    #[command(name = "kk-check")]
    KkCheck,
    /// Point-source superposition at probes (solve_probe_<i>.csv).
    Solve,
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_USAGE,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_SOFTWARE,
    }
}

pub fn execute(cli: &Cli) -> Result<i32> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("--config is required".into()))?;
    let config = RunConfig::load(path)?;
    if let Some(0) = cli.threads {
        return Err(Error::Config("--threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    fs::create_dir_all(&cli.out)?;
    pool.install(|| match cli.command {
        Command::Dispersion => cmd_dispersion(&config, &cli.out).map(|_| 0),
        Command::Certify => cmd_certify(&config, &cli.out),
        Command::Green => cmd_green(&config, &cli.out).map(|_| 0),
        Command::Kernel => cmd_kernel(&config, &cli.out).map(|_| 0),
        Command::KkCheck => cmd_kk(&config, &cli.out).map(|_| 0),
        Command::Solve => cmd_solve(&config, &cli.out).map(|_| 0),
    })
}

/// Seventeen significant digits.
fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.16e}")
    }
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let line: Vec<String> = row.into_iter().map(num).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

pub fn cmd_dispersion(config: &RunConfig, out: &Path) -> Result<()> {
    let m = &config.model;
    let grid = config.grid()?;
    let rows = grid.omegas().into_iter().map(|w| {
        let a = m.alpha_star_real(w);
        vec![w, a.re, a.im, attenuation(m, w), phase_speed(m, w).unwrap_or(f64::NAN)]
    });
    write_csv(&out.join("dispersion.csv"), &["omega", "re_alpha_star", "im_alpha_star", "alpha", "c"], rows)
}

pub fn cmd_certify(config: &RunConfig, out: &Path) -> Result<i32> {
    let (scan, tol) = config.scan()?;
    let report = certify(&config.model, &scan, tol)?;
    fs::write(out.join("certify.json"), report.to_json() + "\n")?;
    println!("{}", report.verdict.as_str());
    Ok(match report.verdict {
        Verdict::CertifiedCausal => 0,
        Verdict::Refuted => 1,
        Verdict::Inconclusive => 2,
    })
}

pub fn cmd_green(config: &RunConfig, out: &Path) -> Result<()> {
    let block = config.green.as_ref().ok_or_else(|| Error::Config("missing [green] block".into()))?;
    let opts = block.options();
    let r_min = block.radii.first().copied().ok_or_else(|| Error::Config("green.radii is empty".into()))?;
    let grid = match config.grid {
        Some(g) => g,
        None => suggest_grid(&config.model, r_min, DEFAULT_GREEN_N, opts.tail_floor.min(DEFAULT_TAIL_FLOOR))?,
    };
    let field = assemble_green_with(&config.model, &block.radii, &grid, &opts)?;
    let rows = field.radii.iter().zip(&field.shells).zip(&field.travel_time).flat_map(|((&r, shell), &tt)| {
        shell.samples.iter().enumerate().map(move |(j, &v)| vec![r, shell.time(j) + tt, v])
    });
    write_csv(&out.join("green.csv"), &["r", "t", "value"], rows)?;
    let floors: Vec<f64> = field.shells.iter().map(|s| s.floor).collect();
    write_json(
        &out.join("green.json"),
        &json!({
            "model": config.model,
            "grid": grid,
            "radii": field.radii,
            "travel_time": field.travel_time,
            "bound_speed": field.bound_speed,
            "floor": floors,
        }),
    )
}

pub fn cmd_kernel(config: &RunConfig, out: &Path) -> Result<()> {
    let block = config.kernel.as_ref().ok_or_else(|| Error::Config("missing [kernel] block".into()))?;
    block.multiplier.validate().map_err(|e| Error::Config(e.to_string()))?;
    let grid = config.grid()?;
    let k = kernel_time_domain(&block.multiplier, &grid, block.regularizer, block.normalization)?;
    write_csv(
        &out.join("kernel.csv"),
        &["t", "value"],
        k.samples.iter().enumerate().map(|(j, &v)| vec![k.time(j), v]),
    )?;
    write_json(
        &out.join("kernel.json"),
        &json!({
            "multiplier": block.multiplier,
            "grid": grid,
            "regularizer": block.regularizer,
            "normalization": block.normalization,
            "floor": k.floor,
        }),
    )
}

pub fn cmd_kk(config: &RunConfig, out: &Path) -> Result<()> {
    let m = &config.model;
    let grid = config.grid()?;
    let curve = kk_phase_speed(m, &grid)?;
    let rows = curve
        .omega
        .iter()
        .zip(&curve.slowness)
        .map(|(&w, &s)| vec![w, s, 1.0 / s, phase_speed(m, w).unwrap_or(f64::NAN)]);
    write_csv(&out.join("kk.csv"), &["omega", "slowness", "c_kk", "c_model"], rows)?;
    let worst = curve
        .omega
        .iter()
        .zip(&curve.slowness)
        .filter_map(|(&w, &s)| phase_speed(m, w).ok().map(|c| (c * s - 1.0).abs()))
        .fold(0.0f64, f64::max);
    write_json(
        &out.join("kk.json"),
        &json!({
            "model": config.model,
            "grid": grid,
            "kk_residual": kk_residual(m, &grid)?,
            "max_relative_speed_error": worst,
        }),
    )
}

pub fn cmd_solve(config: &RunConfig, out: &Path) -> Result<()> {
    let block = config.solve.as_ref().ok_or_else(|| Error::Config("missing [solve] block".into()))?;
    let grid = config.grid()?;
    let terms = block
        .sources
        .iter()
        .map(|s| {
            Ok(PointSource { position: s.position, weight: s.weight, waveform: s.waveform.sample(&grid, block.t0)? })
        })
        .collect::<Result<Vec<_>>>()?;
    if terms.is_empty() || block.probes.is_empty() {
        return Err(Error::Config("solve needs at least one source and one probe".into()));
    }
    let traces = superpose(&config.model, &PointSourceSum { terms }, &block.probes, &grid)?;
    for (i, p) in traces.iter().enumerate() {
        let rows = p.samples.iter().enumerate().map(|(j, &v)| vec![p.time(j), v]);
        write_csv(&out.join(format!("solve_probe_{i}.csv")), &["t", "value"], rows)?;
    }
    let floors: Vec<f64> = traces.iter().map(|p| p.floor).collect();
    write_json(
        &out.join("solve.json"),
        &json!({
            "model": config.model,
            "grid": grid,
            "t0": block.t0,
            "probes": block.probes,
            "floor": floors,
        }),
    )
}
