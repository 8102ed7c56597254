//! Command line front end: scenario definition via a `key = value` config
//! file plus flag overrides, and one subcommand per physics product.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use thomson_core::scan::Channel;

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "thomson",
    about = "Angular distributions of the radiation scattered by a relativistic electron in a circularly polarized plane-wave laser pulse",
    long_about = "Angular distributions of the radiation scattered by a relativistic \
electron in a circularly polarized plane-wave laser pulse.\n\n\
All quantities are in Hartree atomic units. Angle-like inputs (phi0) are \
given in units of pi; output tables list theta/pi and phi/pi the same way. \
The THOMSON_THREADS environment variable caps the map worker count."
)]
struct Cli {
    /// Configuration file (`key = value` lines, `#` comments). Flags
    /// override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for data files.
    #[arg(long = "out", global = true)]
    out: Option<PathBuf>,

    /// Laser intensity parameter eta.
    #[arg(long, global = true)]
    eta: Option<f64>,

    /// Electron Lorentz factor (> 1).
    #[arg(long, global = true)]
    gamma: Option<f64>,

    /// Collision geometry: headon, deg90 or custom(x,y,z).
    #[arg(long, global = true)]
    geometry: Option<String>,

    /// Gaussian-wing intensity FWHM in laser periods.
    #[arg(long, global = true)]
    tau: Option<f64>,

    /// Flat-region length in laser periods (>= 0).
    #[arg(long = "nc", global = true)]
    n_c: Option<f64>,

    /// Carrier-envelope phase in units of pi.
    #[arg(long, global = true)]
    phi0: Option<f64>,

    /// Central laser frequency in atomic units.
    #[arg(long = "omega-au", global = true)]
    omega_au: Option<f64>,

    /// Angular grid as N_THETAxN_PHI, e.g. 181x361.
    #[arg(long, global = true)]
    grid: Option<String>,

    /// Comma-separated channels: total, pol1, pol2, approx_total,
    /// approx_pol1, approx_pol2.
    #[arg(long, global = true)]
    channels: Option<String>,

    /// Relative tolerance of the per-direction quadrature refinement.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Electron trajectory table: chi, position, velocity, acceleration.
    Trajectory,
    /// Direction of the velocity over chi: the (theta, phi) track that
    /// predicts where the emission maxima appear.
    Betatrack,
    /// Derived scalars: velocity-circle geometry, dressed momentum,
    /// classicality parameters, drift-cancellation energy.
    Derived,
    /// Angular map of dW/dOmega; writes CSV and 16-bit PGM per channel.
    Map,
    /// Polarization-resolved angular maps (default channels pol1, pol2).
    Polmap,
    /// Cross-check the chi-domain integral against the lab-time integral
    /// along the Runge-Kutta trajectory.
    Oracle,
    /// Verify the frequency-proportionality and shape-scaling laws.
    Scalecheck,
}

fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let (a, b) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| anyhow!("grid must be N_THETAxN_PHI, e.g. 181x361, got `{text}`"))?;
    Ok((
        a.trim().parse().with_context(|| format!("bad n_theta `{a}`"))?,
        b.trim().parse().with_context(|| format!("bad n_phi `{b}`"))?,
    ))
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            config::parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(v) = cli.eta {
        cfg.eta = v;
    }
    if let Some(v) = cli.gamma {
        cfg.gamma = v;
    }
    if let Some(g) = &cli.geometry {
        cfg.geometry = config::parse_config(&format!("geometry = {g}"))
            .map(|c| c.geometry)
            .with_context(|| format!("--geometry {g}"))?;
    }
    if let Some(v) = cli.tau {
        cfg.tau = v;
    }
    if let Some(v) = cli.n_c {
        cfg.n_c = v;
    }
    if let Some(v) = cli.phi0 {
        cfg.phi0_pi = v;
    }
    if let Some(v) = cli.omega_au {
        cfg.omega_au = v;
    }
    if let Some(g) = &cli.grid {
        let (nt, np) = parse_grid(g)?;
        cfg.n_theta = nt;
        cfg.n_phi = np;
    }
    if let Some(list) = &cli.channels {
        cfg.channels = config::parse_channels(list)?;
    }
    if let Some(v) = cli.tol {
        cfg.tol = v;
    }
    if let Some(dir) = &cli.out {
        cfg.outdir = dir.clone();
    }
    config::validate(&cfg)?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = build_config(cli)?;
    match cli.command {
        Command::Trajectory => commands::trajectory(&cfg),
        Command::Betatrack => commands::betatrack(&cfg),
        Command::Derived => commands::derived(&cfg),
        Command::Map => commands::map(&cfg, &cfg.channels),
        Command::Polmap => {
            let channels = if cli.channels.is_some() {
                cfg.channels.clone()
            } else {
                vec![Channel::Pol1, Channel::Pol2]
            };
            commands::map(&cfg, &channels)
        }
        Command::Oracle => commands::oracle(&cfg),
        Command::Scalecheck => commands::scalecheck(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
