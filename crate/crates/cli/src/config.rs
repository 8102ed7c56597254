//! Run configuration: `key = value` file with `#` comments, overridable by
//! command-line flags. Unknown keys and malformed values are reported with
//! their line number. Angles (phi0) are given in units of pi, matching the
//! axis conventions of the output tables.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use thomson_core::dynamics::{ElectronInit, QuadSettings};
use thomson_core::pulse::PulseParams;
use thomson_core::scan::Channel;
use thomson_core::{Scenario, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    HeadOn,
    Deg90,
    Custom(Vec3),
}

impl Geometry {
    fn parse(text: &str) -> Result<Geometry> {
        match text {
            "headon" => Ok(Geometry::HeadOn),
            "deg90" => Ok(Geometry::Deg90),
            other => {
                let inner = other
                    .strip_prefix("custom(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| {
                        anyhow!("geometry must be headon, deg90 or custom(x,y,z), got `{other}`")
                    })?;
                let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    bail!("custom geometry needs three components, got `{other}`");
                }
                let mut c = [0.0f64; 3];
                for (slot, p) in c.iter_mut().zip(&parts) {
                    *slot = p.parse().with_context(|| format!("bad component `{p}`"))?;
                }
                let v = Vec3::new(c[0], c[1], c[2]);
                if (v.norm() - 1.0).abs() > 1e-6 {
                    bail!("custom direction must be a unit vector, |d| = {}", v.norm());
                }
                Ok(Geometry::Custom(v))
            }
        }
    }

    pub fn direction(&self) -> Vec3 {
        match self {
            Geometry::HeadOn => Vec3::new(0.0, 0.0, -1.0),
            Geometry::Deg90 => Vec3::new(0.0, 1.0, 0.0),
            Geometry::Custom(v) => *v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub eta: f64,
    pub omega_au: f64,
    pub tau: f64,
    pub n_c: f64,
    /// Carrier-envelope phase in units of pi.
    pub phi0_pi: f64,
    pub gamma: f64,
    pub geometry: Geometry,
    pub n_theta: usize,
    pub n_phi: usize,
    pub tol: f64,
    pub max_per_period: u32,
    pub outdir: PathBuf,
    pub channels: Vec<Channel>,
    /// ln clip range for heatmaps; derived from the data when absent.
    pub clip_ln: Option<(f64, f64)>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            eta: 50.0,
            omega_au: 0.043,
            tau: 1.0,
            n_c: 0.0,
            phi0_pi: 0.0,
            gamma: 10.0,
            geometry: Geometry::HeadOn,
            n_theta: 181,
            n_phi: 361,
            tol: 1e-4,
            max_per_period: 4096,
            outdir: PathBuf::from("."),
            channels: vec![Channel::Total],
            clip_ln: None,
        }
    }
}

pub fn parse_channels(text: &str) -> Result<Vec<Channel>> {
    let mut out = Vec::new();
    for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let c = Channel::parse(name).ok_or_else(|| {
            anyhow!(
                "unknown channel `{name}` (expected one of {})",
                Channel::ALL.map(|c| c.name()).join(", ")
            )
        })?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    if out.is_empty() {
        bail!("channel list is empty");
    }
    Ok(out)
}

fn parse_clip(text: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        bail!("clip_ln must be `lo,hi`, got `{text}`");
    }
    let lo: f64 = parts[0].parse().context("bad clip_ln lower bound")?;
    let hi: f64 = parts[1].parse().context("bad clip_ln upper bound")?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        bail!("clip_ln must be finite with lo < hi, got ({lo}, {hi})");
    }
    Ok((lo, hi))
}

/// Parse a configuration file. Flags are applied on top by the caller.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {lineno}: expected `key = value`, got `{raw}`"))?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            bail!("line {lineno}: missing value for `{key}`");
        }
        apply_key(&mut cfg, key, value).map_err(|e| anyhow!("line {lineno}: {e}"))?;
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value.parse().map_err(|_| anyhow!("invalid number `{value}` for `{key}`"))
}

fn apply_key(cfg: &mut RunConfig, key: &str, value: &str) -> Result<()> {
    match key {
        "eta" => cfg.eta = parse_f64(key, value)?,
        "omega_au" => cfg.omega_au = parse_f64(key, value)?,
        "tau" => cfg.tau = parse_f64(key, value)?,
        "n_c" => cfg.n_c = parse_f64(key, value)?,
        "phi0" => cfg.phi0_pi = parse_f64(key, value)?,
        "gamma" => cfg.gamma = parse_f64(key, value)?,
        "geometry" => cfg.geometry = Geometry::parse(value)?,
        "n_theta" => cfg.n_theta = value.parse().map_err(|_| anyhow!("invalid n_theta `{value}`"))?,
        "n_phi" => cfg.n_phi = value.parse().map_err(|_| anyhow!("invalid n_phi `{value}`"))?,
        "tol" => cfg.tol = parse_f64(key, value)?,
        "max_per_period" => {
            cfg.max_per_period = value.parse().map_err(|_| anyhow!("invalid max_per_period `{value}`"))?
        }
        "outdir" => cfg.outdir = PathBuf::from(value),
        "channels" => cfg.channels = parse_channels(value)?,
        "clip_ln" => cfg.clip_ln = Some(parse_clip(value)?),
        other => bail!("unknown key `{other}`"),
    }
    Ok(())
}

pub fn validate(cfg: &RunConfig) -> Result<()> {
    if !(cfg.eta > 0.0) {
        bail!("eta must be > 0, got {}", cfg.eta);
    }
    if !(cfg.omega_au > 0.0) {
        bail!("omega_au must be > 0, got {}", cfg.omega_au);
    }
    if !(cfg.tau > 0.0) {
        bail!("tau must be > 0, got {}", cfg.tau);
    }
    if !(cfg.n_c >= 0.0) {
        bail!("n_c must be >= 0, got {}", cfg.n_c);
    }
    if !(cfg.gamma > 1.0) {
        bail!("gamma must be > 1, got {}", cfg.gamma);
    }
    if cfg.n_theta < 2 || cfg.n_phi < 2 {
        bail!("grid must be at least 2x2, got {}x{}", cfg.n_theta, cfg.n_phi);
    }
    if !(cfg.tol > 0.0 && cfg.tol < 1.0) {
        bail!("tol must be in (0, 1), got {}", cfg.tol);
    }
    if cfg.max_per_period < 2 {
        bail!("max_per_period must be >= 2, got {}", cfg.max_per_period);
    }
    Ok(())
}

impl RunConfig {
    pub fn scenario(&self) -> Result<Scenario> {
        let pulse = PulseParams::new(
            self.eta,
            self.omega_au,
            self.tau,
            self.n_c,
            self.phi0_pi * std::f64::consts::PI,
        )?;
        let electron = ElectronInit::new(self.gamma, self.geometry.direction())?;
        let quad = QuadSettings {
            init_per_period: 32.min(self.max_per_period),
            max_per_period: self.max_per_period,
            rel_tol: self.tol,
        };
        Ok(Scenario::with_quad(pulse, electron, quad))
    }
}
