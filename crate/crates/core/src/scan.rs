//! Angular maps of dW/dOmega over a rectangular (theta, phi) grid, computed
//! cell-parallel, plus ridge location and the CSV / 16-bit PGM writers.
//!
//! Cells are independent: the map is a data-parallel loop over a shared
//! read-only [`Integrator`], results land in a preallocated buffer, and the
//! output is bit-identical for any worker count. `THOMSON_THREADS` caps the
//! worker pool.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::dynamics::Scenario;
use crate::error::{Error, Result};
use crate::radiation::{ApproxKernel, CellEmission, Direction, Integrator};

/// Uniform cell-center grid: theta_i = (i + 1/2) pi / n_theta in (0, pi),
/// phi_j = (j + 1/2) 2 pi / n_phi in [0, 2 pi).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngularGrid {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl AngularGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || n_phi < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid must be at least 2x2, got {n_theta}x{n_phi}"
            )));
        }
        Ok(AngularGrid { n_theta, n_phi })
    }

    pub fn theta(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * std::f64::consts::PI / self.n_theta as f64
    }

    pub fn phi(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * 2.0 * std::f64::consts::PI / self.n_phi as f64
    }

    pub fn cells(&self) -> usize {
        self.n_theta * self.n_phi
    }
}

/// Which angular distribution a map holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Total,
    Pol1,
    Pol2,
    ApproxTotal,
    ApproxPol1,
    ApproxPol2,
}

impl Channel {
    pub const ALL: [Channel; 6] = [
        Channel::Total,
        Channel::Pol1,
        Channel::Pol2,
        Channel::ApproxTotal,
        Channel::ApproxPol1,
        Channel::ApproxPol2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Channel::Total => "total",
            Channel::Pol1 => "pol1",
            Channel::Pol2 => "pol2",
            Channel::ApproxTotal => "approx_total",
            Channel::ApproxPol1 => "approx_pol1",
            Channel::ApproxPol2 => "approx_pol2",
        }
    }

    pub fn parse(name: &str) -> Option<Channel> {
        Channel::ALL.into_iter().find(|c| c.name() == name)
    }

    fn is_exact(&self) -> bool {
        matches!(self, Channel::Total | Channel::Pol1 | Channel::Pol2)
    }
}

/// One channel of dW/dOmega on a grid, row-major with theta as the slow
/// index. Values stay linear (atomic units); logarithms are taken only at
/// output time to avoid precision loss.
#[derive(Debug, Clone)]
pub struct AngularMap {
    pub grid: AngularGrid,
    pub channel: Channel,
    pub values: Vec<f64>,
    pub converged: Vec<bool>,
    /// Scenario digest the map was computed from.
    pub meta: String,
}

impl AngularMap {
    pub fn get(&self, i_theta: usize, j_phi: usize) -> f64 {
        self.values[i_theta * self.grid.n_phi + j_phi]
    }

    pub fn is_converged(&self, i_theta: usize, j_phi: usize) -> bool {
        self.converged[i_theta * self.grid.n_phi + j_phi]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

fn worker_count() -> Option<usize> {
    std::env::var("THOMSON_THREADS").ok()?.parse().ok().filter(|&n| n > 0)
}

/// Compute one map per requested channel. Deterministic regardless of the
/// execution order of cells; per-cell non-convergence lands in the mask.
pub fn compute_map(s: &Scenario, grid: &AngularGrid, channels: &[Channel]) -> Vec<AngularMap> {
    compute_map_with_threads(s, grid, channels, worker_count())
}

/// As [`compute_map`] with an explicit worker count (`None` = the global
/// rayon pool). Exposed so determinism across worker counts is testable
/// without touching the environment.
pub fn compute_map_with_threads(
    s: &Scenario,
    grid: &AngularGrid,
    channels: &[Channel],
    threads: Option<usize>,
) -> Vec<AngularMap> {
    let want_exact = channels.iter().any(Channel::is_exact);
    let want_approx = channels.iter().any(|c| !c.is_exact());
    let approx = want_approx.then_some(ApproxKernel::Kappa5);

    let integ = Integrator::new(s);
    let n_phi = grid.n_phi;
    let mut cells: Vec<Option<CellEmission>> = vec![None; grid.cells()];
    let fill = |cells: &mut Vec<Option<CellEmission>>| {
        cells.par_iter_mut().enumerate().for_each(|(idx, cell)| {
            let dir = Direction::new(grid.theta(idx / n_phi), grid.phi(idx % n_phi));
            *cell = Some(integ.emission(&dir, want_exact, approx));
        });
    };
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("worker pool")
            .install(|| fill(&mut cells)),
        None => fill(&mut cells),
    }

    let digest = s.digest();
    channels
        .iter()
        .map(|&channel| {
            let mut values = Vec::with_capacity(cells.len());
            let mut converged = Vec::with_capacity(cells.len());
            for cell in &cells {
                let cell = cell.as_ref().unwrap();
                let r = if channel.is_exact() { &cell.exact } else { &cell.approx };
                let r = r.as_ref().expect("requested channel was computed");
                let (v, ok) = match channel {
                    Channel::Total | Channel::ApproxTotal => (Some(r.total), r.converged),
                    Channel::Pol1 | Channel::ApproxPol1 => (r.pol1, r.converged),
                    Channel::Pol2 | Channel::ApproxPol2 => (r.pol2, r.converged),
                };
                match v {
                    Some(v) => {
                        values.push(v);
                        converged.push(ok);
                    }
                    None => {
                        // Degenerate on-axis direction: no polarization split.
                        values.push(0.0);
                        converged.push(false);
                    }
                }
            }
            AngularMap { grid: *grid, channel, values, converged, meta: digest.clone() }
        })
        .collect()
}

/// Cell-center theta of the maximum of one phi column; ties break toward
/// smaller theta. Errors on an all-zero column.
pub fn ridge_locate(map: &AngularMap, phi_index: usize) -> Result<f64> {
    let mut best: Option<(usize, f64)> = None;
    for i in 0..map.grid.n_theta {
        let v = map.get(i, phi_index);
        if best.map_or(true, |(_, bv)| v > bv) {
            best = Some((i, v));
        }
    }
    match best {
        Some((i, v)) if v > 0.0 => Ok(map.grid.theta(i)),
        _ => Err(Error::AllZeroColumn),
    }
}

/// UTF-8 CSV table, one row per cell in row-major theta-then-phi order.
/// Floats carry 17 significant digits so a parse-back reproduces the f64
/// values bit-exactly; `ln_value` of an empty cell is `-inf`.
pub fn write_csv(map: &AngularMap, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(64 * map.values.len() + 64);
    out.push_str("theta_over_pi,phi_over_pi,value_au,ln_value,converged\n");
    for i in 0..map.grid.n_theta {
        let theta = map.grid.theta(i) / std::f64::consts::PI;
        for j in 0..map.grid.n_phi {
            let phi = map.grid.phi(j) / std::f64::consts::PI;
            let v = map.get(i, j);
            let _ = write!(out, "{:.16e},{:.16e},{:.16e},", theta, phi, v);
            if v > 0.0 {
                let _ = write!(out, "{:.16e}", v.ln());
            } else {
                out.push_str("-inf");
            }
            let _ = writeln!(out, ",{}", if map.is_converged(i, j) { 1 } else { 0 });
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Binary 16-bit PGM (P5, maxval 65535, big-endian samples) of
/// ln(dW/dOmega) clipped to `clip_ln = (lo, hi)`. Width is n_phi, height is
/// n_theta with the smallest theta in row 0; zero and unconverged cells map
/// to black.
pub fn write_heatmap(map: &AngularMap, path: &Path, clip_ln: (f64, f64)) -> Result<()> {
    let (lo, hi) = clip_ln;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "clip range must be finite with lo < hi, got ({lo}, {hi})"
        )));
    }
    let mut bytes = Vec::with_capacity(2 * map.values.len() + 32);
    bytes.extend_from_slice(format!("P5\n{} {}\n65535\n", map.grid.n_phi, map.grid.n_theta).as_bytes());
    for i in 0..map.grid.n_theta {
        for j in 0..map.grid.n_phi {
            let v = map.get(i, j);
            let pixel: u16 = if v > 0.0 && map.is_converged(i, j) {
                let t = ((v.ln() - lo) / (hi - lo)).clamp(0.0, 1.0);
                (65535.0 * t).round() as u16
            } else {
                0
            };
            bytes.extend_from_slice(&pixel.to_be_bytes());
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}
