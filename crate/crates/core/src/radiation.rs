//! Angular distribution of the emitted radiation.
//!
//! For every observation direction `n` the energy radiated per solid angle
//! is a chi integral over the pulse support,
//!
//! ```text
//! dW/dOmega = e0^2/(4 pi c^2) Int dchi (1 + F) / kappa^5 |w|^2 ,
//! w = n x [(n - beta) x beta_dot],   kappa = 1 - n . beta ,
//! ```
//!
//! equivalent by the change of variable `dchi = chi_rate dt` to the
//! textbook lab-time integral `e0^2/(4 pi c) Int dt kappa^-5 |w|^2`, which
//! is kept as an independent formulation evaluated along the Runge-Kutta
//! oracle trajectory. `dW/dOmega` splits into the contributions of two
//! polarization states via the projections of `w` on a basis orthogonal to
//! `n`, and a high-energy approximation replaces `w` by its on-cone limit.
//!
//! The kinematic factors entering the integrand do not depend on `n`, so
//! the [`Integrator`] tabulates them once per refinement level and shares
//! the tables across all directions of an angular map.

use std::sync::OnceLock;

use crate::dynamics::Scenario;
use crate::error::{Error, Result};
use crate::oracle::{self, OracleTrajectory};
use crate::units::{C_AU, E0_SQ};
use crate::vec3::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Observation direction given by its polar angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
    /// Unit vector (sin t cos p, sin t sin p, cos t).
    pub n: Vec3,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Direction { theta, phi, n: Vec3::new(st * cp, st * sp, ct) }
    }

    /// Direction of a (non-zero) vector.
    pub fn from_vector(v: Vec3) -> Option<Self> {
        let u = v.unit()?;
        let theta = u.z.clamp(-1.0, 1.0).acos();
        let phi = u.y.atan2(u.x).rem_euclid(2.0 * std::f64::consts::PI);
        Some(Direction { theta, phi, n: u })
    }
}

/// Orthonormal polarization pair `eps1 = n x n_L / |n x n_L|`,
/// `eps2 = n x (n x n_L) / |n x n_L|`, both orthogonal to `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationBasis {
    pub eps1: Vec3,
    pub eps2: Vec3,
}

/// Build the basis for `n`; fails when `n` is parallel to the laser axis,
/// where the construction is singular. No arbitrary fallback is chosen:
/// the total distribution stays available there, the split does not.
pub fn polarization_basis(n: Vec3) -> Result<PolarizationBasis> {
    let cross = Vec3::new(n.y, -n.x, 0.0); // n x e_z
    let norm = cross.norm();
    if norm < 1e-12 {
        return Err(Error::DegenerateDirection);
    }
    let inv = 1.0 / norm;
    let eps1 = cross * inv;
    let eps2 = (n * n.z - Vec3::new(0.0, 0.0, 1.0)) * inv;
    Ok(PolarizationBasis { eps1, eps2 })
}

/// Doppler factor `kappa = 1 - n . beta(chi)`, in (0, 2).
pub fn kappa(chi: f64, n: Vec3, s: &Scenario) -> f64 {
    1.0 - n.dot(s.velocity(chi))
}

/// The triple product `w = n x [(n - beta) x beta_dot]` evaluated from the
/// closed-form kinematics.
pub fn w_vector(chi: f64, n: Vec3, s: &Scenario) -> Vec3 {
    let smp = s.kinematic_sample(chi);
    n.cross((n - smp.beta).cross(smp.beta_dot))
}

/// Acceleration components along the polarization basis taken at the
/// instantaneous velocity direction `n = beta_hat`, in the closed forms
/// `bd1 = (bd_x b_y - b_x bd_y)/|beta x n_L|` and
/// `bd2 = (b_z (beta_perp . bd_perp) - bd_z beta_perp^2)/|beta x (beta x n_L)|`.
pub fn track_acceleration_components(chi: f64, s: &Scenario) -> Result<(f64, f64)> {
    let smp = s.kinematic_sample(chi);
    let beta = smp.beta;
    let bd = smp.beta_dot;
    if beta.norm() == 0.0 {
        return Err(Error::ZeroVelocity { chi });
    }
    let perp = (beta.x * beta.x + beta.y * beta.y).sqrt();
    if perp < 1e-300 {
        // beta along the axis: the on-track basis is as degenerate as the
        // observation basis there.
        return Err(Error::DegenerateDirection);
    }
    let d1 = (bd.x * beta.y - beta.x * bd.y) / perp;
    let half_dperp2 = beta.x * bd.x + beta.y * bd.y; // (1/2) d(beta_perp^2)/dt
    let d2 = (beta.z * half_dperp2 - bd.z * perp * perp) / (perp * beta.norm());
    Ok((d1, d2))
}

/// Angular distribution values for one observation direction. `pol1`/`pol2`
/// are `None` only for the degenerate on-axis direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionResult {
    /// dW/dOmega in atomic units.
    pub total: f64,
    pub pol1: Option<f64>,
    pub pol2: Option<f64>,
    /// Integrand samples used at the final refinement level.
    pub quad_points: usize,
    /// Whether the refinement loop met the relative tolerance before the
    /// per-period cap. Never silently accepted: unconverged cells are
    /// flagged through to the map outputs.
    pub converged: bool,
}

/// Kernel of the high-energy approximation: the derived form keeps the
/// factor `(1 - beta)^2 / kappa^5`; the further-simplified variant replaces
/// it by `1 / kappa^3`. On the velocity track the two coincide exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxKernel {
    Kappa5,
    Kappa3,
}

/// Exact plus optional approximate result for one direction.
#[derive(Debug, Clone, Copy)]
pub struct CellEmission {
    pub exact: Option<EmissionResult>,
    pub approx: Option<EmissionResult>,
}

/// Per-node kinematic factors of the chi integrand, with the Simpson weight
/// folded in. Everything here is direction-independent.
#[derive(Debug, Clone, Copy)]
struct QuadNode {
    weight: f64,
    one_plus_f: f64,
    beta: Vec3,
    beta_dot: Vec3,
    beta_sq: f64,
    bd_sq: f64,
    b_dot_bd: f64,
    /// (1 - |beta|)^2 for the approximate kernel.
    omb_sq: f64,
}

struct LevelTable {
    nodes: Vec<QuadNode>,
}

/// Shared adaptive Simpson machinery for the chi-domain integrals: uniform
/// samples per laser period, doubled until the total changes by less than
/// the configured relative tolerance, capped at `max_per_period`. The flat
/// region boundaries are kept as segment edges so the piecewise envelope
/// never straddles a Simpson panel.
pub struct Integrator<'a> {
    s: &'a Scenario,
    levels: Vec<OnceLock<LevelTable>>,
}

impl<'a> Integrator<'a> {
    pub fn new(s: &'a Scenario) -> Self {
        let mut n_levels = 1usize;
        let mut per = s.quad.init_per_period.max(2);
        while per < s.quad.max_per_period {
            per = per.saturating_mul(2);
            n_levels += 1;
        }
        let levels = (0..n_levels).map(|_| OnceLock::new()).collect();
        Integrator { s, levels }
    }

    pub fn scenario(&self) -> &Scenario {
        self.s
    }

    fn per_period(&self, level: usize) -> u32 {
        (self.s.quad.init_per_period.max(2) << level).min(self.s.quad.max_per_period)
    }

    fn level(&self, level: usize) -> &LevelTable {
        self.levels[level].get_or_init(|| self.build_level(self.per_period(level)))
    }

    fn build_level(&self, per_period: u32) -> LevelTable {
        let s = self.s;
        let period = s.pulse.period_len();
        let (lo, hi) = s.chi_support;
        let flat = s.pulse.flat_len();
        let mut segments = vec![(lo, 0.0)];
        if flat > 0.0 {
            segments.push((0.0, flat));
        }
        segments.push((flat, hi));

        let mut nodes = Vec::new();
        for (a, b) in segments {
            let len = b - a;
            let n = (((len / period) * per_period as f64).ceil() as usize)
                .max(2)
                .next_multiple_of(2);
            let h = len / n as f64;
            for i in 0..=n {
                let chi = a + i as f64 * h;
                let coeff = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let smp = s.kinematic_sample(chi);
                let beta_sq = smp.beta.norm_sqr();
                nodes.push(QuadNode {
                    weight: coeff * h / 3.0,
                    one_plus_f: 1.0 + smp.big_f,
                    beta: smp.beta,
                    beta_dot: smp.beta_dot,
                    beta_sq,
                    bd_sq: smp.beta_dot.norm_sqr(),
                    b_dot_bd: smp.beta.dot(smp.beta_dot),
                    omb_sq: (1.0 - beta_sq.sqrt()).powi(2),
                });
            }
        }
        LevelTable { nodes }
    }

    /// Sums at one refinement level: (total, pol1, pol2) for the exact
    /// integrand and, if requested, for the approximate one.
    fn sums(
        &self,
        level: usize,
        n: Vec3,
        basis: Option<&PolarizationBasis>,
        exact: bool,
        approx: Option<ApproxKernel>,
    ) -> ([f64; 3], [f64; 3], usize) {
        let table = self.level(level);
        let mut ex = [0.0f64; 3];
        let mut ap = [0.0f64; 3];
        for node in &table.nodes {
            let nb = n.dot(node.beta);
            let kap = 1.0 - nb;
            let nbd = n.dot(node.beta_dot);
            let kap2 = kap * kap;
            let inv_k5 = 1.0 / (kap2 * kap2 * kap);
            let base = node.weight * node.one_plus_f;

            let (p1, p2) = match basis {
                Some(b) => (
                    node.beta.dot(b.eps1) * nbd + node.beta_dot.dot(b.eps1) * kap,
                    node.beta.dot(b.eps2) * nbd + node.beta_dot.dot(b.eps2) * kap,
                ),
                None => (0.0, 0.0),
            };

            if exact {
                // |w|^2 expanded: |n-beta|^2 (n.bd)^2
                //   - 2 kappa (n.bd) ((n-beta).bd) + kappa^2 |bd|^2.
                let nm_b = 1.0 - 2.0 * nb + node.beta_sq;
                let w2 = nm_b * nbd * nbd - 2.0 * kap * nbd * (nbd - node.b_dot_bd)
                    + kap2 * node.bd_sq;
                let ker = base * inv_k5;
                ex[0] += ker * w2;
                ex[1] += ker * (p1 * p1);
                ex[2] += ker * (p2 * p2);
            }
            if let Some(kernel) = approx {
                let ker = match kernel {
                    ApproxKernel::Kappa5 => base * node.omb_sq * inv_k5,
                    ApproxKernel::Kappa3 => base / (kap2 * kap),
                };
                let proj = node.bd_sq - nbd * nbd; // |n x (n x bd)|^2
                let (a1, a2) = match basis {
                    Some(b) => (node.beta_dot.dot(b.eps1), node.beta_dot.dot(b.eps2)),
                    None => (0.0, 0.0),
                };
                ap[0] += ker * proj;
                ap[1] += ker * (a1 * a1);
                ap[2] += ker * (a2 * a2);
            }
        }
        (ex, ap, table.nodes.len())
    }

    /// Full refinement ladder for one direction.
    pub fn emission(
        &self,
        dir: &Direction,
        exact: bool,
        approx: Option<ApproxKernel>,
    ) -> CellEmission {
        let basis = polarization_basis(dir.n).ok();
        let tol = self.s.quad.rel_tol;
        let pref = E0_SQ / (4.0 * std::f64::consts::PI * C_AU * C_AU);

        let mut prev: Option<([f64; 3], [f64; 3])> = None;
        let mut last = ([0.0; 3], [0.0; 3], 0usize);
        let mut converged = false;
        for level in 0..self.levels.len() {
            let (ex, ap, pts) = self.sums(level, dir.n, basis.as_ref(), exact, approx);
            if let Some((pex, pap)) = prev {
                let near = |p: f64, c: f64| (c - p).abs() <= tol * c.abs();
                let ok_exact = !exact || near(pex[0], ex[0]);
                let ok_approx = approx.is_none() || near(pap[0], ap[0]);
                if ok_exact && ok_approx {
                    converged = true;
                    last = (ex, ap, pts);
                    break;
                }
            }
            last = (ex, ap, pts);
            prev = Some((ex, ap));
        }

        let (ex, ap, pts) = last;
        let wrap = |v: [f64; 3]| EmissionResult {
            total: pref * v[0],
            pol1: basis.map(|_| pref * v[1]),
            pol2: basis.map(|_| pref * v[2]),
            quad_points: pts,
            converged,
        };
        CellEmission {
            exact: exact.then(|| wrap(ex)),
            approx: approx.map(|_| wrap(ap)),
        }
    }
}

/// Exact dW/dOmega for a single direction (see [`Integrator`] for bulk
/// evaluation over a grid).
pub fn dw_domega(dir: &Direction, s: &Scenario) -> EmissionResult {
    Integrator::new(s).emission(dir, true, None).exact.unwrap()
}

/// High-energy approximation of dW/dOmega.
pub fn dw_approx(dir: &Direction, s: &Scenario, kernel: ApproxKernel) -> EmissionResult {
    Integrator::new(s).emission(dir, false, Some(kernel)).approx.unwrap()
}

/// Time-domain evaluation along a precomputed oracle trajectory (Simpson in
/// t over the uniform states). The prefactor carries one factor of c less
/// than the chi-domain form.
pub fn time_domain_dw_on(dir: &Direction, s: &Scenario, traj: &OracleTrajectory) -> EmissionResult {
    let basis = polarization_basis(dir.n).ok();
    let n = dir.n;
    let m = traj.states.len() - 1; // even by construction
    let mut sums = [0.0f64; 3];
    for (i, st) in traj.states.iter().enumerate() {
        let coeff = if i == 0 || i == m {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let beta = st.beta();
        let bd = st.beta_dot(s);
        let kap = 1.0 - n.dot(beta);
        let w = n.cross((n - beta).cross(bd));
        let inv_k5 = 1.0 / kap.powi(5);
        sums[0] += coeff * inv_k5 * w.norm_sqr();
        if let Some(b) = &basis {
            let w1 = w.dot(b.eps1);
            let w2 = w.dot(b.eps2);
            sums[1] += coeff * inv_k5 * w1 * w1;
            sums[2] += coeff * inv_k5 * w2 * w2;
        }
    }
    let pref = E0_SQ / (4.0 * std::f64::consts::PI * C_AU) * traj.dt / 3.0;
    EmissionResult {
        total: pref * sums[0],
        pol1: basis.map(|_| pref * sums[1]),
        pol2: basis.map(|_| pref * sums[2]),
        quad_points: traj.states.len(),
        converged: true,
    }
}

/// Time-domain dW/dOmega; runs the Runge-Kutta oracle internally.
pub fn time_domain_dw(dir: &Direction, s: &Scenario) -> Result<EmissionResult> {
    let traj = oracle::simulate(s, oracle::DEFAULT_STEPS_PER_PERIOD)?;
    Ok(time_domain_dw_on(dir, s, &traj))
}

/// Deterministically seeded observation directions, away from the poles.
pub fn seeded_directions(count: usize, seed: u64) -> Vec<Direction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let theta = rng.gen_range(0.02..0.98) * std::f64::consts::PI;
            let phi = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            Direction::new(theta, phi)
        })
        .collect()
}

/// One row of the chi-domain vs time-domain cross-check.
#[derive(Debug, Clone, Copy)]
pub struct DomainSample {
    pub theta: f64,
    pub phi: f64,
    pub chi_domain: f64,
    pub time_domain: f64,
    pub rel_dev: f64,
}

#[derive(Debug, Clone)]
pub struct DomainComparison {
    pub samples: Vec<DomainSample>,
    pub max_rel_dev: f64,
}

/// Compare the two formulations of dW/dOmega on seeded random directions.
/// This is the absolute-normalization check: the two integrals share no
/// code path beyond the pulse definition.
pub fn compare_domains(
    s: &Scenario,
    n_dirs: usize,
    seed: u64,
    oracle_steps_per_period: u32,
) -> Result<DomainComparison> {
    let traj = oracle::simulate(s, oracle_steps_per_period)?;
    let integ = Integrator::new(s);
    let mut samples = Vec::with_capacity(n_dirs);
    let mut max_rel = 0.0f64;
    for dir in seeded_directions(n_dirs, seed) {
        let a = integ.emission(&dir, true, None).exact.unwrap().total;
        let b = time_domain_dw_on(&dir, s, &traj).total;
        let scale = a.abs().max(b.abs());
        let rel = if scale == 0.0 { 0.0 } else { (a - b).abs() / scale };
        max_rel = max_rel.max(rel);
        samples.push(DomainSample {
            theta: dir.theta,
            phi: dir.phi,
            chi_domain: a,
            time_domain: b,
            rel_dev: rel,
        });
    }
    Ok(DomainComparison { samples, max_rel_dev: max_rel })
}
