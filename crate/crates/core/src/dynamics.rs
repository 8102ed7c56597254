//! Closed-form electron kinematics in the plane-wave pulse, as explicit
//! functions of the light-front phase `chi = ct - z`, plus the derived
//! geometry of the flat-region motion and the classicality parameters.
//!
//! The central conservation law is the light-front invariant
//! `n_L . p = E/c - p_z`, which is constant for motion in any plane wave and
//! is used throughout as a consistency check.

use crate::error::{Error, Result};
use crate::pulse::PulseParams;
use crate::units::{C_AU, E_CHARGE, E_MASS};
use crate::vec3::{FourVec, Vec3};
use sha2::{Digest, Sha256};

/// Initial electron state, fully determined by the Lorentz factor and the
/// unit direction of the initial momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectronInit {
    pub gamma: f64,
    /// Unit vector of the initial momentum.
    pub direction: Vec3,
    /// Initial momentum in atomic units, `|p0| = m c sqrt(gamma^2 - 1)`.
    pub p0: Vec3,
    /// Initial energy `gamma m c^2`.
    pub energy0: f64,
    /// Initial velocity in units of c.
    pub beta0: Vec3,
    /// Light-front invariant `n_L . p0 = E0/c - p0z` (> 0).
    pub nl_dot_p0: f64,
}

impl ElectronInit {
    pub fn new(gamma: f64, direction: Vec3) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::InvalidParameter(format!("gamma must be > 1, got {gamma}")));
        }
        let norm = direction.norm();
        if !((norm - 1.0).abs() < 1e-6) {
            return Err(Error::InvalidParameter(format!(
                "direction must be a unit vector, |d| = {norm}"
            )));
        }
        let direction = direction * (1.0 / norm);
        let p_mag = E_MASS * C_AU * (gamma * gamma - 1.0).sqrt();
        let p0 = direction * p_mag;
        let energy0 = gamma * E_MASS * C_AU * C_AU;
        let beta0 = p0 * (1.0 / (gamma * E_MASS * C_AU));
        let nl_dot_p0 = energy0 / C_AU - p0.z;
        Ok(ElectronInit { gamma, direction, p0, energy0, beta0, nl_dot_p0 })
    }

    /// Head-on geometry: initial momentum antiparallel to the laser, -z.
    pub fn head_on(gamma: f64) -> Result<Self> {
        Self::new(gamma, Vec3::new(0.0, 0.0, -1.0))
    }

    /// 90-degree geometry: initial momentum along +y.
    pub fn deg90(gamma: f64) -> Result<Self> {
        Self::new(gamma, Vec3::new(0.0, 1.0, 0.0))
    }
}

/// Lorentz factor at which the initial transverse momentum in the 90-degree
/// geometry equals the peak transverse kick `|e| A0 / sqrt2`, i.e.
/// `m c sqrt(gamma^2 - 1) = eta m c / sqrt2`. Above it the second velocity
/// component keeps its sign for the whole pulse.
pub fn threshold_gamma_90deg(eta: f64) -> f64 {
    (1.0 + eta * eta / 2.0).sqrt()
}

/// Quadrature settings for the per-direction chi integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    /// Simpson samples per laser period at the first refinement level.
    pub init_per_period: u32,
    /// Refinement cap, samples per period.
    pub max_per_period: u32,
    /// Relative tolerance of the refinement loop, in (0, 1).
    pub rel_tol: f64,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings { init_per_period: 32, max_per_period: 4096, rel_tol: 1e-4 }
    }
}

/// Immutable bundle of pulse, electron and numerical settings; input to
/// every physics operation. All operations on it are pure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub pulse: PulseParams,
    pub electron: ElectronInit,
    /// Truncated pulse support `[chi_min, chi_max]`.
    pub chi_support: (f64, f64),
    pub quad: QuadSettings,
}

/// All closed-form kinematic quantities evaluated at one chi.
#[derive(Debug, Clone, Copy)]
pub struct KinematicSample {
    pub chi: f64,
    /// Envelope f(chi).
    pub f: f64,
    /// Vector potential (transverse).
    pub a: Vec3,
    /// dA/dchi.
    pub da: Vec3,
    /// `e^2 A^2 - 2 e A . p0_perp`.
    pub cal_a2: f64,
    /// `F = e^2 A^2_eff / (2 (n_L.p0)^2) + p0z / (n_L.p0)`.
    pub big_f: f64,
    /// dF/dchi.
    pub d_big_f: f64,
    /// Velocity in units of c.
    pub beta: Vec3,
    /// Acceleration d(beta)/dt, units 1/time.
    pub beta_dot: Vec3,
    /// `d(chi)/dt = c (1 - beta_z) = c / (1 + F)` (> 0).
    pub chi_rate: f64,
}

/// Geometry of the velocity during the constant-amplitude region: beta moves
/// on a circle of radius `r0` parallel to Oxy at height `z0`, so the unit
/// velocity traces the vertical line `theta = theta0` in the (theta, phi)
/// plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatCircle {
    pub r0: f64,
    pub z0: f64,
    /// Polar angle of the circle, `atan2(r0, z0)`.
    pub theta0: f64,
}

impl FlatCircle {
    /// The arccos(Z0/R0) variant as printed in the source material. It is
    /// inconsistent with the quoted angles (and undefined for |Z0| > R0);
    /// kept only so the discrepancy stays visible in reports.
    pub fn theta0_arccos_variant(&self) -> f64 {
        (self.z0 / self.r0).acos()
    }
}

impl Scenario {
    pub fn new(pulse: PulseParams, electron: ElectronInit) -> Self {
        Self::with_quad(pulse, electron, QuadSettings::default())
    }

    pub fn with_quad(pulse: PulseParams, electron: ElectronInit, quad: QuadSettings) -> Self {
        let chi_support = pulse.support();
        Scenario { pulse, electron, chi_support, quad }
    }

    /// Short hex digest of the physical and numerical parameters, used to
    /// tag output files.
    pub fn digest(&self) -> String {
        let p = &self.pulse;
        let e = &self.electron;
        let canon = format!(
            "eta={:.17e};omega={:.17e};tau={:.17e};nc={:.17e};phi0={:.17e};gamma={:.17e};dir={:.17e},{:.17e},{:.17e};quad={},{},{:.17e}",
            p.eta, p.omega_l, p.tau, p.n_c, p.phi0, e.gamma,
            e.direction.x, e.direction.y, e.direction.z,
            self.quad.init_per_period, self.quad.max_per_period, self.quad.rel_tol,
        );
        let hash = Sha256::digest(canon.as_bytes());
        hash.iter().take(6).map(|b| format!("{b:02x}")).collect()
    }

    /// `e^2 A^2_eff = e^2 A^2 - 2 e A . p0_perp`.
    pub fn eff_a2(&self, chi: f64) -> f64 {
        self.eff_a2_of(self.pulse.vector_potential(chi))
    }

    fn eff_a2_of(&self, a: Vec3) -> f64 {
        let e = E_CHARGE;
        e * e * a.norm_sqr() - 2.0 * e * a.dot(self.electron.p0.perp())
    }

    /// The longitudinal-motion function F(chi); `beta_z = F / (1 + F)`.
    pub fn big_f(&self, chi: f64) -> f64 {
        self.big_f_of(self.eff_a2(chi))
    }

    fn big_f_of(&self, cal_a2: f64) -> f64 {
        let nlp = self.electron.nl_dot_p0;
        cal_a2 / (2.0 * nlp * nlp) + self.electron.p0.z / nlp
    }

    /// Analytic dF/dchi.
    pub fn d_big_f(&self, chi: f64) -> f64 {
        self.d_big_f_of(self.pulse.vector_potential(chi), self.pulse.vector_potential_derivative(chi))
    }

    fn d_big_f_of(&self, a: Vec3, da: Vec3) -> f64 {
        let e = E_CHARGE;
        let nlp = self.electron.nl_dot_p0;
        e * da.dot(a * e - self.electron.p0.perp()) / (nlp * nlp)
    }

    /// Velocity in units of c as an explicit function of chi.
    pub fn velocity(&self, chi: f64) -> Vec3 {
        let a = self.pulse.vector_potential(chi);
        let big_f = self.big_f_of(self.eff_a2_of(a));
        self.velocity_of(a, big_f)
    }

    fn velocity_of(&self, a: Vec3, big_f: f64) -> Vec3 {
        let nlp = self.electron.nl_dot_p0;
        let opf = 1.0 + big_f;
        let perp = (self.electron.p0.perp() - a * E_CHARGE) * (1.0 / (nlp * opf));
        Vec3::new(perp.x, perp.y, big_f / opf)
    }

    /// Acceleration d(beta)/dt (1/time); identically zero outside the pulse
    /// support once the field vanishes.
    pub fn acceleration(&self, chi: f64) -> Vec3 {
        self.kinematic_sample(chi).beta_dot
    }

    /// `d(chi)/dt = c / (1 + F)`.
    pub fn chi_rate(&self, chi: f64) -> f64 {
        C_AU / (1.0 + self.big_f(chi))
    }

    /// Everything at once; cheaper than calling the single-quantity
    /// accessors when several are needed (the radiation integrals need all
    /// of them at every node).
    pub fn kinematic_sample(&self, chi: f64) -> KinematicSample {
        let a = self.pulse.vector_potential(chi);
        let da = self.pulse.vector_potential_derivative(chi);
        let f = self.pulse.envelope(chi);
        let cal_a2 = self.eff_a2_of(a);
        let big_f = self.big_f_of(cal_a2);
        let d_big_f = self.d_big_f_of(a, da);
        let beta = self.velocity_of(a, big_f);

        let e = E_CHARGE;
        let nlp = self.electron.nl_dot_p0;
        let opf = 1.0 + big_f;
        // d(beta)/dt = chi_rate * d(beta)/dchi; the c comes from chi_rate.
        let brace = da * e + (self.electron.p0.perp() - a * e) * (d_big_f / opf);
        let perp_dot = brace * (-C_AU / (opf * opf * nlp));
        let z_dot = C_AU * d_big_f / (opf * opf * opf);
        let beta_dot = Vec3::new(perp_dot.x, perp_dot.y, z_dot);

        KinematicSample {
            chi,
            f,
            a,
            da,
            cal_a2,
            big_f,
            d_big_f,
            beta,
            beta_dot,
            chi_rate: C_AU / opf,
        }
    }

    /// Position along the trajectory at each point of an ascending chi grid,
    /// with r = 0 at the first grid point. Cumulative Simpson quadrature of
    /// the closed-form integrands.
    pub fn trajectory(&self, chi_grid: &[f64]) -> Result<Vec<Vec3>> {
        if chi_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::GridNotAscending);
        }
        let nlp = self.electron.nl_dot_p0;
        let integrand = |chi: f64| -> Vec3 {
            let a = self.pulse.vector_potential(chi);
            let perp = (self.electron.p0.perp() - a * E_CHARGE) * (1.0 / nlp);
            let fz = self.big_f_of(self.eff_a2_of(a));
            Vec3::new(perp.x, perp.y, fz)
        };
        let max_h = self.pulse.period_len() / 512.0;
        let mut out = Vec::with_capacity(chi_grid.len());
        let mut r = Vec3::ZERO;
        out.push(r);
        for w in chi_grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            let n = (((b - a) / max_h).ceil() as usize).max(2).next_multiple_of(2);
            let h = (b - a) / n as f64;
            let mut acc = integrand(a) + integrand(b);
            for i in 1..n {
                let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += integrand(a + i as f64 * h) * weight;
            }
            r += acc * (h / 3.0);
            out.push(r);
        }
        Ok(out)
    }

    /// Direction angles (theta, phi) of the unit velocity at each grid
    /// point; `None` marks a vanishing velocity, whose direction is
    /// undefined. phi is mapped to [0, 2 pi).
    pub fn beta_hat_track(&self, chi_grid: &[f64]) -> Vec<Option<(f64, f64)>> {
        chi_grid
            .iter()
            .map(|&chi| {
                let beta = self.velocity(chi);
                let norm = beta.norm();
                if norm == 0.0 {
                    return None;
                }
                let theta = (beta.z / norm).clamp(-1.0, 1.0).acos();
                let phi = beta.y.atan2(beta.x).rem_euclid(2.0 * std::f64::consts::PI);
                Some((theta, phi))
            })
            .collect()
    }

    /// Velocity-circle geometry at peak field amplitude (exact on the flat
    /// region when the pulse has one).
    pub fn flat_circle(&self) -> FlatCircle {
        let a0 = self.pulse.a0();
        let nlp = self.electron.nl_dot_p0;
        let p0z = self.electron.p0.z;
        let e2a02_4 = E_CHARGE * E_CHARGE * a0 * a0 / 4.0;
        let den = nlp * nlp + e2a02_4 + p0z * nlp;
        let r0 = E_CHARGE.abs() * a0 / std::f64::consts::SQRT_2 * nlp / den;
        let z0 = (e2a02_4 + p0z * nlp) / den;
        FlatCircle { r0, z0, theta0: r0.atan2(z0) }
    }

    /// Dressed four-momentum `q0 = p0 + (e^2 A0^2 / (4 n_L.p0)) n_L`; its
    /// z component vanishes exactly at the drift-cancellation energy.
    pub fn dressed_momentum(&self) -> FourVec {
        let a0 = self.pulse.a0();
        let shift = E_CHARGE * E_CHARGE * a0 * a0 / (4.0 * self.electron.nl_dot_p0);
        let p0 = self.electron.p0;
        FourVec::new(self.electron.energy0 / C_AU + shift, p0.x, p0.y, p0.z + shift)
    }

    /// Classicality parameters `(y_tilde, xi)`; both must be << 1 for the
    /// classical treatment to hold.
    pub fn validity_params(&self) -> (f64, f64) {
        let eta = self.pulse.eta;
        let omega = self.pulse.omega_l;
        let gamma = self.electron.gamma;
        let y_tilde = 8.0 * eta * gamma * omega / (E_MASS * C_AU * C_AU);
        let e0 = self.electron.energy0;
        let p0 = self.electron.p0.norm();
        let xi = eta * omega * (e0 + C_AU * p0) / (E_MASS * E_MASS * C_AU.powi(4));
        (y_tilde, xi)
    }
}

/// Head-on Lorentz factor at which the initial longitudinal momentum
/// cancels the laser forward drift, i.e. the root of
/// `e^2 A0^2 / 4 + p0z (n_L.p0) = 0`. Solved by bisection on
/// gamma in (1, 1e6); the root always exists and is unique for eta > 0.
pub fn drift_cancel_gamma(eta: f64) -> f64 {
    // In units of (m c)^2 the residual is eta^2/4 - u (gamma + u) with
    // u = sqrt(gamma^2 - 1); it decreases monotonically in gamma.
    let residual = |gamma: f64| -> f64 {
        let u = (gamma * gamma - 1.0).sqrt();
        eta * eta / 4.0 - u * (gamma + u)
    };
    let mut lo = 1.0 + 1e-12;
    let mut hi = 1e6;
    debug_assert!(residual(lo) > 0.0 && residual(hi) < 0.0);
    // 100 halvings take the bracket to f64 resolution, so the dressed
    // momentum cancels to ~1e-12 m c rather than just tracking the gamma
    // tolerance.
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
