//! Independent verification path for the closed-form kinematics: fixed-step
//! fourth-order Runge-Kutta integration of the relativistic Lorentz-force
//! equation in lab time, with the fields derived analytically from A(chi).
//!
//! For the plane wave travelling along +z the fields are, in the atomic-unit
//! convention where `e A` carries momentum units,
//! `E = -c dA/dchi` and `B = c (dA_y/dchi, -dA_x/dchi, 0) = n_L x E`,
//! so that `dp/dt = e (E + beta x B)` and the transverse canonical momentum
//! `p_perp - e A` and the light-front component `E/c - p_z` are conserved.

use crate::dynamics::Scenario;
use crate::error::{Error, Result};
use crate::units::{C_AU, E_CHARGE, E_MASS};
use crate::vec3::Vec3;

/// Relative drift of the light-front invariant beyond which the integration
/// is reported as failed (step too large for the configured pulse).
pub const INVARIANT_DRIFT_LIMIT: f64 = 1e-6;

/// Default time resolution: steps per laser period `T_L`.
pub const DEFAULT_STEPS_PER_PERIOD: u32 = 2000;

/// One integrator state in lab time.
#[derive(Debug, Clone, Copy)]
pub struct OracleState {
    pub t: f64,
    pub r: Vec3,
    /// Kinetic momentum (au).
    pub p: Vec3,
}

impl OracleState {
    pub fn gamma(&self) -> f64 {
        (1.0 + self.p.norm_sqr() / (E_MASS * C_AU).powi(2)).sqrt()
    }

    pub fn beta(&self) -> Vec3 {
        self.p * (1.0 / (self.gamma() * E_MASS * C_AU))
    }

    /// Light-front phase seen by the electron, `chi = c t - z`.
    pub fn chi(&self) -> f64 {
        C_AU * self.t - self.r.z
    }

    pub fn nl_dot_p(&self) -> f64 {
        self.gamma() * E_MASS * C_AU - self.p.z
    }

    /// d(beta)/dt from the instantaneous Lorentz force.
    pub fn beta_dot(&self, s: &Scenario) -> Vec3 {
        let f = force(s, self.r, self.t, self.beta());
        let gamma = self.gamma();
        let beta = self.beta();
        (f - beta * beta.dot(f)) * (1.0 / (gamma * E_MASS * C_AU))
    }
}

fn force(s: &Scenario, r: Vec3, t: f64, beta: Vec3) -> Vec3 {
    let chi = C_AU * t - r.z;
    let da = s.pulse.vector_potential_derivative(chi);
    let e_field = da * (-C_AU);
    let b_field = Vec3::new(C_AU * da.y, -C_AU * da.x, 0.0);
    (e_field + beta.cross(b_field)) * E_CHARGE
}

fn derivative(s: &Scenario, state: &OracleState) -> (Vec3, Vec3) {
    let gamma = state.gamma();
    let v = state.p * (1.0 / (gamma * E_MASS));
    let beta = v * (1.0 / C_AU);
    (v, force(s, state.r, state.t, beta))
}

fn rk4_step(s: &Scenario, state: &OracleState, h: f64) -> OracleState {
    let (k1r, k1p) = derivative(s, state);
    let mid1 = OracleState { t: state.t + 0.5 * h, r: state.r + k1r * (0.5 * h), p: state.p + k1p * (0.5 * h) };
    let (k2r, k2p) = derivative(s, &mid1);
    let mid2 = OracleState { t: state.t + 0.5 * h, r: state.r + k2r * (0.5 * h), p: state.p + k2p * (0.5 * h) };
    let (k3r, k3p) = derivative(s, &mid2);
    let end = OracleState { t: state.t + h, r: state.r + k3r * h, p: state.p + k3p * h };
    let (k4r, k4p) = derivative(s, &end);
    OracleState {
        t: state.t + h,
        r: state.r + (k1r + (k2r + k3r) * 2.0 + k4r) * (h / 6.0),
        p: state.p + (k1p + (k2p + k3p) * 2.0 + k4p) * (h / 6.0),
    }
}

/// Uniform-step trajectory covering the full pulse crossing.
#[derive(Debug, Clone)]
pub struct OracleTrajectory {
    pub states: Vec<OracleState>,
    pub dt: f64,
}

/// Integrate through the whole pulse: the electron starts at the origin at
/// `t0 = chi_min / c` (the pulse is still `f < 1e-8` there) and the
/// integration stops once `chi` has left the support. The step count is kept
/// even so the states can feed a Simpson rule directly.
pub fn simulate(s: &Scenario, steps_per_period: u32) -> Result<OracleTrajectory> {
    let period_t = s.pulse.period_len() / C_AU;
    let dt = period_t / steps_per_period as f64;
    let (chi_start, chi_end) = s.chi_support;

    let mut state = OracleState { t: chi_start / C_AU, r: Vec3::ZERO, p: s.electron.p0 };
    let nl0 = state.nl_dot_p();
    let mut states = vec![state];
    // chi advances at least at rate c(1 - |beta_z|); cap the step budget far
    // above any physical crossing.
    let max_steps = 20_000_000usize;
    while state.chi() < chi_end {
        state = rk4_step(s, &state, dt);
        states.push(state);
        if states.len() > max_steps {
            return Err(Error::InvalidParameter(
                "oracle step budget exhausted before the pulse was crossed".into(),
            ));
        }
    }
    if states.len() % 2 == 0 {
        state = rk4_step(s, &state, dt);
        states.push(state);
    }

    let drift = states
        .iter()
        .map(|st| (st.nl_dot_p() - nl0).abs() / nl0)
        .fold(0.0, f64::max);
    if drift > INVARIANT_DRIFT_LIMIT {
        return Err(Error::OracleDrift { drift, limit: INVARIANT_DRIFT_LIMIT });
    }
    Ok(OracleTrajectory { states, dt })
}

/// Lab-time states (r, beta) on a caller-supplied time grid spanning the
/// pulse crossing; integration starts at the first grid point with the
/// electron at the origin. Substeps never exceed the default resolution.
pub fn ode_oracle(s: &Scenario, t_grid: &[f64]) -> Result<Vec<(Vec3, Vec3)>> {
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::GridNotAscending);
    }
    let Some(&t0) = t_grid.first() else {
        return Ok(Vec::new());
    };
    let h_max = s.pulse.period_len() / C_AU / DEFAULT_STEPS_PER_PERIOD as f64;
    let mut state = OracleState { t: t0, r: Vec3::ZERO, p: s.electron.p0 };
    let nl0 = state.nl_dot_p();
    let mut out = vec![(state.r, state.beta())];
    for w in t_grid.windows(2) {
        let span = w[1] - w[0];
        let n = ((span / h_max).ceil() as usize).max(1);
        let h = span / n as f64;
        for _ in 0..n {
            state = rk4_step(s, &state, h);
        }
        let drift = (state.nl_dot_p() - nl0).abs() / nl0;
        if drift > INVARIANT_DRIFT_LIMIT {
            return Err(Error::OracleDrift { drift, limit: INVARIANT_DRIFT_LIMIT });
        }
        out.push((state.r, state.beta()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ElectronInit;
    use crate::pulse::PulseParams;

    fn scenario(gamma: f64, tau: f64, n_c: f64, deg90: bool) -> Scenario {
        let pulse = PulseParams::new(50.0, 0.043, tau, n_c, 0.0).unwrap();
        let electron = if deg90 {
            ElectronInit::deg90(gamma).unwrap()
        } else {
            ElectronInit::head_on(gamma).unwrap()
        };
        Scenario::new(pulse, electron)
    }

    #[test]
    fn free_motion_is_uniform() {
        let s = scenario(10.0, 1.0, 0.0, false);
        // Pick a window far before the pulse arrives.
        let t0 = s.chi_support.0 / C_AU * 50.0;
        let t_grid: Vec<f64> = (0..10).map(|i| t0 + i as f64 * 1e-3).collect();
        let states = ode_oracle(&s, &t_grid).unwrap();
        for (i, (r, beta)) in states.iter().enumerate() {
            let expect = s.electron.beta0 * (C_AU * (t_grid[i] - t0));
            assert!((*r - expect).norm() < 1e-9 * expect.norm().max(1.0));
            assert!((*beta - s.electron.beta0).norm() < 1e-14);
        }
    }

    #[test]
    fn light_front_invariant_held_through_pulse() {
        for s in [scenario(10.0, 1.0, 2.0, false), scenario(25.0, 1.0, 0.0, true)] {
            let traj = simulate(&s, DEFAULT_STEPS_PER_PERIOD).unwrap();
            let nl0 = traj.states[0].nl_dot_p();
            let worst = traj
                .states
                .iter()
                .map(|st| (st.nl_dot_p() - nl0).abs() / nl0)
                .fold(0.0, f64::max);
            assert!(worst < 1e-8, "invariant drift {worst:.2e}");
            // The stored trajectory really crossed the pulse.
            assert!(traj.states.last().unwrap().chi() >= s.chi_support.1);
        }
    }

    #[test]
    fn closed_form_velocity_matches_oracle() {
        for s in [scenario(10.0, 1.0, 2.0, false), scenario(25.0, 1.0, 0.0, true)] {
            let traj = simulate(&s, DEFAULT_STEPS_PER_PERIOD).unwrap();
            let mut worst = 0.0f64;
            for st in traj.states.iter().step_by(37) {
                let closed = s.velocity(st.chi());
                let rel = (closed - st.beta()).norm() / st.beta().norm();
                worst = worst.max(rel);
            }
            assert!(worst < 1e-6, "velocity mismatch {worst:.2e}");
        }
    }

    #[test]
    fn closed_form_positions_match_oracle() {
        for s in [scenario(10.0, 1.0, 2.0, false), scenario(25.0, 1.0, 0.0, true)] {
            let traj = simulate(&s, DEFAULT_STEPS_PER_PERIOD).unwrap();
            let chis: Vec<f64> = traj.states.iter().map(|st| st.chi()).collect();
            let closed = s.trajectory(&chis).unwrap();
            let scale = traj
                .states
                .iter()
                .map(|st| st.r.norm())
                .fold(0.0, f64::max);
            let mut worst = 0.0f64;
            for (st, rc) in traj.states.iter().zip(&closed) {
                worst = worst.max((*rc - st.r).norm() / scale);
            }
            assert!(worst < 1e-5, "position mismatch {worst:.2e}");
        }
    }

    #[test]
    fn acceleration_from_force_matches_closed_form() {
        let s = scenario(10.0, 1.0, 1.0, false);
        let traj = simulate(&s, DEFAULT_STEPS_PER_PERIOD).unwrap();
        for st in traj.states.iter().step_by(101) {
            let closed = s.acceleration(st.chi());
            let got = st.beta_dot(&s);
            let scale = closed.norm().max(got.norm());
            if scale == 0.0 {
                continue;
            }
            assert!((closed - got).norm() < 1e-5 * scale);
        }
    }

    #[test]
    fn rejects_unordered_time_grid() {
        let s = scenario(10.0, 1.0, 0.0, false);
        assert!(matches!(ode_oracle(&s, &[0.0, -1.0]), Err(Error::GridNotAscending)));
    }

    #[test]
    fn coarse_step_reports_invariant_drift() {
        let s = scenario(10.0, 1.0, 0.0, false);
        match simulate(&s, 6) {
            Err(Error::OracleDrift { drift, .. }) => assert!(drift > INVARIANT_DRIFT_LIMIT),
            other => panic!("expected drift failure, got {other:?}"),
        }
    }
}
