//! Plane-wave pulse model: a circularly polarized carrier under a flat-top
//! envelope with Gaussian wings, all expressed in the light-front phase
//! `chi = ct - z`.

use crate::error::{Error, Result};
use crate::units::{C_AU, E_CHARGE, E_MASS};
use crate::vec3::Vec3;

/// Width constant of the Gaussian wings, as printed in the envelope
/// definition. Numerically 1.386 = 2 ln 2, which makes `tau` the FWHM of
/// the *intensity* profile f^2 rather than of f itself; we keep the printed
/// value rather than "correcting" it.
pub const ENVELOPE_WIDTH_CONST: f64 = 1.386;

/// Envelope values below this are treated as exactly zero, which truncates
/// the pulse support to a finite interval. The squared-acceleration
/// integrands are O(f^2) there, far below every tolerance in the crate.
pub const SUPPORT_FLOOR: f64 = 1e-8;

/// Laser pulse definition. Propagation is fixed along +z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    /// Dimensionless intensity parameter `eta = |e| A0 / (m c)`.
    pub eta: f64,
    /// Central angular frequency omega_L in atomic units.
    pub omega_l: f64,
    /// Intensity-FWHM of each Gaussian wing, in laser periods.
    pub tau: f64,
    /// Length of the flat region, in laser periods (>= 0).
    pub n_c: f64,
    /// Carrier-envelope phase phi_0 in radians.
    pub phi0: f64,
}

impl PulseParams {
    pub fn new(eta: f64, omega_l: f64, tau: f64, n_c: f64, phi0: f64) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(Error::InvalidParameter(format!("eta must be > 0, got {eta}")));
        }
        if !(omega_l > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega_l must be > 0, got {omega_l}"
            )));
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be > 0, got {tau}")));
        }
        if !(n_c >= 0.0) {
            return Err(Error::InvalidParameter(format!("n_c must be >= 0, got {n_c}")));
        }
        if !phi0.is_finite() {
            return Err(Error::InvalidParameter(format!("phi0 must be finite, got {phi0}")));
        }
        Ok(PulseParams { eta, omega_l, tau, n_c, phi0 })
    }

    /// Peak vector potential `A0 = eta m c / |e|`.
    pub fn a0(&self) -> f64 {
        self.eta * E_MASS * C_AU / E_CHARGE.abs()
    }

    /// Carrier wave number `k_L = omega_L / c`.
    pub fn k_l(&self) -> f64 {
        self.omega_l / C_AU
    }

    /// Length of one carrier period in chi: `c T_L = 2 pi / k_L`.
    pub fn period_len(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.k_l()
    }

    /// Length of the flat region in chi: `N_c c T_L`.
    pub fn flat_len(&self) -> f64 {
        self.n_c * self.period_len()
    }

    /// Length of one truncated Gaussian wing in chi, i.e. the |chi| offset
    /// at which f first falls below [`SUPPORT_FLOOR`].
    pub fn wing_len(&self) -> f64 {
        let periods = (-SUPPORT_FLOOR.ln() / ENVELOPE_WIDTH_CONST).sqrt();
        self.tau * periods * self.period_len()
    }

    /// Truncated pulse support `[chi_min, chi_max]`; the envelope is treated
    /// as exactly zero outside.
    pub fn support(&self) -> (f64, f64) {
        (-self.wing_len(), self.flat_len() + self.wing_len())
    }

    /// Pulse envelope f(chi): Gaussian rise for chi <= 0, unity on the flat
    /// region, Gaussian fall beyond it; zero outside the truncated support.
    pub fn envelope(&self, chi: f64) -> f64 {
        match self.wing_offset(chi) {
            None => 1.0,
            Some(off) => {
                if off.abs() > self.wing_len() {
                    return 0.0;
                }
                let u = self.k_l() * off * self.tau.recip();
                (-ENVELOPE_WIDTH_CONST * u * u / (4.0 * std::f64::consts::PI.powi(2))).exp()
            }
        }
    }

    /// Analytic df/dchi; zero on the flat region and outside the support.
    pub fn envelope_derivative(&self, chi: f64) -> f64 {
        match self.wing_offset(chi) {
            None => 0.0,
            Some(off) => {
                if off.abs() > self.wing_len() {
                    return 0.0;
                }
                let k = self.k_l();
                let scale = -2.0 * ENVELOPE_WIDTH_CONST * k * k
                    / (4.0 * std::f64::consts::PI.powi(2) * self.tau * self.tau);
                scale * off * self.envelope(chi)
            }
        }
    }

    /// Vector potential of the circularly polarized carrier,
    /// `A = (A0/sqrt2) f(chi) (sin(k_L chi - phi0), cos(k_L chi - phi0), 0)`.
    pub fn vector_potential(&self, chi: f64) -> Vec3 {
        let f = self.envelope(chi);
        if f == 0.0 {
            return Vec3::ZERO;
        }
        let psi = self.k_l() * chi - self.phi0;
        let amp = self.a0() / std::f64::consts::SQRT_2 * f;
        Vec3::new(amp * psi.sin(), amp * psi.cos(), 0.0)
    }

    /// Analytic dA/dchi (product rule: envelope term plus carrier term).
    pub fn vector_potential_derivative(&self, chi: f64) -> Vec3 {
        let f = self.envelope(chi);
        if f == 0.0 {
            return Vec3::ZERO;
        }
        let df = self.envelope_derivative(chi);
        let k = self.k_l();
        let psi = k * chi - self.phi0;
        let (s, c) = psi.sin_cos();
        let amp = self.a0() / std::f64::consts::SQRT_2;
        Vec3::new(amp * (df * s + f * k * c), amp * (df * c - f * k * s), 0.0)
    }

    /// Offset into the Gaussian wing the point belongs to, or `None` on the
    /// flat region (including its boundaries).
    fn wing_offset(&self, chi: f64) -> Option<f64> {
        if chi < 0.0 {
            Some(chi)
        } else if chi > self.flat_len() {
            Some(chi - self.flat_len())
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pulse(tau: f64, n_c: f64, phi0: f64) -> PulseParams {
        PulseParams::new(50.0, 0.043, tau, n_c, phi0).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PulseParams::new(0.0, 0.043, 1.0, 0.0, 0.0).is_err());
        assert!(PulseParams::new(50.0, -1.0, 1.0, 0.0, 0.0).is_err());
        assert!(PulseParams::new(50.0, 0.043, 0.0, 0.0, 0.0).is_err());
        assert!(PulseParams::new(50.0, 0.043, 1.0, -0.5, 0.0).is_err());
    }

    #[test]
    fn a0_in_atomic_units() {
        let p = pulse(1.0, 0.0, 0.0);
        assert!((p.a0() - 50.0 * C_AU).abs() < 1e-12);
        assert!((p.a0() - 6851.7999542).abs() < 1e-6);
    }

    #[test]
    fn envelope_flat_boundaries() {
        let p = pulse(1.0, 10.0, 0.0);
        assert_eq!(p.envelope(0.0), 1.0);
        assert_eq!(p.envelope(p.flat_len()), 1.0);
        assert_eq!(p.envelope(0.4 * p.flat_len()), 1.0);
    }

    #[test]
    fn envelope_one_period_into_wing() {
        // k_L chi = -2 pi and tau = 1 puts the exponent at exactly -1.386.
        let p = pulse(1.0, 0.0, 0.0);
        let chi = -p.period_len();
        let expected = (-1.386f64).exp();
        assert!((p.envelope(chi) - expected).abs() < 1e-15);
        assert!((expected - 0.250073601112094).abs() < 1e-12);
    }

    #[test]
    fn envelope_scales_with_frequency() {
        // f depends on chi only through k_L chi, so rescaling omega_L by s
        // and chi by 1/s leaves it unchanged.
        let p = pulse(1.3, 2.0, 0.0);
        let sp = PulseParams::new(p.eta, 3.0 * p.omega_l, p.tau, p.n_c, p.phi0).unwrap();
        let (lo, hi) = p.support();
        for i in 0..=500 {
            let chi = lo + (hi - lo) * i as f64 / 500.0;
            let a = p.envelope(chi);
            let b = sp.envelope(chi / 3.0);
            // The truncation edge may fall on either side of the rescaled
            // point by one ulp; both values sit at the support floor there.
            let at_edge = a < 2.0 * SUPPORT_FLOOR && b < 2.0 * SUPPORT_FLOOR;
            assert!(at_edge || (a - b).abs() <= 1e-13 * a, "chi={chi}: {a} vs {b}");
        }
    }

    #[test]
    fn envelope_continuous_at_junctions() {
        let p = pulse(1.0, 3.0, 0.0);
        let eps = 1e-9;
        for edge in [0.0, p.flat_len()] {
            let lo = p.envelope(edge - eps);
            let hi = p.envelope(edge + eps);
            assert!((lo - 1.0).abs() < 1e-12);
            assert!((hi - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn envelope_derivative_zero_on_flat_and_at_origin_limit() {
        let p = pulse(1.0, 5.0, 0.0);
        assert_eq!(p.envelope_derivative(0.5 * p.flat_len()), 0.0);
        // Gaussian derivative is proportional to chi, so it vanishes
        // approaching the junction from the wing side.
        assert!(p.envelope_derivative(-1e-12).abs() < 1e-12 * p.k_l());
    }

    #[test]
    fn envelope_derivative_matches_finite_difference() {
        let p = pulse(1.0, 0.0, 0.0);
        let k = p.k_l();
        // Printed form at k_L chi = -2 pi, tau = 1.
        let chi = -p.period_len();
        let expected = -2.0 * 1.386 * k * k * chi / (4.0 * std::f64::consts::PI.powi(2))
            * p.envelope(chi);
        assert!((p.envelope_derivative(chi) - expected).abs() < 1e-15 * expected.abs());

        let h = 1e-5 * p.period_len();
        for frac in [-3.0, -2.0, -1.5, -0.7, -0.2] {
            let chi = frac * p.period_len();
            let fd = (p.envelope(chi + h) - p.envelope(chi - h)) / (2.0 * h);
            let an = p.envelope_derivative(chi);
            assert!((an - fd).abs() < 1e-8 * an.abs().max(fd.abs()), "chi={chi}");
        }
    }

    #[test]
    fn circular_modulus_on_flat_region() {
        let p = pulse(1.0, 4.0, 0.0);
        let bound = p.a0() / std::f64::consts::SQRT_2;
        for i in 0..200 {
            let chi = p.flat_len() * i as f64 / 199.0;
            assert!((p.vector_potential(chi).norm() - bound).abs() < 1e-9 * bound);
        }
    }

    #[test]
    fn potential_at_origin() {
        let p = pulse(1.0, 0.0, 0.0);
        let a = p.vector_potential(0.0);
        assert_eq!(a.x, 0.0);
        assert!((a.y - p.a0() / std::f64::consts::SQRT_2).abs() < 1e-12 * p.a0());
        assert_eq!(a.z, 0.0);
    }

    #[test]
    fn modulus_bounded_everywhere() {
        let p = pulse(2.0, 3.0, 0.7);
        let bound = p.a0() / std::f64::consts::SQRT_2;
        let (lo, hi) = p.support();
        for i in 0..=2000 {
            let chi = lo + (hi - lo) * i as f64 / 2000.0;
            assert!(p.vector_potential(chi).norm() <= bound * (1.0 + 1e-14));
        }
    }

    #[test]
    fn potential_derivative_matches_finite_difference() {
        // Relative accuracy 1e-7 on a dense grid over the support, wings
        // included, for a CEP-shifted pulse.
        let p = pulse(1.0, 2.0, std::f64::consts::FRAC_PI_4);
        let (lo, hi) = p.support();
        let h = 1e-6 * p.period_len();
        let scale = p.a0() * p.k_l();
        for i in 1..10_000 {
            let chi = lo + (hi - lo) * i as f64 / 10_000.0;
            if (chi.abs()).min((chi - p.flat_len()).abs()) < 2.0 * h {
                continue; // straddles a piecewise junction
            }
            let fd = (p.vector_potential(chi + h) - p.vector_potential(chi - h)) * (0.5 / h);
            let an = p.vector_potential_derivative(chi);
            assert!((an - fd).norm() < 1e-7 * an.norm().max(scale * 1e-3), "chi={chi}");
        }
    }

    #[test]
    fn potential_derivative_on_flat_region() {
        let p = pulse(1.0, 2.0, 0.0);
        let k = p.k_l();
        let amp = p.a0() * k / std::f64::consts::SQRT_2;
        for i in 0..50 {
            let chi = p.flat_len() * (i as f64 + 0.5) / 50.0;
            let da = p.vector_potential_derivative(chi);
            let expected = Vec3::new(amp * (k * chi).cos(), -amp * (k * chi).sin(), 0.0);
            assert!((da - expected).norm() < 1e-12 * amp);
        }
    }

    #[test]
    fn truncation_beyond_cutoff() {
        let p = pulse(1.0, 0.0, 0.0);
        let (lo, hi) = p.support();
        for chi in [lo * 1.0001, hi * 1.0001, lo * 3.0, hi * 3.0] {
            assert_eq!(p.envelope(chi), 0.0);
            assert!(p.vector_potential_derivative(chi).norm() < 1e-6 * p.a0() * p.k_l());
        }
        // Just inside the cutoff the envelope sits at the support floor.
        let f_edge = p.envelope(lo * 0.99999);
        assert!(f_edge > 0.0 && f_edge < 2.0 * SUPPORT_FLOOR);
    }

    #[test]
    fn cep_rotates_the_carrier() {
        // A(chi; phi0) is A(chi; 0) rotated by phi0 about the z axis, and a
        // full turn reproduces the base pulse.
        let base = pulse(1.0, 1.0, 0.0);
        let phi0 = std::f64::consts::FRAC_PI_4;
        let shifted = pulse(1.0, 1.0, phi0);
        let turned = pulse(1.0, 1.0, 2.0 * std::f64::consts::PI);
        let (c, s) = (phi0.cos(), phi0.sin());
        for i in -100..100 {
            let chi = i as f64 * base.period_len() / 40.0;
            let a = base.vector_potential(chi);
            let b = shifted.vector_potential(chi);
            let rotated = Vec3::new(c * a.x - s * a.y, s * a.x + c * a.y, 0.0);
            assert!((b - rotated).norm() <= 1e-12 * base.a0());
            assert!((turned.vector_potential(chi) - a).norm() <= 1e-9 * base.a0());
        }
    }
}
