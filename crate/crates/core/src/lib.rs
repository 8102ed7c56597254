//! Nonlinear Thomson scattering of a finite, circularly polarized plane-wave
//! laser pulse on a relativistic electron.
//!
//! The electron motion in a plane wave is closed-form in the light-front
//! phase `chi = ct - z`; the angular distribution of the emitted radiation
//! is a one-dimensional integral over `chi` for every observation direction.
//! This crate provides:
//!
//! * [`pulse`] — the pulse model: flat-top envelope with Gaussian wings,
//!   circularly polarized vector potential with carrier-envelope phase.
//! * [`dynamics`] — closed-form velocity/acceleration/trajectory, derived
//!   flat-region geometry, validity parameters, and an independent
//!   Runge-Kutta Lorentz-force oracle.
//! * [`radiation`] — exact and high-energy-approximate angular distributions
//!   `dW/dOmega` with polarization decomposition, in both the chi-domain and
//!   the time-domain formulation.
//! * [`scan`] — data-parallel (theta, phi) angular maps, ridge location,
//!   CSV tables and 16-bit PGM heatmaps.
//!
//! Everything is in Hartree atomic units (`m = hbar = |e| = 1`,
//! `c = 137.035999084`); the electron charge carries its sign, `e = -1`.

pub mod dynamics;
pub mod error;
pub mod oracle;
pub mod pulse;
pub mod radiation;
pub mod scan;
pub mod units;
pub mod vec3;

pub use dynamics::{ElectronInit, FlatCircle, KinematicSample, QuadSettings, Scenario};
pub use error::{Error, Result};
pub use pulse::PulseParams;
pub use radiation::{ApproxKernel, Direction, EmissionResult, Integrator, PolarizationBasis};
pub use scan::{AngularGrid, AngularMap, Channel};
pub use vec3::Vec3;
