//! Hartree atomic units: `m = hbar = |e| = 1`, lengths in Bohr radii.

/// Speed of light in atomic units (inverse fine-structure constant).
pub const C_AU: f64 = 137.035999084;

/// Electron charge with its sign.
pub const E_CHARGE: f64 = -1.0;

/// Electron mass.
pub const E_MASS: f64 = 1.0;

/// Squared coupling `e0^2 = e^2/(4 pi eps0)` in the Gaussian-like atomic
/// unit convention used for the radiated-power prefactors.
pub const E0_SQ: f64 = 1.0;
