//! Conversion of the period `τ = 2π/m` (natural units) to seconds.

use std::f64::consts::PI;

/// Reduced Planck constant, J·s (exact since the 2019 SI).
pub const HBAR_J_S: f64 = 1.054_571_817e-34;

/// Proton rest energy `m_p c²`, J (CODATA 2018).
pub const PROTON_REST_ENERGY_J: f64 = 1.503_277_615_98e-10;

/// `τ = 2πħ/(mc²)` in seconds for a particle of rest energy `mc²` joules.
pub fn period_seconds(rest_energy_j: f64) -> f64 {
    2.0 * PI * HBAR_J_S / rest_energy_j
}

pub fn nucleon_period_seconds() -> f64 {
    period_seconds(PROTON_REST_ENERGY_J)
}
