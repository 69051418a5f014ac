//! Physical constants used throughout the crate (SI units).

use std::f64::consts::PI;

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;
/// Newtonian gravitational constant (m³ kg⁻¹ s⁻²).
pub const G: f64 = 6.674_30e-11;
/// Atomic mass unit as used for the collapse-model reference mass (kg).
pub const ATOMIC_MASS_UNIT: f64 = 1.66e-27;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Speed of sound used for the silica breathing-mode estimate (m/s).
pub const SILICA_SOUND_SPEED: f64 = 3000.0;
/// Density of crystalline silicon (kg/m³).
pub const SILICON_DENSITY: f64 = 2330.0;
/// Density of fused silica (kg/m³).
pub const SILICA_DENSITY: f64 = 2200.0;
/// Lattice constant of silicon (m).
pub const SILICON_LATTICE_CONSTANT: f64 = 5.431e-10;

/// Converts an ordinary frequency (Hz) to an angular rate (rad/s).
#[inline]
pub fn hz_to_rad(f: f64) -> f64 {
    2.0 * PI * f
}

/// Converts an angular rate (rad/s) to an ordinary frequency (Hz).
#[inline]
pub fn rad_to_hz(w: f64) -> f64 {
    w / (2.0 * PI)
}

/// Bundle of the constants above, for callers that want them as a value.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
    pub g: f64,
    pub u: f64,
    pub c_sound: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: HBAR,
            k_b: K_B,
            g: G,
            u: ATOMIC_MASS_UNIT,
            c_sound: SILICA_SOUND_SPEED,
        }
    }
}
