//! Collapse-model decoherence and heating rates for concrete resonators.
//!
//! The CSL decoherence operator `D` is a dimensionless geometry factor: a
//! collapse rate `λ_c` produces the phonon flux `ṅ_c = λ_c·D`. It is
//! available in closed form for spheres and cuboids and by direct quadrature
//! of the Fourier-space integral for either shape.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{ATOMIC_MASS_UNIT, G, HBAR, K_B};
use crate::error::{invalid, require_nonnegative, require_positive, Result};
use crate::quadrature::{self, QuadratureOptions};

/// Homogeneous resonator mass distribution. Lengths in m, density in kg/m³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ResonatorGeometry {
    /// Side lengths; `l3` is along the direction of motion.
    Cuboid { l1: f64, l2: f64, l3: f64, density: f64 },
    Sphere { radius: f64, density: f64 },
}

impl ResonatorGeometry {
    pub fn cuboid(l1: f64, l2: f64, l3: f64, density: f64) -> Result<Self> {
        let g = Self::Cuboid { l1, l2, l3, density };
        g.validate()?;
        Ok(g)
    }

    pub fn sphere(radius: f64, density: f64) -> Result<Self> {
        let g = Self::Sphere { radius, density };
        g.validate()?;
        Ok(g)
    }

    /// Silicon beam of 1.21 × 0.22 × 0.22 µm (effective mass ≈ 136 fg).
    pub fn paper_beam() -> Self {
        Self::Cuboid {
            l1: 1.21e-6,
            l2: 0.22e-6,
            l3: 0.22e-6,
            density: crate::constants::SILICON_DENSITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Cuboid { l1, l2, l3, density } => {
                require_positive("l1", l1)?;
                require_positive("l2", l2)?;
                require_positive("l3", l3)?;
                require_nonnegative("density", density)
            }
            Self::Sphere { radius, density } => {
                require_positive("radius", radius)?;
                require_nonnegative("density", density)
            }
        }
    }

    pub fn density(&self) -> f64 {
        match *self {
            Self::Cuboid { density, .. } | Self::Sphere { density, .. } => density,
        }
    }

    pub fn volume(&self) -> f64 {
        match *self {
            Self::Cuboid { l1, l2, l3, .. } => l1 * l2 * l3,
            Self::Sphere { radius, .. } => 4.0 / 3.0 * PI * radius.powi(3),
        }
    }

    pub fn mass(&self) -> f64 {
        self.density() * self.volume()
    }

    /// Largest linear dimension.
    pub fn size(&self) -> f64 {
        match *self {
            Self::Cuboid { l1, l2, l3, .. } => l1.max(l2).max(l3),
            Self::Sphere { radius, .. } => 2.0 * radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CollapseModel {
    Csl,
    /// Diósi-Penrose with short-distance cutoff `r_dp` and lattice constant.
    Dp { r_dp: f64, lattice_a: f64 },
    /// Distinguishable-particle collapses, linear in the nucleon number.
    GrwLinear { lambda_grw: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseParams {
    /// Collapse rate λ_c (1/s).
    pub lambda_c: f64,
    /// Correlation length r_c (m).
    pub r_c: f64,
    pub model: CollapseModel,
}

/// Canonical GRW single-nucleon rate (1/s).
pub const GRW_LAMBDA: f64 = 1e-16;

impl CollapseParams {
    pub fn csl(lambda_c: f64, r_c: f64) -> Result<Self> {
        let p = Self {
            lambda_c,
            r_c,
            model: CollapseModel::Csl,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require_nonnegative("lambda_c", self.lambda_c)?;
        require_positive("r_c", self.r_c)?;
        match self.model {
            CollapseModel::Csl => Ok(()),
            CollapseModel::Dp { r_dp, lattice_a } => {
                require_positive("r_dp", r_dp)?;
                require_positive("lattice_a", lattice_a)
            }
            CollapseModel::GrwLinear { lambda_grw } => require_nonnegative("lambda_grw", lambda_grw),
        }
    }

    /// Phonon flux (1/s) this model induces in a mode of frequency `omega`.
    pub fn phonon_flux(&self, geometry: &ResonatorGeometry, omega: f64) -> Result<f64> {
        self.validate()?;
        geometry.validate()?;
        let m = geometry.mass();
        let x0 = zero_point_motion(m, omega)?;
        match self.model {
            CollapseModel::Csl => Ok(csl_phonon_flux(self.lambda_c, d_closed_form(geometry, self.r_c, x0)?)),
            CollapseModel::Dp { r_dp, lattice_a } => d_dp(x0, lattice_a, r_dp, m, geometry.density()),
            CollapseModel::GrwLinear { lambda_grw } => grw_heating(m / ATOMIC_MASS_UNIT, lambda_grw, x0, self.r_c),
        }
    }
}

/// `x₀ = √(ħ/(2mΩ))`.
pub fn zero_point_motion(mass: f64, omega: f64) -> Result<f64> {
    require_positive("mass", mass)?;
    require_positive("omega", omega)?;
    Ok((HBAR / (2.0 * mass * omega)).sqrt())
}

/// Single-particle decoherence rate `λ(4πr_c²)^{−3/2}(1 − e^{−Δx²/4r_c²})`.
///
/// The smearing prefactor is kept as written, so the result carries an
/// extra m⁻³ unless `lambda` absorbs it.
pub fn decoherence_kernel(lambda: f64, r_c: f64, dx: f64) -> Result<f64> {
    require_nonnegative("lambda", lambda)?;
    require_positive("r_c", r_c)?;
    let z = dx * dx / (4.0 * r_c * r_c);
    Ok(lambda * (4.0 * PI * r_c * r_c).powf(-1.5) * -(-z).exp_m1())
}

/// `ṅ_c = λ_c·D`.
pub fn csl_phonon_flux(lambda_c: f64, d: f64) -> f64 {
    lambda_c * d
}

fn prefactor(r_c: f64, x0: f64) -> f64 {
    (4.0 * PI).powf(1.5) * r_c.powi(3) * x0 * x0 / (ATOMIC_MASS_UNIT * ATOMIC_MASS_UNIT)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `(sin x − x cos x)/x³`, the radial shape of a uniform ball's transform.
fn ball_shape(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0
    } else {
        (x.sin() - x * x.cos()) / (x * x * x)
    }
}

fn quad_opts(panels: usize) -> QuadratureOptions {
    QuadratureOptions {
        rel_tol: 1e-10,
        abs_tol: 0.0,
        initial_panels: panels.clamp(8, 200_000),
    }
}

/// Wavenumber cutoff of the Fourier integrals; the Gaussian factor is
/// e^{−1600} beyond it.
fn k_max(r_c: f64) -> f64 {
    40.0 / r_c
}

/// Brute-force evaluation of
/// `D = (4π)^{3/2} r_c³ x₀²/u² ∫ d³k/(2π)³ k_z² e^{−k²r_c²} |ρ̃(k)|²`.
///
/// The cuboid transform factorizes into three one-dimensional integrals; the
/// sphere's is isotropic and reduces to a radial integral.
pub fn d_csl_numeric(geometry: &ResonatorGeometry, r_c: f64, x0: f64) -> Result<f64> {
    geometry.validate()?;
    require_positive("r_c", r_c)?;
    require_nonnegative("x0", x0)?;
    let kmax = k_max(r_c);
    let gauss = |k: f64| (-(k * r_c).powi(2)).exp();
    let oscillations = |l: f64| (kmax * l / PI).ceil() as usize;
    match *geometry {
        ResonatorGeometry::Cuboid { l1, l2, l3, density } => {
            // Each integrand is even in k: ∫_{−K}^{K} = 2∫_0^K.
            let transverse = |l: f64| -> Result<f64> {
                let f = |k: f64| gauss(k) * (l * sinc(0.5 * k * l)).powi(2);
                Ok(2.0 * quadrature::integrate(f, 0.0, kmax, &quad_opts(oscillations(l)))? / (2.0 * PI))
            };
            let along = {
                let f = |k: f64| gauss(k) * (k * l3 * sinc(0.5 * k * l3)).powi(2);
                2.0 * quadrature::integrate(f, 0.0, kmax, &quad_opts(oscillations(l3)))? / (2.0 * PI)
            };
            Ok(prefactor(r_c, x0) * density * density * transverse(l1)? * transverse(l2)? * along)
        }
        ResonatorGeometry::Sphere { radius, density } => {
            // ∫d³k k_z² f(|k|) = (4π/3)∫k⁴ f(k) dk, |ρ̃| = 4πρR³·ball_shape(kR).
            let f = |k: f64| {
                let rho = 4.0 * PI * density * radius.powi(3) * ball_shape(k * radius);
                k.powi(4) * gauss(k) * rho * rho
            };
            let radial = quadrature::integrate(f, 0.0, kmax, &quad_opts(oscillations(radius)))?;
            Ok(prefactor(r_c, x0) * 4.0 * PI / 3.0 / (2.0 * PI).powi(3) * radial)
        }
    }
}

/// `e^{−x²} + √π x erf(x) − 1`, positive for x > 0, with its Taylor series
/// near zero where the closed form cancels.
fn cuboid_bracket(x: f64) -> f64 {
    if x < 0.5 {
        let x2 = x * x;
        let mut term = x2;
        let mut sum = 0.0;
        for m in 1..40 {
            let mf = m as f64;
            let next = term / (2.0 * mf - 1.0);
            sum += if m % 2 == 1 { next } else { -next };
            term *= x2 / (mf + 1.0);
            if next.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (-x * x).exp() + PI.sqrt() * x * libm::erf(x) - 1.0
    }
}

/// Closed-form CSL operator of a homogeneous cuboid,
/// `32r_c⁴ρ²x₀²/u² · (1 − e^{−L₃²/4r_c²}) · B(L₂/2r_c) · B(L₁/2r_c)` with
/// `B(x) = e^{−x²} + √π x erf(x) − 1`.
pub fn d_cuboid(l1: f64, l2: f64, l3: f64, density: f64, r_c: f64, x0: f64) -> Result<f64> {
    ResonatorGeometry::cuboid(l1, l2, l3, density)?;
    require_positive("r_c", r_c)?;
    require_nonnegative("x0", x0)?;
    let along = -(-(l3 * l3) / (4.0 * r_c * r_c)).exp_m1();
    Ok(32.0 * r_c.powi(4) * (density * x0 / ATOMIC_MASS_UNIT).powi(2)
        * along
        * cuboid_bracket(l2 / (2.0 * r_c))
        * cuboid_bracket(l1 / (2.0 * r_c)))
}

/// The cuboid expression with `−√π x erf(x)` in both transverse factors, as
/// it is commonly printed. Kept for comparison output; it does not equal the
/// Fourier integral.
pub fn d_cuboid_as_printed(l1: f64, l2: f64, l3: f64, density: f64, r_c: f64, x0: f64) -> Result<f64> {
    ResonatorGeometry::cuboid(l1, l2, l3, density)?;
    require_positive("r_c", r_c)?;
    let b = |l: f64| {
        let x = l / (2.0 * r_c);
        (-x * x).exp() - PI.sqrt() * x * libm::erf(x) - 1.0
    };
    let along = -(-(l3 * l3) / (4.0 * r_c * r_c)).exp_m1();
    Ok(32.0 * r_c.powi(4) * (density * x0 / ATOMIC_MASS_UNIT).powi(2) * along * b(l2) * b(l1))
}

/// `1 − 2/y + e^{−y}(1 + 2/y)` with `y = R²/r_c²`; series below y = 1.
fn sphere_bracket(y: f64) -> f64 {
    if y < 1.0 {
        // Σ_{k≥2} (−1)^k (k−1) y^k/(k+1)!
        let mut sum = 0.0;
        let mut power_over_fact = y * y / 6.0;
        for k in 2..60 {
            let kf = k as f64;
            let term = (kf - 1.0) * power_over_fact;
            sum += if k % 2 == 0 { term } else { -term };
            power_over_fact *= y / (kf + 2.0);
            if term < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        1.0 - 2.0 / y + (-y).exp() * (1.0 + 2.0 / y)
    }
}

/// Closed-form CSL operator of a homogeneous sphere,
/// `(16π²R²r_c²ρ²x₀²/3u²)(1 − 2r_c²/R² + e^{−R²/r_c²}(1 + 2r_c²/R²))`.
pub fn d_sphere(radius: f64, density: f64, r_c: f64, x0: f64) -> Result<f64> {
    ResonatorGeometry::sphere(radius, density)?;
    require_positive("r_c", r_c)?;
    require_nonnegative("x0", x0)?;
    let y = (radius / r_c).powi(2);
    Ok(16.0 * PI * PI / 3.0 * (radius * r_c * density * x0 / ATOMIC_MASS_UNIT).powi(2) * sphere_bracket(y))
}

/// The sphere expression with a 14π²/3 prefactor, exactly 7/8 of
/// [`d_sphere`]. Kept for comparison output.
pub fn d_sphere_as_printed(radius: f64, density: f64, r_c: f64, x0: f64) -> Result<f64> {
    Ok(d_sphere(radius, density, r_c, x0)? * 7.0 / 8.0)
}

/// Closed-form `D` for either shape.
pub fn d_closed_form(geometry: &ResonatorGeometry, r_c: f64, x0: f64) -> Result<f64> {
    match *geometry {
        ResonatorGeometry::Cuboid { l1, l2, l3, density } => d_cuboid(l1, l2, l3, density, r_c, x0),
        ResonatorGeometry::Sphere { radius, density } => d_sphere(radius, density, r_c, x0),
    }
}

/// Diósi-Penrose phonon flux `x₀²G/(6√πħ)·(a/r_DP)·m·ρ`.
pub fn d_dp(x0: f64, lattice_a: f64, r_dp: f64, mass: f64, density: f64) -> Result<f64> {
    require_nonnegative("x0", x0)?;
    require_positive("lattice_a", lattice_a)?;
    require_positive("r_dp", r_dp)?;
    require_nonnegative("mass", mass)?;
    require_nonnegative("density", density)?;
    Ok(x0 * x0 * G / (6.0 * PI.sqrt() * HBAR) * (lattice_a / r_dp) * mass * density)
}

/// Cutoff `r_DP` at which [`d_dp`] equals `noise_flux`; smaller cutoffs give
/// a larger flux and are excluded.
pub fn dp_cutoff_from_noise(noise_flux: f64, x0: f64, lattice_a: f64, mass: f64, density: f64) -> Result<f64> {
    require_positive("noise_flux", noise_flux)?;
    require_nonnegative("x0", x0)?;
    require_positive("lattice_a", lattice_a)?;
    require_nonnegative("mass", mass)?;
    require_nonnegative("density", density)?;
    Ok(x0 * x0 * G * lattice_a * mass * density / (6.0 * PI.sqrt() * HBAR * noise_flux))
}

/// Linear-in-N heating `λ_grw·N·x₀²/(4r_c²)`, the small-displacement limit of
/// the kernel summed over independent nucleons.
pub fn grw_heating(n_nucleons: f64, lambda_grw: f64, x0: f64, r_c: f64) -> Result<f64> {
    require_nonnegative("n_nucleons", n_nucleons)?;
    require_nonnegative("lambda_grw", lambda_grw)?;
    require_nonnegative("x0", x0)?;
    require_positive("r_c", r_c)?;
    Ok(lambda_grw * n_nucleons * x0 * x0 / (4.0 * r_c * r_c))
}

/// Bose occupancy `(e^{ħΩ/k_BT} − 1)^{−1}`; zero at T = 0.
pub fn bose_occupation(omega: f64, temperature: f64) -> Result<f64> {
    require_positive("omega", omega)?;
    require_nonnegative("temperature", temperature)?;
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (HBAR * omega / (K_B * temperature)).exp_m1())
}

/// Thermal phonon flux `ṅ_th = Γ(e^{ħΩ/k_BT} − 1)^{−1}`.
pub fn thermal_flux(gamma: f64, omega: f64, temperature: f64) -> Result<f64> {
    require_nonnegative("gamma", gamma)?;
    Ok(gamma * bose_occupation(omega, temperature)?)
}

/// Low-temperature form `Γe^{−ħΩ/k_BT}`.
pub fn thermal_flux_low_t(gamma: f64, omega: f64, temperature: f64) -> Result<f64> {
    require_nonnegative("gamma", gamma)?;
    require_positive("omega", omega)?;
    require_nonnegative("temperature", temperature)?;
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(gamma * (-HBAR * omega / (K_B * temperature)).exp())
}

/// A band of collapse rates `10^{log10_center ± log10_halfwidth}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseBound {
    pub name: String,
    pub log10_center: f64,
    pub log10_halfwidth: f64,
}

impl CollapseBound {
    pub fn new(name: &str, log10_center: f64, log10_halfwidth: f64) -> Self {
        Self {
            name: name.to_string(),
            log10_center,
            log10_halfwidth,
        }
    }

    /// Adler's 10^{−8±2} s⁻¹ and Bassi et al.'s 10^{−10±2} s⁻¹.
    pub fn standard() -> Vec<Self> {
        vec![Self::new("adler", -8.0, 2.0), Self::new("bassi", -10.0, 2.0)]
    }

    pub fn center(&self) -> f64 {
        10f64.powf(self.log10_center)
    }

    pub fn low(&self) -> f64 {
        10f64.powf(self.log10_center - self.log10_halfwidth)
    }

    pub fn high(&self) -> f64 {
        10f64.powf(self.log10_center + self.log10_halfwidth)
    }
}

/// Inputs of the sphere heating map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatingMapSpec {
    pub diameters: Vec<f64>,
    pub temperatures: Vec<f64>,
    pub q: f64,
    pub c_sound: f64,
    pub density: f64,
    pub r_c: f64,
    pub bounds: Vec<CollapseBound>,
    pub lambda_grw: f64,
}

impl HeatingMapSpec {
    /// Silica sphere, Q = 10⁷, c = 3000 m/s, r_c = 100 nm, 300 K, 1 K and
    /// 10 mK, `points` log-spaced diameters from 10 nm to 100 µm.
    pub fn silica(points: usize) -> Self {
        Self {
            diameters: log_space(1e-8, 1e-4, points),
            temperatures: vec![300.0, 1.0, 0.01],
            q: 1e7,
            c_sound: crate::constants::SILICA_SOUND_SPEED,
            density: crate::constants::SILICA_DENSITY,
            r_c: 1e-7,
            bounds: CollapseBound::standard(),
            lambda_grw: GRW_LAMBDA,
        }
    }
}

/// `n` log-spaced values from `a` to `b` inclusive.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatingRow {
    pub diameter: f64,
    /// Breathing-mode angular frequency `c/R`.
    pub omega: f64,
    pub gamma: f64,
    pub d_sphere: f64,
    /// Thermal flux per temperature, in the order given.
    pub thermal: Vec<f64>,
    /// `(low, center, high)` CSL flux per bound.
    pub csl: Vec<(f64, f64, f64)>,
    pub grw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatingMap {
    pub spec: HeatingMapSpec,
    pub rows: Vec<HeatingRow>,
}

impl HeatingMap {
    /// Diameters where the central CSL flux of `bound` crosses the thermal
    /// flux at `temperature`, interpolated in log-log.
    pub fn crossings(&self, temperature_index: usize, bound_index: usize) -> Vec<f64> {
        let diff: Vec<f64> = self
            .rows
            .iter()
            .map(|r| r.csl[bound_index].1.ln() - r.thermal[temperature_index].max(f64::MIN_POSITIVE).ln())
            .collect();
        let mut out = Vec::new();
        for i in 1..self.rows.len() {
            let (a, b) = (diff[i - 1], diff[i]);
            if (a > 0.0) != (b > 0.0) {
                let (la, lb) = (self.rows[i - 1].diameter.ln(), self.rows[i].diameter.ln());
                out.push((la + (lb - la) * a / (a - b)).exp());
            }
        }
        out
    }
}

/// Thermal and collapse heating of a sphere's breathing mode (Ω = c/R,
/// Γ = Ω/Q) across diameters; rows are computed in parallel and kept in
/// grid order.
pub fn heating_map(spec: &HeatingMapSpec) -> Result<HeatingMap> {
    require_positive("q", spec.q)?;
    require_positive("c_sound", spec.c_sound)?;
    require_positive("density", spec.density)?;
    require_positive("r_c", spec.r_c)?;
    for &t in &spec.temperatures {
        require_nonnegative("temperature", t)?;
    }
    let rows: Result<Vec<HeatingRow>> = spec
        .diameters
        .par_iter()
        .map(|&d| {
            require_positive("diameter", d)?;
            let radius = 0.5 * d;
            let omega = spec.c_sound / radius;
            let gamma = omega / spec.q;
            let geom = ResonatorGeometry::sphere(radius, spec.density)?;
            let x0 = zero_point_motion(geom.mass(), omega)?;
            let dsph = d_sphere(radius, spec.density, spec.r_c, x0)?;
            let thermal = spec
                .temperatures
                .iter()
                .map(|&t| thermal_flux(gamma, omega, t))
                .collect::<Result<Vec<_>>>()?;
            let csl = spec
                .bounds
                .iter()
                .map(|b| (b.low() * dsph, b.center() * dsph, b.high() * dsph))
                .collect();
            let grw = grw_heating(geom.mass() / ATOMIC_MASS_UNIT, spec.lambda_grw, x0, spec.r_c)?;
            Ok(HeatingRow {
                diameter: d,
                omega,
                gamma,
                d_sphere: dsph,
                thermal,
                csl,
                grw,
            })
        })
        .collect();
    Ok(HeatingMap {
        spec: spec.clone(),
        rows: rows?,
    })
}

/// Rejects nonpositive or unsorted grids.
pub fn validate_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid(name, "grid is empty"));
    }
    for &v in grid {
        require_positive(name, v)?;
    }
    Ok(())
}
