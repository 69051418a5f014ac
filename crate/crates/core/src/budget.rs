//! Detection-chain efficiencies, coincidence-count noise rates, the noise
//! budget table, measurement times, exclusion curves and the
//! quadratic-coupling feasibility estimate.
//!
//! Rates are angular (rad/s) internally; counts are per second.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collapse::{d_closed_form, ResonatorGeometry};
use crate::constants::SPEED_OF_LIGHT;
use crate::error::{invalid, require_nonnegative, require_positive, require_unit_interval, Result};

/// Largest η_p for which the probe stays in the single-photon regime.
pub const MAX_ETA_P: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeOccupancy {
    /// Input-field occupancy n̄_in.
    pub n_in: f64,
    /// Intracavity probe occupancy n̄_p.
    pub n_p: f64,
}

/// `n̄_p = η_pΓ/κ_p` and the drive `n̄_in = η_pΓκ_p/(4κ_{p,ex})` that
/// produces it through `n̄_p = 4κ_{p,ex}n̄_in/κ_p²`.
pub fn probe_occupancy(eta_p: f64, gamma: f64, kappa_p: f64, kappa_p_ex: f64) -> Result<ProbeOccupancy> {
    require_nonnegative("eta_p", eta_p)?;
    if eta_p > MAX_ETA_P {
        return Err(invalid("eta_p", format!("{eta_p} exceeds {MAX_ETA_P}; the weak-probe assumption fails")));
    }
    require_nonnegative("gamma", gamma)?;
    require_positive("kappa_p", kappa_p)?;
    require_positive("kappa_p_ex", kappa_p_ex)?;
    Ok(ProbeOccupancy {
        n_in: eta_p * gamma * kappa_p / (4.0 * kappa_p_ex),
        n_p: eta_p * gamma / kappa_p,
    })
}

/// Fabry-Perot filter cavity. Rates in rad/s, length in m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterParams {
    pub kappa_f0: f64,
    pub kappa_f_in: f64,
    pub kappa_f_out: f64,
    pub cavity_length: f64,
}

impl FilterParams {
    /// κ_{f,0}/2π = 30 kHz, both couplings 1.5·κ_{f,0}, 1 cm long.
    pub fn reference_cavity() -> Self {
        use crate::constants::hz_to_rad;
        Self {
            kappa_f0: hz_to_rad(30e3),
            kappa_f_in: hz_to_rad(45e3),
            kappa_f_out: hz_to_rad(45e3),
            cavity_length: 0.01,
        }
    }

    /// Loaded linewidth.
    pub fn kappa_f(&self) -> f64 {
        self.kappa_f0 + self.kappa_f_in + self.kappa_f_out
    }

    /// Free spectral range `2π·c/2L` (rad/s).
    pub fn fsr(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / (2.0 * self.cavity_length)
    }

    pub fn finesse(&self) -> f64 {
        self.fsr() / self.kappa_f()
    }

    pub fn validate(&self) -> Result<()> {
        require_nonnegative("kappa_f0", self.kappa_f0)?;
        require_nonnegative("kappa_f_in", self.kappa_f_in)?;
        require_nonnegative("kappa_f_out", self.kappa_f_out)?;
        require_positive("cavity_length", self.cavity_length)?;
        require_positive("kappa_f", self.kappa_f())?;
        if self.fsr() <= self.kappa_f() {
            return Err(invalid("cavity_length", "free spectral range must exceed the loaded linewidth"));
        }
        Ok(())
    }
}

/// On-resonance transmission `η_f = (1 − κ_{f,0}/κ_f)²` for equal in- and
/// output coupling.
pub fn filter_efficiency(filter: &FilterParams) -> Result<f64> {
    filter.validate()?;
    Ok((1.0 - filter.kappa_f0 / filter.kappa_f()).powi(2))
}

/// Airy transmission at detuning Δ,
/// `η_f[1 + (2F/π)² sin²(πΔ/ω_fsr)]^{−1}` with finesse `F = ω_fsr/κ_f`.
pub fn filter_leakage(filter: &FilterParams, detuning: f64) -> Result<f64> {
    let eta = filter_efficiency(filter)?;
    let s = (PI * detuning / filter.fsr()).sin();
    let c = 2.0 * filter.finesse() / PI;
    Ok(eta / (1.0 + c * c * s * s))
}

/// Leakage with the coefficient `(4F)²` in place of `(2F/π)²`.
pub fn filter_leakage_alt(filter: &FilterParams, detuning: f64) -> Result<f64> {
    let eta = filter_efficiency(filter)?;
    let s = (PI * detuning / filter.fsr()).sin();
    let c = 4.0 * filter.finesse();
    Ok(eta / (1.0 + c * c * s * s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionParams {
    /// Downconversion efficiency η_χ.
    pub eta_chi: f64,
    /// Single-detector efficiency.
    pub eta_d1: f64,
    /// Single-detector dark rate (1/s).
    pub r_d1: f64,
    /// Coincidence window (s).
    pub tau_c: f64,
}

impl DetectionParams {
    /// η_χ = 0.95, 80 % detectors with 3.5 s⁻¹ dark counts, 30 ps window.
    pub fn reference() -> Self {
        Self {
            eta_chi: 0.95,
            eta_d1: 0.80,
            r_d1: 3.5,
            tau_c: 30e-12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_unit_interval("eta_chi", self.eta_chi)?;
        require_unit_interval("eta_d1", self.eta_d1)?;
        require_nonnegative("r_d1", self.r_d1)?;
        require_nonnegative("tau_c", self.tau_c)
    }

    /// Coincidence detection efficiency `η_d = η_{d,1}²`.
    pub fn eta_d(&self) -> f64 {
        self.eta_d1 * self.eta_d1
    }
}

/// Accidental coincidence rate `R_{d,1}²·τ_c`.
pub fn coincidence_dark_rate(det: &DetectionParams) -> Result<f64> {
    det.validate()?;
    Ok(det.r_d1 * det.r_d1 * det.tau_c)
}

/// `η = η_pη_omη_fη_χη_d`: probability that a phonon yields a coincidence.
pub fn total_efficiency(eta_p: f64, eta_om: f64, eta_f: f64, eta_chi: f64, eta_d: f64) -> Result<f64> {
    for (n, v) in [("eta_p", eta_p), ("eta_om", eta_om), ("eta_f", eta_f), ("eta_chi", eta_chi), ("eta_d", eta_d)] {
        require_unit_interval(n, v)?;
    }
    Ok(eta_p * eta_om * eta_f * eta_chi * eta_d)
}

/// Collapse-induced coincidence rate `R_c = λ_c·D·η`.
pub fn signal_rate(lambda_c: f64, d: f64, eta: f64) -> Result<f64> {
    require_nonnegative("lambda_c", lambda_c)?;
    require_nonnegative("D", d)?;
    require_unit_interval("eta", eta)?;
    Ok(lambda_c * d * eta)
}

/// Single measurement run needed to register one collapse count,
/// `1/(λ_c·D·η·N)` for `N` multiplexed devices.
pub fn measurement_time(lambda_c: f64, d: f64, eta: f64, n_devices: f64) -> Result<f64> {
    require_positive("lambda_c", lambda_c)?;
    require_positive("D", d)?;
    require_positive("eta", eta)?;
    require_positive("n_devices", n_devices)?;
    Ok(1.0 / (lambda_c * d * eta * n_devices))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbsorptionNoise {
    /// Phonons deposited per probe photon, `n̄_abs,1 = n_base·Γ/κ`.
    pub n_abs1: f64,
    /// `p_abs(∞) = η_p·n̄_abs,1·η_om`.
    pub p_abs: f64,
    /// `R_abs = η_pΓ·p_abs·η_fη_χη_d`.
    pub r_abs: f64,
}

/// Absorption heating. `n_abs_base` is the phonon number caused by one
/// intracavity photon on average; `kappa` the loaded optical linewidth it
/// refers to; `eta_chain` is `η_fη_χη_d`.
pub fn absorption_noise(
    gamma: f64,
    kappa: f64,
    eta_p: f64,
    eta_om: f64,
    n_abs_base: f64,
    eta_chain: f64,
) -> Result<AbsorptionNoise> {
    require_nonnegative("gamma", gamma)?;
    require_positive("kappa", kappa)?;
    require_unit_interval("eta_p", eta_p)?;
    require_unit_interval("eta_om", eta_om)?;
    require_nonnegative("n_abs_base", n_abs_base)?;
    require_unit_interval("eta_chain", eta_chain)?;
    let n_abs1 = n_abs_base * gamma / kappa;
    let p_abs = eta_p * n_abs1 * eta_om;
    Ok(AbsorptionNoise {
        n_abs1,
        p_abs,
        r_abs: eta_p * gamma * p_abs * eta_chain,
    })
}

/// Absorbed phonon number at mean intracavity photon number `n_cav`,
/// `n_base·n̄_cav^{1/3}`.
pub fn absorption_occupancy(n_abs_base: f64, n_cav: f64) -> Result<f64> {
    require_nonnegative("n_abs_base", n_abs_base)?;
    require_nonnegative("n_cav", n_cav)?;
    Ok(n_abs_base * n_cav.cbrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Quoted intermediate value injected for regression.
    Paper,
    /// Closed-form expression from the other inputs.
    Formula,
    /// Master-equation run.
    Simulation,
    /// Taken directly from the configuration.
    Config,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sourced {
    pub value: f64,
    pub source: Source,
}

impl Sourced {
    pub fn new(value: f64, source: Source) -> Self {
        Self { value, source }
    }
}

/// Everything [`build_table`] needs. Upstream values left as `None` make
/// the table fail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetInputs {
    pub gamma: f64,
    pub omega: f64,
    pub temperature: f64,
    pub eta_p: f64,
    pub eta_om: Option<Sourced>,
    pub eta_f: Option<Sourced>,
    pub p_om: Option<Sourced>,
    pub p_f: Option<Sourced>,
    pub d: Option<Sourced>,
    pub detection: DetectionParams,
    /// Phonons from absorption at one intracavity photon.
    pub n_abs_base: f64,
    /// Loaded linewidth the absorption estimate refers to.
    pub kappa_abs: f64,
    /// Number of multiplexed devices sharing one detector pair.
    pub multiplex: f64,
}

/// Quoted intermediates: η_om = 0.32, η_f = 0.56, p_om = 8.4·10⁻⁸,
/// p_f = 3.5·10⁻¹⁰, D = 5.1·10⁵.
pub const PAPER_ETA_OM: f64 = 0.32;
pub const PAPER_ETA_F: f64 = 0.56;
pub const PAPER_P_OM: f64 = 8.4e-8;
pub const PAPER_P_F: f64 = 3.5e-10;
pub const PAPER_D: f64 = 5.1e5;

impl BudgetInputs {
    /// Device operating point at 10 mK with the quoted intermediates.
    pub fn paper_values() -> Self {
        use crate::constants::hz_to_rad;
        Self {
            gamma: hz_to_rad(0.108),
            omega: hz_to_rad(5.3e9),
            temperature: 0.01,
            eta_p: 0.01,
            eta_om: Some(Sourced::new(PAPER_ETA_OM, Source::Paper)),
            eta_f: Some(Sourced::new(PAPER_ETA_F, Source::Paper)),
            p_om: Some(Sourced::new(PAPER_P_OM, Source::Paper)),
            p_f: Some(Sourced::new(PAPER_P_F, Source::Paper)),
            d: Some(Sourced::new(PAPER_D, Source::Paper)),
            detection: DetectionParams::reference(),
            n_abs_base: 10.0,
            kappa_abs: hz_to_rad(575e6),
            multiplex: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetRow {
    pub channel: String,
    /// Coincidence rate (1/s).
    pub rate_per_s: f64,
    /// `rate/(D·η)` (1/s).
    pub lambda_min_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseBudget {
    pub rows: Vec<BudgetRow>,
    pub total_rate_per_s: f64,
    pub total_lambda_min_per_s: f64,
    pub d: f64,
    pub eta: f64,
    /// `R_c/λ_c = D·η`.
    pub signal_rate_per_lambda: f64,
    pub multiplex: f64,
    pub provenance: Vec<(String, f64, Source)>,
}

impl NoiseBudget {
    pub fn row(&self, channel: &str) -> Option<&BudgetRow> {
        self.rows.iter().find(|r| r.channel == channel)
    }
}

pub const BUDGET_CHANNELS: [&str; 5] = ["thermal", "optomechanical", "absorption", "probe_photons", "dark_counts"];

fn need(v: Option<Sourced>, name: &str) -> Result<Sourced> {
    v.ok_or_else(|| invalid(name, "missing upstream value"))
}

/// Assembles the noise rows: thermal `η·ṅ_th`, optomechanical
/// `η_pΓ·p_om·η_fη_χη_d`, absorption, leaked probe photons
/// `η_pΓ·p_f·η_χη_d` and coincidence dark counts `R_{d,1}²τ_c/N`, each
/// with `λ_min = R/(D·η)`.
pub fn build_table(inputs: &BudgetInputs) -> Result<NoiseBudget> {
    let eta_om = need(inputs.eta_om, "eta_om")?;
    let eta_f = need(inputs.eta_f, "eta_f")?;
    let p_om = need(inputs.p_om, "p_om")?;
    let p_f = need(inputs.p_f, "p_f")?;
    let d = need(inputs.d, "D")?;
    require_positive("gamma", inputs.gamma)?;
    require_positive("D", d.value)?;
    require_positive("multiplex", inputs.multiplex)?;
    require_unit_interval("p_om", p_om.value)?;
    require_unit_interval("p_f", p_f.value)?;
    inputs.detection.validate()?;

    let det = &inputs.detection;
    let eta_d = det.eta_d();
    let eta = total_efficiency(inputs.eta_p, eta_om.value, eta_f.value, det.eta_chi, eta_d)?;
    require_positive("eta", eta)?;
    let probe_rate = inputs.eta_p * inputs.gamma;

    let n_th = crate::collapse::thermal_flux(inputs.gamma, inputs.omega, inputs.temperature)?;
    let absorption = absorption_noise(
        inputs.gamma,
        inputs.kappa_abs,
        inputs.eta_p,
        eta_om.value,
        inputs.n_abs_base,
        eta_f.value * det.eta_chi * eta_d,
    )?;
    let rates = [
        eta * n_th,
        probe_rate * p_om.value * eta_f.value * det.eta_chi * eta_d,
        absorption.r_abs,
        probe_rate * p_f.value * det.eta_chi * eta_d,
        coincidence_dark_rate(det)? / inputs.multiplex,
    ];
    let rows: Vec<BudgetRow> = BUDGET_CHANNELS
        .iter()
        .zip(rates)
        .map(|(c, r)| BudgetRow {
            channel: c.to_string(),
            rate_per_s: r,
            lambda_min_per_s: r / (d.value * eta),
        })
        .collect();
    let total_rate_per_s = rows.iter().map(|r| r.rate_per_s).sum();
    let total_lambda_min_per_s = rows.iter().map(|r| r.lambda_min_per_s).sum();
    let provenance = vec![
        ("eta_p".to_string(), inputs.eta_p, Source::Config),
        ("eta_om".to_string(), eta_om.value, eta_om.source),
        ("eta_f".to_string(), eta_f.value, eta_f.source),
        ("eta_chi".to_string(), det.eta_chi, Source::Config),
        ("eta_d".to_string(), eta_d, Source::Formula),
        ("p_om".to_string(), p_om.value, p_om.source),
        ("p_f".to_string(), p_f.value, p_f.source),
        ("D".to_string(), d.value, d.source),
        ("n_dot_th".to_string(), n_th, Source::Formula),
        ("n_abs1".to_string(), absorption.n_abs1, Source::Formula),
        ("p_abs".to_string(), absorption.p_abs, Source::Formula),
    ];
    Ok(NoiseBudget {
        rows,
        total_rate_per_s,
        total_lambda_min_per_s,
        d: d.value,
        eta,
        signal_rate_per_lambda: d.value * eta,
        multiplex: inputs.multiplex,
        provenance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExclusionPoint {
    pub r_c: f64,
    pub d: f64,
    pub lambda_min: f64,
}

/// `λ_min(r_c) = R_noise/(D(r_c)·η)` with the noise rate held fixed;
/// evaluated in parallel, in grid order.
pub fn exclusion_curve(
    r_c_grid: &[f64],
    geometry: &ResonatorGeometry,
    x0: f64,
    eta: f64,
    noise_rate: f64,
) -> Result<Vec<ExclusionPoint>> {
    crate::collapse::validate_grid("r_c", r_c_grid)?;
    require_positive("eta", eta)?;
    require_nonnegative("noise_rate", noise_rate)?;
    r_c_grid
        .par_iter()
        .map(|&r_c| {
            let d = d_closed_form(geometry, r_c, x0)?;
            Ok(ExclusionPoint {
                r_c,
                d,
                lambda_min: noise_rate / (d * eta),
            })
        })
        .collect()
}

/// `P(X ≥ δω)` for a zero-mean Gaussian of width σ.
pub fn gaussian_tail(delta_omega: f64, sigma: f64) -> Result<f64> {
    require_positive("sigma", sigma)?;
    Ok(0.5 * libm::erfc(delta_omega / (sigma * std::f64::consts::SQRT_2)))
}

/// Smallest `x` with `P(X ≥ xσ) ≤ p`.
pub fn gaussian_tail_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 0.5) {
        return Err(invalid("p", format!("tail probability must lie in (0, 0.5), got {p}")));
    }
    let (mut lo, mut hi) = (0.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 0.5 * libm::erfc(mid / std::f64::consts::SQRT_2) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticParams {
    /// Zero-point quadratic coupling g₀⁽²⁾ (rad/s).
    pub g0_2: f64,
    /// Mean intracavity photon number.
    pub n_cav: f64,
    /// Loaded optical linewidth (rad/s).
    pub kappa: f64,
    /// Mechanical decay rate (rad/s).
    pub gamma: f64,
    /// Residual single-photon linear coupling (rad/s).
    pub g_linear: f64,
}

impl QuadraticParams {
    /// n̄_cav = 100, κ/2π = 575 MHz, Γ/2π = 108 mHz, g₀⁽²⁾/2π = 245 Hz, no
    /// linear coupling.
    pub fn reference() -> Self {
        use crate::constants::hz_to_rad;
        Self {
            g0_2: hz_to_rad(245.0),
            n_cav: 100.0,
            kappa: hz_to_rad(575e6),
            gamma: hz_to_rad(0.108),
            g_linear: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_nonnegative("g0_2", self.g0_2)?;
        require_positive("n_cav", self.n_cav)?;
        require_positive("kappa", self.kappa)?;
        require_positive("gamma", self.gamma)?;
        require_nonnegative("g_linear", self.g_linear)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticReport {
    /// Photons interacting within one phonon lifetime, `n̄_cav·κ/Γ`.
    pub n_photons: f64,
    /// Frequency noise `κ/√N` (rad/s).
    pub sigma: f64,
    /// Per-phonon shift `2n̄_cav^{1/2}g₀⁽²⁾` (rad/s).
    pub shift: f64,
    /// Probability of a fluctuation at least as large as the shift.
    pub tail_probability: f64,
    /// `Γ·p(δω)` (1/s).
    pub spurious_rate: f64,
    /// `3.5√(κΓ)·n̄_cav^{−3/2}` (rad/s).
    pub threshold_printed: f64,
    /// `3.5√(κΓ)/(2n̄_cav)`, from requiring the shift to exceed 3.5σ (rad/s).
    pub threshold_derived: f64,
    /// Multiple of σ the shift must exceed so that `Γ·p ≤ ṅ_c`.
    pub sigma_multiple: f64,
    /// Quantum back-action flux `4g₀²n̄_cav/κ` from the linear coupling (1/s).
    pub backaction_flux: f64,
    /// Largest enhanced linear coupling `√(ṅ_c·κ/4)` (rad/s) whose
    /// back-action stays below the collapse flux.
    pub g_max: f64,
    /// Absorbed phonons at this n̄_cav from the cube-root law.
    pub n_abs: f64,
}

/// Feasibility of detecting collapse phonons through a quadratic
/// (frequency-shift) readout against a collapse flux `collapse_flux`.
pub fn quadratic_feasibility(q: &QuadraticParams, collapse_flux: f64, n_abs_base: f64) -> Result<QuadraticReport> {
    q.validate()?;
    require_positive("collapse_flux", collapse_flux)?;
    let n_photons = q.n_cav * q.kappa / q.gamma;
    let sigma = q.kappa / n_photons.sqrt();
    let shift = 2.0 * q.n_cav.sqrt() * q.g0_2;
    let tail_probability = gaussian_tail(shift, sigma)?;
    let root = (q.kappa * q.gamma).sqrt();
    let sigma_multiple = if collapse_flux / q.gamma < 0.5 {
        gaussian_tail_inverse(collapse_flux / q.gamma)?
    } else {
        0.0
    };
    Ok(QuadraticReport {
        n_photons,
        sigma,
        shift,
        tail_probability,
        spurious_rate: q.gamma * tail_probability,
        threshold_printed: 3.5 * root * q.n_cav.powf(-1.5),
        threshold_derived: 3.5 * root / (2.0 * q.n_cav),
        sigma_multiple,
        backaction_flux: 4.0 * q.g_linear * q.g_linear * q.n_cav / q.kappa,
        g_max: (collapse_flux * q.kappa / 4.0).sqrt(),
        n_abs: absorption_occupancy(n_abs_base, q.n_cav)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_rad;

    #[test]
    fn probe_occupancy_round_trip() {
        let (g, kp, kpe) = (hz_to_rad(0.108), hz_to_rad(11.4e6), hz_to_rad(2.2e6));
        let o = probe_occupancy(0.01, g, kp, kpe).unwrap();
        assert!((o.n_p / 9.47e-11 - 1.0).abs() < 1e-3);
        assert!((4.0 * kpe * o.n_in / (kp * kp) / o.n_p - 1.0).abs() < 1e-15);
        let z = probe_occupancy(0.0, g, kp, kpe).unwrap();
        assert_eq!((z.n_in, z.n_p), (0.0, 0.0));
        assert!(probe_occupancy(0.2, g, kp, kpe).is_err());
    }

    #[test]
    fn filter_limits() {
        let f = FilterParams::reference_cavity();
        assert!((filter_efficiency(&f).unwrap() - 0.5625).abs() < 1e-15);
        let lossless = FilterParams { kappa_f0: 0.0, ..f };
        assert_eq!(filter_efficiency(&lossless).unwrap(), 1.0);
        let closed = FilterParams {
            kappa_f_in: 0.0,
            kappa_f_out: 0.0,
            ..f
        };
        assert_eq!(filter_efficiency(&closed).unwrap(), 0.0);
        assert_eq!(filter_leakage(&f, 0.0).unwrap(), filter_efficiency(&f).unwrap());
        let periodic = filter_leakage(&f, f.fsr()).unwrap();
        assert!((periodic / 0.5625 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dark_rate() {
        let d = DetectionParams::reference();
        assert!((coincidence_dark_rate(&d).unwrap() - 3.675e-10).abs() < 1e-22);
        assert!((d.eta_d() - 0.64).abs() < 1e-15);
        let quiet = DetectionParams { r_d1: 0.0, ..d };
        assert_eq!(coincidence_dark_rate(&quiet).unwrap(), 0.0);
    }

    #[test]
    fn missing_upstream_value_is_an_error() {
        let mut i = BudgetInputs::paper_values();
        i.p_om = None;
        assert!(build_table(&i).is_err());
    }

    #[test]
    fn tail_inverse() {
        for x in [0.5, 1.0, 3.5, 6.0] {
            let p = gaussian_tail(x, 1.0).unwrap();
            assert!((gaussian_tail_inverse(p).unwrap() - x).abs() < 1e-9);
        }
        assert!(gaussian_tail_inverse(0.7).is_err());
        assert_eq!(gaussian_tail(0.0, 2.0).unwrap(), 0.5);
    }
}
