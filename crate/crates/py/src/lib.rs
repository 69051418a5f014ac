//! Python bindings. Frequencies are ordinary Hz at this boundary, as in the
//! CLI configuration; everything else is SI.

use std::collections::BTreeMap;

use nanolin::budget::{self, BudgetInputs, Source, Sourced};
use nanolin::collapse::{self, ResonatorGeometry};
use nanolin::constants::hz_to_rad;
use nanolin::lindblad::SystemParams;
use nanolin::scenarios::{self, Scenario, ScenarioOptions};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: nanolin::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Runs `eta_om`, `eta_stokes` or `eta_om2` and returns
/// `(value, {channel: emitted probability}, cutoff_delta)`.
#[pyfunction]
#[pyo3(signature = (
    name,
    omega_hz = 5.3e9,
    gamma_hz = 0.108,
    g0_hz = 11.5e6,
    kappa_p0_hz = 9.2e6,
    kappa_p_ex_hz = 2.2e6,
    kappa_s0_hz = 9.2e6,
    kappa_s_ex_hz = 21e6,
    rwa = true,
))]
#[allow(clippy::too_many_arguments)]
fn scenario(
    name: &str,
    omega_hz: f64,
    gamma_hz: f64,
    g0_hz: f64,
    kappa_p0_hz: f64,
    kappa_p_ex_hz: f64,
    kappa_s0_hz: f64,
    kappa_s_ex_hz: f64,
    rwa: bool,
) -> PyResult<(f64, BTreeMap<String, f64>, Option<f64>)> {
    let s = Scenario::ALL
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown scenario `{name}`")))?;
    let p = SystemParams {
        omega: hz_to_rad(omega_hz),
        gamma: hz_to_rad(gamma_hz),
        g0: hz_to_rad(g0_hz),
        kappa_p0: hz_to_rad(kappa_p0_hz),
        kappa_p_ex: hz_to_rad(kappa_p_ex_hz),
        kappa_s0: hz_to_rad(kappa_s0_hz),
        kappa_s_ex: hz_to_rad(kappa_s_ex_hz),
        n_th: 0.0,
        n_dot_c: 0.0,
        rwa,
    };
    let r = scenarios::run_scenario(s, &p, &ScenarioOptions::default()).map_err(err)?;
    Ok((r.value, r.channels.into_iter().collect(), r.convergence.cutoff_delta))
}

/// Noise budget rows `(channel, rate_per_s, lambda_min_per_s)`; arguments
/// default to the quoted intermediates.
#[pyfunction]
#[pyo3(signature = (
    eta_om = budget::PAPER_ETA_OM,
    eta_f = budget::PAPER_ETA_F,
    p_om = budget::PAPER_P_OM,
    p_f = budget::PAPER_P_F,
    d = budget::PAPER_D,
    multiplex = 1.0,
))]
fn budget_table(
    eta_om: f64,
    eta_f: f64,
    p_om: f64,
    p_f: f64,
    d: f64,
    multiplex: f64,
) -> PyResult<Vec<(String, f64, f64)>> {
    let src = |v| Some(Sourced::new(v, Source::Config));
    let t = budget::build_table(&BudgetInputs {
        eta_om: src(eta_om),
        eta_f: src(eta_f),
        p_om: src(p_om),
        p_f: src(p_f),
        d: src(d),
        multiplex,
        ..BudgetInputs::paper_values()
    })
    .map_err(err)?;
    let mut rows: Vec<_> = t
        .rows
        .into_iter()
        .map(|r| (r.channel, r.rate_per_s, r.lambda_min_per_s))
        .collect();
    rows.push(("all_noise".into(), t.total_rate_per_s, t.total_lambda_min_per_s));
    Ok(rows)
}

#[pyfunction]
fn zero_point_motion(mass: f64, omega_hz: f64) -> PyResult<f64> {
    collapse::zero_point_motion(mass, hz_to_rad(omega_hz)).map_err(err)
}

#[pyfunction]
fn d_cuboid(l1: f64, l2: f64, l3: f64, density: f64, r_c: f64, x0: f64) -> PyResult<f64> {
    collapse::d_cuboid(l1, l2, l3, density, r_c, x0).map_err(err)
}

#[pyfunction]
fn d_sphere(radius: f64, density: f64, r_c: f64, x0: f64) -> PyResult<f64> {
    collapse::d_sphere(radius, density, r_c, x0).map_err(err)
}

/// Thermal phonon flux (1/s) for decay rate and frequency in Hz.
#[pyfunction]
fn thermal_flux(gamma_hz: f64, omega_hz: f64, temperature: f64) -> PyResult<f64> {
    collapse::thermal_flux(hz_to_rad(gamma_hz), hz_to_rad(omega_hz), temperature).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (lambda_c, d, eta, n_devices = 1.0))]
fn measurement_time(lambda_c: f64, d: f64, eta: f64, n_devices: f64) -> PyResult<f64> {
    budget::measurement_time(lambda_c, d, eta, n_devices).map_err(err)
}

#[pyfunction]
fn gaussian_tail(delta_omega: f64, sigma: f64) -> PyResult<f64> {
    budget::gaussian_tail(delta_omega, sigma).map_err(err)
}

/// `(r_c, D, lambda_min)` for the reference silicon beam.
#[pyfunction]
fn exclusion_curve(r_c: Vec<f64>, eta: f64, noise_rate: f64) -> PyResult<Vec<(f64, f64, f64)>> {
    let beam = ResonatorGeometry::paper_beam();
    let x0 = collapse::zero_point_motion(beam.mass(), hz_to_rad(5.3e9)).map_err(err)?;
    let curve = budget::exclusion_curve(&r_c, &beam, x0, eta, noise_rate).map_err(err)?;
    Ok(curve.into_iter().map(|p| (p.r_c, p.d, p.lambda_min)).collect())
}

#[pymodule]
#[pyo3(name = "nanolin")]
fn nanolin_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(scenario, m)?)?;
    m.add_function(wrap_pyfunction!(budget_table, m)?)?;
    m.add_function(wrap_pyfunction!(zero_point_motion, m)?)?;
    m.add_function(wrap_pyfunction!(d_cuboid, m)?)?;
    m.add_function(wrap_pyfunction!(d_sphere, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_flux, m)?)?;
    m.add_function(wrap_pyfunction!(measurement_time, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_tail, m)?)?;
    m.add_function(wrap_pyfunction!(exclusion_curve, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
