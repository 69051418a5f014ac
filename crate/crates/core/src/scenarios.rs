//! Master-equation scenarios: conversion efficiencies, spurious Stokes
//! scattering, counter-rotating noise phonons and the cumulative probability
//! of an optomechanical false count.
//!
//! Every scenario drops the mechanical channels (Γ, n̄_th, ṅ_c) since
//! Γ ≪ κ, and starts from a Fock state. Emission scenarios integrate to
//! `12/min(κ_p, κ_s)` and keep going in further chunks of the same length
//! until the intracavity photon number is below [`RESIDUAL_LIMIT`].

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_nonnegative, require_positive, require_unit_interval, Error, Result};
use crate::fock::{DensityMatrix, FockSpace, Operator, C64, MODE_B, MODE_P, MODE_S};
use crate::lindblad::{
    integrate, optical_dissipators, Cumulative, Hamiltonian, IntegrateOptions, Integration, Observable, SystemParams,
    TimeSeries,
};
use crate::quadrature::{self, QuadratureOptions};

pub const DEFAULT_CUTOFFS: [usize; 3] = [2, 2, 2];
pub const TWO_PHONON_CUTOFFS: [usize; 3] = [3, 2, 2];
/// Largest accepted relative change when every cutoff is raised by one.
pub const CUTOFF_TOLERANCE: f64 = 1e-3;
/// Intracavity photon number below which the emission is considered over.
pub const RESIDUAL_LIMIT: f64 = 1e-6;
const MAX_EXTENSIONS: usize = 8;
/// Probe-photon rate relative to Γ.
pub const DEFAULT_ETA_P: f64 = 0.01;

/// Cumulative emission channels recorded by the emission scenarios.
pub const EMISSION_CHANNELS: [&str; 4] = ["probe_intrinsic", "probe_external", "signal_intrinsic", "signal_external"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Signal emission from |110⟩.
    EtaOm,
    /// Phonon left behind after |001⟩ decays.
    EtaStokes,
    /// Signal emission from |210⟩.
    EtaOm2,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::EtaOm, Scenario::EtaStokes, Scenario::EtaOm2];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::EtaOm => "eta_om",
            Scenario::EtaStokes => "eta_stokes",
            Scenario::EtaOm2 => "eta_om2",
        }
    }

    pub fn initial_state(self) -> [usize; 3] {
        match self {
            Scenario::EtaOm => [1, 1, 0],
            Scenario::EtaStokes => [0, 0, 1],
            Scenario::EtaOm2 => [2, 1, 0],
        }
    }

    pub fn default_cutoffs(self) -> [usize; 3] {
        match self {
            Scenario::EtaOm2 => TWO_PHONON_CUTOFFS,
            _ => DEFAULT_CUTOFFS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioOptions {
    /// Overrides the scenario's default cutoffs.
    pub cutoffs: Option<[usize; 3]>,
    /// Rerun with every cutoff raised by one and fail above [`CUTOFF_TOLERANCE`].
    pub check_cutoffs: bool,
    /// Rerun with half the step and record the relative change.
    pub check_step_halving: bool,
    /// Multiplies the default step size.
    pub dt_factor: f64,
    pub max_samples: usize,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self {
            cutoffs: None,
            check_cutoffs: true,
            check_step_halving: false,
            dt_factor: 1.0,
            max_samples: 401,
        }
    }
}

impl ScenarioOptions {
    /// Single run at the default cutoffs without any reruns.
    pub fn quick() -> Self {
        Self {
            check_cutoffs: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub cutoffs: Vec<usize>,
    /// Relative change with every cutoff raised by one.
    pub cutoff_delta: Option<f64>,
    /// Relative change with the step halved.
    pub step_delta: Option<f64>,
    pub horizon_s: f64,
    pub residual_excitation: f64,
    pub steps: usize,
    pub dt_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioResult {
    pub name: String,
    pub inputs: SystemParams,
    pub value: f64,
    /// Cumulative emission into each loss port.
    pub channels: Vec<(String, f64)>,
    pub convergence: ConvergenceReport,
    #[serde(skip)]
    pub series: TimeSeries,
}

impl ScenarioResult {
    pub fn channel(&self, name: &str) -> Option<f64> {
        self.channels.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Parameters as used inside a scenario run: mechanical channels removed.
pub fn scenario_params(params: &SystemParams) -> SystemParams {
    SystemParams {
        gamma: 0.0,
        n_th: 0.0,
        n_dot_c: 0.0,
        ..*params
    }
}

/// RWA step `0.02/max(g₀, κ_p, κ_s)`; with the full Hamiltonian also at
/// most a fiftieth of the mechanical period.
pub fn step_size(params: &SystemParams) -> f64 {
    let fastest = params.g0.max(params.kappa_p()).max(params.kappa_s());
    let dt = 0.02 / fastest;
    if params.rwa {
        dt
    } else {
        dt.min(2.0 * PI / params.omega / 50.0)
    }
}

fn check_optical(params: &SystemParams) -> Result<()> {
    params.validate()?;
    require_positive("kappa_p", params.kappa_p())?;
    require_positive("kappa_s", params.kappa_s())
}

fn rel_delta(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn raise(cutoffs: [usize; 3]) -> [usize; 3] {
    cutoffs.map(|c| c + 1)
}

struct EmissionRun {
    series: TimeSeries,
    final_state: DensityMatrix,
    totals: [f64; 4],
    horizon: f64,
    residual: f64,
    steps: usize,
    dt: f64,
}

fn append(series: &mut TimeSeries, run: &Integration, offsets: &[f64], skip_first: bool) -> Result<()> {
    let names: Vec<String> = run.series.names().map(str::to_string).collect();
    let columns: Vec<&[f64]> = names.iter().map(|n| run.series.channel(n).expect("own channel")).collect();
    for (i, &t) in run.series.times().iter().enumerate() {
        if skip_first && i == 0 {
            continue;
        }
        let row: Vec<f64> = columns
            .iter()
            .enumerate()
            .map(|(j, c)| c[i] + offsets.get(j).copied().unwrap_or(0.0))
            .collect();
        series.push(t, &row)?;
    }
    Ok(())
}

fn run_emission(params: &SystemParams, cutoffs: [usize; 3], initial: [usize; 3], dt_factor: f64, max_samples: usize) -> Result<EmissionRun> {
    let p = scenario_params(params);
    check_optical(&p)?;
    let space = FockSpace::three_mode(cutoffs)?;
    let h = Hamiltonian::optomechanical(&p, &space)?;
    let diss = optical_dissipators(&p, &space)?;
    let nb = Operator::number(&space, MODE_B)?;
    let np = Operator::number(&space, MODE_P)?;
    let ns = Operator::number(&space, MODE_S)?;
    let observables = [
        Observable::new("n_b", nb),
        Observable::new("n_p", np.clone()),
        Observable::new("n_s", ns.clone()),
    ];
    let cumulative = [
        Cumulative::new(EMISSION_CHANNELS[0], p.kappa_p0, np.clone()),
        Cumulative::new(EMISSION_CHANNELS[1], p.kappa_p_ex, np),
        Cumulative::new(EMISSION_CHANNELS[2], p.kappa_s0, ns.clone()),
        Cumulative::new(EMISSION_CHANNELS[3], p.kappa_s_ex, ns),
    ];

    let chunk = 12.0 / p.kappa_p().min(p.kappa_s());
    let dt = step_size(&p) * dt_factor;
    let names: Vec<&str> = ["n_b", "n_p", "n_s"].into_iter().chain(EMISSION_CHANNELS).collect();
    let mut series = TimeSeries::new(&names);
    let mut rho = DensityMatrix::basis_state(&space, &initial)?;
    let mut totals = [0.0; 4];
    let mut t = 0.0;
    let mut steps = 0;
    let mut actual_dt = dt;
    let mut residual = f64::INFINITY;

    for chunk_index in 0..=MAX_EXTENSIONS {
        let opts = IntegrateOptions {
            dt,
            t_start: t,
            max_samples,
            check_state: false,
        };
        let run = integrate(&rho, &h, &diss, chunk, &observables, &cumulative, &opts)?;
        let mut offsets = vec![0.0; 3];
        offsets.extend_from_slice(&totals);
        append(&mut series, &run, &offsets, chunk_index > 0)?;
        for (j, name) in EMISSION_CHANNELS.iter().enumerate() {
            totals[j] += run.final_value(name).unwrap_or(0.0);
        }
        steps += run.steps;
        actual_dt = run.dt;
        t += chunk;
        rho = run.final_state;
        residual = (run.series.last("n_p").unwrap_or(0.0) + run.series.last("n_s").unwrap_or(0.0)).abs();
        if residual < RESIDUAL_LIMIT {
            break;
        }
    }
    if residual >= RESIDUAL_LIMIT {
        return Err(Error::Convergence {
            scenario: "emission".into(),
            detail: format!("intracavity excitation {residual:.3e} remains after t = {t:.3e} s"),
        });
    }
    Ok(EmissionRun {
        series,
        final_state: rho,
        totals,
        horizon: t,
        residual,
        steps,
        dt: actual_dt,
    })
}

fn scenario_value(scenario: Scenario, run: &EmissionRun) -> Result<f64> {
    Ok(match scenario {
        Scenario::EtaOm | Scenario::EtaOm2 => run.totals[3],
        Scenario::EtaStokes => {
            let nb = Operator::number(run.final_state.space(), MODE_B)?;
            run.final_state.expectation(&nb)?.re
        }
    })
}

/// Runs one emission scenario with the requested convergence checks.
pub fn run_scenario(scenario: Scenario, params: &SystemParams, opts: &ScenarioOptions) -> Result<ScenarioResult> {
    let cutoffs = opts.cutoffs.unwrap_or(scenario.default_cutoffs());
    if scenario == Scenario::EtaOm2 && cutoffs[MODE_B] < 3 {
        return Err(invalid("cutoffs", "the two-phonon scenario needs a phonon cutoff of at least 3"));
    }
    require_positive("dt_factor", opts.dt_factor)?;
    let initial = scenario.initial_state();
    let run = run_emission(params, cutoffs, initial, opts.dt_factor, opts.max_samples)?;
    let value = scenario_value(scenario, &run)?;

    let cutoff_delta = if opts.check_cutoffs {
        let bigger = run_emission(params, raise(cutoffs), initial, opts.dt_factor, 2)?;
        let delta = rel_delta(value, scenario_value(scenario, &bigger)?);
        if delta > CUTOFF_TOLERANCE {
            return Err(Error::Convergence {
                scenario: scenario.name().into(),
                detail: format!("raising cutoffs {cutoffs:?} by one changes the value by {delta:.3e} (relative)"),
            });
        }
        Some(delta)
    } else {
        None
    };
    let step_delta = if opts.check_step_halving {
        let fine = run_emission(params, cutoffs, initial, 0.5 * opts.dt_factor, 2)?;
        Some(rel_delta(value, scenario_value(scenario, &fine)?))
    } else {
        None
    };

    Ok(ScenarioResult {
        name: scenario.name().into(),
        inputs: *params,
        value,
        channels: EMISSION_CHANNELS
            .iter()
            .zip(run.totals)
            .map(|(n, v)| (n.to_string(), v))
            .collect(),
        convergence: ConvergenceReport {
            cutoffs: cutoffs.to_vec(),
            cutoff_delta,
            step_delta,
            horizon_s: run.horizon,
            residual_excitation: run.residual,
            steps: run.steps,
            dt_s: run.dt,
        },
        series: run.series,
    })
}

/// `κ_{s,ex}∫⟨a_s†a_s⟩dt` from |110⟩: probability that a probe photon and a
/// phonon leave as a collected signal photon.
pub fn eta_om(params: &SystemParams) -> Result<ScenarioResult> {
    run_scenario(Scenario::EtaOm, params, &ScenarioOptions::default())
}

/// Phonon occupancy left after a signal photon |001⟩ has decayed.
pub fn eta_stokes(params: &SystemParams) -> Result<ScenarioResult> {
    run_scenario(Scenario::EtaStokes, params, &ScenarioOptions::default())
}

/// Collected signal emission from the two-phonon state |210⟩.
pub fn eta_om2(params: &SystemParams) -> Result<ScenarioResult> {
    run_scenario(Scenario::EtaOm2, params, &ScenarioOptions::default())
}

/// Spectral overlap of the signal mode with the probe drive and the phonon
/// occupancy it causes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectNoise {
    pub theta: f64,
    pub p_direct: f64,
}

/// `Θ = κ_s²/(κ_s² + Ω²)`.
pub fn signal_overlap(kappa_s: f64, omega: f64) -> Result<f64> {
    require_nonnegative("kappa_s", kappa_s)?;
    require_nonnegative("omega", omega)?;
    if kappa_s == 0.0 {
        return Ok(0.0);
    }
    Ok(kappa_s * kappa_s / (kappa_s * kappa_s + omega * omega))
}

/// `p_direct = (κ_p/κ_{p,ex})·Θ·η_Stokes` for a given η_Stokes.
pub fn direct_occupation_noise_from(params: &SystemParams, eta_stokes: f64) -> Result<DirectNoise> {
    params.validate()?;
    require_positive("kappa_p_ex", params.kappa_p_ex)?;
    require_unit_interval("eta_stokes", eta_stokes)?;
    let theta = signal_overlap(params.kappa_s(), params.omega)?;
    Ok(DirectNoise {
        theta,
        p_direct: params.kappa_p() / params.kappa_p_ex * theta * eta_stokes,
    })
}

/// As [`direct_occupation_noise_from`], simulating η_Stokes first.
pub fn direct_occupation_noise(params: &SystemParams) -> Result<DirectNoise> {
    let stokes = eta_stokes(&SystemParams { rwa: true, ..*params })?;
    direct_occupation_noise_from(params, stokes.value)
}

/// Phonon populations created by counter-rotating scattering of one probe
/// photon.
#[derive(Debug, Clone, Serialize)]
pub struct CounterrotPopulations {
    /// `Tr[P_{n_b=1}ρ]` averaged over one mechanical period after `t0`.
    pub p_cr1: f64,
    /// `Tr[P_{n_b=2}ρ]`, averaged likewise.
    pub p_cr2: f64,
    /// `⟨001|ρ|100⟩ + ⟨101|ρ|101⟩` at `t0`.
    pub literal_cr1: C64,
    /// `⟨002|ρ|200⟩ + ⟨012|ρ|210⟩` at `t0`.
    pub literal_cr2: C64,
    pub t0: f64,
    pub window: f64,
    pub convergence: ConvergenceReport,
    #[serde(skip)]
    pub series: TimeSeries,
}

/// Counter-rotating populations from |010⟩ under the full time-dependent
/// optomechanical Hamiltonian.
pub fn counterrot_populations(params: &SystemParams) -> Result<CounterrotPopulations> {
    counterrot_populations_with(params, &ScenarioOptions::default(), |p, space| {
        Hamiltonian::optomechanical(p, space)
    })
}

/// Counter-rotating populations for an arbitrary Hamiltonian family. The
/// builder is called once per Fock space used (the convergence rerun needs a
/// larger one).
pub fn counterrot_populations_with<F>(params: &SystemParams, opts: &ScenarioOptions, build: F) -> Result<CounterrotPopulations>
where
    F: Fn(&SystemParams, &FockSpace) -> Result<Hamiltonian>,
{
    if params.rwa {
        return Err(invalid("rwa", "counter-rotating populations need the full Hamiltonian (rwa = false)"));
    }
    let p = scenario_params(params);
    check_optical(&p)?;
    let t0 = 10.0 / p.kappa_p().min(p.kappa_s());
    if params.gamma * t0 > 1e-2 {
        return Err(invalid(
            "t0",
            format!("readout time {t0:.3e} s is not short compared to 1/Γ = {:.3e} s", 1.0 / params.gamma),
        ));
    }
    let cutoffs = opts.cutoffs.unwrap_or(DEFAULT_CUTOFFS);
    if cutoffs.iter().any(|&c| c < 2) {
        return Err(invalid("cutoffs", "counter-rotating populations need every cutoff ≥ 2"));
    }
    let window = 2.0 * PI / p.omega;
    let dt = step_size(&p) * opts.dt_factor;

    let run = |cutoffs: [usize; 3], dt: f64, samples: usize| -> Result<(f64, f64, C64, C64, Integration)> {
        let space = FockSpace::three_mode(cutoffs)?;
        let h = build(&p, &space)?;
        let diss = optical_dissipators(&p, &space)?;
        let p1 = Operator::occupation_projector(&space, MODE_B, 1)?;
        let p2 = Operator::occupation_projector(&space, MODE_B, 2)?;
        let observables = [
            Observable::new("n_b", Operator::number(&space, MODE_B)?),
            Observable::new("n_p", Operator::number(&space, MODE_P)?),
            Observable::new("n_s", Operator::number(&space, MODE_S)?),
            Observable::new("p_nb1", p1.clone()),
            Observable::new("p_nb2", p2.clone()),
        ];
        let rho0 = DensityMatrix::basis_state(&space, &[0, 1, 0])?;
        let opts0 = IntegrateOptions {
            dt,
            t_start: 0.0,
            max_samples: samples,
            check_state: false,
        };
        let first = integrate(&rho0, &h, &diss, t0, &observables, &[], &opts0)?;
        let rho = &first.final_state;
        let lit1 = rho.matrix_element(&[0, 0, 1], &[1, 0, 0])? + rho.matrix_element(&[1, 0, 1], &[1, 0, 1])?;
        let lit2 = rho.matrix_element(&[0, 0, 2], &[2, 0, 0])? + rho.matrix_element(&[0, 1, 2], &[2, 1, 0])?;
        let avg = [
            Cumulative::new("p_cr1", 1.0 / window, p1),
            Cumulative::new("p_cr2", 1.0 / window, p2),
        ];
        let opts1 = IntegrateOptions {
            dt,
            t_start: t0,
            max_samples: 2,
            check_state: false,
        };
        let second = integrate(rho, &h, &diss, window, &[], &avg, &opts1)?;
        let cr1 = second.final_value("p_cr1").unwrap_or(0.0);
        let cr2 = second.final_value("p_cr2").unwrap_or(0.0);
        Ok((cr1, cr2, lit1, lit2, first))
    };

    let (p_cr1, p_cr2, literal_cr1, literal_cr2, first) = run(cutoffs, dt, opts.max_samples)?;
    let cutoff_delta = if opts.check_cutoffs {
        let (b1, b2, ..) = run(raise(cutoffs), dt, 2)?;
        let delta = rel_delta(p_cr1, b1).max(rel_delta(p_cr2, b2));
        if delta > CUTOFF_TOLERANCE {
            return Err(Error::Convergence {
                scenario: "counterrot".into(),
                detail: format!("raising cutoffs {cutoffs:?} by one changes the populations by {delta:.3e} (relative)"),
            });
        }
        Some(delta)
    } else {
        None
    };
    let step_delta = if opts.check_step_halving {
        let (f1, f2, ..) = run(cutoffs, 0.5 * dt, 2)?;
        Some(rel_delta(p_cr1, f1).max(rel_delta(p_cr2, f2)))
    } else {
        None
    };
    let residual = first.series.last("n_p").unwrap_or(0.0) + first.series.last("n_s").unwrap_or(0.0);
    Ok(CounterrotPopulations {
        p_cr1,
        p_cr2,
        literal_cr1,
        literal_cr2,
        t0,
        window,
        convergence: ConvergenceReport {
            cutoffs: cutoffs.to_vec(),
            cutoff_delta,
            step_delta,
            horizon_s: t0 + window,
            residual_excitation: residual,
            steps: first.steps,
            dt_s: first.dt,
        },
        series: first.series,
    })
}

/// One- and two-phonon populations under mechanical decay:
/// `p1 = p1₀e^{−Γt} + 2p2₀(e^{−Γt} − e^{−2Γt})`, `p2 = p2₀e^{−2Γt}`.
pub fn phonon_decay_populations(p1_0: f64, p2_0: f64, gamma: f64, t: f64) -> Result<(f64, f64)> {
    require_unit_interval("p1_0", p1_0)?;
    require_unit_interval("p2_0", p2_0)?;
    require_nonnegative("gamma", gamma)?;
    require_nonnegative("t", t)?;
    let e1 = (-gamma * t).exp();
    let e2 = e1 * e1;
    Ok((p1_0 * e1 + 2.0 * p2_0 * (e1 - e2), p2_0 * e2))
}

#[derive(Debug, Clone, Serialize)]
pub struct POmCurve {
    /// Channel `p_om` against time.
    #[serde(skip)]
    pub curve: TimeSeries,
    pub asymptote_quadrature: f64,
    pub asymptote_closed_form: f64,
}

/// `p_om(t) = η_pΓ∫₀ᵗ [p1(t')η_om + p2(t')η_om2] dt'`, sampled on
/// `[0, 10/Γ]`, with the t → ∞ limit by quadrature and in closed form
/// `η_p[(p1₀ + p2₀)η_om + (p2₀/2)η_om2]`.
pub fn p_om_cumulative(gamma: f64, eta_p: f64, p1_0: f64, p2_0: f64, eta_om: f64, eta_om2: f64) -> Result<POmCurve> {
    require_positive("gamma", gamma)?;
    require_unit_interval("eta_p", eta_p)?;
    require_unit_interval("eta_om", eta_om)?;
    require_unit_interval("eta_om2", eta_om2)?;
    phonon_decay_populations(p1_0, p2_0, gamma, 0.0)?;

    let rate = |t: f64| -> f64 {
        let (p1, p2) = phonon_decay_populations(p1_0, p2_0, gamma, t).expect("validated");
        eta_p * gamma * (p1 * eta_om + p2 * eta_om2)
    };
    let q = QuadratureOptions {
        rel_tol: 1e-13,
        abs_tol: 0.0,
        initial_panels: 4,
    };
    let mut curve = TimeSeries::new(&["p_om"]);
    let samples = 200;
    let t_end = 10.0 / gamma;
    let mut acc = 0.0;
    curve.push(0.0, &[0.0])?;
    for i in 1..=samples {
        let (a, b) = ((i - 1) as f64 * t_end / samples as f64, i as f64 * t_end / samples as f64);
        acc += quadrature::integrate(rate, a, b, &q)?;
        curve.push(b, &[acc])?;
    }
    let tail = quadrature::integrate(rate, t_end, 80.0 / gamma, &QuadratureOptions { initial_panels: 16, ..q })?;
    Ok(POmCurve {
        curve,
        asymptote_quadrature: acc + tail,
        asymptote_closed_form: eta_p * ((p1_0 + p2_0) * eta_om + 0.5 * p2_0 * eta_om2),
    })
}

/// Every simulated intermediate that enters `p_om(∞)`.
#[derive(Debug, Clone, Serialize)]
pub struct POmPipeline {
    pub eta_om: f64,
    pub eta_om2: f64,
    pub eta_stokes: f64,
    pub direct: DirectNoise,
    pub p_cr1: f64,
    pub p_cr2: f64,
    pub p1_0: f64,
    pub p2_0: f64,
    pub eta_p: f64,
    pub p_om: POmCurve,
}

/// Runs every scenario needed for `p_om(∞)`: `p1₀ = p_direct + p_cr1`,
/// `p2₀ = p_cr2`. Conversion efficiencies use the RWA; the counter-rotating
/// populations use the full Hamiltonian.
pub fn p_om_pipeline(params: &SystemParams, eta_p: f64, opts: &ScenarioOptions) -> Result<POmPipeline> {
    require_positive("gamma", params.gamma)?;
    let rwa = SystemParams { rwa: true, ..*params };
    let full = SystemParams { rwa: false, ..*params };
    let run = |s| run_scenario(s, &rwa, &ScenarioOptions { cutoffs: None, ..*opts });
    let (om, (stokes, om2)) = rayon::join(|| run(Scenario::EtaOm), || rayon::join(|| run(Scenario::EtaStokes), || run(Scenario::EtaOm2)));
    let (om, stokes, om2) = (om?.value, stokes?.value, om2?.value);
    let cr = counterrot_populations_with(&full, &ScenarioOptions { cutoffs: None, ..*opts }, Hamiltonian::optomechanical)?;
    let direct = direct_occupation_noise_from(params, stokes)?;
    let p1_0 = direct.p_direct + cr.p_cr1;
    let p2_0 = cr.p_cr2;
    let p_om = p_om_cumulative(params.gamma, eta_p, p1_0, p2_0, om, om2)?;
    Ok(POmPipeline {
        eta_om: om,
        eta_om2: om2,
        eta_stokes: stokes,
        direct,
        p_cr1: cr.p_cr1,
        p_cr2: cr.p_cr2,
        p1_0,
        p2_0,
        eta_p,
        p_om,
    })
}

/// Parameters a sweep can vary. Ratios are relative to the loaded probe
/// linewidth; absolute values are ordinary frequencies in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    G0OverKappaP,
    KappaSExOverKappaP,
    G0Hz,
    KappaSExHz,
    KappaPExHz,
    OmegaHz,
}

impl SweepParam {
    pub const ALL: [SweepParam; 6] = [
        SweepParam::G0OverKappaP,
        SweepParam::KappaSExOverKappaP,
        SweepParam::G0Hz,
        SweepParam::KappaSExHz,
        SweepParam::KappaPExHz,
        SweepParam::OmegaHz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::G0OverKappaP => "g0_over_kappa_p",
            SweepParam::KappaSExOverKappaP => "kappa_s_ex_over_kappa_p",
            SweepParam::G0Hz => "g0_hz",
            SweepParam::KappaSExHz => "kappa_s_ex_hz",
            SweepParam::KappaPExHz => "kappa_p_ex_hz",
            SweepParam::OmegaHz => "omega_hz",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name).ok_or_else(|| {
            let known: Vec<&str> = Self::ALL.iter().map(|p| p.name()).collect();
            invalid("param", format!("unknown sweep parameter `{name}` (expected one of {})", known.join(", ")))
        })
    }

    pub fn apply(self, base: &SystemParams, value: f64) -> Result<SystemParams> {
        require_nonnegative(self.name(), value)?;
        use crate::constants::hz_to_rad;
        let mut p = *base;
        match self {
            SweepParam::G0OverKappaP => p.g0 = value * base.kappa_p(),
            SweepParam::KappaSExOverKappaP => p.kappa_s_ex = value * base.kappa_p(),
            SweepParam::G0Hz => p.g0 = hz_to_rad(value),
            SweepParam::KappaSExHz => p.kappa_s_ex = hz_to_rad(value),
            SweepParam::KappaPExHz => p.kappa_p_ex = hz_to_rad(value),
            SweepParam::OmegaHz => p.omega = hz_to_rad(value),
        }
        p.validate()?;
        Ok(p)
    }
}

/// Evaluates a scenario at every grid value in parallel; results keep the
/// grid order.
pub fn sweep(
    scenario: Scenario,
    base: &SystemParams,
    param: SweepParam,
    grid: &[f64],
    opts: &ScenarioOptions,
) -> Vec<Result<ScenarioResult>> {
    grid.par_iter()
        .map(|&v| run_scenario(scenario, &param.apply(base, v)?, opts))
        .collect()
}
