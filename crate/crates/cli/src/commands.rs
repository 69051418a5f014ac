use nanolin::budget::{self, BudgetInputs, NoiseBudget, Source, Sourced};
use nanolin::collapse::{self, d_closed_form, zero_point_motion, HeatingMapSpec, ResonatorGeometry};
use nanolin::constants::{hz_to_rad, rad_to_hz};
use nanolin::lindblad::SystemParams;
use nanolin::scenarios::{self, POmPipeline, Scenario, ScenarioOptions, SweepParam};
use nanolin::{Error, Result};
use serde::Serialize;

use crate::config::{GridSpec, RunConfig, Spacing};
use crate::output::{num, Writer};
use crate::{ScenarioArg, SweepScenarioArg};

struct Device {
    params: SystemParams,
    geometry: ResonatorGeometry,
    x0: f64,
}

fn device(cfg: &RunConfig) -> Result<Device> {
    let params = cfg.system_params()?;
    let x0 = zero_point_motion(cfg.system.m_eff, params.omega)?;
    Ok(Device {
        params,
        geometry: cfg.geometry()?,
        x0,
    })
}

#[derive(Serialize)]
struct BudgetRun {
    table: NoiseBudget,
    paper_values: bool,
    p_f_alt: f64,
    measurement_time_s: f64,
    lambda_c: f64,
    pipeline: Option<POmPipeline>,
}

fn resolve_budget(cfg: &RunConfig) -> Result<BudgetRun> {
    let dev = device(cfg)?;
    let filter = cfg.filter();
    let p = &dev.params;
    let mut inputs = BudgetInputs {
        gamma: p.gamma,
        omega: p.omega,
        temperature: cfg.temperature,
        eta_p: cfg.eta_p,
        detection: cfg.detection(),
        n_abs_base: cfg.absorption.n_abs_base,
        kappa_abs: hz_to_rad(cfg.absorption.kappa),
        multiplex: cfg.multiplex,
        ..BudgetInputs::paper_values()
    };
    let mut pipeline = None;
    if !cfg.paper_values {
        let pipe = scenarios::p_om_pipeline(p, cfg.eta_p, &ScenarioOptions::default())?;
        inputs.eta_om = Some(Sourced::new(pipe.eta_om, Source::Simulation));
        inputs.p_om = Some(Sourced::new(pipe.p_om.asymptote_closed_form, Source::Simulation));
        inputs.eta_f = Some(Sourced::new(budget::filter_efficiency(&filter)?, Source::Formula));
        inputs.p_f = Some(Sourced::new(budget::filter_leakage(&filter, p.omega)?, Source::Formula));
        inputs.d = Some(Sourced::new(
            d_closed_form(&dev.geometry, cfg.collapse.r_c, dev.x0)?,
            Source::Formula,
        ));
        pipeline = Some(pipe);
    }
    let table = budget::build_table(&inputs)?;
    let measurement_time_s = budget::measurement_time(cfg.collapse.lambda_c, table.d, table.eta, cfg.multiplex)?;
    Ok(BudgetRun {
        p_f_alt: budget::filter_leakage_alt(&filter, p.omega)?,
        measurement_time_s,
        lambda_c: cfg.collapse.lambda_c,
        paper_values: cfg.paper_values,
        table,
        pipeline,
    })
}

pub fn budget(cfg: &RunConfig, w: &mut Writer) -> Result<()> {
    let run = resolve_budget(cfg)?;
    let t = &run.table;
    let mut rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| vec![r.channel.clone(), num(r.rate_per_s), num(r.lambda_min_per_s)])
        .collect();
    rows.push(vec!["all_noise".into(), num(t.total_rate_per_s), num(t.total_lambda_min_per_s)]);
    w.csv("budget.csv", &["channel", "rate_per_s", "lambda_min_per_s"], &rows)?;
    w.json("budget.json", &run)?;
    for r in &t.rows {
        println!("{}: rate_per_s={:.3e} lambda_min_per_s={:.3e}", r.channel, r.rate_per_s, r.lambda_min_per_s);
    }
    println!("eta={:.4e}", t.eta);
    println!("D={:.4e}", t.d);
    println!("rate_total_per_s={:.3e}", t.total_rate_per_s);
    println!("lambda_min_total_per_s={:.3e}", t.total_lambda_min_per_s);
    println!("t_meas_s={:.4e}", run.measurement_time_s);
    Ok(())
}

fn scenario_key(s: Scenario) -> &'static str {
    match s {
        Scenario::EtaOm => "eta_om",
        Scenario::EtaStokes => "eta_stokes",
        Scenario::EtaOm2 => "eta_om2",
    }
}

pub fn simulate(cfg: &RunConfig, which: ScenarioArg, w: &mut Writer) -> Result<()> {
    let dev = device(cfg)?;
    let scenario = match which {
        ScenarioArg::EtaOm => Scenario::EtaOm,
        ScenarioArg::EtaStokes => Scenario::EtaStokes,
        ScenarioArg::EtaOm2 => Scenario::EtaOm2,
        ScenarioArg::Counterrot => {
            let full = SystemParams { rwa: false, ..dev.params };
            let r = scenarios::counterrot_populations(&full)?;
            w.raw_csv("simulate_counterrot.csv", &r.series.to_csv())?;
            w.json("simulate_counterrot.json", &r)?;
            println!("p_cr1={:.4e}", r.p_cr1);
            println!("p_cr2={:.4e}", r.p_cr2);
            return Ok(());
        }
        ScenarioArg::POm => {
            let r = scenarios::p_om_pipeline(&dev.params, cfg.eta_p, &ScenarioOptions::default())?;
            w.raw_csv("simulate_p_om.csv", &r.p_om.curve.to_csv())?;
            w.json("simulate_p_om.json", &r)?;
            println!("p_om={:.4e}", r.p_om.asymptote_closed_form);
            println!("p1_0={:.4e}", r.p1_0);
            println!("p2_0={:.4e}", r.p2_0);
            return Ok(());
        }
    };
    let key = scenario_key(scenario);
    let r = scenarios::run_scenario(scenario, &dev.params, &ScenarioOptions::default())?;
    w.raw_csv(&format!("simulate_{key}.csv"), &r.series.to_csv())?;
    w.json(&format!("simulate_{key}.json"), &r)?;
    println!("{key}={:.6}", r.value);
    if let Some(d) = r.convergence.cutoff_delta {
        println!("cutoff_delta={d:.3e}");
    }
    Ok(())
}

pub fn sweep(
    cfg: &RunConfig,
    param: Option<String>,
    grid: Option<String>,
    spacing: Option<Spacing>,
    which: SweepScenarioArg,
    w: &mut Writer,
) -> Result<()> {
    let from_cfg = cfg.sweep.as_ref();
    let name = param
        .or_else(|| from_cfg.map(|s| s.param.clone()))
        .ok_or_else(|| Error::Config("sweep needs --param or a `sweep` config section".into()))?;
    let param = SweepParam::parse(&name)?;
    let grid = match grid {
        Some(g) => GridSpec::parse(&g, spacing.unwrap_or_default())?,
        None => {
            let mut g = from_cfg
                .map(|s| s.grid())
                .ok_or_else(|| Error::Config("sweep needs --grid or a `sweep` config section".into()))?;
            if let Some(s) = spacing {
                g.spacing = s;
                g.validate("grid")?;
            }
            g
        }
    };
    let scenario = match which {
        SweepScenarioArg::EtaOm => Scenario::EtaOm,
        SweepScenarioArg::EtaStokes => Scenario::EtaStokes,
        SweepScenarioArg::EtaOm2 => Scenario::EtaOm2,
    };
    let key = scenario_key(scenario);
    let values = grid.values();
    let base = cfg.system_params()?;
    let results = scenarios::sweep(scenario, &base, param, &values, &ScenarioOptions::default());
    let mut rows = Vec::with_capacity(values.len());
    for (i, (v, r)) in values.iter().zip(results).enumerate() {
        let r = r.map_err(|e| Error::Convergence {
            scenario: key.into(),
            detail: format!("grid point {i} ({} = {v}): {e}", param.name()),
        })?;
        rows.push(vec![
            num(*v),
            num(r.value),
            num(r.convergence.residual_excitation),
            r.convergence.cutoff_delta.map(num).unwrap_or_default(),
        ]);
    }
    w.csv(
        &format!("sweep_{}_{key}.csv", param.name()),
        &[param.name(), key, "residual_excitation", "cutoff_delta"],
        &rows,
    )?;
    println!("rows={}", rows.len());
    Ok(())
}

pub fn exclude(cfg: &RunConfig, rc_grid: Option<String>, w: &mut Writer) -> Result<()> {
    let grid = match rc_grid {
        Some(g) => GridSpec::parse(&g, Spacing::Log)?,
        None => cfg.exclusion.clone(),
    };
    let dev = device(cfg)?;
    let run = resolve_budget(cfg)?;
    let curve = budget::exclusion_curve(&grid.values(), &dev.geometry, dev.x0, run.table.eta, run.table.total_rate_per_s)?;
    let rows: Vec<Vec<String>> = curve.iter().map(|p| vec![num(p.r_c), num(p.d), num(p.lambda_min)]).collect();
    w.csv("exclusion.csv", &["r_c_m", "d", "lambda_min_per_s"], &rows)?;
    let best = curve
        .iter()
        .min_by(|a, b| a.lambda_min.total_cmp(&b.lambda_min))
        .expect("grid is non-empty");
    println!("points={}", curve.len());
    println!("lambda_min_best_per_s={:.3e} at r_c_m={:.3e}", best.lambda_min, best.r_c);
    Ok(())
}

#[derive(Serialize)]
struct HeatmapSummary {
    temperatures: Vec<f64>,
    bounds: Vec<String>,
    /// `crossings[t][b]`: diameters (m) where the central CSL flux of bound
    /// `b` meets the thermal flux at temperature `t`.
    crossings: Vec<Vec<Vec<f64>>>,
}

pub fn heatmap(cfg: &RunConfig, w: &mut Writer) -> Result<()> {
    let spec = HeatingMapSpec {
        r_c: cfg.heatmap.r_c,
        ..HeatingMapSpec::silica(cfg.heatmap.points)
    };
    let map = collapse::heating_map(&spec)?;
    let mut cols: Vec<String> = ["diameter_m", "omega_rad_s", "gamma_rad_s", "d_sphere"].map(String::from).to_vec();
    for t in &spec.temperatures {
        cols.push(format!("thermal_{t}K"));
    }
    for b in &spec.bounds {
        for part in ["low", "center", "high"] {
            cols.push(format!("csl_{}_{part}", b.name));
        }
    }
    cols.push("grw".into());
    let rows: Vec<Vec<String>> = map
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![num(r.diameter), num(r.omega), num(r.gamma), num(r.d_sphere)];
            row.extend(r.thermal.iter().map(|v| num(*v)));
            for (lo, c, hi) in &r.csl {
                row.extend([num(*lo), num(*c), num(*hi)]);
            }
            row.push(num(r.grw));
            row
        })
        .collect();
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    w.csv("heatmap.csv", &col_refs, &rows)?;
    let summary = HeatmapSummary {
        temperatures: spec.temperatures.clone(),
        bounds: spec.bounds.iter().map(|b| b.name.clone()).collect(),
        crossings: (0..spec.temperatures.len())
            .map(|t| (0..spec.bounds.len()).map(|b| map.crossings(t, b)).collect())
            .collect(),
    };
    w.json("heatmap.json", &summary)?;
    for (ti, t) in spec.temperatures.iter().enumerate() {
        for (bi, b) in spec.bounds.iter().enumerate() {
            let c: Vec<String> = summary.crossings[ti][bi].iter().map(|d| format!("{d:.3e}")).collect();
            println!("crossings_{t}K_{}=[{}]", b.name, c.join(","));
        }
    }
    Ok(())
}

/// Excluded cutoff quoted for the reference device; not reproduced by the
/// linear-in-`a/r_DP` expression.
const R_DP_QUOTED: f64 = 3.9e-15;

#[derive(Serialize)]
struct DpReport {
    noise_floor_per_s: f64,
    r_dp_m: f64,
    r_dp_quoted_m: f64,
    x0_m: f64,
    mass_kg: f64,
    density_kg_m3: f64,
    lattice_constant_m: f64,
}

pub fn dp(cfg: &RunConfig, w: &mut Writer) -> Result<()> {
    let dev = device(cfg)?;
    let floor = match cfg.dp.noise_floor {
        Some(f) => f,
        None => {
            let t = resolve_budget(cfg)?.table;
            t.total_rate_per_s / t.eta
        }
    };
    let density = dev.geometry.density();
    let r_dp = collapse::dp_cutoff_from_noise(floor, dev.x0, cfg.dp.lattice_constant, cfg.system.m_eff, density)?;
    let report = DpReport {
        noise_floor_per_s: floor,
        r_dp_m: r_dp,
        r_dp_quoted_m: R_DP_QUOTED,
        x0_m: dev.x0,
        mass_kg: cfg.system.m_eff,
        density_kg_m3: density,
        lattice_constant_m: cfg.dp.lattice_constant,
    };
    w.json("dp.json", &report)?;
    println!("noise_floor_per_s={floor:.3e}");
    println!("r_dp_m={r_dp:.3e}");
    println!("r_dp_quoted_m={R_DP_QUOTED:.1e}");
    Ok(())
}

pub fn quadratic(cfg: &RunConfig, w: &mut Writer) -> Result<()> {
    let dev = device(cfg)?;
    let d = if cfg.paper_values {
        budget::PAPER_D
    } else {
        d_closed_form(&dev.geometry, cfg.collapse.r_c, dev.x0)?
    };
    let flux = collapse::csl_phonon_flux(cfg.collapse.lambda_c, d);
    let r = budget::quadratic_feasibility(&cfg.quadratic(), flux, cfg.absorption.n_abs_base)?;
    w.json("quadratic.json", &r)?;
    println!("threshold_printed_hz={:.4}", rad_to_hz(r.threshold_printed));
    println!("threshold_derived_hz={:.4e}", rad_to_hz(r.threshold_derived));
    println!("tail_probability={:.4e}", r.tail_probability);
    println!("sigma_multiple={:.3}", r.sigma_multiple);
    println!("g_max_hz={:.4}", rad_to_hz(r.g_max));
    println!("n_abs={:.3}", r.n_abs);
    Ok(())
}
