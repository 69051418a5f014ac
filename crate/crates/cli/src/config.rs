//! Run configuration. One JSON document; frequencies in Hz, lengths in m,
//! temperatures in K. Every section is optional and defaults to the
//! reference device.

use std::path::{Path, PathBuf};

use nanolin::budget::{DetectionParams, FilterParams, QuadraticParams};
use nanolin::collapse::{log_space, ResonatorGeometry};
use nanolin::constants::{hz_to_rad, SILICON_DENSITY, SILICON_LATTICE_CONSTANT};
use nanolin::lindblad::SystemParams;
use nanolin::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub omega: f64,
    pub gamma: f64,
    pub g0: f64,
    pub kappa_p0: f64,
    pub kappa_p_ex: f64,
    pub kappa_s0: f64,
    pub kappa_s_ex: f64,
    /// Effective mass (kg).
    pub m_eff: f64,
    pub rwa: bool,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            omega: 5.3e9,
            gamma: 0.108,
            g0: 11.5e6,
            kappa_p0: 9.2e6,
            kappa_p_ex: 2.2e6,
            kappa_s0: 9.2e6,
            kappa_s_ex: 21e6,
            m_eff: 136e-18,
            rwa: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometryConfig {
    Cuboid { l1: f64, l2: f64, l3: f64, density: f64 },
    Sphere { radius: f64, density: f64 },
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self::Cuboid {
            l1: 1.21e-6,
            l2: 0.22e-6,
            l3: 0.22e-6,
            density: SILICON_DENSITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollapseConfig {
    /// Correlation length (m).
    pub r_c: f64,
    /// Collapse rate (1/s) used for measurement times and back-action limits.
    pub lambda_c: f64,
}

impl Default for CollapseConfig {
    fn default() -> Self {
        Self { r_c: 1e-7, lambda_c: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub kappa_f0: f64,
    pub kappa_f_in: f64,
    pub kappa_f_out: f64,
    pub cavity_length: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            kappa_f0: 30e3,
            kappa_f_in: 45e3,
            kappa_f_out: 45e3,
            cavity_length: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionConfig {
    pub eta_chi: f64,
    pub eta_d1: f64,
    /// Single-detector dark rate (1/s).
    pub r_d1: f64,
    /// Coincidence window (s).
    pub tau_c: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        let d = DetectionParams::reference();
        Self {
            eta_chi: d.eta_chi,
            eta_d1: d.eta_d1,
            r_d1: d.r_d1,
            tau_c: d.tau_c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AbsorptionConfig {
    /// Absorbed phonons at one intracavity photon.
    pub n_abs_base: f64,
    /// Loaded optical linewidth of the absorption estimate.
    pub kappa: f64,
}

impl Default for AbsorptionConfig {
    fn default() -> Self {
        Self {
            n_abs_base: 10.0,
            kappa: 575e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadraticConfig {
    pub g0_2: f64,
    pub n_cav: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub g_linear: f64,
}

impl Default for QuadraticConfig {
    fn default() -> Self {
        Self {
            g0_2: 245.0,
            n_cav: 100.0,
            kappa: 575e6,
            gamma: 0.108,
            g_linear: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DpConfig {
    pub lattice_constant: f64,
    /// Phonon flux to reach (1/s); defaults to the budget's noise floor.
    pub noise_floor: Option<f64>,
}

impl Default for DpConfig {
    fn default() -> Self {
        Self {
            lattice_constant: SILICON_LATTICE_CONSTANT,
            noise_floor: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeatmapConfig {
    pub points: usize,
    pub r_c: f64,
}

impl Default for HeatmapConfig {
    fn default() -> Self {
        Self { points: 161, r_c: 1e-7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl GridSpec {
    /// Parses `start:stop:count`.
    pub fn parse(s: &str, spacing: Spacing) -> Result<Self> {
        let bad = || Error::Config(format!("grid `{s}` is not of the form start:stop:count"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let g = Self {
            start: parts[0].trim().parse().map_err(|_| bad())?,
            stop: parts[1].trim().parse().map_err(|_| bad())?,
            count: parts[2].trim().parse().map_err(|_| bad())?,
            spacing,
        };
        g.validate("grid")?;
        Ok(g)
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.count == 0 || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(field_error(name, "needs finite bounds and count >= 1"));
        }
        if self.spacing == Spacing::Log && (self.start <= 0.0 || self.stop <= 0.0) {
            return Err(field_error(name, "log spacing needs positive bounds"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Log => log_space(self.start, self.stop, self.count),
            Spacing::Linear if self.count == 1 => vec![self.start],
            Spacing::Linear => {
                let n = (self.count - 1) as f64;
                (0..self.count)
                    .map(|i| self.start + (self.stop - self.start) * (i as f64 / n))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl SweepConfig {
    pub fn grid(&self) -> GridSpec {
        GridSpec {
            start: self.start,
            stop: self.stop,
            count: self.count,
            spacing: self.spacing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub geometry: GeometryConfig,
    pub collapse: CollapseConfig,
    pub filter: FilterConfig,
    pub detection: DetectionConfig,
    pub absorption: AbsorptionConfig,
    pub quadratic: QuadraticConfig,
    pub dp: DpConfig,
    pub heatmap: HeatmapConfig,
    /// Bath temperature (K).
    pub temperature: f64,
    pub eta_p: f64,
    /// Devices read out in parallel.
    pub multiplex: f64,
    pub sweep: Option<SweepConfig>,
    pub exclusion: GridSpec,
    pub output: OutputConfig,
    pub paper_values: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            system: SystemConfig::default(),
            geometry: GeometryConfig::default(),
            collapse: CollapseConfig::default(),
            filter: FilterConfig::default(),
            detection: DetectionConfig::default(),
            absorption: AbsorptionConfig::default(),
            quadratic: QuadraticConfig::default(),
            dp: DpConfig::default(),
            heatmap: HeatmapConfig::default(),
            temperature: 0.01,
            eta_p: 0.01,
            multiplex: 1.0,
            sweep: None,
            exclusion: GridSpec {
                start: 1e-9,
                stop: 1e-4,
                count: 51,
                spacing: Spacing::Log,
            },
            output: OutputConfig::default(),
            paper_values: false,
        }
    }
}

fn field_error(field: &str, reason: &str) -> Error {
    Error::InvalidParameter {
        name: field.to_string(),
        reason: reason.to_string(),
    }
}

/// Prefixes the field name of a validation error with its section.
fn in_section<T>(section: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::InvalidParameter { name, reason } => Error::InvalidParameter {
            name: format!("{section}.{name}"),
            reason,
        },
        other => other,
    })
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(field_error(field, &format!("must be finite and > 0, got {v}")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Ok(Self::default());
        }
        let cfg: Self = serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.system_params()?;
        positive("system.m_eff", self.system.m_eff)?;
        self.geometry()?;
        positive("collapse.r_c", self.collapse.r_c)?;
        positive("collapse.lambda_c", self.collapse.lambda_c)?;
        in_section("filter", self.filter().validate())?;
        in_section("detection", self.detection().validate())?;
        if !(self.absorption.n_abs_base.is_finite() && self.absorption.n_abs_base >= 0.0) {
            return Err(field_error("absorption.n_abs_base", "must be finite and >= 0"));
        }
        positive("absorption.kappa", self.absorption.kappa)?;
        in_section("quadratic", self.quadratic().validate())?;
        positive("dp.lattice_constant", self.dp.lattice_constant)?;
        if let Some(f) = self.dp.noise_floor {
            positive("dp.noise_floor", f)?;
        }
        if self.heatmap.points < 2 {
            return Err(field_error("heatmap.points", "needs at least 2 points"));
        }
        positive("heatmap.r_c", self.heatmap.r_c)?;
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(field_error("temperature", "must be finite and >= 0"));
        }
        if !(0.0..=nanolin::budget::MAX_ETA_P).contains(&self.eta_p) {
            return Err(field_error("eta_p", "must lie in [0, 0.1]"));
        }
        if !(self.multiplex.is_finite() && self.multiplex >= 1.0) {
            return Err(field_error("multiplex", "must be >= 1"));
        }
        if let Some(s) = &self.sweep {
            in_section("sweep", nanolin::scenarios::SweepParam::parse(&s.param).map(|_| ()))?;
            s.grid().validate("sweep")?;
        }
        self.exclusion.validate("exclusion")?;
        if self.exclusion.spacing == Spacing::Linear && self.exclusion.start <= 0.0 {
            return Err(field_error("exclusion.start", "correlation lengths must be > 0"));
        }
        Ok(())
    }

    /// System parameters in rad/s. Bath occupancy and collapse pumping are
    /// left at zero.
    pub fn system_params(&self) -> Result<SystemParams> {
        let s = &self.system;
        for (name, v) in [
            ("omega", s.omega),
            ("gamma", s.gamma),
            ("g0", s.g0),
            ("kappa_p0", s.kappa_p0),
            ("kappa_p_ex", s.kappa_p_ex),
            ("kappa_s0", s.kappa_s0),
            ("kappa_s_ex", s.kappa_s_ex),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(field_error(&format!("system.{name}"), &format!("must be finite and >= 0 Hz, got {v}")));
            }
        }
        let p = SystemParams {
            omega: hz_to_rad(s.omega),
            gamma: hz_to_rad(s.gamma),
            g0: hz_to_rad(s.g0),
            kappa_p0: hz_to_rad(s.kappa_p0),
            kappa_p_ex: hz_to_rad(s.kappa_p_ex),
            kappa_s0: hz_to_rad(s.kappa_s0),
            kappa_s_ex: hz_to_rad(s.kappa_s_ex),
            n_th: 0.0,
            n_dot_c: 0.0,
            rwa: s.rwa,
        };
        in_section("system", p.validate())?;
        Ok(p)
    }

    pub fn geometry(&self) -> Result<ResonatorGeometry> {
        let g = match self.geometry {
            GeometryConfig::Cuboid { l1, l2, l3, density } => ResonatorGeometry::Cuboid { l1, l2, l3, density },
            GeometryConfig::Sphere { radius, density } => ResonatorGeometry::Sphere { radius, density },
        };
        in_section("geometry", g.validate())?;
        Ok(g)
    }

    pub fn filter(&self) -> FilterParams {
        let f = &self.filter;
        FilterParams {
            kappa_f0: hz_to_rad(f.kappa_f0),
            kappa_f_in: hz_to_rad(f.kappa_f_in),
            kappa_f_out: hz_to_rad(f.kappa_f_out),
            cavity_length: f.cavity_length,
        }
    }

    pub fn detection(&self) -> DetectionParams {
        let d = &self.detection;
        DetectionParams {
            eta_chi: d.eta_chi,
            eta_d1: d.eta_d1,
            r_d1: d.r_d1,
            tau_c: d.tau_c,
        }
    }

    pub fn quadratic(&self) -> QuadraticParams {
        let q = &self.quadratic;
        QuadraticParams {
            g0_2: hz_to_rad(q.g0_2),
            n_cav: q.n_cav,
            kappa: hz_to_rad(q.kappa),
            gamma: hz_to_rad(q.gamma),
            g_linear: hz_to_rad(q.g_linear),
        }
    }
}
