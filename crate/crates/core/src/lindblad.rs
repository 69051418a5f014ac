//! Born-Markov master equation for the three-mode optomechanical system.
//!
//! All rates and Hamiltonians are angular frequencies (rad/s) with ħ = 1, so
//! the generator is `dρ/dt = −i[H, ρ] + Σ γ_k 𝒟[A_k]ρ` with
//! `𝒟[A]ρ = AρA† − ½{A†A, ρ}`. Integration is fixed-step fourth-order
//! Runge-Kutta; cumulative channels are integrated as extra components of the
//! same RK4 system so that they share its order.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_nonnegative, Error, Result};
use crate::fock::{CMatrix, DensityMatrix, FockSpace, Operator, SparseMatrix, C64, MODE_B, MODE_P, MODE_S};

/// Maximum tolerated `|Tr ρ(t) − Tr ρ(0)|` before an integration aborts.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Optomechanical rates. Everything is stored in rad/s; loaded optical decay
/// rates are derived from their intrinsic and external parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Mechanical angular frequency Ω.
    pub omega: f64,
    /// Mechanical energy decay rate Γ.
    pub gamma: f64,
    /// Single-photon optomechanical coupling g₀.
    pub g0: f64,
    pub kappa_p0: f64,
    pub kappa_p_ex: f64,
    pub kappa_s0: f64,
    pub kappa_s_ex: f64,
    /// Mean thermal phonon occupancy.
    pub n_th: f64,
    /// Collapse-induced phonon flux (1/s).
    pub n_dot_c: f64,
    /// Keep only the resonant part of the interaction.
    pub rwa: bool,
}

impl SystemParams {
    /// Device operating point: Ω/2π = 5.3 GHz, Γ/2π = 108 mHz,
    /// g₀/2π = 11.5 MHz, κ_{p,0} = κ_{s,0} = 2π·9.2 MHz,
    /// κ_{p,ex} = 2π·2.2 MHz, κ_{s,ex} = 2π·21 MHz, no thermal or collapse
    /// flux, RWA on.
    pub fn paper_device() -> Self {
        use crate::constants::hz_to_rad;
        Self {
            omega: hz_to_rad(5.3e9),
            gamma: hz_to_rad(0.108),
            g0: hz_to_rad(11.5e6),
            kappa_p0: hz_to_rad(9.2e6),
            kappa_p_ex: hz_to_rad(2.2e6),
            kappa_s0: hz_to_rad(9.2e6),
            kappa_s_ex: hz_to_rad(21e6),
            n_th: 0.0,
            n_dot_c: 0.0,
            rwa: true,
        }
    }

    /// Parameter family of the efficiency maps: critically coupled probe
    /// (κ_{p,0} = κ_{p,ex} = κ_p/2), κ_{s,0} = κ_{p,0}, and g₀, κ_{s,ex} given
    /// as multiples of κ_p.
    pub fn efficiency_map_point(kappa_p: f64, g0_over_kappa_p: f64, kappa_s_ex_over_kappa_p: f64) -> Self {
        Self {
            omega: Self::paper_device().omega,
            gamma: 0.0,
            g0: g0_over_kappa_p * kappa_p,
            kappa_p0: 0.5 * kappa_p,
            kappa_p_ex: 0.5 * kappa_p,
            kappa_s0: 0.5 * kappa_p,
            kappa_s_ex: kappa_s_ex_over_kappa_p * kappa_p,
            n_th: 0.0,
            n_dot_c: 0.0,
            rwa: true,
        }
    }

    pub fn kappa_p(&self) -> f64 {
        self.kappa_p0 + self.kappa_p_ex
    }

    pub fn kappa_s(&self) -> f64 {
        self.kappa_s0 + self.kappa_s_ex
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega", self.omega),
            ("gamma", self.gamma),
            ("g0", self.g0),
            ("kappa_p0", self.kappa_p0),
            ("kappa_p_ex", self.kappa_p_ex),
            ("kappa_s0", self.kappa_s0),
            ("kappa_s_ex", self.kappa_s_ex),
            ("n_th", self.n_th),
            ("n_dot_c", self.n_dot_c),
        ] {
            require_nonnegative(name, v)?;
        }
        if !self.rwa && self.omega <= 0.0 {
            return Err(invalid("omega", "must be > 0 when the rotating-wave approximation is off"));
        }
        Ok(())
    }
}

/// Jump operator with a nonnegative rate.
#[derive(Debug, Clone)]
pub struct Dissipator {
    operator: Operator,
    rate: f64,
}

impl Dissipator {
    pub fn new(operator: Operator, rate: f64) -> Result<Self> {
        require_nonnegative("rate", rate)?;
        Ok(Self { operator, rate })
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// The full dissipator list: `κ_p𝒟[a_p] + κ_s𝒟[a_s] + Γ(1+n̄_th)𝒟[b] +
/// (Γn̄_th + ṅ_c)𝒟[b†]`. Zero-rate channels are dropped.
pub fn standard_dissipators(params: &SystemParams, space: &FockSpace) -> Result<Vec<Dissipator>> {
    params.validate()?;
    let b = Operator::annihilation(space, MODE_B)?;
    let channels = [
        (Operator::annihilation(space, MODE_P)?, params.kappa_p()),
        (Operator::annihilation(space, MODE_S)?, params.kappa_s()),
        (b.clone(), params.gamma * (1.0 + params.n_th)),
        (b.dagger(), params.gamma * params.n_th + params.n_dot_c),
    ];
    channels
        .into_iter()
        .filter(|(_, r)| *r > 0.0)
        .map(|(op, r)| Dissipator::new(op, r))
        .collect()
}

/// Optical decay only, as used for the conversion scenarios (Γ ≪ κ).
pub fn optical_dissipators(params: &SystemParams, space: &FockSpace) -> Result<Vec<Dissipator>> {
    params.validate()?;
    let channels = [
        (Operator::annihilation(space, MODE_P)?, params.kappa_p()),
        (Operator::annihilation(space, MODE_S)?, params.kappa_s()),
    ];
    channels
        .into_iter()
        .filter(|(_, r)| *r > 0.0)
        .map(|(op, r)| Dissipator::new(op, r))
        .collect()
}

/// Term `e^{−iωt}·X + e^{iωt}·X†` of a Hamiltonian.
#[derive(Debug, Clone)]
pub struct RotatingTerm {
    pub operator: Operator,
    pub frequency: f64,
}

/// `H(t) = H₀ + Σ_k (e^{−iω_k t} X_k + h.c.)`, with `H₀` Hermitian.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    constant: Operator,
    rotating: Vec<RotatingTerm>,
}

impl Hamiltonian {
    pub fn constant(op: Operator) -> Self {
        Self {
            constant: op,
            rotating: Vec::new(),
        }
    }

    pub fn zero(space: &FockSpace) -> Self {
        Self::constant(Operator::zeros(space))
    }

    pub fn with_rotating(constant: Operator, rotating: Vec<RotatingTerm>) -> Result<Self> {
        for term in &rotating {
            if term.operator.space() != constant.space() {
                return Err(Error::SpaceMismatch {
                    left: constant.space().cutoffs().to_vec(),
                    right: term.operator.space().cutoffs().to_vec(),
                });
            }
        }
        Ok(Self { constant, rotating })
    }

    /// Interaction-picture optomechanical Hamiltonian
    /// `g₀(b†e^{−iΩt} + be^{iΩt})(a_p†a_s e^{iΩt} + a_p a_s† e^{−iΩt})`.
    ///
    /// Expanded, the resonant part is `g₀(b†a_p†a_s + b a_p a_s†)` and the
    /// counter-rotating part is `g₀(b†a_p a_s† e^{−2iΩt} + h.c.)`. With
    /// `params.rwa` only the resonant part is kept. The coherent-drive term is
    /// not included.
    pub fn optomechanical(params: &SystemParams, space: &FockSpace) -> Result<Self> {
        params.validate()?;
        if space.modes() != 3 {
            return Err(Error::InvalidSpace(format!(
                "optomechanical Hamiltonian needs 3 modes, got {}",
                space.modes()
            )));
        }
        let b = Operator::annihilation(space, MODE_B)?;
        let ap = Operator::annihilation(space, MODE_P)?;
        let a_s = Operator::annihilation(space, MODE_S)?;
        let (bd, apd, asd) = (b.dagger(), ap.dagger(), a_s.dagger());

        let resonant = Operator::product(&[&bd, &apd, &a_s])?.scale_real(params.g0);
        let constant = resonant.add(&resonant.dagger())?;
        if params.rwa {
            return Ok(Self::constant(constant));
        }
        let counter = Operator::product(&[&bd, &ap, &asd])?.scale_real(params.g0);
        Self::with_rotating(
            constant,
            vec![RotatingTerm {
                operator: counter,
                frequency: 2.0 * params.omega,
            }],
        )
    }

    pub fn space(&self) -> &FockSpace {
        self.constant.space()
    }

    pub fn is_time_dependent(&self) -> bool {
        !self.rotating.is_empty()
    }

    pub fn rotating_terms(&self) -> &[RotatingTerm] {
        &self.rotating
    }

    /// Dense `H(t)`.
    pub fn at(&self, t: f64) -> Operator {
        let mut m = self.constant.matrix().clone();
        for term in &self.rotating {
            let phase = C64::from_polar(1.0, -term.frequency * t);
            let x = term.operator.matrix();
            m += x * phase + x.adjoint() * phase.conj();
        }
        Operator::from_matrix(self.constant.space(), m).expect("same space")
    }
}

/// `H(t)` for the given parameters; see [`Hamiltonian::optomechanical`].
pub fn hamiltonian_at(params: &SystemParams, space: &FockSpace, t: f64) -> Result<Operator> {
    Ok(Hamiltonian::optomechanical(params, space)?.at(t))
}

/// Dense evaluation of `−i[H, ρ] + Σ γ(AρA† − ½{A†A, ρ})`.
pub fn lindblad_rhs(rho: &DensityMatrix, h: &Operator, dissipators: &[Dissipator]) -> Result<CMatrix> {
    let space = rho.space();
    let check = |op: &Operator| -> Result<()> {
        if op.space() != space {
            Err(Error::SpaceMismatch {
                left: space.cutoffs().to_vec(),
                right: op.space().cutoffs().to_vec(),
            })
        } else {
            Ok(())
        }
    };
    check(h)?;
    let r = rho.matrix();
    let hm = h.matrix();
    let mut out = (hm * r - r * hm) * C64::new(0.0, -1.0);
    for d in dissipators {
        check(d.operator())?;
        let a = d.operator().matrix();
        let ad = a.adjoint();
        let ada = &ad * a;
        out += (a * r * &ad - (&ada * r + r * &ada) * C64::new(0.5, 0.0)) * C64::new(d.rate(), 0.0);
    }
    Ok(out)
}

/// Named, time-sampled real channels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    times: Vec<f64>,
    channels: Vec<(String, Vec<f64>)>,
}

impl TimeSeries {
    pub fn new(names: &[&str]) -> Self {
        Self {
            times: Vec::new(),
            channels: names.iter().map(|n| (n.to_string(), Vec::new())).collect(),
        }
    }

    /// Appends one sample; `t` must exceed the previous time and `values`
    /// must match the channel count.
    pub fn push(&mut self, t: f64, values: &[f64]) -> Result<()> {
        if values.len() != self.channels.len() {
            return Err(invalid("values", format!("expected {} values, got {}", self.channels.len(), values.len())));
        }
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(invalid("t", format!("times must increase strictly ({t} after {last})")));
            }
        }
        self.times.push(t);
        for ((_, ch), v) in self.channels.iter_mut().zip(values) {
            ch.push(*v);
        }
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.channels.iter().map(|(n, _)| n.as_str())
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn last(&self, name: &str) -> Option<f64> {
        self.channel(name).and_then(|c| c.last().copied())
    }

    /// CSV with header `t_s,<channel>...`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t_s");
        for (n, _) in &self.channels {
            s.push(',');
            s.push_str(n);
        }
        s.push('\n');
        for (i, t) in self.times.iter().enumerate() {
            s.push_str(&format!("{t:e}"));
            for (_, v) in &self.channels {
                s.push_str(&format!(",{:e}", v[i]));
            }
            s.push('\n');
        }
        s
    }
}

/// A named observable whose expectation value is recorded.
#[derive(Debug, Clone)]
pub struct Observable {
    pub name: String,
    pub operator: Operator,
}

impl Observable {
    pub fn new(name: &str, operator: Operator) -> Self {
        Self {
            name: name.to_string(),
            operator,
        }
    }
}

/// A channel holding `rate · ∫₀ᵗ ⟨op⟩ dt'`.
#[derive(Debug, Clone)]
pub struct Cumulative {
    pub name: String,
    pub rate: f64,
    pub operator: Operator,
}

impl Cumulative {
    pub fn new(name: &str, rate: f64, operator: Operator) -> Self {
        Self {
            name: name.to_string(),
            rate,
            operator,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    /// Requested step; the actual step is `t_span / ceil(t_span / dt)`.
    pub dt: f64,
    /// Absolute start time (matters for time-dependent Hamiltonians).
    pub t_start: f64,
    /// Upper bound on recorded samples, endpoints included.
    pub max_samples: usize,
    /// Validate Hermiticity, trace and positivity at every recorded sample.
    pub check_state: bool,
}

impl IntegrateOptions {
    pub fn with_dt(dt: f64) -> Self {
        Self {
            dt,
            t_start: 0.0,
            max_samples: 2001,
            check_state: false,
        }
    }
}

/// Output of [`integrate`].
#[derive(Debug, Clone)]
pub struct Integration {
    pub series: TimeSeries,
    pub final_state: DensityMatrix,
    pub steps: usize,
    pub dt: f64,
}

impl Integration {
    /// Final value of a cumulative or observable channel.
    pub fn final_value(&self, name: &str) -> Option<f64> {
        self.series.last(name)
    }
}

/// Sparse form of the generator used inside the RK4 loop.
struct Generator {
    /// `H₀ − (i/2) Σ γ A†A`
    effective: SparseMatrix,
    rotating: Vec<(SparseMatrix, SparseMatrix, f64)>,
    jumps: Vec<(f64, SparseMatrix)>,
}

impl Generator {
    fn new(h: &Hamiltonian, dissipators: &[Dissipator]) -> Result<Self> {
        let space = h.space();
        let mut eff = h.constant.matrix().clone();
        let mut jumps = Vec::new();
        for d in dissipators {
            if d.operator().space() != space {
                return Err(Error::SpaceMismatch {
                    left: space.cutoffs().to_vec(),
                    right: d.operator().space().cutoffs().to_vec(),
                });
            }
            if d.rate() == 0.0 {
                continue;
            }
            let a = d.operator().matrix();
            eff -= a.adjoint() * a * C64::new(0.0, 0.5 * d.rate());
            jumps.push((d.rate(), d.operator().to_sparse()));
        }
        let rotating = h
            .rotating
            .iter()
            .map(|term| {
                let x = term.operator.to_sparse();
                let xd = x.adjoint();
                (x, xd, term.frequency)
            })
            .collect();
        Ok(Self {
            effective: SparseMatrix::from_dense(&eff),
            rotating,
            jumps,
        })
    }

    /// Writes `L_t(ρ)` into `out`, assuming `ρ` Hermitian.
    fn apply(&self, t: f64, rho: &CMatrix, scratch: &mut CMatrix, out: &mut CMatrix) {
        scratch.fill(C64::new(0.0, 0.0));
        let minus_i = C64::new(0.0, -1.0);
        // scratch = −i H_eff ρ; the commutator part is scratch + scratch†.
        self.effective.mul_dense_into(minus_i, rho, scratch);
        for (x, xd, w) in &self.rotating {
            let phase = C64::from_polar(1.0, -w * t);
            x.mul_dense_into(minus_i * phase, rho, scratch);
            xd.mul_dense_into(minus_i * phase.conj(), rho, scratch);
        }
        let d = rho.nrows();
        for c in 0..d {
            for r in 0..d {
                out[(r, c)] = scratch[(r, c)] + scratch[(c, r)].conj();
            }
        }
        for (rate, a) in &self.jumps {
            a.sandwich_into(*rate, rho, out);
        }
    }
}

/// `y ← α·x + β·y`, elementwise.
fn axpy(y: &mut CMatrix, alpha: C64, x: &CMatrix, beta: C64) {
    for (yi, xi) in y.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *yi = alpha * xi + beta * *yi;
    }
}

/// Integrates the master equation from `rho0` over `[t_start, t_start + t_span]`
/// with fixed-step RK4.
///
/// Observables are recorded at up to `max_samples` evenly spaced steps;
/// cumulative channels carry `rate·∫⟨op⟩dt` integrated with the same RK4
/// stages as the state. The state is re-Hermitized after every step.
pub fn integrate(
    rho0: &DensityMatrix,
    hamiltonian: &Hamiltonian,
    dissipators: &[Dissipator],
    t_span: f64,
    observables: &[Observable],
    cumulative: &[Cumulative],
    options: &IntegrateOptions,
) -> Result<Integration> {
    if !(t_span.is_finite() && t_span > 0.0) {
        return Err(invalid("t_final", format!("must be finite and > 0, got {t_span}")));
    }
    if !(options.dt.is_finite() && options.dt > 0.0) {
        return Err(invalid("dt", format!("must be finite and > 0, got {}", options.dt)));
    }
    let space = rho0.space().clone();
    if hamiltonian.space() != &space {
        return Err(Error::SpaceMismatch {
            left: space.cutoffs().to_vec(),
            right: hamiltonian.space().cutoffs().to_vec(),
        });
    }
    for op in observables
        .iter()
        .map(|o| &o.operator)
        .chain(cumulative.iter().map(|c| &c.operator))
    {
        if op.space() != &space {
            return Err(Error::SpaceMismatch {
                left: space.cutoffs().to_vec(),
                right: op.space().cutoffs().to_vec(),
            });
        }
    }
    let generator = Generator::new(hamiltonian, dissipators)?;
    let obs: Vec<SparseMatrix> = observables.iter().map(|o| o.operator.to_sparse()).collect();
    let cum: Vec<(f64, SparseMatrix)> = cumulative
        .iter()
        .map(|c| (c.rate, c.operator.to_sparse()))
        .collect();

    let steps = (t_span / options.dt).ceil().max(1.0) as usize;
    let dt = t_span / steps as f64;
    let stride = if options.max_samples < 2 {
        steps
    } else {
        steps.div_ceil(options.max_samples - 1).max(1)
    };

    let names: Vec<&str> = observables
        .iter()
        .map(|o| o.name.as_str())
        .chain(cumulative.iter().map(|c| c.name.as_str()))
        .collect();
    let mut series = TimeSeries::new(&names);

    let d = space.dim();
    let zero = CMatrix::zeros(d, d);
    let mut rho = rho0.matrix().clone();
    let (mut k1, mut k2, mut k3, mut k4) = (zero.clone(), zero.clone(), zero.clone(), zero.clone());
    let mut stage = zero.clone();
    let mut scratch = zero;
    let mut totals = vec![0.0; cum.len()];
    let trace0 = rho.trace().re;

    let record = |series: &mut TimeSeries, t: f64, rho: &CMatrix, totals: &[f64]| -> Result<()> {
        let mut row: Vec<f64> = obs.iter().map(|o| o.trace_with(rho).re).collect();
        row.extend_from_slice(totals);
        series.push(t, &row)
    };
    let check = |t: f64, rho: &CMatrix| -> Result<()> {
        if options.check_state {
            let state = DensityMatrix::from_matrix(&space, rho.clone())?;
            state
                .validate()
                .map_err(|detail| Error::InvalidState { time: t, detail })?;
        }
        Ok(())
    };

    check(options.t_start, &rho)?;
    record(&mut series, options.t_start, &rho, &totals)?;

    let half = C64::new(0.5 * dt, 0.0);
    let full = C64::new(dt, 0.0);
    let sixth = C64::new(dt / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    let mut stage_values = vec![[0.0f64; 4]; cum.len()];

    for step in 0..steps {
        let t = options.t_start + step as f64 * dt;

        for (j, (_, op)) in cum.iter().enumerate() {
            stage_values[j][0] = op.trace_with(&rho).re;
        }
        generator.apply(t, &rho, &mut scratch, &mut k1);

        stage.copy_from(&rho);
        axpy(&mut stage, half, &k1, C64::new(1.0, 0.0));
        for (j, (_, op)) in cum.iter().enumerate() {
            stage_values[j][1] = op.trace_with(&stage).re;
        }
        generator.apply(t + 0.5 * dt, &stage, &mut scratch, &mut k2);

        stage.copy_from(&rho);
        axpy(&mut stage, half, &k2, C64::new(1.0, 0.0));
        for (j, (_, op)) in cum.iter().enumerate() {
            stage_values[j][2] = op.trace_with(&stage).re;
        }
        generator.apply(t + 0.5 * dt, &stage, &mut scratch, &mut k3);

        stage.copy_from(&rho);
        axpy(&mut stage, full, &k3, C64::new(1.0, 0.0));
        for (j, (_, op)) in cum.iter().enumerate() {
            stage_values[j][3] = op.trace_with(&stage).re;
        }
        generator.apply(t + dt, &stage, &mut scratch, &mut k4);

        axpy(&mut k2, two, &k3, C64::new(2.0, 0.0));
        k2 += &k1;
        k2 += &k4;
        axpy(&mut rho, sixth, &k2, C64::new(1.0, 0.0));

        let adj = rho.adjoint();
        rho += adj;
        rho *= C64::new(0.5, 0.0);

        for (j, (rate, _)) in cum.iter().enumerate() {
            let v = stage_values[j];
            totals[j] += rate * dt / 6.0 * (v[0] + 2.0 * v[1] + 2.0 * v[2] + v[3]);
        }

        let t_next = options.t_start + (step + 1) as f64 * dt;
        let tr = rho.trace();
        if !tr.re.is_finite() || !tr.im.is_finite() || rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { time: t_next, step: step + 1 });
        }
        let drift = (tr.re - trace0).abs();
        if drift > TRACE_DRIFT_LIMIT {
            return Err(Error::TraceDrift {
                drift,
                time: t_next,
                step: step + 1,
            });
        }
        if (step + 1) % stride == 0 || step + 1 == steps {
            check(t_next, &rho)?;
            record(&mut series, t_next, &rho, &totals)?;
        }
    }

    Ok(Integration {
        series,
        final_state: DensityMatrix::from_matrix(&space, rho)?,
        steps,
        dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> FockSpace {
        FockSpace::three_mode([2, 2, 2]).unwrap()
    }

    #[test]
    fn rwa_matrix_elements() {
        let s = space();
        let p = SystemParams::paper_device();
        let h = hamiltonian_at(&p, &s, 0.0).unwrap();
        let e = h.element(&[0, 0, 1], &[1, 1, 0]).unwrap();
        assert!((e - C64::new(p.g0, 0.0)).norm() < 1e-6 * p.g0);
        let e = h.element(&[2, 1, 0], &[1, 0, 1]).unwrap();
        assert!((e - C64::new(2f64.sqrt() * p.g0, 0.0)).norm() < 1e-9 * p.g0);
        assert!(h.is_hermitian(1e-14));
    }

    #[test]
    fn full_h_at_zero_is_rwa_plus_counter_rotating() {
        let s = space();
        let mut p = SystemParams::paper_device();
        let rwa = hamiltonian_at(&p, &s, 0.0).unwrap();
        p.rwa = false;
        let full = hamiltonian_at(&p, &s, 0.0).unwrap();
        let b = Operator::annihilation(&s, MODE_B).unwrap();
        let ap = Operator::annihilation(&s, MODE_P).unwrap();
        let a_s = Operator::annihilation(&s, MODE_S).unwrap();
        let x = Operator::product(&[&b.dagger(), &ap, &a_s.dagger()]).unwrap();
        let y = Operator::product(&[&b, &ap.dagger(), &a_s]).unwrap();
        let expected = rwa.add(&x.add(&y).unwrap().scale_real(p.g0)).unwrap();
        assert!((full.matrix() - expected.matrix()).norm() < 1e-6);
        // a quarter period of 2Ω later the counter-rotating phase is −i
        let t = std::f64::consts::PI / (4.0 * p.omega);
        let ht = hamiltonian_at(&p, &s, t).unwrap();
        let e = ht.element(&[1, 0, 1], &[0, 1, 0]).unwrap();
        assert!((e - C64::new(0.0, -p.g0)).norm() < 1e-6 * p.g0);
    }

    #[test]
    fn full_h_requires_omega() {
        let mut p = SystemParams::paper_device();
        p.rwa = false;
        p.omega = 0.0;
        assert!(matches!(
            Hamiltonian::optomechanical(&p, &space()),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn collapse_pump_initial_slope() {
        // d⟨n_b⟩/dt on |000⟩ under ṅ_c 𝒟[b†] equals ṅ_c.
        let s = space();
        let rho = DensityMatrix::basis_state(&s, &[0, 0, 0]).unwrap();
        let b = Operator::annihilation(&s, MODE_B).unwrap();
        let rate = 3.7;
        let d = Dissipator::new(b.dagger(), rate).unwrap();
        let drho = lindblad_rhs(&rho, &Operator::zeros(&s), &[d]).unwrap();
        let nb = Operator::number(&s, MODE_B).unwrap();
        let slope = (nb.matrix() * drho).trace();
        assert!((slope.re - rate).abs() < 1e-12 && slope.im.abs() < 1e-12);
    }

    #[test]
    fn cavity_decay_slope() {
        let s = FockSpace::new(&[3]).unwrap();
        let a = Operator::annihilation(&s, 0).unwrap();
        let rho = DensityMatrix::basis_state(&s, &[1]).unwrap();
        let drho = lindblad_rhs(&rho, &Operator::zeros(&s), &[Dissipator::new(a.clone(), 2.5).unwrap()]).unwrap();
        let n = Operator::number(&s, 0).unwrap();
        assert!(((n.matrix() * drho).trace().re + 2.5).abs() < 1e-12);
    }

    #[test]
    fn rhs_is_traceless_and_sparse_path_agrees() {
        let s = space();
        let mut p = SystemParams::paper_device();
        p.rwa = false;
        p.gamma = 1e6;
        p.n_th = 0.3;
        p.n_dot_c = 2e5;
        let h = Hamiltonian::optomechanical(&p, &s).unwrap();
        let diss = standard_dissipators(&p, &s).unwrap();
        // a generic Hermitian, unit-trace matrix
        let d = s.dim();
        let m = CMatrix::from_fn(d, d, |i, j| C64::new(1.0 / (1.0 + (i + j) as f64), 0.1 * (i as f64 - j as f64)));
        let m = &m * m.adjoint();
        let m = &m / m.trace();
        let rho = DensityMatrix::from_matrix(&s, m.clone()).unwrap();
        let t = 1.234e-10;
        let dense = lindblad_rhs(&rho, &h.at(t), &diss).unwrap();
        assert!(dense.trace().norm() < 1e-12 * dense.norm());
        let gen = Generator::new(&h, &diss).unwrap();
        let mut scratch = CMatrix::zeros(d, d);
        let mut out = CMatrix::zeros(d, d);
        gen.apply(t, &m, &mut scratch, &mut out);
        assert!((out - &dense).norm() < 1e-12 * dense.norm());
    }

    #[test]
    fn time_series_rejects_non_increasing_times() {
        let mut ts = TimeSeries::new(&["x"]);
        ts.push(0.0, &[1.0]).unwrap();
        assert!(ts.push(0.0, &[1.0]).is_err());
        assert!(ts.push(1.0, &[1.0, 2.0]).is_err());
        ts.push(1.0, &[2.0]).unwrap();
        assert_eq!(ts.to_csv(), "t_s,x\n0e0,1e0\n1e0,2e0\n");
    }

    #[test]
    fn integrate_rejects_bad_horizon() {
        let s = FockSpace::new(&[1]).unwrap();
        let rho = DensityMatrix::basis_state(&s, &[1]).unwrap();
        let r = integrate(&rho, &Hamiltonian::zero(&s), &[], 0.0, &[], &[], &IntegrateOptions::with_dt(0.1));
        assert!(matches!(r, Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn integrate_flags_non_physical_rates() {
        // A huge step makes RK4 blow up; the integrator must refuse to continue.
        let s = FockSpace::new(&[1]).unwrap();
        let a = Operator::annihilation(&s, 0).unwrap();
        let rho = DensityMatrix::basis_state(&s, &[1]).unwrap();
        let diss = [Dissipator::new(a, 1.0).unwrap()];
        let r = integrate(&rho, &Hamiltonian::zero(&s), &diss, 1e4, &[], &[], &IntegrateOptions::with_dt(50.0));
        assert!(matches!(r, Err(Error::NonFinite { .. }) | Err(Error::TraceDrift { .. })), "{r:?}");
    }
}
