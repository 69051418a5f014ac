use nanolin::fock::{DensityMatrix, FockSpace, Operator, MODE_B, MODE_S};
use nanolin::lindblad::*;
use nanolin::scenarios::{self, Scenario, ScenarioOptions};

#[test]
fn cavity_decay_matches_exponential() {
    let s = FockSpace::new(&[3]).unwrap();
    let a = Operator::annihilation(&s, 0).unwrap();
    let kappa = 2.0e7;
    let rho = DensityMatrix::basis_state(&s, &[1]).unwrap();
    let out = integrate(
        &rho,
        &Hamiltonian::zero(&s),
        &[Dissipator::new(a, kappa).unwrap()],
        3.0 / kappa,
        &[Observable::new("n", Operator::number(&s, 0).unwrap())],
        &[],
        &IntegrateOptions::with_dt(0.02 / kappa),
    )
    .unwrap();
    let n = out.final_value("n").unwrap();
    assert!((n / (-3.0f64).exp() - 1.0).abs() < 1e-8, "{n}");
    for (t, v) in out.series.times().iter().zip(out.series.channel("n").unwrap()) {
        assert!((v - (-kappa * t).exp()).abs() < 1e-8);
    }
}

#[test]
fn resonant_exchange_is_rabi_oscillation() {
    let s = FockSpace::three_mode([2, 2, 2]).unwrap();
    let p = SystemParams::paper_device();
    let h = Hamiltonian::optomechanical(&p, &s).unwrap();
    let rho = DensityMatrix::basis_state(&s, &[1, 1, 0]).unwrap();
    let t = 3.0 / p.g0;
    let out = integrate(
        &rho,
        &h,
        &[],
        t,
        &[Observable::new("n_s", Operator::number(&s, MODE_S).unwrap())],
        &[],
        &IntegrateOptions::with_dt(0.005 / p.g0),
    )
    .unwrap();
    for (t, v) in out.series.times().iter().zip(out.series.channel("n_s").unwrap()) {
        assert!((v - (p.g0 * t).sin().powi(2)).abs() < 1e-8, "t = {t}");
    }
}

#[test]
fn thermal_bath_relaxes_to_bose_occupancy() {
    let s = FockSpace::new(&[30]).unwrap();
    let b = Operator::annihilation(&s, 0).unwrap();
    let (gamma, n_th) = (1.0, 0.5);
    let diss = [
        Dissipator::new(b.clone(), gamma * (1.0 + n_th)).unwrap(),
        Dissipator::new(b.dagger(), gamma * n_th).unwrap(),
    ];
    let rho = DensityMatrix::basis_state(&s, &[0]).unwrap();
    let out = integrate(
        &rho,
        &Hamiltonian::zero(&s),
        &diss,
        30.0 / gamma,
        &[Observable::new("n", Operator::number(&s, 0).unwrap())],
        &[],
        &IntegrateOptions::with_dt(0.01),
    )
    .unwrap();
    assert!((out.final_value("n").unwrap() - n_th).abs() < 1e-4);
}

#[test]
fn trace_and_positivity_hold_along_full_hamiltonian_run() {
    let s = FockSpace::three_mode([2, 2, 2]).unwrap();
    let mut p = SystemParams::paper_device();
    p.rwa = false;
    p.gamma = 0.0;
    let h = Hamiltonian::optomechanical(&p, &s).unwrap();
    let diss = standard_dissipators(&p, &s).unwrap();
    let rho = DensityMatrix::basis_state(&s, &[1, 1, 0]).unwrap();
    let opts = IntegrateOptions {
        dt: scenarios::step_size(&p),
        t_start: 0.0,
        max_samples: 101,
        check_state: true,
    };
    let out = integrate(&rho, &h, &diss, 3.0 / p.kappa_p(), &[], &[], &opts).unwrap();
    assert!((out.final_state.trace().re - 1.0).abs() < 1e-8);
    assert!(out.final_state.min_eigenvalue() >= -1e-9);
    assert!(out.final_state.hermiticity_error() < 1e-12);
}

#[test]
fn collapse_pump_heats_linearly_at_first() {
    let s = FockSpace::three_mode([3, 1, 1]).unwrap();
    let mut p = SystemParams::paper_device();
    p.n_dot_c = 5.0;
    let diss = standard_dissipators(&p, &s).unwrap();
    let rho = DensityMatrix::basis_state(&s, &[0, 0, 0]).unwrap();
    let t = 1e-3;
    let out = integrate(
        &rho,
        &Hamiltonian::zero(&s),
        &diss,
        t,
        &[Observable::new("n_b", Operator::number(&s, MODE_B).unwrap())],
        &[],
        &IntegrateOptions::with_dt(1e-5),
    )
    .unwrap();
    // ⟨n_b⟩ = ṅ_c·t to first order; the next order is suppressed by Γ t and ṅ_c t.
    let n = out.final_value("n_b").unwrap();
    assert!((n / (p.n_dot_c * t) - 1.0).abs() < 1e-2, "{n}");
}

#[test]
fn cumulative_channel_integrates_decay() {
    // κ∫⟨n⟩dt over [0, 3/κ] = 1 − e^{−3}.
    let s = FockSpace::new(&[2]).unwrap();
    let a = Operator::annihilation(&s, 0).unwrap();
    let kappa = 4.0;
    let rho = DensityMatrix::basis_state(&s, &[1]).unwrap();
    let out = integrate(
        &rho,
        &Hamiltonian::zero(&s),
        &[Dissipator::new(a, kappa).unwrap()],
        3.0 / kappa,
        &[],
        &[Cumulative::new("emitted", kappa, Operator::number(&s, 0).unwrap())],
        &IntegrateOptions::with_dt(0.02 / kappa),
    )
    .unwrap();
    assert!((out.final_value("emitted").unwrap() - (1.0 - (-3.0f64).exp())).abs() < 1e-9);
}

#[test]
fn step_halving_full_hamiltonian() {
    let opts = ScenarioOptions {
        check_step_halving: true,
        ..ScenarioOptions::quick()
    };
    let p = SystemParams {
        rwa: false,
        ..SystemParams::paper_device()
    };
    let r = scenarios::run_scenario(Scenario::EtaOm, &p, &opts).unwrap();
    assert!(r.convergence.step_delta.unwrap() < 1e-6, "{:?}", r.convergence);
}
