use std::f64::consts::PI;

use nanolin::budget::*;
use nanolin::collapse::{d_closed_form, zero_point_motion, ResonatorGeometry};
use nanolin::constants::hz_to_rad;
use nanolin::quadrature::{integrate, QuadratureOptions};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a / b - 1.0).abs() <= rel
}

#[test]
fn table_reproduces_quoted_rows() {
    let t = build_table(&BudgetInputs::paper_values()).unwrap();
    let expected = [
        ("thermal", 6.7e-15, 1.2e-17),
        ("optomechanical", 1.9e-10, 3.5e-13),
        ("absorption", 1.4e-14, 2.6e-17),
        ("probe_photons", 1.4e-12, 2.6e-15),
        ("dark_counts", 3.7e-10, 6.7e-13),
    ];
    for (name, rate, lambda) in expected {
        let row = t.row(name).unwrap();
        println!("{name}: R = {:.3e}, lambda = {:.3e}", row.rate_per_s, row.lambda_min_per_s);
        assert!(close(row.rate_per_s, rate, 0.1), "{name}");
        assert!(close(row.lambda_min_per_s, lambda, 0.1), "{name}");
    }
    assert!(close(t.total_rate_per_s, 5.6e-10, 0.1));
    assert!(close(t.total_lambda_min_per_s, 1.0e-12, 0.1));
    assert!(close(t.eta, 1.09e-3, 0.01));
    assert!(close(t.signal_rate_per_lambda, 5.5e2, 0.05));
}

#[test]
fn lambda_min_is_rate_over_d_eta() {
    let t = build_table(&BudgetInputs::paper_values()).unwrap();
    for r in &t.rows {
        assert!(close(r.lambda_min_per_s * t.d * t.eta, r.rate_per_s, 1e-14));
    }
}

#[test]
fn multiplexing_divides_only_the_dark_row() {
    let one = build_table(&BudgetInputs::paper_values()).unwrap();
    let many = build_table(&BudgetInputs {
        multiplex: 1e4,
        ..BudgetInputs::paper_values()
    })
    .unwrap();
    for (a, b) in one.rows.iter().zip(&many.rows) {
        let ratio = if a.channel == "dark_counts" { 1e4 } else { 1.0 };
        assert!(close(a.rate_per_s, b.rate_per_s * ratio, 1e-14), "{}", a.channel);
    }
}

#[test]
fn filter_efficiency_and_leakage() {
    let f = FilterParams::reference_cavity();
    assert!((filter_efficiency(&f).unwrap() - 0.5625).abs() < 1e-12);
    let p_f = filter_leakage(&f, hz_to_rad(5.3e9)).unwrap();
    println!("p_f = {p_f:.3e}, alt = {:.3e}", filter_leakage_alt(&f, hz_to_rad(5.3e9)).unwrap());
    assert!(p_f / PAPER_P_F > 0.2 && p_f / PAPER_P_F < 5.0);
}

#[test]
fn absorption_row_inputs() {
    let a = absorption_noise(hz_to_rad(0.108), hz_to_rad(575e6), 0.01, 0.32, 10.0, 0.56 * 0.95 * 0.64).unwrap();
    assert!(close(a.n_abs1, 1.878e-9, 1e-3));
    assert!(close(a.p_abs, 6.1e-12, 0.05));
    assert!(close(a.r_abs, 1.4e-14, 0.05));
    assert!((absorption_occupancy(10.0, 1000.0).unwrap() - 100.0).abs() < 1e-12);
}

#[test]
fn measurement_times() {
    let eta = 1.0895e-3;
    let year = 365.25 * 86400.0;
    let single = measurement_time(1e-12, 5.1e5, eta, 1.0).unwrap();
    let array = measurement_time(1e-12, 5.1e5, eta, 1e4).unwrap();
    println!("t_meas = {:.2} yr, {:.2} d", single / year, array / 86400.0);
    assert!(close(single / year, 57.0, 0.02));
    assert!(close(array / 86400.0, 2.1, 0.02));
    assert!(measurement_time(0.0, 5.1e5, eta, 1.0).is_err());
}

#[test]
fn gaussian_tail_matches_quadrature() {
    let sigma = 1.7;
    let opts = QuadratureOptions {
        rel_tol: 1e-13,
        ..QuadratureOptions::default()
    };
    for x in [0.0, 1.0, 2.0, 3.5, 5.0] {
        let density = |u: f64| (-(u * u) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt());
        let numeric = integrate(density, x * sigma, (x + 40.0) * sigma, &opts).unwrap();
        let tail = gaussian_tail(x * sigma, sigma).unwrap();
        assert!((tail - numeric).abs() < 1e-10, "x = {x}");
    }
}

#[test]
fn quadratic_thresholds() {
    let q = QuadraticParams::reference();
    let r = quadratic_feasibility(&q, 1e-12 * 5.1e5, 10.0).unwrap();
    let hz = |w: f64| w / (2.0 * PI);
    println!(
        "printed {:.2} Hz, derived {:.3e} Hz, g_max {:.3} Hz, multiple {:.2}",
        hz(r.threshold_printed),
        hz(r.threshold_derived),
        hz(r.g_max),
        r.sigma_multiple
    );
    assert!(close(hz(r.threshold_printed), 28.0, 0.05));
    assert!(hz(r.g_max) > 1e-2 && hz(r.g_max) < 10.0);
    assert!(close(r.sigma, (q.kappa * q.gamma / q.n_cav).sqrt(), 1e-12));
    assert!(close(q.gamma * gaussian_tail(r.sigma_multiple * r.sigma, r.sigma).unwrap(), 5.1e-7, 1e-6));
    assert_eq!(r.backaction_flux, 0.0);
}

#[test]
fn exclusion_curve_tracks_the_operator() {
    let beam = ResonatorGeometry::paper_beam();
    let x0 = zero_point_motion(beam.mass(), hz_to_rad(5.3e9)).unwrap();
    let grid = [1e-8, 1e-7, 1e-6];
    let curve = exclusion_curve(&grid, &beam, x0, 1e-3, 5.6e-10).unwrap();
    for (p, rc) in curve.iter().zip(grid) {
        assert_eq!(p.r_c, rc);
        let d = d_closed_form(&beam, rc, x0).unwrap();
        assert!(close(p.lambda_min, 5.6e-10 / (d * 1e-3), 1e-14));
    }
    assert!(exclusion_curve(&[], &beam, x0, 1e-3, 1.0).is_err());
}
