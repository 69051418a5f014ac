use std::f64::consts::PI;

use nanolin::collapse::*;
use nanolin::constants::{hz_to_rad, HBAR, K_B, SILICON_DENSITY};

const L: (f64, f64, f64) = (1.21e-6, 0.22e-6, 0.22e-6);
const RC_GRID: [f64; 5] = [1e-9, 1e-8, 1e-7, 1e-6, 1e-5];

fn x0() -> f64 {
    zero_point_motion(136e-18, hz_to_rad(5.3e9)).unwrap()
}

fn beam_d(rc: f64) -> f64 {
    d_cuboid(L.0, L.1, L.2, SILICON_DENSITY, rc, x0()).unwrap()
}

fn slope(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    (f(b) / f(a)).ln() / (b / a).ln()
}

#[test]
fn cuboid_closed_form_matches_quadrature() {
    let geom = ResonatorGeometry::paper_beam();
    for rc in RC_GRID {
        let closed = beam_d(rc);
        let numeric = d_csl_numeric(&geom, rc, x0()).unwrap();
        println!("r_c = {rc:e}: closed {closed:.6e} numeric {numeric:.6e}");
        assert!((closed / numeric - 1.0).abs() < 1e-6);
    }
}

#[test]
fn sphere_closed_form_matches_quadrature() {
    for rc in RC_GRID {
        for radius in [rc, 0.1 * rc, 10.0 * rc, 3e-7] {
            let geom = ResonatorGeometry::sphere(radius, 2200.0).unwrap();
            let closed = d_sphere(radius, 2200.0, rc, x0()).unwrap();
            let numeric = d_csl_numeric(&geom, rc, x0()).unwrap();
            assert!((closed / numeric - 1.0).abs() < 1e-6, "R = {radius:e}, r_c = {rc:e}");
        }
    }
}

#[test]
fn printed_variants_differ_from_the_integral() {
    let printed = d_cuboid_as_printed(L.0, L.1, L.2, SILICON_DENSITY, 1e-7, x0()).unwrap();
    assert!(printed / beam_d(1e-7) > 2.0);
    let s = d_sphere(1e-7, 2200.0, 1e-7, x0()).unwrap();
    assert!((d_sphere_as_printed(1e-7, 2200.0, 1e-7, x0()).unwrap() / s - 0.875).abs() < 1e-15);
}

#[test]
fn beam_operator_near_quoted_value() {
    let d = beam_d(1e-7);
    println!("D_cuboid = {d:.4e}");
    assert!(d > 5.1e5 / 3.0 && d < 5.1e5 * 3.0);
}

#[test]
fn cuboid_asymptotic_slopes() {
    let lmax = L.0;
    assert!((slope(beam_d, 10.0 * lmax, 1000.0 * lmax) + 2.0).abs() < 0.02);
    let lmin = L.1;
    assert!((slope(beam_d, 1e-4 * lmin, 1e-2 * lmin) - 2.0).abs() < 0.02);
}

#[test]
fn sphere_large_correlation_length_limit() {
    let (r, rho) = (1e-7f64, 2200.0);
    let rc = 100.0 * r;
    let limit = 8.0 * PI * PI * r.powi(6) * (rho * x0()).powi(2) / (9.0 * (1.66e-27f64).powi(2) * rc * rc);
    assert!((d_sphere(r, rho, rc, x0()).unwrap() / limit - 1.0).abs() < 0.01);
}

#[test]
fn operators_scale_with_density_and_motion_squared() {
    let base = d_cuboid(L.0, L.1, L.2, 1000.0, 1e-7, 1e-15).unwrap();
    let dense = d_cuboid(L.0, L.1, L.2, 2000.0, 1e-7, 1e-15).unwrap();
    let wide = d_cuboid(L.0, L.1, L.2, 1000.0, 1e-7, 3e-15).unwrap();
    assert!((dense / base - 4.0).abs() < 1e-12);
    assert!((wide / base - 9.0).abs() < 1e-12);
    let s = d_sphere(1e-7, 1000.0, 1e-7, 1e-15).unwrap();
    assert!((d_sphere(1e-7, 2000.0, 1e-7, 1e-15).unwrap() / s - 4.0).abs() < 1e-12);
    assert_eq!(d_csl_numeric(&ResonatorGeometry::sphere(1e-7, 0.0).unwrap(), 1e-7, 1e-15).unwrap(), 0.0);
}

#[test]
fn kernel_quadratic_regime() {
    let (lambda, rc) = (1e-10, 1e-7);
    let dx = 0.1 * rc;
    let exact = decoherence_kernel(lambda, rc, dx).unwrap();
    let approx = lambda * (4.0 * PI * rc * rc).powf(-1.5) * dx * dx / (4.0 * rc * rc);
    assert!((exact / approx - 1.0).abs() < 0.01);
}

#[test]
fn thermal_flux_values() {
    let gamma = hz_to_rad(0.108);
    let omega = hz_to_rad(5.3e9);
    let f = thermal_flux(gamma, omega, 0.01).unwrap();
    println!("n_dot_th = {f:.4e}");
    assert!((f / 6.2e-12 - 1.0).abs() < 0.03);
    let low = thermal_flux_low_t(gamma, omega, 0.01).unwrap();
    assert!((low / f - 1.0).abs() < 1e-10);
    // Rayleigh-Jeans limit at ħΩ/k_BT = 0.01
    let t = HBAR * omega / (0.01 * K_B);
    let rj = gamma * K_B * t / (HBAR * omega);
    assert!((thermal_flux(gamma, omega, t).unwrap() / rj - 1.0).abs() < 0.01);
}

#[test]
fn collapse_flux_examples() {
    assert!((csl_phonon_flux(1e-10, 5.1e5) - 5.1e-5).abs() < 1e-18);
    assert!((csl_phonon_flux(1e-8, 5.1e5) - 5.1e-3).abs() < 1e-16);
    assert_eq!(csl_phonon_flux(0.0, 5.1e5), 0.0);
}

#[test]
fn dp_inverse_round_trip() {
    let (x0, a, m, rho) = (x0(), 5.431e-10, 136e-18, SILICON_DENSITY);
    for f in [1e-12, 3.3e-7, 1.0] {
        let r = dp_cutoff_from_noise(f, x0, a, m, rho).unwrap();
        let back = d_dp(x0, a, r, m, rho).unwrap();
        assert!((back / f - 1.0).abs() < 1e-12);
    }
    assert!(d_dp(x0, a, 1e300, m, rho).unwrap() < 1e-250);
}

#[test]
fn grw_linear_in_nucleons() {
    let a = grw_heating(1e11, GRW_LAMBDA, 1e-15, 1e-7).unwrap();
    let b = grw_heating(2e11, GRW_LAMBDA, 1e-15, 1e-7).unwrap();
    assert!((b / a - 2.0).abs() < 1e-15);
    assert_eq!(grw_heating(1e11, GRW_LAMBDA, 0.0, 1e-7).unwrap(), 0.0);
}

#[test]
fn collapse_params_dispatch() {
    let beam = ResonatorGeometry::paper_beam();
    let omega = hz_to_rad(5.3e9);
    let p = CollapseParams::csl(1e-10, 1e-7).unwrap();
    let x0 = zero_point_motion(beam.mass(), omega).unwrap();
    let expected = 1e-10 * d_closed_form(&beam, 1e-7, x0).unwrap();
    assert!((p.phonon_flux(&beam, omega).unwrap() / expected - 1.0).abs() < 1e-14);
    assert!(CollapseParams::csl(-1.0, 1e-7).is_err());
    assert!(CollapseParams::csl(1.0, 0.0).is_err());
}

#[test]
fn heating_map_crossings_and_roll_off() {
    let map = heating_map(&HeatingMapSpec::silica(161)).unwrap();
    // temperatures are (300 K, 1 K, 10 mK); bounds are (adler, bassi)
    let cold = map.crossings(2, 1);
    let hot = map.crossings(0, 1);
    println!("10 mK / Bassi crossings: {cold:?}");
    assert_eq!(cold.len(), 1);
    assert!(hot.is_empty());
    // CSL wins below the crossing at 10 mK.
    let small = &map.rows[0];
    assert!(small.csl[1].1 > small.thermal[2]);
    // Ω halves when R doubles.
    let spec = HeatingMapSpec {
        diameters: vec![1e-6, 2e-6],
        ..HeatingMapSpec::silica(2)
    };
    let pair = heating_map(&spec).unwrap();
    assert!((pair.rows[0].omega / pair.rows[1].omega - 2.0).abs() < 1e-12);
    // D_sphere grows steeply below r_c and saturates above it.
    let d = |dia: f64| {
        let r = 0.5 * dia;
        let x0 = zero_point_motion(2200.0 * 4.0 / 3.0 * PI * r.powi(3), 3000.0 / r).unwrap();
        d_sphere(r, 2200.0, 1e-7, x0).unwrap()
    };
    assert!(slope(d, 1e-8, 3e-8) >= 3.0);
    assert!(slope(d, 1e-5, 1e-4).abs() < 0.5);
}
