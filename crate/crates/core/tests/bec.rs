use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use unruh_core::bec::{
    bogoliubov_mode, bound_state_closed_form, bound_state_count, coupling_tensor, map_to_detector_model,
    transition_energy, two_level_design, two_level_window, variational_width, width_residual,
    BogoliubovBath, TweezerSpec,
};
use unruh_core::rates::{rates_from_sites, CrossPairing};
use unruh_core::Error;

fn bath(temperature: f64) -> BogoliubovBath {
    BogoliubovBath {
        m: 1.0,
        mu: 1.0,
        n0: 50.0,
        length: 100.0,
        u0: 0.02,
        temperature,
    }
}

fn mid_window() -> TweezerSpec {
    TweezerSpec::new(PI, 1.05, 1.0)
}

/// Bound states from the zero-energy solution that stays bounded on the
/// left: one per node, plus one if it would cross zero beyond the right
/// edge of the well.
fn shooting_count(t: &TweezerSpec) -> usize {
    let half = 8.0 * t.w;
    let n = 200_000;
    let h = 2.0 * half / n as f64;
    let f = |x: f64, y: [f64; 2]| [y[1], -2.0 * t.mass * t.v0 * (-(x * x) / (t.w * t.w)).exp() * y[0]];
    let mut y = [1.0, 0.0];
    let mut nodes = 0;
    for i in 0..n {
        let x = -half + i as f64 * h;
        let k1 = f(x, y);
        let k2 = f(x + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = f(x + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = f(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        let next = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if next[0].signum() != y[0].signum() {
            nodes += 1;
        }
        y = next;
    }
    nodes + usize::from(y[0] * y[1] < 0.0)
}

#[test]
fn bogoliubov_normalisation_over_wide_k_range() {
    let b = bath(0.1);
    let scale = (b.m * b.mu).sqrt();
    for i in 0..1000 {
        let k = scale * 10f64.powf(-3.0 + 6.0 * i as f64 / 999.0);
        let m = bogoliubov_mode(&b, k).unwrap();
        assert!((m.u * m.u - m.v * m.v - 1.0).abs() < 1e-12, "k = {k}");
        assert!(m.energy > 0.0 && m.s > 0.0 && m.s <= 1.0);
    }
}

#[test]
fn dispersion_limits() {
    let b = bath(0.1);
    let c = b.sound_speed();
    // ε_k < μ/50
    let k_small = 0.9 * (2.0 * b.m * b.mu / 50.0).sqrt();
    let m = bogoliubov_mode(&b, k_small).unwrap();
    assert!((m.energy / k_small / c - 1.0).abs() < 0.01);

    let m = bogoliubov_mode(&b, 1e3).unwrap();
    assert!((m.u - 1.0).abs() < 1e-6 && m.v < 1e-6 && (m.s - 1.0).abs() < 1e-6);

    let mut prev = 0.0;
    for i in 1..500 {
        let e = bogoliubov_mode(&b, 0.02 * i as f64).unwrap().energy;
        assert!(e > prev);
        prev = e;
    }
    assert!(matches!(bogoliubov_mode(&b, 0.0), Err(Error::Divergence)));
}

#[test]
fn window_scales_with_root_of_depth_times_mass() {
    let (lo, hi) = two_level_window(PI, 1.0).unwrap();
    assert!((lo - 0.8).abs() < 1e-15 && (hi - 4.0 / 3.0).abs() < 1e-15);
    let (lo4, hi4) = two_level_window(PI, 4.0).unwrap();
    assert!((lo4 - 2.0 * lo).abs() < 1e-15 && (hi4 - 2.0 * hi).abs() < 1e-15);
}

#[test]
fn mid_window_regression() {
    let d = two_level_design(&mid_window()).unwrap();
    assert!((d.a0 - 1.020_061_530_153_09).abs() < 1e-12, "a0 = {}", d.a0);
    assert!((d.omega - 1.169_095_619_430_231).abs() < 1e-12, "omega = {}", d.omega);
    assert!(d.in_window(1.05));
    assert_eq!(d.bound_states.numeric, 2);
}

#[test]
fn kinetic_term_only_without_well() {
    let t = TweezerSpec::new(0.0, 1.0, 2.0);
    assert!((transition_energy(&t, 0.5) - 2.0 / (2.0 * 0.25)).abs() < 1e-15);
    assert!(matches!(variational_width(&t), Err(Error::NoRoot(_))));
}

#[test]
fn transition_energy_is_smooth_across_window() {
    let (lo, hi) = two_level_window(PI, 1.0).unwrap();
    let n = 200;
    let omegas: Vec<f64> = (1..n)
        .map(|i| {
            let w = lo + (hi - lo) * i as f64 / n as f64;
            let t = TweezerSpec::new(PI, w, 1.0);
            transition_energy(&t, variational_width(&t).unwrap())
        })
        .collect();
    assert!(omegas.iter().all(|o| o.is_finite()));
    let max_jump = omegas.windows(2).map(|p| (p[1] - p[0]).abs()).fold(0.0, f64::max);
    assert!(max_jump < 0.05, "jump {max_jump}");
}

#[test]
fn variational_gap_changes_sign_inside_window() {
    // the variational Ω is negative near the narrow edge of the window
    let omega = |w: f64| {
        let t = TweezerSpec::new(PI, w, 1.0);
        transition_energy(&t, variational_width(&t).unwrap())
    };
    assert!(omega(0.81) < 0.0);
    assert!(omega(1.05) > 0.0);
    let err = map_to_detector_model(&bath(0.1), &[TweezerSpec::new(PI, 0.81, 1.0)], 0.1).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
}

#[test]
fn width_condition_covariance() {
    // both sides are homogeneous: the left in (a0, w) with degree −6, the
    // right as V0² w⁴, so (V0, w) → (V0/s⁵, s w) sends a0 → s a0
    let t = TweezerSpec::new(2.5, 1.1, 1.3);
    let a0 = variational_width(&t).unwrap();
    for s in [0.5f64, 2.0, 3.0] {
        let scaled = TweezerSpec::new(t.v0 / s.powi(5), s * t.w, t.mass);
        let a1 = variational_width(&scaled).unwrap();
        assert!((a1 / (s * a0) - 1.0).abs() < 1e-12, "s = {s}");
    }
    // only the product M·V0 enters
    let swapped = TweezerSpec::new(t.v0 * t.mass, t.w, 1.0);
    assert!((variational_width(&swapped).unwrap() / a0 - 1.0).abs() < 1e-12);
}

#[test]
fn coupling_tensor_limits() {
    let b = bath(0.1);
    let a0 = 1.2;
    let k_star = SQRT_2 / a0;
    let c = coupling_tensor(&b, &bogoliubov_mode(&b, k_star).unwrap(), a0, 0.3);
    assert!(c.g11.norm() < 1e-15 * c.g00.norm());
    assert!((c.g10 / c.g00 - C64::new(0.0, SQRT_2)).norm() < 1e-14);

    // S ~ √k at long wavelength, so G⁰⁰ ~ k^(1/4)
    let g00 = |k: f64| coupling_tensor(&b, &bogoliubov_mode(&b, k).unwrap(), a0, 0.3).g00.norm();
    let ratio = g00(1e-12) / g00(1e-8);
    assert!((ratio - 0.1).abs() < 1e-6, "ratio {ratio}");
    let tiny = coupling_tensor(&b, &bogoliubov_mode(&b, 1e-20).unwrap(), a0, 0.3);
    assert!(tiny.g00.norm() < 1e-5 && tiny.g11.norm() < 1e-5 && tiny.g10.norm() < 1e-24);
}

#[test]
fn numeric_count_agrees_with_shooting() {
    for (v0, w) in [(0.3, 0.6), (2.0, 1.05), (PI, 1.05), (6.0, 2.0), (12.0, 0.6), (12.0, 2.0)] {
        let t = TweezerSpec::new(v0, w, 1.0);
        let c = bound_state_count(&t).unwrap();
        assert_eq!(c.numeric as usize, shooting_count(&t), "V0 = {v0}, w = {w}");
    }
}

#[test]
fn closed_form_flags_disagreement_in_window() {
    let c = bound_state_count(&mid_window()).unwrap();
    assert_eq!(c.closed_form, bound_state_closed_form(&mid_window()));
    assert_eq!(c.closed_form, 1);
    assert!(!c.agree());
}

#[test]
fn single_tweezer_maps_to_reference_atom() {
    let m = map_to_detector_model(&bath(0.1), &[mid_window()], 0.1).unwrap();
    assert_eq!(m.sites.len(), 1);
    let s = m.sites[0];
    assert_eq!(s.xi, 0.0);
    assert_eq!(s.redshift, 1.0);
    assert_eq!(s.g, 1.0);
    assert!((s.omega_eff - m.atoms[0].design.omega).abs() < 1e-15);
    assert!((m.frame.beta() - 10.0).abs() < 1e-12);
    assert!((m.atoms[0].stark_shift - 50.0).abs() < 1e-12);
}

#[test]
fn pair_reproduces_phonon_phase() {
    let b = bath(0.1);
    let d = 2.7;
    let tw = [mid_window(), mid_window().at(d)];
    let m = map_to_detector_model(&b, &tw, 0.1).unwrap();
    let rates = rates_from_sites(&m.frame, &m.sites, CrossPairing::Anomalous).unwrap();
    let k0 = m.atoms[0].k_res;
    let g = rates.gamma_minus_plus[(0, 1)];
    let expected = C64::from_polar(g.norm(), -k0 * d);
    assert!((g - expected).norm() < 1e-14, "{g} vs {expected}");
}

#[test]
fn cold_bath_has_no_absorption() {
    let m = map_to_detector_model(&bath(0.0), &[mid_window()], 0.1).unwrap();
    let rates = rates_from_sites(&m.frame, &m.sites, CrossPairing::Anomalous).unwrap();
    assert_eq!(rates.gamma_plus_minus[(0, 0)].norm(), 0.0);
    assert!((rates.gamma_minus_plus[(0, 0)].re - 0.1).abs() < 1e-15);
}

#[test]
fn mapped_rates_obey_detailed_balance_at_bath_temperature() {
    for temperature in [0.05, 0.3, 2.0] {
        let m = map_to_detector_model(&bath(temperature), &[mid_window()], 0.1).unwrap();
        let rates = rates_from_sites(&m.frame, &m.sites, CrossPairing::Anomalous).unwrap();
        let ratio = rates.gamma_plus_minus[(0, 0)].re / rates.gamma_minus_plus[(0, 0)].re;
        let expected = (-m.sites[0].omega_eff / temperature).exp();
        assert!((ratio - expected).abs() < 1e-12 * expected, "T = {temperature}");
    }
}

#[test]
fn tweezer_outside_window_is_rejected() {
    let err = map_to_detector_model(&bath(0.1), &[TweezerSpec::new(PI, 2.0, 1.0)], 0.1).unwrap_err();
    match err {
        Error::Config(msg) => assert!(msg.contains("0.8") && msg.contains("1.333"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
}

proptest! {
    #[test]
    fn width_root_is_unique_and_accurate(v0 in 0.2f64..20.0, w in 0.2f64..3.0, mass in 0.2f64..5.0) {
        let t = TweezerSpec::new(v0, w, mass);
        let a0 = variational_width(&t).unwrap();
        let rhs = (v0 * mass).powi(2) * w.powi(4);
        prop_assert!(width_residual(&t, a0).abs() < 1e-10 * rhs);
        let grid: Vec<f64> = (0..=600).map(|i| w * 10f64.powf(-3.0 + i as f64 / 100.0)).collect();
        let changes = grid
            .windows(2)
            .filter(|p| width_residual(&t, p[0]).signum() != width_residual(&t, p[1]).signum())
            .count();
        prop_assert_eq!(changes, 1);
    }

    #[test]
    fn coupling_ratios_are_exact(k in 0.01f64..20.0, a0 in 0.1f64..3.0, g in 0.0f64..2.0) {
        let b = bath(0.1);
        let c = coupling_tensor(&b, &bogoliubov_mode(&b, k).unwrap(), a0, g);
        let tol = 1e-14 * c.g00.norm().max(f64::MIN_POSITIVE);
        prop_assert!((c.g11 - c.g00 * (1.0 - a0 * a0 * k * k / 2.0)).norm() <= tol * (1.0 + a0 * a0 * k * k));
        prop_assert!((c.g10 - c.g00 * C64::new(0.0, a0 * k)).norm() <= tol * (1.0 + a0 * k));
        prop_assert_eq!(c.g01(), c.g10.conj());
    }

    #[test]
    fn numeric_count_grows_with_depth(w in 0.3f64..2.5, v0 in 0.1f64..15.0, dv in 0.0f64..5.0) {
        let shallow = bound_state_count(&TweezerSpec::new(v0, w, 1.0)).unwrap().numeric;
        let deep = bound_state_count(&TweezerSpec::new(v0 + dv, w, 1.0)).unwrap().numeric;
        prop_assert!(shallow >= 1);
        prop_assert!(deep >= shallow);
    }
}
