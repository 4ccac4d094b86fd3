use std::f64::consts::PI;

use proptest::prelude::*;
use squeeze_core::drift::{
    averaged_spectrum, lineshape_density, locked_spectrum, noise_upper_bound, DelaySetting,
    Lineshape,
};
use squeeze_core::physics::{spectrum_oracle, ScaledOpoParams};
use squeeze_core::quadrature::QuadratureOptions;

const K_TOT: f64 = PI * 8e6;

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(a) + f(b) + inner) * h / 3.0
}

/// Brute-force lineshape average built from the mode-by-mode spectrum and the raw density,
/// integrated on a wide uniform grid.
fn brute_average(p: &ScaledOpoParams, omega: f64, shape: &Lineshape, tau_d: f64) -> f64 {
    let width = match shape {
        Lineshape::Gaussian { .. } => 9.0 * shape.scaled_sigma(K_TOT),
        _ => 4000.0 * shape.scaled_half_width(K_TOT),
    };
    let slope = p.delay_phase_slope(tau_d);
    let f = |d: f64| {
        let theta = 0.5 * (PI + slope * d + p.pump_phase);
        spectrum_oracle(p, omega, d, theta) * lineshape_density(shape, d, K_TOT).unwrap()
    };
    match shape {
        Lineshape::Gaussian { .. } => simpson(f, -width, width, 4000),
        _ => {
            // dense core plus sparse wings, outer tail of the density bounded by S ≤ S_max
            let core = 40.0 * shape.scaled_half_width(K_TOT);
            simpson(f, -core, core, 40_000) + 2.0 * simpson(f, core, width, 200_000)
        }
    }
}

fn shapes() -> impl Strategy<Value = Lineshape> {
    prop_oneof![
        (50e3f64..3e6).prop_map(|fwhm_hz| Lineshape::Gaussian { fwhm_hz }),
        (50e3f64..3e6).prop_map(|fwhm_hz| Lineshape::Lorentzian { fwhm_hz }),
    ]
}

#[test]
fn densities_are_normalized() {
    for fwhm_hz in [30e3, 300e3, 700e3, 3e6] {
        let g = Lineshape::Gaussian { fwhm_hz };
        let s = g.scaled_sigma(K_TOT);
        let mass = simpson(
            |d| lineshape_density(&g, d, K_TOT).unwrap(),
            -10.0 * s,
            10.0 * s,
            2000,
        );
        assert!((mass - 1.0).abs() < 1e-10, "{mass}");

        let l = Lineshape::Lorentzian { fwhm_hz };
        let gamma = l.scaled_half_width(K_TOT);
        let span = 50.0 * gamma;
        let mass = simpson(
            |d| lineshape_density(&l, d, K_TOT).unwrap(),
            -span,
            span,
            20_000,
        );
        let expected = 2.0 / PI * (span / gamma).atan();
        assert!((mass - expected).abs() < 1e-10, "{mass} vs {expected}");
    }
}

#[test]
fn averaged_matches_brute_force() {
    let p = ScaledOpoParams::new(0.93, 0.25, 0.4, 0.9, K_TOT).unwrap();
    let opts = QuadratureOptions::default();
    for shape in [
        Lineshape::Gaussian { fwhm_hz: 700e3 },
        Lineshape::Gaussian { fwhm_hz: 2e6 },
        Lineshape::Lorentzian { fwhm_hz: 300e3 },
    ] {
        for (omega, tau_d) in [(0.25, 0.0), (0.5, 30e-9), (0.75, -20e-9)] {
            let fast =
                averaged_spectrum(&p, omega, &shape, DelaySetting::from_seconds(tau_d), &opts)
                    .unwrap();
            let slow = brute_average(&p, omega, &shape, tau_d);
            let tol = match shape {
                // the brute-force Lorentzian misses tail mass of order γ/(π·width)
                Lineshape::Lorentzian { .. } => noise_upper_bound(&p) * 2.0 / (PI * 4000.0),
                _ => 1e-8,
            };
            assert!(
                (fast.value - slow).abs() < tol,
                "{shape:?} {omega} {tau_d}: {} vs {slow}",
                fast.value
            );
        }
    }
}

#[test]
fn quadrature_error_estimates_hold_under_refinement() {
    let p = ScaledOpoParams::new(0.934, 0.227, 0.0, 0.912, K_TOT).unwrap();
    let loose = QuadratureOptions::default().with_rel_tol(1e-5);
    let tight = QuadratureOptions {
        max_subdivisions: 50_000,
        ..QuadratureOptions::default().with_rel_tol(1e-11)
    };
    for shape in [
        Lineshape::Gaussian { fwhm_hz: 700e3 },
        Lineshape::Lorentzian { fwhm_hz: 300e3 },
    ] {
        for l in [-20.0, 0.0, 6.0, 40.0] {
            let delay = DelaySetting::from_fiber(l, 1.5);
            let a = averaged_spectrum(&p, 0.5, &shape, delay, &loose).unwrap();
            let b = averaged_spectrum(&p, 0.5, &shape, delay, &tight).unwrap();
            assert!(
                (a.value - b.value).abs() <= a.error + b.error,
                "{shape:?} at {l} m"
            );
            assert!(b.error <= 1e-10 * b.value + b.tail_bound + 1e-14);
        }
    }
}

#[test]
fn narrow_lineshapes_approach_the_delta_limit() {
    let p = ScaledOpoParams::new(0.934, 0.227, 0.0, 0.912, K_TOT).unwrap();
    let opts = QuadratureOptions::default();
    let delay = DelaySetting::from_fiber(10.0, 1.5);
    let delta = averaged_spectrum(&p, 0.5, &Lineshape::Delta, delay, &opts)
        .unwrap()
        .value;
    let mut last = f64::INFINITY;
    for fwhm_hz in [100e3, 10e3, 1e3, 100.0] {
        let g = averaged_spectrum(&p, 0.5, &Lineshape::Gaussian { fwhm_hz }, delay, &opts)
            .unwrap()
            .value;
        let gap = (g - delta).abs();
        assert!(gap < last);
        last = gap;
    }
    assert!(last < 1e-8);
}

#[test]
fn delay_sign_is_not_symmetric() {
    // the detuning-odd term makes lagging and leading local oscillators differ
    let p = ScaledOpoParams::new(0.999, 0.3, 0.0, 1.0, K_TOT).unwrap();
    let opts = QuadratureOptions::default();
    let shape = Lineshape::Gaussian { fwhm_hz: 1e6 };
    for l in [5.0, 10.0, 30.0] {
        let plus =
            averaged_spectrum(&p, 0.01, &shape, DelaySetting::from_fiber(l, 1.5), &opts).unwrap();
        let minus =
            averaged_spectrum(&p, 0.01, &shape, DelaySetting::from_fiber(-l, 1.5), &opts).unwrap();
        assert!(minus.value - plus.value > plus.error + minus.error, "{l} m");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn unpumped_average_is_shot_noise(
        shape in shapes(), eta in 0.1f64..=1.0, omega in 0.0f64..2.0, l in -50.0f64..50.0,
    ) {
        let p = ScaledOpoParams::new(eta, 0.0, 0.0, 0.9, K_TOT).unwrap();
        let avg = averaged_spectrum(&p, omega, &shape, DelaySetting::from_fiber(l, 1.5), &QuadratureOptions::default()).unwrap();
        prop_assert!((avg.value - 1.0).abs() <= 1e-12 + avg.error);
    }

    #[test]
    fn average_stays_within_physical_bounds(
        shape in shapes(), eta in 0.1f64..=1.0, alpha in 0.0f64..0.9, eta_det in 0.1f64..=1.0,
        omega in 0.0f64..2.0, l in -50.0f64..50.0,
    ) {
        let p = ScaledOpoParams::new(eta, alpha, 0.0, eta_det, K_TOT).unwrap();
        let avg = averaged_spectrum(&p, omega, &shape, DelaySetting::from_fiber(l, 1.5), &QuadratureOptions::default()).unwrap();
        prop_assert!(avg.value >= 1.0 - eta * eta_det - avg.error);
        prop_assert!(avg.value <= noise_upper_bound(&p) + avg.error);
    }

    #[test]
    fn locked_integrand_is_even_in_detuning(
        eta in 0.1f64..=1.0, alpha in 0.0f64..0.9, omega in 0.0f64..2.0,
        detuning in 0.0f64..1.0, tau in -1e-7f64..1e-7,
    ) {
        let p = ScaledOpoParams::new(eta, alpha, 0.0, 0.9, K_TOT).unwrap();
        let d = DelaySetting::from_seconds(tau);
        let a = locked_spectrum(&p, omega, detuning, d);
        let b = locked_spectrum(&p, omega, -detuning, d);
        prop_assert!((a - b).abs() < 1e-12);
    }
}
