use cslfield::clump_states::{clump_overlap, log_clump_overlap, ClumpProfile};
use cslfield::field_density::{gaussian_pair_integral, h0_maximizer, h0_mode_exponent, h_mode_exponent, ChiWeight};
use cslfield::kernel_solution::{
    closed_moments, coeffs_approx, coeffs_exact, initial_trace, mehler_kernel, thermal_map_coeffs, x_matrix_element,
};
use cslfield::numerics::log_sum_exp;
use cslfield::observables::mode_occupation;
use cslfield::units_modes::ModelParams;
use cslfield::C64;
use proptest::prelude::*;

fn params() -> ModelParams {
    ModelParams::new(1.0, 0.8, 25.0, 6.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn prop_log_sum_exp_matches_naive(xs in prop::collection::vec(-30.0f64..30.0, 1..12)) {
        let naive = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        prop_assert!((log_sum_exp(&xs) - naive).abs() < 1e-12);
        let shifted: Vec<f64> = xs.iter().map(|x| x - 900.0).collect();
        prop_assert!((log_sum_exp(&shifted) + 900.0 - naive).abs() < 1e-9);
    }

    #[test]
    fn prop_thermal_mean_is_linear_in_time(lambda in 1e-3f64..50.0, omega in 1e-2f64..50.0, t in 1e-3f64..1e4) {
        let c = coeffs_approx(t, omega, lambda, 0.2, -0.1, true).unwrap();
        let th = thermal_map_coeffs(&c).unwrap();
        let want = lambda * t / (2.0 * omega);
        prop_assert!((th.mean_n - want).abs() <= 4.0 * f64::EPSILON * want);
        prop_assert!(th.temperature > 0.0);
    }

    #[test]
    fn prop_exact_and_approx_agree_at_periods(j in 1u32..40, lambda in 0.01f64..5.0, g1 in -1.0f64..1.0, g2 in -1.0f64..1.0) {
        let omega = 1.3;
        let t = 2.0 * std::f64::consts::PI * j as f64 / omega;
        let e = coeffs_exact(t, omega, lambda, g1, g2).unwrap();
        let a = coeffs_approx(t, omega, lambda, g1, g2, true).unwrap();
        prop_assert!((e.s - a.s).abs() < 1e-12);
        prop_assert!(e.r.norm() < 1e-10);
        prop_assert!((e.c - a.c).norm() < 1e-9 * a.c.norm().max(1e-300));
    }

    #[test]
    fn prop_trace_is_conserved(t in 0.0f64..50.0, lambda in 0.0f64..3.0, g1 in -1.5f64..1.5, g2 in -1.5f64..1.5) {
        let m = closed_moments(t, 1.0, lambda, g1, g2).unwrap();
        prop_assert!((m.trace.re - initial_trace(g1, g2)).abs() < 1e-14);
        prop_assert!(m.trace.im.abs() < 1e-14);
    }

    #[test]
    fn prop_kernel_is_symmetric_for_equal_gammas(j in 1u32..20, g in -1.0f64..1.0, x in -3.0f64..3.0, xp in -3.0f64..3.0) {
        let c = coeffs_approx(2.0 * std::f64::consts::PI * j as f64, 1.0, 0.7, g, g, true).unwrap();
        let a = x_matrix_element(x, xp, &c).unwrap();
        let b = x_matrix_element(xp, x, &c).unwrap();
        prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1e-300));
    }

    #[test]
    fn prop_mehler_is_bounded_by_diagonals(s in 0.0f64..0.95, x in -3.0f64..3.0, xp in -3.0f64..3.0) {
        // Cauchy–Schwarz for a positive kernel.
        let k = mehler_kernel(x, xp, s).unwrap();
        let bound = (mehler_kernel(x, x, s).unwrap() * mehler_kernel(xp, xp, s).unwrap()).sqrt();
        prop_assert!(k <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn prop_gaussian_pair_integral_is_symmetric(alpha in 0.0f64..5.0, a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in -2.0f64..2.0) {
        let v = gaussian_pair_integral(alpha, a, b, c, d).unwrap();
        prop_assert!(v > 0.0 && v <= std::f64::consts::PI / 2.0 + 1e-15);
        let swapped = gaussian_pair_integral(alpha, c, d, a, b).unwrap();
        prop_assert!((v - swapped).abs() < 1e-14);
        let shifted = gaussian_pair_integral(alpha, a + 0.7, b + 0.7, c + 0.7, d + 0.7).unwrap();
        prop_assert!((v - shifted).abs() < 1e-13);
    }

    #[test]
    fn prop_h0_maximum_is_global(k in 0.05f64..6.0, t in 0.0f64..40.0, re in -1.0f64..1.0, im in -1.0f64..1.0, df in -0.5f64..0.5) {
        let p = params();
        let (cs, csp) = (C64::new(re, im), C64::new(im, -re));
        let (f0, fp0) = h0_maximizer(k, t, cs, csp, &p).unwrap();
        let best = h0_mode_exponent(f0, fp0, k, t, cs, csp, &p).unwrap();
        let other = h0_mode_exponent(f0 + df, fp0 - C64::new(0.0, df), k, t, cs, csp, &p).unwrap();
        prop_assert!(other <= best + 1e-15);
    }

    #[test]
    fn prop_full_exponent_is_symmetric_under_exchange(k in 0.05f64..6.0, j in 1u32..30, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let p = params();
        let t = 2.0 * std::f64::consts::PI * j as f64;
        let (f, fp, cs, csp) = (C64::new(a, b), C64::new(b, 0.3), C64::new(0.2, a), C64::new(-b, 0.1));
        for w in [ChiWeight::Exact, ChiWeight::MassShell] {
            let x = h_mode_exponent(f, fp, k, t, cs, csp, &p, w).unwrap().0;
            let y = h_mode_exponent(fp, f, k, t, csp, cs, &p, w).unwrap().0;
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn prop_overlap_is_symmetric_and_bounded(n in 0.1f64..50.0, sigma in 0.1f64..5.0, a in -10.0f64..10.0, b in -10.0f64..10.0) {
        let p = ClumpProfile::new(n, sigma, a).unwrap();
        let q = ClumpProfile::new(n, sigma, b).unwrap();
        let o = clump_overlap(&p, &q).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&o));
        prop_assert_eq!(log_clump_overlap(&p, &q).unwrap(), log_clump_overlap(&q, &p).unwrap());
    }

    #[test]
    fn prop_occupation_difference_is_conserved(t in 0.0f64..100.0, k in 0.01f64..10.0, na in 0.0f64..5.0, nb in 0.0f64..5.0) {
        let (a, b) = mode_occupation(t, k, na, nb, &params()).unwrap();
        prop_assert!(((a - b) - (na - nb)).abs() < 1e-12);
    }
}
