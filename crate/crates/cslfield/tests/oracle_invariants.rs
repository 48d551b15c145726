use std::f64::consts::PI;

use cslfield::clump_states::{clump_overlap, ClumpProfile};
use cslfield::fock_oracle::{
    coherent_overlap_oracle, default_dt, dm_position_element, eigenstate_residual, integrate, integrate_lindblad_p,
    integrate_lindblad_x, moments, position_wavefunction, position_wavefunctions, OracleOptions, Quadrature,
    TruncatedDM,
};
use cslfield::kernel_solution::{closed_moments, initial_trace, mehler_kernel};
use cslfield::numerics::integrate as quad;
use cslfield::units_modes::{build_mode_grid, ModelParams};
use cslfield::C64;
use nalgebra::DMatrix;

fn max_diff(a: &TruncatedDM, b: &TruncatedDM) -> f64 {
    let n = a.dim().min(b.dim());
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a.get(i, j) - b.get(i, j)).norm());
        }
    }
    worst
}

#[test]
fn trace_drift_per_unit_time() {
    for (lambda, omega, g1, g2) in [(1.0, 1.0, 0.5, 0.5), (2.0, 1.0, 0.7, 0.2), (0.3, 2.0, 0.0, 0.4)] {
        let t = 5.0;
        let dt = default_dt(omega, lambda);
        let rho0 = TruncatedDM::coherent_pair(g1, g2, 120);
        let tr0 = rho0.trace();
        let out = integrate(&rho0, lambda, omega, &[t], &OracleOptions::new(200, dt)).unwrap();
        let drift = (out[0].trace() - tr0).norm() / t;
        assert!(drift < 1e-9, "λ={lambda} ω={omega}: drift {drift:e}");
        assert!((tr0.re - initial_trace(g1, g2)).abs() < 1e-12);
    }
}

#[test]
fn hermitian_data_stays_hermitian_and_positive() {
    let rho0 = TruncatedDM::coherent_pair(0.6, 0.6, 60);
    let times = [0.5, 2.0, 6.0];
    let out = integrate(&rho0, 1.5, 1.0, &times, &OracleOptions::new(200, 1e-2)).unwrap();
    for dm in &out {
        assert_eq!(dm.hermiticity_defect(), 0.0);
        let n = dm.dim();
        let h = DMatrix::from_fn(n, n, |i, j| nalgebra::Complex::new(dm.get(i, j).re, dm.get(i, j).im));
        let eig = h.symmetric_eigenvalues();
        let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-8, "eigenvalue {min}");
        assert!((eig.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn partial_matrices_are_not_hermitian() {
    let rho0 = TruncatedDM::coherent_pair(0.7, 0.2, 40);
    assert!(rho0.hermiticity_defect() > 0.1);
    let out = integrate(&rho0, 1.0, 1.0, &[1.0], &OracleOptions::new(120, 1e-2)).unwrap();
    let exact = closed_moments(1.0, 1.0, 1.0, 0.7, 0.2).unwrap();
    assert!(moments(&out[0]).max_abs_diff(&exact) < 1e-7);
}

#[test]
fn halving_dt_shows_fourth_order() {
    let n = 30;
    let (lambda, omega) = (0.2, 1.0);
    let rho0 = TruncatedDM::coherent_pair(0.8, 0.5, n);
    let run = |dt: f64| integrate(&rho0, lambda, omega, &[1.0], &OracleOptions::fixed(n, dt)).unwrap().remove(0);
    let reference = run(0.04 / 16.0);
    let errs: Vec<f64> = [0.04, 0.02, 0.01].iter().map(|&dt| max_diff(&run(dt), &reference)).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 3.8, "observed order {order:.3} from {errs:?}");
    }
}

#[test]
fn dt_is_capped_by_stability() {
    // A requested step far beyond the stability limit still integrates.
    let rho0 = TruncatedDM::vacuum(10);
    let out = integrate(&rho0, 1.0, 1.0, &[3.0], &OracleOptions::new(150, 1.0)).unwrap();
    assert!((moments(&out[0]).n_mean.re - 1.5).abs() < 1e-8);
}

#[test]
fn x_and_p_problems_share_the_integrator() {
    let x = integrate_lindblad_x(0.3, 0.1, 1.0, 1.0, 2.0, 120, 1e-2).unwrap();
    let p = integrate_lindblad_p(0.3, 0.1, 1.0, 1.0, 2.0, 120, 1e-2).unwrap();
    assert_eq!(x.quadrature, Quadrature::Position);
    assert_eq!(p.quadrature, Quadrature::Momentum);
    assert_eq!(x.as_slice(), p.as_slice());
}

#[test]
fn wavefunctions_are_orthonormal() {
    for m in 0..=20 {
        for n in m..=20 {
            let v = quad(|x| position_wavefunction(m, x) * position_wavefunction(n, x), -10.0, 10.0, 1e-13);
            let want = if m == n { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-8, "({m},{n}): {v}");
        }
    }
}

#[test]
fn mehler_partial_sums_converge() {
    let s: f64 = 0.5;
    let lattice: Vec<f64> = (0..21).map(|i| -2.0 + 0.2 * i as f64).collect();
    let mut previous = f64::INFINITY;
    for n_max in [10, 20, 40, 80] {
        let mut sup: f64 = 0.0;
        for &x in &lattice {
            let px = position_wavefunctions(n_max, x);
            for &xp in &lattice {
                let pxp = position_wavefunctions(n_max, xp);
                let sum: f64 = (0..=n_max).map(|n| s.powi(n as i32) * px[n] * pxp[n]).sum();
                sup = sup.max((sum - mehler_kernel(x, xp, s).unwrap()).abs());
            }
        }
        assert!(sup < previous, "n_max={n_max}: {sup} not below {previous}");
        previous = sup;
    }
    assert!(previous < 1e-8, "{previous}");
}

#[test]
fn oracle_trace_by_quadrature() {
    let out = integrate_lindblad_x(0.5, 0.1, 1.0, 1.0, 4.0 * PI, 400, 1e-2).unwrap();
    let tr = quad(|x| dm_position_element(&out, x, x).re, -20.0, 20.0, 1e-10);
    assert!((tr - initial_trace(0.5, 0.1)).abs() < 1e-6);
}

fn oracle_setup(n: f64, d: f64) -> (ClumpProfile, ClumpProfile, cslfield::units_modes::ModeGrid) {
    // dk·σ = 0.5 resolves χ̃; L - d ≫ σ keeps the periodic images apart.
    let sigma = 1.0;
    let params = ModelParams::new(1.0, 1.0, 4.0 * PI, 3.0).unwrap();
    let grid = build_mode_grid(&params).unwrap();
    (ClumpProfile::new(n, sigma, -d / 2.0).unwrap(), ClumpProfile::new(n, sigma, d / 2.0).unwrap(), grid)
}

#[test]
fn clump_overlap_matches_mode_product() {
    for n in [0.5, 1.0, 2.0, 4.0] {
        for d in [0.0, 0.4, 1.0] {
            let (a, b, grid) = oracle_setup(n, d);
            let oracle = coherent_overlap_oracle(&a, &b, &grid, 60);
            let closed = clump_overlap(&a, &b).unwrap().value;
            assert!((oracle - closed).abs() < 1e-6, "N={n} d={d}: {oracle} vs {closed}");
        }
    }
    let (a, _, grid) = oracle_setup(3.0, 0.0);
    assert!((coherent_overlap_oracle(&a, &a, &grid, 60) - 1.0).abs() < 1e-12);
}

#[test]
fn clump_overlap_truncation_converges_monotonically() {
    let (a, b, grid) = oracle_setup(4.0, 1.0);
    let closed = clump_overlap(&a, &b).unwrap().value;
    let errs: Vec<f64> =
        [1, 2, 4, 8, 16].iter().map(|&n| (coherent_overlap_oracle(&a, &b, &grid, n) - closed).abs()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn clump_overlap_example_n10() {
    // e^{-N(1 - e^{-d²/8σ²})} with d²/8σ² = 2.
    let a = ClumpProfile::new(10.0, 1.0, -2.0).unwrap();
    let b = ClumpProfile::new(10.0, 1.0, 2.0).unwrap();
    let want = (-10.0 * (1.0 - (-2.0f64).exp())).exp();
    assert!((clump_overlap(&a, &b).unwrap().value - want).abs() < 1e-15);
}

#[test]
fn eigenstate_expectation_tracks_eigenvalue() {
    let params = ModelParams::new(1.0, 1.0, 2.0 * PI, 4.0).unwrap();
    for f in [C64::new(0.3, 0.1), C64::new(-0.2, 0.05), C64::new(0.0, 0.0)] {
        let r = eigenstate_residual(f, 0.5, &params, 30).unwrap();
        assert!((r.field_expectation - r.eigenvalue).abs() <= r.residual + 1e-12, "{r:?}");
    }
}
