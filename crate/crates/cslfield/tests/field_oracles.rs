use std::f64::consts::PI;

use cslfield::clump_states::{chi_momentum, clump_overlap, ClumpPair, ClumpProfile};
use cslfield::field_density::{
    clump_dm, clump_dm_mode_product, h0_field_element_log, h0_max_exponent, h0_maximizer, h0_mode_exponent,
    h_field_element_log, k_factor, x_lattice, ChiWeight, FieldProfile,
};
use cslfield::fock_oracle::coherent_overlap_oracle;
use cslfield::units_modes::{build_mode_grid, ModeGrid, ModelParams};
use cslfield::{Error, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn grid(l: f64, k_max: f64) -> (ModelParams, ModeGrid) {
    let p = ModelParams::new(1.0, 0.5, l, k_max).unwrap();
    let g = build_mode_grid(&p).unwrap();
    (p, g)
}

fn random_tilde(rng: &mut StdRng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

#[test]
fn lattice_samples_match_direct_synthesis() {
    let (_, g) = grid(10.0, 8.0);
    let mut rng = StdRng::seed_from_u64(1);
    let ft = random_tilde(&mut rng, g.len());
    let prof = FieldProfile::from_tilde(&g, ft.clone()).unwrap();
    for (&x, &f) in prof.x.iter().zip(&prof.f_samples) {
        let mut sum = 0.0;
        for (j, c) in ft.iter().enumerate() {
            let k = g.k_values()[j];
            sum += c.re * (k * x).cos() - c.im * (k * x).sin();
        }
        assert!((f - 2.0 * g.dk() / (2.0 * PI).sqrt() * sum).abs() < 1e-12);
    }
}

#[test]
fn parseval_on_the_lattice() {
    // ∫ f² dx over the box = 2 dk Σ |f̃|²; the trapezoid rule is exact here.
    let (_, g) = grid(7.0, 12.0);
    let mut rng = StdRng::seed_from_u64(2);
    let prof = FieldProfile::from_tilde(&g, random_tilde(&mut rng, g.len())).unwrap();
    let dx = g.box_length() / prof.x.len() as f64;
    let lhs: f64 = prof.f_samples.iter().map(|f| f * f).sum::<f64>() * dx;
    let rhs: f64 = 2.0 * g.dk() * prof.f_tilde.iter().map(|c| c.norm_sqr()).sum::<f64>();
    assert!((lhs - rhs).abs() < 1e-10 * rhs);
}

#[test]
fn samples_and_tilde_round_trip() {
    let (_, g) = grid(12.0, 6.0);
    let mut rng = StdRng::seed_from_u64(3);
    let ft = random_tilde(&mut rng, g.len());
    let back = FieldProfile::from_samples(&g, FieldProfile::from_tilde(&g, ft.clone()).unwrap().f_samples).unwrap();
    for (a, b) in ft.iter().zip(&back.f_tilde) {
        assert!((a - b).norm() < 1e-12);
    }
    assert_eq!(x_lattice(&g).len(), 2 * g.len());
}

#[test]
fn smooth_profile_transform_matches_analytic() {
    // A centred Gaussian: f̃(k) = σ e^{-k²σ²/2} for f = e^{-x²/2σ²}.
    let (_, g) = grid(40.0, 10.0);
    let sigma = 1.3;
    let prof = FieldProfile::from_fn(&g, |x| (-x * x / (2.0 * sigma * sigma)).exp()).unwrap();
    for (&k, c) in g.k_values().iter().zip(&prof.f_tilde) {
        let want = sigma * (-k * k * sigma * sigma / 2.0).exp();
        assert!((c - C64::new(want, 0.0)).norm() < 1e-10, "k={k}");
    }
}

#[test]
fn maximizer_beats_random_perturbations() {
    let (p, _) = grid(20.0, 5.0);
    let mut rng = StdRng::seed_from_u64(4);
    for _ in 0..30 {
        let k = rng.gen_range(0.1..5.0);
        let t = rng.gen_range(0.0..30.0);
        let cs = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let csp = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let (f0, fp0) = h0_maximizer(k, t, cs, csp, &p).unwrap();
        let best = h0_mode_exponent(f0, fp0, k, t, cs, csp, &p).unwrap();
        assert!((best - p.dk() * h0_max_exponent(k, t, cs, csp, &p).unwrap()).abs() < 1e-12);
        for _ in 0..20 {
            let df = C64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
            let dfp = C64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
            assert!(h0_mode_exponent(f0 + df, fp0 + dfp, k, t, cs, csp, &p).unwrap() < best);
        }
    }
}

#[test]
fn exchange_symmetry() {
    let (p, g) = grid(30.0, 4.0);
    let pair =
        ClumpPair::new(ClumpProfile::new(2.0, 1.5, -3.0).unwrap(), ClumpProfile::new(2.0, 1.5, 4.0).unwrap()).unwrap();
    let mut rng = StdRng::seed_from_u64(5);
    let f = FieldProfile::from_tilde(&g, random_tilde(&mut rng, g.len()).iter().map(|c| c * 0.3).collect()).unwrap();
    let fp = FieldProfile::from_tilde(&g, random_tilde(&mut rng, g.len()).iter().map(|c| c * 0.3).collect()).unwrap();
    let a = h0_field_element_log(&f, &fp, 2.0, &pair, &g, &p).unwrap();
    let b = h0_field_element_log(&fp, &f, 2.0, &pair, &g, &p).unwrap();
    assert!((a.log_magnitude - b.log_magnitude).abs() < 1e-10 * a.log_magnitude.abs());
    let t = 2.0 * PI;
    let a = h_field_element_log(&f, &fp, t, &pair, &g, &p, ChiWeight::Exact).unwrap();
    let b = h_field_element_log(&fp, &f, t, &pair, &g, &p, ChiWeight::Exact).unwrap();
    assert!((a.log_magnitude - b.log_magnitude).abs() < 1e-10 * a.log_magnitude.abs());
}

#[test]
fn full_element_needs_a_multiple_of_the_period() {
    let (p, g) = grid(10.0, 3.0);
    let pair =
        ClumpPair::new(ClumpProfile::new(1.0, 1.0, -1.0).unwrap(), ClumpProfile::new(1.0, 1.0, 1.0).unwrap()).unwrap();
    let f = FieldProfile::from_tilde(&g, vec![C64::new(0.0, 0.0); g.len()]).unwrap();
    let err = h_field_element_log(&f, &f, 1.0, &pair, &g, &p, ChiWeight::MassShell).unwrap_err();
    assert!(matches!(err, Error::Regime(_)));
    assert!(h_field_element_log(&f, &f, 4.0 * PI, &pair, &g, &p, ChiWeight::MassShell).is_ok());
}

#[test]
fn initial_clump_elements_match_fock_overlaps() {
    // dk·σ = 0.5, L - d ≫ σ: the grid sum reproduces the overlap integral.
    let p = ModelParams::new(1.0, 0.5, 4.0 * PI, 4.0).unwrap();
    let g = build_mode_grid(&p).unwrap();
    for (n, d) in [(1.0, 0.8), (3.0, 0.5), (4.0, 1.0)] {
        let pair =
            ClumpPair::new(ClumpProfile::new(n, 1.0, -d / 2.0).unwrap(), ClumpProfile::new(n, 1.0, d / 2.0).unwrap())
                .unwrap();
        let o = coherent_overlap_oracle(&pair.left, &pair.right, &g, 60);
        assert!((o - clump_overlap(&pair.left, &pair.right).unwrap().value).abs() < 1e-6);
        let dm = clump_dm_mode_product(0.0, &pair, &g, &p, ChiWeight::Exact).unwrap();
        // ρ(0) = ½ Σ_{ss′} |ℓ_s⟩⟨ℓ_{s′}|, so every element is ½(1 + O)².
        let want = 0.5 * (1.0 + o) * (1.0 + o);
        for row in dm.elements {
            for v in row {
                assert!((v - want).abs() < 1e-6, "N={n}: {v} vs {want}");
            }
        }
    }
}

#[test]
fn k_factor_is_the_product_over_modes() {
    let (p, g) = grid(25.0, 3.0);
    for t in [0.0, 0.7, 5.0] {
        let direct: f64 = g.k_values().iter().map(|&k| 1.0 / (p.lambda * t / p.omega(k) + 1.0)).product();
        assert!((k_factor(t, &g, &p).unwrap() - direct).abs() < 1e-14);
    }
}

#[test]
fn mass_shell_and_exact_agree_for_slow_clumps() {
    // Wide clumps only populate k ≪ m, where ω ≈ m.
    let p = ModelParams::new(1.0, 0.5, 2000.0, 0.5).unwrap();
    let g = build_mode_grid(&p).unwrap();
    let pair =
        ClumpPair::new(ClumpProfile::new(3.0, 30.0, -300.0).unwrap(), ClumpProfile::new(3.0, 30.0, 300.0).unwrap())
            .unwrap();
    for t in [0.5, 3.0, 40.0] {
        let a = clump_dm_mode_product(t, &pair, &g, &p, ChiWeight::MassShell).unwrap();
        let b = clump_dm_mode_product(t, &pair, &g, &p, ChiWeight::Exact).unwrap();
        assert!((a.coherence_ratio() - b.coherence_ratio()).abs() < 1e-3);
        let closed = clump_dm(t, &pair, &g, &p).unwrap();
        assert!((a.coherence_ratio() - closed.coherence_ratio()).abs() < 1e-9);
    }
    let chi = chi_momentum(g.k_values()[0], &pair.left);
    assert!(chi.norm() > 0.0);
}
