//! Density-matrix functionals in the field-eigenstate basis, with and without
//! the free Hamiltonian, and in the basis of the two initial clump states.
//!
//! Prefactors such as `2/π` that belong to the functional measure are left
//! out; only exponents and ratios are meaningful outputs.

use std::f64::consts::{PI, SQRT_2};

use crate::clump_states::{chi_momentum, ClumpPair, ClumpProfile};
use crate::error::{check, invalid, Error, Result};
use crate::numerics::log_sum_exp;
use crate::units_modes::{ModeGrid, ModelParams};
use crate::C64;

/// Where `ω(k)` multiplies a clump amplitude `χ̃(k)` it may be replaced by
/// `m`, since `χ̃` only has weight at non-relativistic `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChiWeight {
    #[default]
    MassShell,
    Exact,
}

/// A real field `f(x)` on a lattice of `2·n_modes` points spanning the box,
/// together with `f̃(k)` on the grid's `k > 0` modes.
///
/// Conventions: `f̃(k) = (2π)^{-1/2} ∫ dx f(x) e^{-ikx}`, and
/// `f(x) = (2/√2π) Σₖ dk Re[f̃(k) e^{ikx}]`. The lattice is
/// `xₙ = -L/2 + n·L/(2J)` for `J` modes, which makes the pair of sums an
/// exact inverse of each other.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldProfile {
    pub x: Vec<f64>,
    pub f_samples: Vec<f64>,
    pub f_tilde: Vec<C64>,
    pub dk: f64,
}

pub fn x_lattice(grid: &ModeGrid) -> Vec<f64> {
    let n = 2 * grid.len();
    let l = grid.box_length();
    (0..n).map(|i| -l / 2.0 + i as f64 * l / n as f64).collect()
}

impl FieldProfile {
    pub fn from_tilde(grid: &ModeGrid, f_tilde: Vec<C64>) -> Result<Self> {
        if f_tilde.len() != grid.len() {
            return Err(invalid("f_tilde", format!("{} values for {} modes", f_tilde.len(), grid.len())));
        }
        let x = x_lattice(grid);
        let scale = 2.0 * grid.dk() / (2.0 * PI).sqrt();
        let f_samples = x
            .iter()
            .map(|&xn| {
                scale
                    * grid
                        .k_values()
                        .iter()
                        .zip(&f_tilde)
                        .map(|(&k, f)| (f * C64::from_polar(1.0, k * xn)).re)
                        .sum::<f64>()
            })
            .collect();
        Ok(FieldProfile { x, f_samples, f_tilde, dk: grid.dk() })
    }

    pub fn from_samples(grid: &ModeGrid, f_samples: Vec<f64>) -> Result<Self> {
        if f_samples.len() != 2 * grid.len() {
            return Err(invalid(
                "f_samples",
                format!("need {} lattice values, got {}", 2 * grid.len(), f_samples.len()),
            ));
        }
        if f_samples.iter().any(|v| !v.is_finite()) {
            return Err(invalid("f_samples", "non-finite value"));
        }
        let x = x_lattice(grid);
        let dx = grid.box_length() / x.len() as f64;
        let scale = dx / (2.0 * PI).sqrt();
        let f_tilde = grid
            .k_values()
            .iter()
            .map(|&k| x.iter().zip(&f_samples).map(|(&xn, &f)| C64::from_polar(f, -k * xn)).sum::<C64>() * scale)
            .collect();
        Ok(FieldProfile { x, f_samples, f_tilde, dk: grid.dk() })
    }

    /// Samples `f` on the lattice; components above the cutoff alias.
    pub fn from_fn(grid: &ModeGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = x_lattice(grid).into_iter().map(f).collect();
        Self::from_samples(grid, samples)
    }

    /// `√(2/m)·χ_s`, the field a clump sources.
    pub fn of_clump(grid: &ModeGrid, clump: &ClumpProfile, m: f64) -> Result<Self> {
        let c = (2.0 / m).sqrt();
        Self::from_tilde(grid, grid.k_values().iter().map(|&k| chi_momentum(k, clump) * c).collect())
    }

    fn check_grid(&self, grid: &ModeGrid) -> Result<()> {
        if self.f_tilde.len() != grid.len() || (self.dk - grid.dk()).abs() > 1e-12 * grid.dk() {
            return Err(invalid("profile", "field profile was built on a different mode grid"));
        }
        Ok(())
    }
}

/// A positive quantity carried as its logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DMElementLog {
    /// May be `-∞` for an exact zero; never NaN.
    pub log_magnitude: f64,
    pub sign: i8,
}

impl DMElementLog {
    pub fn from_log(log_magnitude: f64) -> Result<Self> {
        if log_magnitude.is_nan() || log_magnitude == f64::INFINITY {
            return Err(Error::Regime(format!("element log is {log_magnitude}")));
        }
        Ok(DMElementLog { log_magnitude, sign: 1 })
    }

    pub fn value(&self) -> f64 {
        self.sign as f64 * self.log_magnitude.exp()
    }
}

/// `-λt dk|f̃-f̃′|² - dk ω|f̃-√(2/m)χ̃_s|² - dk ω|f̃′-√(2/m)χ̃_{s′}|²`.
pub fn h0_mode_exponent(f: C64, fp: C64, k: f64, t: f64, chi_s: C64, chi_sp: C64, params: &ModelParams) -> Result<f64> {
    check("t", t, t >= 0.0, "non-negative")?;
    let (dk, w) = (params.dk(), params.omega(k));
    let c = (2.0 / params.m).sqrt();
    Ok(-params.lambda * t * dk * (f - fp).norm_sqr()
        - dk * w * (f - chi_s * c).norm_sqr()
        - dk * w * (fp - chi_sp * c).norm_sqr())
}

fn clump_amplitudes(pair: &ClumpPair, grid: &ModeGrid) -> [Vec<C64>; 2] {
    [0, 1].map(|s| grid.k_values().iter().map(|&k| chi_momentum(k, pair.get(s))).collect())
}

/// `log[½ Σ_{ss′} exp(Σₖ h0_mode_exponent)]`, modes summed in ascending `k`.
pub fn h0_field_element_log(
    f: &FieldProfile,
    fp: &FieldProfile,
    t: f64,
    pair: &ClumpPair,
    grid: &ModeGrid,
    params: &ModelParams,
) -> Result<DMElementLog> {
    f.check_grid(grid)?;
    fp.check_grid(grid)?;
    let chi = clump_amplitudes(pair, grid);
    let mut terms = Vec::with_capacity(4);
    for s in 0..2 {
        for sp in 0..2 {
            let mut sum = 0.0;
            for (idx, &k) in grid.k_values().iter().enumerate() {
                sum += h0_mode_exponent(f.f_tilde[idx], fp.f_tilde[idx], k, t, chi[s][idx], chi[sp][idx], params)?;
            }
            terms.push(sum);
        }
    }
    DMElementLog::from_log(log_sum_exp(&terms) - 2f64.ln())
}

/// The `(f̃₀, f̃₀′)` maximizing the per-mode exponent.
pub fn h0_maximizer(k: f64, t: f64, chi_s: C64, chi_sp: C64, params: &ModelParams) -> Result<(C64, C64)> {
    check("t", t, t >= 0.0, "non-negative")?;
    let w = params.omega(k);
    let lt = params.lambda * t;
    let c = (2.0 / params.m).sqrt() / (2.0 * lt + w);
    let both = (chi_s + chi_sp) * lt;
    Ok(((both + chi_s * w) * c, (both + chi_sp * w) * c))
}

/// Maximum of the per-mode exponent per unit `dk`:
/// `-(2λtω)/(m(2λt+ω))·|χ̃_s-χ̃_{s′}|²`.
pub fn h0_max_exponent(k: f64, t: f64, chi_s: C64, chi_sp: C64, params: &ModelParams) -> Result<f64> {
    check("t", t, t >= 0.0, "non-negative")?;
    let w = params.omega(k);
    let lt = params.lambda * t;
    Ok(-(2.0 * lt * w) / (params.m * (2.0 * lt + w)) * (chi_s - chi_sp).norm_sqr())
}

/// `t → ∞` value of the maximized `s ≠ s′` exponent summed over modes,
/// `-Σₖ dk (ω/m)|χ̃₁-χ̃₂|²`; tends to the clump overlap's log as `σm` grows.
pub fn h0_max_limit_log(pair: &ClumpPair, grid: &ModeGrid, params: &ModelParams) -> f64 {
    grid.k_values()
        .iter()
        .map(|&k| {
            let d = chi_momentum(k, &pair.left) - chi_momentum(k, &pair.right);
            -grid.dk() * params.omega(k) / params.m * d.norm_sqr()
        })
        .sum()
}

/// `∫∫ dx dx′ e^{-α(x-x′)²} e^{-(x-A)²} e^{-(x-B)²} e^{-(x′-C)²} e^{-(x′-D)²}`.
pub fn gaussian_pair_integral(alpha: f64, a: f64, b: f64, c: f64, d: f64) -> Result<f64> {
    check("alpha", alpha, alpha >= 0.0, "non-negative")?;
    for (name, v) in [("A", a), ("B", b), ("C", c), ("D", d)] {
        check(name, v, true, "finite")?;
    }
    let s = a + b - c - d;
    Ok(PI / (2.0 * (alpha + 1.0).sqrt())
        * (-(a - b).powi(2) / 2.0 - (c - d).powi(2) / 2.0 - alpha * s * s / (4.0 * (alpha + 1.0))).exp())
}

/// Log of one mode's `⟨ℓᵢ|ρ_{ss′}|ℓⱼ⟩`, split into the prefactor
/// `-ln(λt/ω+1)` (which builds K) and the Gaussian exponent.
pub fn clump_basis_mode_log(
    idx: [usize; 4],
    k: f64,
    t: f64,
    pair: &ClumpPair,
    params: &ModelParams,
    weight: ChiWeight,
) -> Result<(f64, f64)> {
    check("t", t, t >= 0.0, "non-negative")?;
    let [i, j, s, sp] = idx.map(|n| chi_momentum(k, pair.get(n)));
    let dk = params.dk();
    let w = params.omega(k);
    let r = params.lambda * t / w;
    let rc = match weight {
        ChiWeight::MassShell => params.lambda * t / params.m,
        ChiWeight::Exact => r,
    };
    let gauss = -rc / (2.0 * (1.0 + rc)) * dk * (i + s - j - sp).norm_sqr()
        - dk * (i - s).norm_sqr()
        - dk * (j - sp).norm_sqr();
    Ok((-r.ln_1p(), gauss))
}

/// One mode's `⟨ℓᵢ|ρ_{ss′}(t)|ℓⱼ⟩`; clump indices are 0 and 1.
pub fn clump_basis_mode_element(
    idx: [usize; 4],
    k: f64,
    t: f64,
    pair: &ClumpPair,
    params: &ModelParams,
    weight: ChiWeight,
) -> Result<f64> {
    let (a, b) = clump_basis_mode_log(idx, k, t, pair, params, weight)?;
    Ok((a + b).exp())
}

/// The 2×2 density matrix in the basis of the initial clump states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClumpBasisDM {
    /// `⟨ℓᵢ|ρ|ℓⱼ⟩`, including K.
    pub elements: [[f64; 2]; 2],
    /// `⟨ℓᵢ|ρ|ℓⱼ⟩ / K`; survives when K underflows.
    pub reduced: [[f64; 2]; 2],
    pub k_factor: f64,
    pub log_k_factor: f64,
}

impl ClumpBasisDM {
    /// Off-diagonal over diagonal.
    pub fn coherence_ratio(&self) -> f64 {
        self.reduced[0][1] / self.reduced[0][0]
    }

    fn from_reduced(reduced: [[f64; 2]; 2], log_k: f64) -> Self {
        let k = log_k.exp();
        ClumpBasisDM { elements: reduced.map(|row| row.map(|v| v * k)), reduced, k_factor: k, log_k_factor: log_k }
    }
}

/// `s̄ = (λt/m)/(λt/m + 1)`.
pub fn s_bar(t: f64, params: &ModelParams) -> f64 {
    let r = params.lambda * t / params.m;
    r / (r + 1.0)
}

/// Closed form for widely separated clumps, keeping the `e^{-N}` terms.
pub fn clump_dm(t: f64, pair: &ClumpPair, grid: &ModeGrid, params: &ModelParams) -> Result<ClumpBasisDM> {
    check("t", t, t >= 0.0, "non-negative")?;
    let n = pair.n_particles();
    let sb = s_bar(t, params);
    let cross = 2.0 * (-n * (1.0 + sb / 2.0)).exp();
    let far = (-2.0 * n).exp();
    let diag = 0.5 * (1.0 + far + cross);
    let off = 0.5 * ((-2.0 * n * sb).exp() + far + cross);
    Ok(ClumpBasisDM::from_reduced([[diag, off], [off, diag]], log_k_factor(t, grid, params)?))
}

/// The same matrix assembled mode by mode from the per-mode elements, with
/// the four `(s, s′)` branches combined in log space.
pub fn clump_dm_mode_product(
    t: f64,
    pair: &ClumpPair,
    grid: &ModeGrid,
    params: &ModelParams,
    weight: ChiWeight,
) -> Result<ClumpBasisDM> {
    let mut reduced = [[0.0; 2]; 2];
    for (i, row) in reduced.iter_mut().enumerate() {
        for (j, out) in row.iter_mut().enumerate() {
            let mut terms = Vec::with_capacity(4);
            for s in 0..2 {
                for sp in 0..2 {
                    terms.push(clump_branch_exponent([i, j, s, sp], t, pair, grid, params, weight)?);
                }
            }
            *out = (log_sum_exp(&terms) - 2f64.ln()).exp();
        }
    }
    Ok(ClumpBasisDM::from_reduced(reduced, log_k_factor(t, grid, params)?))
}

/// `Σₖ` of the Gaussian exponents of `⟨ℓᵢ|ρ_{ss′}|ℓⱼ⟩`, without K. For
/// `(i, j, s, s′) = (0, 1, 0, 1)` this is the decaying `-2N s̄` branch.
pub fn clump_branch_exponent(
    idx: [usize; 4],
    t: f64,
    pair: &ClumpPair,
    grid: &ModeGrid,
    params: &ModelParams,
    weight: ChiWeight,
) -> Result<f64> {
    let mut sum = 0.0;
    for &k in grid.k_values() {
        sum += clump_basis_mode_log(idx, k, t, pair, params, weight)?.1;
    }
    Ok(sum)
}

/// `ln K = -Σₖ ln(λt/ω(k) + 1)`.
pub fn log_k_factor(t: f64, grid: &ModeGrid, params: &ModelParams) -> Result<f64> {
    check("t", t, t >= 0.0, "non-negative")?;
    let lt = params.lambda * t;
    Ok(-grid.k_values().iter().map(|&k| (lt / params.omega(k)).ln_1p()).sum::<f64>())
}

/// `K = exp(-(L/2π) Σₖ dk ln(λt/ω+1)) = Πₖ (λt/ω+1)^{-1}`. Only meaningful
/// together with the cutoff: it falls as `k_max` grows.
pub fn k_factor(t: f64, grid: &ModeGrid, params: &ModelParams) -> Result<f64> {
    Ok(log_k_factor(t, grid, params)?.exp())
}

/// Per-mode exponent with the free Hamiltonian, at a multiple of the period.
/// Returns `(log_gauss, log_prefactor)`; the prefactor
/// `ln(2(1-S)/π(1+S))` belongs to the measure.
#[allow(clippy::too_many_arguments)]
pub fn h_mode_exponent(
    f: C64,
    fp: C64,
    k: f64,
    t: f64,
    chi_s: C64,
    chi_sp: C64,
    params: &ModelParams,
    weight: ChiWeight,
) -> Result<(f64, f64)> {
    check("t", t, t >= 0.0, "non-negative")?;
    let (dk, w, m) = (params.dk(), params.omega(k), params.m);
    let alpha = params.lambda * t / (2.0 * w);
    // S and 1 - S from α directly so that neither loses digits.
    let (s, oms) = (alpha / (1.0 + alpha), 1.0 / (1.0 + alpha));
    let ops = 1.0 + s;
    let prefactor = (2.0 * oms / (PI * ops)).ln();
    let diff = -2.0 * s * dk * w / (oms * ops) * (f - fp).norm_sqr();
    let gauss = match weight {
        ChiWeight::Exact => {
            let c = (2.0 / m).sqrt() / oms;
            let cs = (chi_s - chi_sp * s) * c;
            let csp = (chi_sp - chi_s * s) * c;
            diff - dk * w * oms / ops * ((f - cs).norm_sqr() + (fp - csp).norm_sqr())
                + 2.0 * s / oms * dk * (chi_s - chi_sp).norm_sqr()
        }
        ChiWeight::MassShell => {
            // Terms that contain χ̃ take ω = m and S = S(m); expanding the
            // squares lets the O(λt) pieces cancel analytically.
            let am = params.lambda * t / (2.0 * m);
            let sm = am / (1.0 + am);
            let f_only = -dk * w * oms / ops * (f.norm_sqr() + fp.norm_sqr());
            let cross = 2.0 * dk * (2.0 * m).sqrt() / (1.0 + sm)
                * ((f * (chi_s - chi_sp * sm).conj()).re + (fp * (chi_sp - chi_s * sm).conj()).re);
            let chi_only = dk * (-2.0 * (chi_s.norm_sqr() + chi_sp.norm_sqr()) + 4.0 * sm * (chi_s * chi_sp.conj()).re)
                / (1.0 + sm);
            diff + f_only + cross + chi_only
        }
    };
    Ok((gauss, prefactor))
}

/// `m t` within `tol` of a multiple of `2π`.
pub fn is_stroboscopic(t: f64, m: f64, tol: f64) -> bool {
    let cycles = m * t / (2.0 * PI);
    (cycles - cycles.round()).abs() <= tol * cycles.max(1.0)
}

/// `log[½ Σ_{ss′} exp(Σₖ log_gauss)]`; `t` must be a multiple of `2π/m`.
pub fn h_field_element_log(
    f: &FieldProfile,
    fp: &FieldProfile,
    t: f64,
    pair: &ClumpPair,
    grid: &ModeGrid,
    params: &ModelParams,
    weight: ChiWeight,
) -> Result<DMElementLog> {
    f.check_grid(grid)?;
    fp.check_grid(grid)?;
    if !is_stroboscopic(t, params.m, 1e-9) {
        return Err(Error::Regime(format!("t = {t} is not a multiple of the period 2π/m")));
    }
    let chi = clump_amplitudes(pair, grid);
    let mut terms = Vec::with_capacity(4);
    for s in 0..2 {
        for sp in 0..2 {
            let mut sum = 0.0;
            for (idx, &k) in grid.k_values().iter().enumerate() {
                sum +=
                    h_mode_exponent(f.f_tilde[idx], fp.f_tilde[idx], k, t, chi[s][idx], chi[sp][idx], params, weight)?
                        .0;
            }
            terms.push(sum);
        }
    }
    DMElementLog::from_log(log_sum_exp(&terms) - 2f64.ln())
}

/// Large-`λt` per-mode exponent:
/// `-(λt/2)dk|Δf̃|² + √(2m)dk Re[Δf̃ Δχ̃*] - (dk/λt)ω²(|f̃|²+|f̃′|²) - dk|Δχ̃|²`.
pub fn h_long_time_exponent(
    f: C64,
    fp: C64,
    k: f64,
    t: f64,
    chi_s: C64,
    chi_sp: C64,
    params: &ModelParams,
) -> Result<f64> {
    let lt = params.lambda * t;
    if lt.is_nan() || lt <= 0.0 {
        return Err(invalid("t", "the long-time form needs λt > 0"));
    }
    let (dk, w) = (params.dk(), params.omega(k));
    let (df, dc) = (f - fp, chi_s - chi_sp);
    Ok(-lt / 2.0 * dk * df.norm_sqr() + SQRT_2 * params.m.sqrt() * dk * (df * dc.conj()).re
        - dk / lt * w * w * (f.norm_sqr() + fp.norm_sqr())
        - dk * dc.norm_sqr())
}
