//! Single-mode oscillator under position-collapse: the Gaussian ansatz
//!
//! ```text
//! ρ(t) = C e^{R a†²} e^{β₁ a†} Σₙ Sⁿ|n⟩⟨n| e^{β₂* a} e^{R* a²}
//! ```
//!
//! for `dρ/dt = -iω[a†a, ρ] - (λ/4ω)[a+a†, [a+a†, ρ]]` started from the
//! (generally non-Hermitian) piece `|γ₁⟩⟨γ₂|` of a density matrix, with
//! `a = X + iP/2`.
//!
//! Position-space kernels are accumulated as exponents and exponentiated once.

use std::f64::consts::PI;

use crate::error::{check, invalid, Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Keeps the `sin ωt` terms; `C` fixed by trace conservation.
    Exact,
    /// `sin ωt` terms dropped, `R = 0`, `C` in closed form.
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelCoeffs {
    pub s: f64,
    /// `1 - S`, computed without subtraction.
    pub one_minus_s: f64,
    pub r: C64,
    pub beta1: C64,
    pub beta2_star: C64,
    /// Normalization. Real in the approximate regime; between multiples of the
    /// period the exact-regime value picks up a phase.
    pub c: C64,
    pub t: f64,
    pub omega: f64,
    pub lambda: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub regime: Regime,
    /// `e^{±iωt}` replaced by 1 (evaluation at multiples of the period).
    pub stroboscopic: bool,
}

/// Trace-weighted moments `Tr(O ρ)` (not divided by `Tr ρ`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub trace: C64,
    pub a_mean: C64,
    pub adag_mean: C64,
    pub n_mean: C64,
    pub a2_mean: C64,
    pub adag2_mean: C64,
}

impl MomentSet {
    pub fn max_abs_diff(&self, other: &MomentSet) -> f64 {
        [
            self.trace - other.trace,
            self.a_mean - other.a_mean,
            self.adag_mean - other.adag_mean,
            self.n_mean - other.n_mean,
            self.a2_mean - other.a2_mean,
            self.adag2_mean - other.adag2_mean,
        ]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
    }
}

/// `Tr ρ(0) = e^{-(γ₁-γ₂)²/2}`, conserved by the evolution.
pub fn initial_trace(gamma1: f64, gamma2: f64) -> f64 {
    (-(gamma1 - gamma2).powi(2) / 2.0).exp()
}

fn check_inputs(t: f64, omega: f64, lambda: f64, gamma1: f64, gamma2: f64) -> Result<()> {
    check("t", t, t >= 0.0, "non-negative")?;
    check("omega", omega, omega > 0.0, "positive")?;
    check("lambda", lambda, lambda >= 0.0, "non-negative")?;
    check("gamma1", gamma1, true, "finite")?;
    check("gamma2", gamma2, true, "finite")
}

pub fn coeffs_exact(t: f64, omega: f64, lambda: f64, gamma1: f64, gamma2: f64) -> Result<KernelCoeffs> {
    check_inputs(t, omega, lambda, gamma1, gamma2)?;
    let alpha = lambda * t / (2.0 * omega);
    let (sin, cos) = (omega * t).sin_cos();
    let u = lambda * sin / (2.0 * omega * omega);
    let ap1 = alpha + 1.0;
    let den = ap1 * ap1 - u * u;
    // |sin ωt| ≤ ωt makes u ≤ α, so this cannot trigger for valid inputs; it
    // guards against overflow in the squares.
    if !(den > 0.0 && den.is_finite()) {
        return Err(Error::Regime(format!(
            "kernel denominator (λt/2ω+1)² - (λ sin ωt/2ω²)² = {den:e} is not positive"
        )));
    }
    let phase = C64::new(cos, -sin);
    let one_minus_s = ap1 / den;
    let s = 1.0 - one_minus_s;
    let r = phase * (-0.5 * u / den);
    let beta1 = (phase * (ap1 * gamma1) + u * gamma2) / den;
    let beta2_star = (phase.conj() * (ap1 * gamma2) + u * gamma1) / den;

    let log_f = log_ansatz_trace(one_minus_s, r, beta1, beta2_star)?;
    let c = (C64::new(-(gamma1 - gamma2).powi(2) / 2.0, 0.0) - log_f).exp();
    Ok(KernelCoeffs {
        s,
        one_minus_s,
        r,
        beta1,
        beta2_star,
        c,
        t,
        omega,
        lambda,
        gamma1,
        gamma2,
        regime: Regime::Exact,
        stroboscopic: false,
    })
}

/// `ln Tr[e^{R a†²} e^{β₁ a†} Σ Sⁿ|n⟩⟨n| e^{β₂* a} e^{R* a²}]`.
///
/// In the Bargmann representation the trace is a Gaussian integral over the
/// plane, giving `exp(¼ bᵀM⁻¹b)/√det M` with
/// `M = [[1-S-2Re R, -2Im R], [-2Im R, 1-S+2Re R]]` and
/// `b = (β₁+β₂*, i(β₂*-β₁))`. Requires `1 - S > 2|R|`.
pub fn log_ansatz_trace(one_minus_s: f64, r: C64, beta1: C64, beta2_star: C64) -> Result<C64> {
    let (r1, r2) = (r.re, r.im);
    let m11 = one_minus_s - 2.0 * r1;
    let m22 = one_minus_s + 2.0 * r1;
    let m12 = -2.0 * r2;
    let det = m11 * m22 - m12 * m12;
    if !(m11 > 0.0 && det > 0.0) {
        return Err(Error::Regime(format!("ansatz trace diverges: 1-S = {one_minus_s:e}, |R| = {:e}", r.norm())));
    }
    let b0 = beta1 + beta2_star;
    let b1 = C64::i() * (beta2_star - beta1);
    // bᵀ M⁻¹ b with M⁻¹ = [[m22, -m12], [-m12, m11]] / det
    let quad = (b0 * b0 * m22 - 2.0 * b0 * b1 * m12 + b1 * b1 * m11) / det;
    Ok(quad / 4.0 - 0.5 * det.ln())
}

pub fn coeffs_approx(
    t: f64,
    omega: f64,
    lambda: f64,
    gamma1: f64,
    gamma2: f64,
    stroboscopic: bool,
) -> Result<KernelCoeffs> {
    check_inputs(t, omega, lambda, gamma1, gamma2)?;
    let alpha = lambda * t / (2.0 * omega);
    let one_minus_s = 1.0 / (1.0 + alpha);
    let s = alpha / (1.0 + alpha);
    let phase = if stroboscopic { C64::new(1.0, 0.0) } else { C64::from_polar(1.0, -omega * t) };
    let c = one_minus_s * (s * gamma1 * gamma2 - 0.5 * (gamma1 * gamma1 + gamma2 * gamma2)).exp();
    Ok(KernelCoeffs {
        s,
        one_minus_s,
        r: C64::new(0.0, 0.0),
        beta1: phase * (one_minus_s * gamma1),
        beta2_star: phase.conj() * (one_minus_s * gamma2),
        c: C64::new(c, 0.0),
        t,
        omega,
        lambda,
        gamma1,
        gamma2,
        regime: Regime::Approx,
        stroboscopic,
    })
}

impl KernelCoeffs {
    pub fn alpha(&self) -> f64 {
        self.lambda * self.t / (2.0 * self.omega)
    }

    /// `Tr ρ(t)` implied by the coefficients; equals [`initial_trace`] when
    /// the normalization is consistent.
    pub fn trace(&self) -> Result<C64> {
        Ok(self.c * log_ansatz_trace(self.one_minus_s, self.r, self.beta1, self.beta2_star)?.exp())
    }

    /// The sin-dropping approximation is advertised for `t ≳ 100` periods.
    pub fn approx_advisory(&self) -> Option<String> {
        let periods = self.t * self.omega / (2.0 * PI);
        (self.regime == Regime::Approx && periods < 100.0)
            .then(|| format!("approximate kernel used at t = {periods:.3} periods (< 100)"))
    }

    fn gaussian_ready(&self) -> Result<()> {
        if self.regime != Regime::Approx || !self.stroboscopic {
            return Err(Error::Regime(
                "position kernel needs approximate-regime coefficients at a multiple of the period".into(),
            ));
        }
        if !(self.s < 1.0 && self.one_minus_s > 0.0) {
            return Err(invalid("S", format!("must be < 1, got {}", self.s)));
        }
        Ok(())
    }
}

fn log_gaussian_kernel(x: f64, xp: f64, s: f64, oms: f64, g1: f64, g2: f64) -> f64 {
    let ops = 1.0 + s;
    let a = (g1 - s * g2) / oms;
    let b = (g2 - s * g1) / oms;
    let d = x - xp;
    0.5 * (2.0 * oms / (PI * ops)).ln()
        - 2.0 * s * d * d / (oms * ops)
        - (oms / ops) * ((x - a).powi(2) + (xp - b).powi(2))
        + s * (g1 - g2).powi(2) / oms
}

/// `⟨X|ρ(t)|X′⟩` at a multiple of the period.
pub fn x_matrix_element(x: f64, xp: f64, coeffs: &KernelCoeffs) -> Result<f64> {
    Ok(log_x_matrix_element(x, xp, coeffs)?.exp())
}

pub fn log_x_matrix_element(x: f64, xp: f64, coeffs: &KernelCoeffs) -> Result<f64> {
    coeffs.gaussian_ready()?;
    Ok(log_gaussian_kernel(x, xp, coeffs.s, coeffs.one_minus_s, coeffs.gamma1, coeffs.gamma2))
}

/// `⟨p|ρ(t)|p′⟩` for the relative-momentum oscillator, whose equation is the
/// position problem with `(X, P) → (p, x)`; `coeffs_prime` carry the primed
/// displacements.
pub fn p_matrix_element(p: f64, pp: f64, coeffs_prime: &KernelCoeffs) -> Result<f64> {
    x_matrix_element(p, pp, coeffs_prime)
}

pub fn short_time_element(x: f64, xp: f64, t: f64, omega: f64, lambda: f64, gamma1: f64, gamma2: f64) -> f64 {
    let d = x - xp;
    ((2.0 / PI).ln() / 2.0 - lambda * t / omega * d * d - (x - gamma1).powi(2) - (xp - gamma2).powi(2)).exp()
}

pub fn long_time_element(x: f64, xp: f64, t: f64, omega: f64, lambda: f64, gamma1: f64, gamma2: f64) -> Result<f64> {
    let lt = lambda * t;
    check("lambda*t", lt, lt > 0.0, "positive for the long-time form")?;
    let d = x - xp;
    let g = gamma1 - gamma2;
    Ok((0.5 * (2.0 * omega / (PI * lt)).ln() - lt / (2.0 * omega) * d * d + d * g
        - omega / lt * (x * x + xp * xp)
        - g * g / 2.0)
        .exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thermal {
    /// `k_B T`.
    pub temperature: f64,
    pub mean_n: f64,
}

/// Reads `S = e^{-ω/k_BT}` as a Boltzmann factor.
pub fn thermal_map(s: f64, omega: f64) -> Result<Thermal> {
    check("S", s, s > 0.0 && s < 1.0, "in (0, 1)")?;
    thermal_from_parts(s, 1.0 - s, omega)
}

/// [`thermal_map`] using the stored `1 - S`, so that `mean_n = λt/2ω` holds to
/// rounding for approximate-regime coefficients.
pub fn thermal_map_coeffs(coeffs: &KernelCoeffs) -> Result<Thermal> {
    check("S", coeffs.s, coeffs.s > 0.0 && coeffs.s < 1.0, "in (0, 1)")?;
    thermal_from_parts(coeffs.s, coeffs.one_minus_s, coeffs.omega)
}

fn thermal_from_parts(s: f64, one_minus_s: f64, omega: f64) -> Result<Thermal> {
    check("omega", omega, omega > 0.0, "positive")?;
    // ln(1/S) = -ln(1 - (1-S)) keeps precision as S → 1.
    let ln_inv_s = -(-one_minus_s).ln_1p();
    Ok(Thermal { temperature: omega / ln_inv_s, mean_n: s / one_minus_s })
}

/// `Σₙ Sⁿ ψₙ(X) ψₙ(X′)` in closed form.
pub fn mehler_kernel(x: f64, xp: f64, s: f64) -> Result<f64> {
    check("S", s, (0.0..1.0).contains(&s), "in [0, 1)")?;
    let (sum, dif) = (x + xp, x - xp);
    Ok((0.5 * (2.0 / (PI * (1.0 - s * s))).ln()
        - (1.0 - s) / (2.0 * (1.0 + s)) * sum * sum
        - (1.0 + s) / (2.0 * (1.0 - s)) * dif * dif)
        .exp())
}

pub fn closed_moments(t: f64, omega: f64, lambda: f64, gamma1: f64, gamma2: f64) -> Result<MomentSet> {
    check_inputs(t, omega, lambda, gamma1, gamma2)?;
    let tr = initial_trace(gamma1, gamma2);
    let e1 = C64::from_polar(1.0, -omega * t);
    let e2 = C64::from_polar(1.0, -2.0 * omega * t);
    let squeeze = lambda / (2.0 * omega) * (omega * t).sin() / omega;
    Ok(MomentSet {
        trace: C64::new(tr, 0.0),
        a_mean: e1 * (gamma1 * tr),
        adag_mean: e1.conj() * (gamma2 * tr),
        n_mean: C64::new((lambda * t / (2.0 * omega) + gamma1 * gamma2) * tr, 0.0),
        a2_mean: (-squeeze * e1 + gamma1 * gamma1 * e2) * tr,
        adag2_mean: (-squeeze * e1.conj() + gamma2 * gamma2 * e2.conj()) * tr,
    })
}
