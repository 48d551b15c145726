//! Gaussian clumps: coherent states holding about `N` particles of width `σ`
//! around `ℓ`, their profiles in x and k, and their mutual overlaps.

use std::f64::consts::PI;

use crate::error::{check, invalid, Result};
use crate::C64;

/// Overlaps below `e^-700` are reported as zero with [`Overlap::underflow`].
pub const OVERLAP_LOG_FLOOR: f64 = -700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClumpProfile {
    pub n_particles: f64,
    pub sigma: f64,
    pub center: f64,
}

impl ClumpProfile {
    pub fn new(n_particles: f64, sigma: f64, center: f64) -> Result<Self> {
        check("n_particles", n_particles, n_particles > 0.0, "positive")?;
        check("sigma", sigma, sigma > 0.0, "positive")?;
        check("center", center, true, "finite")?;
        Ok(ClumpProfile { n_particles, sigma, center })
    }

    /// The model assumes clumps much wider than the Compton length; this is
    /// advisory only.
    pub fn width_warning(&self, m: f64) -> Option<String> {
        let sm = self.sigma * m;
        (sm <= 1.0).then(|| format!("sigma*m = {sm:.3} is not >> 1; clumps should be wider than 1/m"))
    }
}

/// Two clumps of the same shape at different centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClumpPair {
    pub left: ClumpProfile,
    pub right: ClumpProfile,
}

impl ClumpPair {
    pub fn new(left: ClumpProfile, right: ClumpProfile) -> Result<Self> {
        same_shape(&left, &right)?;
        Ok(ClumpPair { left, right })
    }

    /// Clump `s` ∈ {0, 1}.
    pub fn get(&self, s: usize) -> &ClumpProfile {
        match s {
            0 => &self.left,
            1 => &self.right,
            _ => panic!("clump index {s} out of range"),
        }
    }

    pub fn n_particles(&self) -> f64 {
        self.left.n_particles
    }

    pub fn sigma(&self) -> f64 {
        self.left.sigma
    }

    pub fn separation(&self) -> f64 {
        (self.left.center - self.right.center).abs()
    }
}

fn same_shape(a: &ClumpProfile, b: &ClumpProfile) -> Result<()> {
    if a.n_particles != b.n_particles {
        return Err(invalid("n_particles", format!("clumps must share N ({} vs {})", a.n_particles, b.n_particles)));
    }
    if a.sigma != b.sigma {
        return Err(invalid("sigma", format!("clumps must share sigma ({} vs {})", a.sigma, b.sigma)));
    }
    Ok(())
}

/// `χ(x) = N^{1/2} (2πσ²)^{-1/4} e^{-(x-ℓ)²/4σ²}`.
pub fn chi_position(x: f64, p: &ClumpProfile) -> f64 {
    let s2 = p.sigma * p.sigma;
    let u = x - p.center;
    p.n_particles.sqrt() * (2.0 * PI * s2).powf(-0.25) * (-u * u / (4.0 * s2)).exp()
}

/// `χ̃(k) = N^{1/2} (2σ²/π)^{1/4} e^{-k²σ²} e^{-ikℓ}`.
pub fn chi_momentum(k: f64, p: &ClumpProfile) -> C64 {
    let s2 = p.sigma * p.sigma;
    let modulus = p.n_particles.sqrt() * (2.0 * s2 / PI).powf(0.25) * (-k * k * s2).exp();
    C64::from_polar(modulus, -k * p.center)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    pub value: f64,
    /// Set when the true overlap is below `e^-700` and `value` was clamped to 0.
    pub underflow: bool,
}

/// `⟨ℓ₁|ℓ₂⟩ = exp(-N[1 - e^{-(ℓ₁-ℓ₂)²/8σ²}])`.
pub fn clump_overlap(a: &ClumpProfile, b: &ClumpProfile) -> Result<Overlap> {
    let log = log_clump_overlap(a, b)?;
    if log < OVERLAP_LOG_FLOOR {
        Ok(Overlap { value: 0.0, underflow: true })
    } else {
        Ok(Overlap { value: log.exp(), underflow: false })
    }
}

pub fn log_clump_overlap(a: &ClumpProfile, b: &ClumpProfile) -> Result<f64> {
    same_shape(a, b)?;
    let d = a.center - b.center;
    Ok(a.n_particles * (-d * d / (8.0 * a.sigma * a.sigma)).exp_m1())
}
