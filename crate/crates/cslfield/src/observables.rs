//! Time-dependent summaries: particle and energy production per mode,
//! decoherence of the clump superposition and the no-particle probability.

use std::f64::consts::PI;

use crate::clump_states::ClumpPair;
use crate::error::{check, invalid, Result};
use crate::field_density::{clump_dm, k_factor};
use crate::units_modes::{ModeGrid, ModelParams};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub label: String,
    pub units: String,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, label: &str, units: &str) -> Result<Self> {
        if times.len() != values.len() {
            return Err(invalid("values", format!("{} times but {} values", times.len(), values.len())));
        }
        check_increasing(&times)?;
        Ok(TimeSeries { times, values, label: label.into(), units: units.into() })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn check_increasing(times: &[f64]) -> Result<()> {
    for &t in times {
        check("time", t, t >= 0.0, "non-negative")?;
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("times", "must be strictly increasing"));
    }
    Ok(())
}

/// `(⟨a†a⟩, ⟨b†b⟩)` at `t`: each grows by `λt/2ω(k)`, so their difference is
/// conserved. In terms of the two collapse oscillators of the mode,
/// `n_a + n_b = n_X + n_p`.
pub fn mode_occupation(t: f64, k: f64, n0_a: f64, n0_b: f64, params: &ModelParams) -> Result<(f64, f64)> {
    check("t", t, t >= 0.0, "non-negative")?;
    check("k", k, k > 0.0, "positive")?;
    check("n0_a", n0_a, n0_a >= 0.0, "non-negative")?;
    check("n0_b", n0_b, n0_b >= 0.0, "non-negative")?;
    let grow = params.lambda * t / (2.0 * params.omega(k));
    Ok((n0_a + grow, n0_b + grow))
}

/// `ω(n_a + n_b) = λt + E₀`, the same for every `k`.
pub fn mode_energy(t: f64, k: f64, e0: f64, params: &ModelParams) -> Result<f64> {
    check("t", t, t >= 0.0, "non-negative")?;
    check("k", k, k > 0.0, "positive")?;
    check("e0", e0, true, "finite")?;
    Ok(params.lambda * t + e0)
}

/// Energy per unit length carried by each mode, indexed by `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyDensity {
    /// `times` holds the mode momenta here.
    pub per_mode: TimeSeries,
    /// Grows like `λt·k_max/2π`: unbounded as the cutoff is removed.
    pub total: f64,
}

/// `(dk/2π)λt + E₀(k)/L` per mode. `e0` is the initial energy of each mode
/// (empty for none).
pub fn energy_density(t: f64, grid: &ModeGrid, e0: &[f64], params: &ModelParams) -> Result<EnergyDensity> {
    check("t", t, t >= 0.0, "non-negative")?;
    if !e0.is_empty() && e0.len() != grid.len() {
        return Err(invalid("e0", format!("{} initial energies for {} modes", e0.len(), grid.len())));
    }
    let l = grid.box_length();
    let rate = grid.dk() / (2.0 * PI) * params.lambda * t;
    let values: Vec<f64> = (0..grid.len()).map(|j| rate + e0.get(j).copied().unwrap_or(0.0) / l).collect();
    let total = values.iter().sum();
    Ok(EnergyDensity {
        per_mode: TimeSeries::new(grid.k_values().to_vec(), values, "energy_density", "energy/length")?,
        total,
    })
}

/// Off-diagonal over diagonal clump-basis element at each time.
pub fn decoherence_curve(times: &[f64], pair: &ClumpPair, grid: &ModeGrid, params: &ModelParams) -> Result<TimeSeries> {
    check_increasing(times)?;
    let values = times
        .iter()
        .map(|&t| clump_dm(t, pair, grid, params).map(|dm| dm.coherence_ratio()))
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::new(times.to_vec(), values, "coherence_ratio", "1")
}

/// `K(t)`, the weight left in the sector with no created particles.
pub fn no_particle_probability(times: &[f64], grid: &ModeGrid, params: &ModelParams) -> Result<TimeSeries> {
    check_increasing(times)?;
    let values = times.iter().map(|&t| k_factor(t, grid, params)).collect::<Result<Vec<_>>>()?;
    TimeSeries::new(times.to_vec(), values, "no_particle_probability", "1")
}
