//! Model parameters, the relativistic dispersion, the k > 0 mode grid and
//! stroboscopic sampling times.

use std::f64::consts::PI;

use crate::error::{check, invalid, Result};

/// Physical constants of the model plus the box/cutoff that discretize it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub m: f64,
    pub lambda: f64,
    pub box_length: f64,
    pub k_max: f64,
}

impl ModelParams {
    pub fn new(m: f64, lambda: f64, box_length: f64, k_max: f64) -> Result<Self> {
        let p = ModelParams { m, lambda, box_length, k_max };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check("m", self.m, self.m > 0.0, "positive")?;
        check("lambda", self.lambda, self.lambda >= 0.0, "non-negative")?;
        check("box_length", self.box_length, self.box_length > 0.0, "positive")?;
        check("k_max", self.k_max, self.k_max > 0.0, "positive")?;
        Ok(())
    }

    /// `k_max > m`; a cutoff below the mass scale is allowed but not meaningful
    /// for the ω ≈ m approximations.
    pub fn cutoff_above_mass(&self) -> bool {
        self.k_max > self.m
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    pub fn omega(&self, k: f64) -> f64 {
        (self.m * self.m + k * k).sqrt()
    }
}

/// Midpoint momentum grid `k_j = (j + ½) dk`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    k_values: Vec<f64>,
    dk: f64,
    k_max: f64,
}

impl ModeGrid {
    pub fn k_values(&self) -> &[f64] {
        &self.k_values
    }

    pub fn dk(&self) -> f64 {
        self.dk
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn len(&self) -> usize {
        self.k_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_values.is_empty()
    }

    /// Box length implied by the spacing.
    pub fn box_length(&self) -> f64 {
        2.0 * PI / self.dk
    }
}

pub fn dispersion(k: f64, m: f64) -> Result<f64> {
    check("m", m, m > 0.0, "positive")?;
    check("k", k, k >= 0.0, "non-negative")?;
    Ok(m.hypot(k))
}

pub fn build_mode_grid(params: &ModelParams) -> Result<ModeGrid> {
    params.validate()?;
    let dk = params.dk();
    // A cutoff sitting exactly on a multiple of dk must not lose a mode to
    // rounding in the division.
    let count = (params.k_max / dk + 1e-9).floor();
    if count < 2.0 {
        return Err(invalid(
            "k_max",
            format!("only {count} mode(s) fit below k_max = {} with dk = {dk}", params.k_max),
        ));
    }
    let k_values = (0..count as usize).map(|j| (j as f64 + 0.5) * dk).collect();
    Ok(ModeGrid { k_values, dk, k_max: params.k_max })
}

pub fn oscillation_period(m: f64) -> Result<f64> {
    check("m", m, m > 0.0, "positive")?;
    Ok(2.0 * PI / m)
}

/// Integer multiples of the period `2π/m`, thinned to at most `max_samples`.
#[derive(Debug, Clone, PartialEq)]
pub struct StroboscopicTimes {
    pub times: Vec<f64>,
    /// The integer `n` of each `n·τ`; exact phases can be taken from these.
    pub multiples: Vec<u64>,
    pub warning: Option<String>,
}

pub fn stroboscopic_times(t_final: f64, m: f64, max_samples: usize) -> Result<StroboscopicTimes> {
    check("t_final", t_final, t_final > 0.0, "positive")?;
    let tau = oscillation_period(m)?;
    if max_samples == 0 {
        return Err(invalid("max_samples", "must be at least 1"));
    }
    let n_total = (t_final / tau * (1.0 + 1e-12)).floor() as u64;
    if n_total == 0 {
        return Ok(StroboscopicTimes {
            times: Vec::new(),
            multiples: Vec::new(),
            warning: Some(format!("t_final = {t_final} is shorter than one period {tau}")),
        });
    }
    let multiples: Vec<u64> = if n_total as usize <= max_samples {
        (1..=n_total).collect()
    } else {
        let s = max_samples as u64;
        // i·n_total/s rounded, in integer arithmetic; strictly increasing since
        // n_total > s.
        (1..=s).map(|i| (2 * i * n_total + s) / (2 * s)).collect()
    };
    let times = multiples.iter().map(|&n| n as f64 * tau).collect();
    Ok(StroboscopicTimes { times, multiples, warning: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispersion_examples() {
        assert_eq!(dispersion(0.0, 1.0).unwrap(), 1.0);
        assert_eq!(dispersion(3.0, 4.0).unwrap(), 5.0);
        assert!((dispersion(1.0, 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(dispersion(1.0, -1.0).is_err());
        assert!(dispersion(-1.0, 1.0).is_err());
        assert!(dispersion(1.0, 0.0).is_err());
    }

    #[test]
    fn dispersion_ultrarelativistic() {
        let m = 1.3;
        let k = 1e3 * m;
        assert!((dispersion(k, m).unwrap() - k).abs() < 1e-6 * m * 1e3);
        assert!(dispersion(k, m).unwrap() - k < 1e-3 * m);
    }

    #[test]
    fn grid_examples() {
        let g = build_mode_grid(&ModelParams::new(1.0, 1.0, 2.0 * PI, 3.25).unwrap()).unwrap();
        assert!((g.dk() - 1.0).abs() < 1e-15);
        assert_eq!(g.k_values(), &[0.5, 1.5, 2.5]);

        let g = build_mode_grid(&ModelParams::new(1.0, 1.0, 4.0 * PI, 1.1).unwrap()).unwrap();
        assert!((g.dk() - 0.5).abs() < 1e-15);
        assert_eq!(g.k_values(), &[0.25, 0.75]);

        let err = build_mode_grid(&ModelParams::new(0.1, 1.0, 2.0 * PI, 0.4).unwrap());
        assert!(err.is_err());
    }

    #[test]
    fn grid_is_uniform_and_below_cutoff() {
        let g = build_mode_grid(&ModelParams::new(1.0, 0.1, 157.3, 40.0).unwrap()).unwrap();
        for w in g.k_values().windows(2) {
            assert!((w[1] - w[0] - g.dk()).abs() < 1e-12 * g.dk());
        }
        assert!(g.k_values().iter().all(|&k| k > 0.0 && k <= 40.0));
    }

    #[test]
    fn params_reject_bad_values() {
        assert!(ModelParams::new(0.0, 1.0, 1.0, 10.0).is_err());
        assert!(ModelParams::new(1.0, -1.0, 1.0, 10.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.0, 10.0).is_err());
        assert!(ModelParams::new(1.0, f64::NAN, 1.0, 10.0).is_err());
        assert!(!ModelParams::new(2.0, 1.0, 1.0, 1.0).unwrap().cutoff_above_mass());
    }

    #[test]
    fn period_examples() {
        assert!((oscillation_period(1.0).unwrap() - 2.0 * PI).abs() < 1e-15);
        assert!((oscillation_period(2.0 * PI).unwrap() - 1.0).abs() < 1e-15);
        assert!(oscillation_period(0.0).is_err());
    }

    #[test]
    fn stroboscopic_examples() {
        let tau = 2.0 * PI;
        let s = stroboscopic_times(10.0 * tau, 1.0, 10).unwrap();
        assert_eq!(s.multiples, (1..=10).collect::<Vec<_>>());
        assert!(s.warning.is_none());

        let s = stroboscopic_times(0.5 * tau, 1.0, 5).unwrap();
        assert!(s.times.is_empty() && s.warning.is_some());

        let s = stroboscopic_times(100.0 * tau, 1.0, 4).unwrap();
        assert_eq!(s.multiples, vec![25, 50, 75, 100]);
        for (t, n) in s.times.iter().zip(&s.multiples) {
            assert!((t - *n as f64 * tau).abs() < 1e-12 * t);
        }
    }

    #[test]
    fn stroboscopic_phases_vanish() {
        for &m in &[1.0, 0.37, 12.5] {
            let s = stroboscopic_times(1e4, m, 50).unwrap();
            assert!(s.times.len() <= 50);
            for w in s.multiples.windows(2) {
                assert!(w[1] > w[0]);
            }
            for &t in &s.times {
                assert!((m * t).sin().abs() < 1e-8, "sin(m t) = {}", (m * t).sin());
            }
        }
    }
}
