//! The five studies. Each turns a validated scenario into a table (or, for
//! the oracle check, a report) without touching the filesystem.

use cslfield::clump_states::clump_overlap;
use cslfield::field_density::{clump_dm, h0_field_element_log, h_field_element_log, ChiWeight, FieldProfile};
use cslfield::fock_oracle::{
    coherent_overlap_oracle, dm_position_element, integrate, moments, suggested_n_max, OracleOptions, TruncatedDM,
};
use cslfield::kernel_solution::{closed_moments, coeffs_approx, initial_trace, log_x_matrix_element};
use cslfield::observables::{mode_energy, mode_occupation};
use cslfield::units_modes::stroboscopic_times;
use serde_json::{json, Value};

use crate::config::{Scenario, Study};
use crate::error::SimError;
use crate::output::Table;

/// Map `f` over `items` on up to `threads` scoped threads, keeping order.
pub fn par_map<T: Sync, R: Send>(
    items: &[T],
    threads: usize,
    f: impl Fn(&T) -> Result<R, SimError> + Sync,
) -> Result<Vec<R>, SimError> {
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(f).collect::<Result<Vec<R>, SimError>>()))
            .collect();
        let mut out = Vec::with_capacity(items.len());
        for h in handles {
            out.extend(h.join().expect("worker thread panicked")?);
        }
        Ok(out)
    })
}

/// Uniform samples on `[0, t_final]`, or multiples of `2π/freq`.
pub fn sample_times(s: &Scenario, freq: f64) -> Result<Vec<f64>, SimError> {
    let t = &s.config.times;
    if t.stroboscopic {
        let st = stroboscopic_times(t.t_final, freq, t.samples)?;
        if st.times.is_empty() {
            return Err(SimError::Config(st.warning.unwrap_or_else(|| "no stroboscopic times".into())));
        }
        Ok(st.times)
    } else {
        let n = t.samples - 1;
        Ok((0..=n).map(|i| t.t_final * i as f64 / n as f64).collect())
    }
}

pub fn decoherence(s: &Scenario, threads: usize) -> Result<Table, SimError> {
    let times = sample_times(s, s.params.m)?;
    let rows = par_map(&times, threads, |&t| {
        let dm = clump_dm(t, &s.pair, &s.grid, &s.params)?;
        Ok(vec![t, dm.elements[0][0], dm.elements[0][1], dm.coherence_ratio(), dm.k_factor])
    })?;
    fill(&["t", "diag", "offdiag", "ratio", "K"], rows)
}

pub fn production(s: &Scenario, threads: usize) -> Result<Table, SimError> {
    let times = sample_times(s, s.params.m)?;
    let rate = s.grid.dk() / (2.0 * std::f64::consts::PI) * s.params.lambda;
    let blocks = par_map(&times, threads, |&t| {
        let mut rows = Vec::with_capacity(s.grid.len());
        for &k in s.grid.k_values() {
            let (na, nb) = mode_occupation(t, k, 0.0, 0.0, &s.params)?;
            rows.push(vec![t, k, na, nb, mode_energy(t, k, 0.0, &s.params)?, rate]);
        }
        Ok(rows)
    })?;
    fill(&["t", "k", "n_a", "n_b", "energy_per_mode", "energy_density_rate"], blocks.into_iter().flatten().collect())
}

fn lattice(s: &Scenario) -> Vec<f64> {
    let k = &s.config.kernel;
    let n = k.points - 1;
    (0..=n).map(|i| -k.x_extent + 2.0 * k.x_extent * i as f64 / n as f64).collect()
}

pub fn kernel(s: &Scenario, threads: usize) -> Result<Table, SimError> {
    let k = s.config.kernel;
    let omega = s.params.omega(k.k);
    let times = sample_times(s, omega)?;
    let xs = lattice(s);
    let blocks = par_map(&times, threads, |&t| {
        let c = coeffs_approx(t, omega, s.params.lambda, k.gamma1, k.gamma2, true)?;
        let mut rows = Vec::with_capacity(xs.len() * xs.len());
        for &x in &xs {
            for &xp in &xs {
                let log = log_x_matrix_element(x, xp, &c)?;
                rows.push(vec![t, x, xp, log.exp(), log]);
            }
        }
        Ok(rows)
    })?;
    fill(&["t", "x", "xp", "element", "log_element"], blocks.into_iter().flatten().collect())
}

pub fn field_exponent(s: &Scenario, threads: usize) -> Result<Table, SimError> {
    let times = sample_times(s, s.params.m)?;
    let left = FieldProfile::of_clump(&s.grid, &s.pair.left, s.params.m)?;
    let right = FieldProfile::of_clump(&s.grid, &s.pair.right, s.params.m)?;
    let rows = par_map(&times, threads, |&t| {
        let (g, p, pr) = (&s.grid, &s.params, &s.pair);
        Ok(vec![
            t,
            h0_field_element_log(&left, &left, t, pr, g, p)?.log_magnitude,
            h0_field_element_log(&left, &right, t, pr, g, p)?.log_magnitude,
            h_field_element_log(&left, &left, t, pr, g, p, ChiWeight::MassShell)?.log_magnitude,
            h_field_element_log(&left, &right, t, pr, g, p, ChiWeight::MassShell)?.log_magnitude,
        ])
    })?;
    fill(&["t", "log_h0_same", "log_h0_cross", "log_h_same", "log_h_cross"], rows)
}

fn fill(columns: &[&'static str], rows: Vec<Vec<f64>>) -> Result<Table, SimError> {
    let mut table = Table::new(columns);
    for r in rows {
        table.push(r)?;
    }
    Ok(table)
}

fn suite(name: &str, max_error: f64, tolerance: f64) -> Value {
    json!({
        "name": name,
        "passed": max_error <= tolerance,
        "max_error": max_error,
        "tolerance": tolerance,
    })
}

/// Oracle integration of the configured oscillator, compared with the closed
/// forms; plus the clump overlap as a product over grid modes.
pub fn oracle_check(s: &Scenario) -> Result<Vec<Value>, SimError> {
    let k = s.config.kernel;
    let num = s.config.numerics;
    let lambda = s.params.lambda;
    let omega = s.params.omega(k.k);
    let times = sample_times(s, omega)?;
    let t_last = *times.last().expect("at least one time");
    let n_max = if num.n_max > 0 { num.n_max } else { suggested_n_max(k.gamma1, k.gamma2, lambda, omega, t_last) };
    let opts = OracleOptions {
        grow_tol: num.grow_tol,
        band_tol: num.band_tol,
        tail_limit: num.tail_limit,
        ..OracleOptions::new(n_max, num.dt)
    };
    let rho0 = TruncatedDM::coherent_pair(k.gamma1, k.gamma2, n_max);
    let tr0 = rho0.trace();
    let out = integrate(&rho0, lambda, omega, &times, &opts)?;

    let mut moment_err: f64 = 0.0;
    let mut drift: f64 = 0.0;
    let mut herm: f64 = 0.0;
    for (dm, &t) in out.iter().zip(&times) {
        let exact = closed_moments(t, omega, lambda, k.gamma1, k.gamma2)?;
        moment_err = moment_err.max(moments(dm).max_abs_diff(&exact));
        if t > 0.0 {
            drift = drift.max((dm.trace() - tr0).norm() / t);
        }
        herm = herm.max(dm.hermiticity_defect());
    }
    let mut suites = vec![suite("moment_laws", moment_err, 1e-6), suite("trace_drift_per_time", drift, 1e-9)];
    if k.gamma1 == k.gamma2 {
        suites.push(suite("hermiticity", herm, 1e-12));
    }
    if s.config.times.stroboscopic {
        let xs = lattice(s);
        let mut sup: f64 = 0.0;
        for (dm, &t) in out.iter().zip(&times) {
            let c = coeffs_approx(t, omega, lambda, k.gamma1, k.gamma2, true)?;
            for &x in &xs {
                for &xp in &xs {
                    let want = log_x_matrix_element(x, xp, &c)?.exp();
                    sup = sup.max((dm_position_element(dm, x, xp) - want).norm());
                }
            }
        }
        suites.push(suite("kernel_cross_validation", sup, 1e-5));
    }
    let tr_err = (tr0.re - initial_trace(k.gamma1, k.gamma2)).abs();
    suites.push(suite("initial_trace", tr_err, 1e-12));
    let product = coherent_overlap_oracle(&s.pair.left, &s.pair.right, &s.grid, 60);
    let closed = clump_overlap(&s.pair.left, &s.pair.right)?.value;
    suites.push(suite("clump_overlap_mode_product", (product - closed).abs(), 1e-6));
    Ok(suites)
}

pub fn run_table(study: Study, s: &Scenario, threads: usize) -> Result<Table, SimError> {
    match study {
        Study::Decoherence => decoherence(s, threads),
        Study::Production => production(s, threads),
        Study::Kernel => kernel(s, threads),
        Study::FieldExponent => field_exponent(s, threads),
        Study::OracleCheck => unreachable!("oracle-check produces a report"),
    }
}
