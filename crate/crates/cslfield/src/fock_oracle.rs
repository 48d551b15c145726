//! Brute-force checks in a truncated number basis: an explicit RK4 integrator
//! for the single-oscillator collapse equation, Hermite wavefunctions,
//! coherent-state overlaps and field-eigenstate residuals.
//!
//! The integrator stores ρ by diagonals `d = j - i`. Each diagonal couples
//! only to `d` and `d ± 2`, so the work is confined to an active window of
//! occupation numbers and an active band of diagonals. Both grow on demand
//! while boundary entries stay below a tolerance, which is what makes
//! occupations of a few hundred affordable.

use std::f64::consts::PI;

use crate::clump_states::{chi_momentum, ClumpProfile};
use crate::error::{check, invalid, Error, Result};
use crate::kernel_solution::MomentSet;
use crate::units_modes::{ModeGrid, ModelParams};
use crate::C64;

/// Which oscillator pair a state belongs to. The dynamics are identical; only
/// the meaning of the quadrature basis differs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    /// `(X, P)` pair collapsed on `X`.
    Position,
    /// `(x, p)` pair collapsed on `p`; basis states are `p` eigenstates.
    Momentum,
}

/// Dense `(n_max+1)²` density matrix in the number basis, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedDM {
    n_max: usize,
    data: Vec<C64>,
    pub quadrature: Quadrature,
}

impl TruncatedDM {
    pub fn from_fn(n_max: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let dim = n_max + 1;
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        TruncatedDM { n_max, data, quadrature: Quadrature::Position }
    }

    pub fn vacuum(n_max: usize) -> Self {
        Self::from_fn(n_max, |i, j| C64::new(if i == 0 && j == 0 { 1.0 } else { 0.0 }, 0.0))
    }

    /// `|γ₁⟩⟨γ₂|` with normalized real coherent states, truncated.
    pub fn coherent_pair(gamma1: f64, gamma2: f64, n_max: usize) -> Self {
        let a = coherent_amplitudes(gamma1, n_max);
        let b = coherent_amplitudes(gamma2, n_max);
        Self::from_fn(n_max, |i, j| C64::new(a[i] * b[j], 0.0))
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim() + j]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `max |ρ - ρ†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim() {
            for j in i..self.dim() {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Largest entry magnitude in the last row and column.
    pub fn boundary_tail(&self) -> f64 {
        let n = self.n_max;
        (0..self.dim()).map(|k| self.get(n, k).norm().max(self.get(k, n).norm())).fold(0.0, f64::max)
    }
}

/// Coefficients `e^{-γ²/2} γⁿ/√n!` by recurrence.
pub fn coherent_amplitudes(gamma: f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut c = (-gamma * gamma / 2.0).exp();
    for n in 0..=n_max {
        if n > 0 {
            c *= gamma / (n as f64).sqrt();
        }
        out.push(c);
    }
    out
}

/// Controls for [`integrate`]. `n_max` is a ceiling: the active window starts
/// where the initial data ends and grows while its edge carries weight above
/// `grow_tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub n_max: usize,
    /// Largest step; the integrator may take smaller ones to stay inside the
    /// RK4 stability region of the current window.
    pub dt: f64,
    pub grow_tol: f64,
    pub band_tol: f64,
    /// Abort when the edge of the full `n_max` basis exceeds this.
    pub tail_limit: f64,
    /// `false` integrates the whole `n_max` basis from the start.
    pub adaptive: bool,
}

impl OracleOptions {
    pub fn new(n_max: usize, dt: f64) -> Self {
        OracleOptions { n_max, dt, grow_tol: 1e-11, band_tol: 1e-10, tail_limit: 1e-6, adaptive: true }
    }

    pub fn fixed(n_max: usize, dt: f64) -> Self {
        OracleOptions { adaptive: false, ..Self::new(n_max, dt) }
    }
}

/// Default step: `10⁻³ / max(ω, λ/ω, λ)`.
pub fn default_dt(omega: f64, lambda: f64) -> f64 {
    1e-3 / omega.max(lambda / omega).max(lambda)
}

/// Basis size covering the coherent occupancy plus linear production with a
/// generous tail allowance.
pub fn suggested_n_max(gamma1: f64, gamma2: f64, lambda: f64, omega: f64, t: f64) -> usize {
    let mean = gamma1.powi(2).max(gamma2.powi(2)) + lambda * t / (2.0 * omega);
    ((mean + 1.0) * 30.0 + 40.0).ceil() as usize
}

pub fn integrate_lindblad_x(
    gamma1: f64,
    gamma2: f64,
    lambda: f64,
    omega: f64,
    t_final: f64,
    n_max: usize,
    dt: f64,
) -> Result<TruncatedDM> {
    let rho0 = TruncatedDM::coherent_pair(gamma1, gamma2, n_max);
    let mut out = integrate(&rho0, lambda, omega, &[t_final], &OracleOptions::new(n_max, dt))?;
    Ok(out.pop().expect("one output time"))
}

/// The relative-momentum oscillator obeys the same equation with `p` playing
/// the role of `X`; the result is labelled accordingly.
pub fn integrate_lindblad_p(
    gamma1: f64,
    gamma2: f64,
    lambda: f64,
    omega: f64,
    t_final: f64,
    n_max: usize,
    dt: f64,
) -> Result<TruncatedDM> {
    let mut dm = integrate_lindblad_x(gamma1, gamma2, lambda, omega, t_final, n_max, dt)?;
    dm.quadrature = Quadrature::Momentum;
    Ok(dm)
}

/// Evolve `rho0` under `dρ/dt = -iω[a†a, ρ] - (λ/4ω)[x, [x, ρ]]`, `x = a + a†`
/// truncated to the active window, returning the state at each of `times`
/// (non-decreasing, measured from 0).
pub fn integrate(
    rho0: &TruncatedDM,
    lambda: f64,
    omega: f64,
    times: &[f64],
    opts: &OracleOptions,
) -> Result<Vec<TruncatedDM>> {
    check("omega", omega, omega > 0.0, "positive")?;
    check("lambda", lambda, lambda >= 0.0, "non-negative")?;
    check("dt", opts.dt, opts.dt > 0.0, "positive")?;
    if opts.n_max < 2 {
        return Err(invalid("n_max", "must be at least 2"));
    }
    if rho0.n_max() > opts.n_max {
        return Err(invalid("n_max", "initial state larger than the basis ceiling"));
    }
    let mut last = 0.0;
    for &t in times {
        check("time", t, t >= last, "non-negative and non-decreasing")?;
        last = t;
    }

    let mut eng = Engine::new(rho0, lambda, omega, opts);
    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    for &target in times {
        while target - t > 1e-15 * target.max(1.0) {
            eng.adapt()?;
            let h_max = eng.stable_step();
            let remaining = target - t;
            // Land on the target with equal sub-steps inside this chunk.
            let chunk_steps = ((remaining / h_max).ceil() as usize).max(1);
            let h = remaining / chunk_steps as f64;
            let n = chunk_steps.min(CHECK_EVERY);
            for _ in 0..n {
                eng.rk4_step(h);
            }
            t += h * n as f64;
            if n == chunk_steps {
                t = target;
            }
        }
        eng.adapt()?;
        let mut dm = eng.to_dense();
        dm.quadrature = rho0.quadrature;
        out.push(dm);
    }
    Ok(out)
}

const PAD: usize = 2;
const CHECK_EVERY: usize = 1;
/// One RK4 step moves weight by at most 8 rows or diagonals.
const MARGIN: usize = 8;
const WINDOW_CHUNK: usize = 16;
const BAND_CHUNK: usize = 8;

/// Real and imaginary parts in separate planes so the stencil loop is plain
/// `f64` arithmetic.
#[derive(Clone)]
struct Planes {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Planes {
    fn zeros(len: usize) -> Self {
        Planes { re: vec![0.0; len], im: vec![0.0; len] }
    }

    fn get(&self, idx: usize) -> C64 {
        C64::new(self.re[idx], self.im[idx])
    }
}

struct Engine {
    n_max: usize,
    bmax: usize,
    stride: usize,
    n_act: usize,
    b_act: usize,
    /// Only `d ≥ 0` is integrated; `d = -1, -2` are mirrored for the stencil.
    hermitian: bool,
    omega: f64,
    kappa: f64,
    dt: f64,
    opts: OracleOptions,
    y: Planes,
    acc: Planes,
    tmp: Planes,
    k: Planes,
    q: Vec<f64>,
    /// `e[i + 2] = √((i+1)(i+2))`, zero at the two negative slots.
    e: Vec<f64>,
    r: Vec<f64>,
}

impl Engine {
    fn new(rho0: &TruncatedDM, lambda: f64, omega: f64, opts: &OracleOptions) -> Self {
        let n_max = opts.n_max;
        let bmax = n_max;
        let stride = n_max + 1 + 2 * PAD;
        let len = (2 * (bmax + 2) + 1) * stride;
        let mut eng = Engine {
            n_max,
            bmax,
            stride,
            n_act: 0,
            b_act: 0,
            hermitian: rho0.hermiticity_defect() == 0.0,
            omega,
            kappa: lambda / (4.0 * omega),
            dt: opts.dt,
            opts: *opts,
            y: Planes::zeros(len),
            acc: Planes::zeros(len),
            tmp: Planes::zeros(len),
            k: Planes::zeros(len),
            q: vec![0.0; n_max + 4],
            e: (0..n_max + 6).map(|s| if s < 2 { 0.0 } else { (((s - 1) * s) as f64).sqrt() }).collect(),
            r: (0..n_max + 4).map(|i| (i as f64).sqrt()).collect(),
        };
        // Entries far below the growth tolerance are dropped so that they
        // cannot pin the active region open.
        let floor = opts.grow_tol.min(opts.band_tol) * 1e-6;
        let n0 = rho0.n_max();
        let (mut n_used, mut b_used) = (1, 1);
        for i in 0..=n0 {
            for j in 0..=n0 {
                let v = rho0.get(i, j);
                if !opts.adaptive || v.norm() > floor {
                    let idx = eng.at(i, j as isize - i as isize);
                    eng.y.re[idx] = v.re;
                    eng.y.im[idx] = v.im;
                    n_used = n_used.max(i.max(j));
                    b_used = b_used.max(i.abs_diff(j));
                }
            }
        }
        if opts.adaptive {
            eng.set_window((n_used + WINDOW_CHUNK).min(n_max));
            eng.b_act = (b_used + BAND_CHUNK).min(eng.n_act);
        } else {
            eng.set_window(n_max);
            eng.b_act = n_max;
        }
        eng
    }

    #[inline]
    fn off(&self, d: isize) -> usize {
        (d + self.bmax as isize + 2) as usize * self.stride + PAD
    }

    #[inline]
    fn at(&self, i: usize, d: isize) -> usize {
        self.off(d) + i
    }

    fn set_window(&mut self, n: usize) {
        self.n_act = n;
        for i in 0..self.q.len() {
            self.q[i] = match i.cmp(&n) {
                std::cmp::Ordering::Less => (2 * i + 1) as f64,
                std::cmp::Ordering::Equal => n as f64,
                std::cmp::Ordering::Greater => 0.0,
            };
        }
    }

    /// Valid rows of diagonal `d` in the active window.
    #[inline]
    fn rows(&self, d: isize) -> Option<(usize, usize)> {
        let n = self.n_act as isize;
        if d.abs() > n {
            return None;
        }
        Some((0.max(-d) as usize, n.min(n - d) as usize))
    }

    fn band(&self) -> std::ops::RangeInclusive<isize> {
        let b = self.b_act.min(self.n_act) as isize;
        if self.hermitian {
            0..=b
        } else {
            -b..=b
        }
    }

    /// `ρ_{i,i-d} = ρ*_{i-d,i}` for the two diagonals the stencil reads below
    /// the main one; the main diagonal is real.
    fn mirror(&self, y: &mut Planes) {
        if !self.hermitian {
            return;
        }
        let main = self.off(0);
        y.im[main..=main + self.n_act].fill(0.0);
        for d in 1..=2isize.min(self.b_act as isize) {
            let (up, down) = (self.off(d), self.off(-d));
            for i in d as usize..=self.n_act {
                y.re[down + i] = y.re[up + i - d as usize];
                y.im[down + i] = -y.im[up + i - d as usize];
            }
        }
    }

    /// RK4 is stable for `h·|z| ≲ 2.78`; bound the generator by Gershgorin
    /// on the active region and keep a margin. The bound is attained by the
    /// `(-1)^i` pattern, so there is nothing to gain from a sharper estimate.
    fn stable_step(&self) -> f64 {
        let n = self.n_act as f64;
        let bound = self.omega * self.b_act as f64 + self.kappa * (16.0 * n + 8.0);
        self.dt.min(2.5 / bound)
    }

    fn rhs(&self, y: &Planes, k: &mut Planes) {
        let kappa = self.kappa;
        for d in self.band() {
            let Some((lo, hi)) = self.rows(d) else { continue };
            let len = hi - lo + 1;
            let jlo = (lo as isize + d) as usize;
            let (od, om, op) = (self.off(d) + lo - 1, self.off(d - 2) + lo, self.off(d + 2) + lo - 2);
            let (dre, dim) = (&y.re[od..][..len + 2], &y.im[od..][..len + 2]);
            let (mre, mim) = (&y.re[om..][..len + 2], &y.im[om..][..len + 2]);
            let (pre, pim) = (&y.re[op..][..len + 2], &y.im[op..][..len + 2]);
            let qi = &self.q[lo..][..len];
            let qj = &self.q[jlo..][..len];
            let ei = &self.e[lo..][..len + 2];
            let ej = &self.e[jlo..][..len + 2];
            let ri = &self.r[lo..][..len + 1];
            let rj = &self.r[jlo..][..len + 1];
            let w = self.omega * d as f64;
            let o = self.off(d) + lo;
            let (kre, kim) = (&mut k.re[o..][..len], &mut k.im[o..][..len]);
            for c in 0..len {
                let c0 = qi[c] + qj[c];
                let (c1, c2, c3, c4) = (ei[c + 2], ei[c], ej[c + 2], ej[c]);
                let s00 = 2.0 * ri[c] * rj[c];
                let s01 = 2.0 * ri[c] * rj[c + 1];
                let s10 = 2.0 * ri[c + 1] * rj[c];
                let s11 = 2.0 * ri[c + 1] * rj[c + 1];
                let dr = c0 * dre[c + 1] + c1 * mre[c + 2] + c2 * pre[c] + c3 * pre[c + 2] + c4 * mre[c]
                    - s00 * dre[c]
                    - s01 * pre[c + 1]
                    - s10 * mre[c + 1]
                    - s11 * dre[c + 2];
                let di = c0 * dim[c + 1] + c1 * mim[c + 2] + c2 * pim[c] + c3 * pim[c + 2] + c4 * mim[c]
                    - s00 * dim[c]
                    - s01 * pim[c + 1]
                    - s10 * mim[c + 1]
                    - s11 * dim[c + 2];
                // -iω(i-j)ρ = iωdρ
                kre[c] = -w * dim[c + 1] - kappa * dr;
                kim[c] = w * dre[c + 1] - kappa * di;
            }
        }
    }

    fn rk4_step(&mut self, h: f64) {
        let mut k = std::mem::replace(&mut self.k, Planes::zeros(0));
        let mut acc = std::mem::replace(&mut self.acc, Planes::zeros(0));
        let mut tmp = std::mem::replace(&mut self.tmp, Planes::zeros(0));
        let stages = [(h / 6.0, h / 2.0), (h / 3.0, h / 2.0), (h / 3.0, h), (h / 6.0, 0.0)];
        for (s, &(wa, wt)) in stages.iter().enumerate() {
            self.rhs(if s == 0 { &self.y } else { &tmp }, &mut k);
            for d in self.band() {
                let Some((lo, hi)) = self.rows(d) else { continue };
                let r = self.off(d) + lo..self.off(d) + hi + 1;
                for (y, kk, a, t) in
                    [(&self.y.re, &k.re, &mut acc.re, &mut tmp.re), (&self.y.im, &k.im, &mut acc.im, &mut tmp.im)]
                {
                    let (y, kk, a) = (&y[r.clone()], &kk[r.clone()], &mut a[r.clone()]);
                    if s == 0 {
                        for c in 0..y.len() {
                            a[c] = y[c] + wa * kk[c];
                        }
                    } else {
                        for c in 0..y.len() {
                            a[c] += wa * kk[c];
                        }
                    }
                    if s < 3 {
                        let t = &mut t[r.clone()];
                        for c in 0..y.len() {
                            t[c] = y[c] + wt * kk[c];
                        }
                    }
                }
            }
            if s < 3 {
                self.mirror(&mut tmp);
            }
        }
        self.mirror(&mut acc);
        std::mem::swap(&mut self.y, &mut acc);
        self.k = k;
        self.acc = acc;
        self.tmp = tmp;
    }

    fn window_edge(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for d in self.band() {
            let Some((lo, hi)) = self.rows(d) else { continue };
            for i in hi.saturating_sub(MARGIN).max(lo)..=hi {
                worst = worst.max(self.y.get(self.at(i, d)).norm());
            }
        }
        worst
    }

    fn band_edge(&self) -> f64 {
        let b = self.b_act.min(self.n_act) as isize;
        let inner = (b - MARGIN as isize).max(0);
        let mut worst: f64 = 0.0;
        for d in (-b..=-inner).chain(inner..=b) {
            if let Some((lo, hi)) = self.rows(d) {
                for i in lo..=hi {
                    worst = worst.max(self.y.get(self.at(i, d)).norm());
                }
            }
        }
        worst
    }

    fn adapt(&mut self) -> Result<()> {
        let edge = self.window_edge();
        if self.n_act == self.n_max {
            if edge > self.opts.tail_limit {
                return Err(Error::Truncation {
                    tail: edge,
                    limit: self.opts.tail_limit,
                    n_max: self.n_max,
                    hint: self.n_max * 3 / 2 + 10,
                });
            }
        } else if edge > self.opts.grow_tol {
            let n = (self.n_act + WINDOW_CHUNK).min(self.n_max);
            self.set_window(n);
        }
        if self.b_act < self.n_act && self.band_edge() > self.opts.band_tol {
            self.b_act = (self.b_act + BAND_CHUNK).min(self.n_act);
        }
        Ok(())
    }

    fn to_dense(&self) -> TruncatedDM {
        let n = self.n_act;
        TruncatedDM::from_fn(n, |i, j| {
            let d = j as isize - i as isize;
            if d.unsigned_abs() > self.b_act {
                C64::new(0.0, 0.0)
            } else if self.hermitian && d < 0 {
                self.y.get(self.at(j, -d)).conj()
            } else {
                self.y.get(self.at(i, d))
            }
        })
    }
}

/// Trace-weighted `⟨a⟩, ⟨a†⟩, ⟨a†a⟩, ⟨a²⟩, ⟨a†²⟩` of a truncated state.
pub fn moments(dm: &TruncatedDM) -> MomentSet {
    let n = dm.n_max();
    let zero = C64::new(0.0, 0.0);
    let (mut a, mut ad, mut num, mut a2, mut ad2) = (zero, zero, zero, zero, zero);
    for i in 0..=n {
        num += dm.get(i, i) * i as f64;
        if i < n {
            let s = ((i + 1) as f64).sqrt();
            a += dm.get(i + 1, i) * s;
            ad += dm.get(i, i + 1) * s;
        }
        if i + 1 < n {
            let s = (((i + 1) * (i + 2)) as f64).sqrt();
            a2 += dm.get(i + 2, i) * s;
            ad2 += dm.get(i, i + 2) * s;
        }
    }
    MomentSet { trace: dm.trace(), a_mean: a, adag_mean: ad, n_mean: num, a2_mean: a2, adag2_mean: ad2 }
}

/// `ψₙ(X)` for the oscillator with `a = X + ½ d/dX`.
pub fn position_wavefunction(n: usize, x: f64) -> f64 {
    position_wavefunctions(n, x)[n]
}

/// `[ψ₀(X), …, ψ_{n_max}(X)]` by the three-term recurrence
/// `ψ_{n+1} = (2Xψₙ - √n ψ_{n-1}) / √(n+1)`.
pub fn position_wavefunctions(n_max: usize, x: f64) -> Vec<f64> {
    let mut psi = Vec::with_capacity(n_max + 1);
    psi.push((2.0 / PI).powf(0.25) * (-x * x).exp());
    if n_max >= 1 {
        psi.push(2.0 * x * psi[0]);
    }
    for n in 1..n_max {
        let next = (2.0 * x * psi[n] - (n as f64).sqrt() * psi[n - 1]) / ((n + 1) as f64).sqrt();
        psi.push(next);
    }
    psi
}

/// `Σ ρ_{nn′} ψₙ(X) ψ_{n′}(X′)`. Complex in general; real at multiples of the
/// period for the states considered here.
pub fn dm_position_element(dm: &TruncatedDM, x: f64, xp: f64) -> C64 {
    let px = position_wavefunctions(dm.n_max(), x);
    let pxp = position_wavefunctions(dm.n_max(), xp);
    dm_position_element_with(dm, &px, &pxp)
}

/// [`dm_position_element`] with precomputed wavefunction vectors.
pub fn dm_position_element_with(dm: &TruncatedDM, psi_x: &[f64], psi_xp: &[f64]) -> C64 {
    let dim = dm.dim();
    let mut total = C64::new(0.0, 0.0);
    for (row, &px) in dm.as_slice().chunks_exact(dim).zip(&psi_x[..dim]) {
        let inner: C64 = row.iter().zip(&psi_xp[..dim]).map(|(r, p)| r * p).sum();
        total += inner * px;
    }
    total
}

/// Truncated inner product of real coherent states,
/// `e^{-(z₁²+z₂²)/2} Σ_{n≤n_max} (z₁z₂)ⁿ/n!`.
pub fn truncated_coherent_overlap(z1: f64, z2: f64, n_max: usize) -> f64 {
    let p = z1 * z2;
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..=n_max {
        term *= p / n as f64;
        sum += term;
    }
    (-(z1 * z1 + z2 * z2) / 2.0).exp() * sum
}

/// `⟨ℓ₁|ℓ₂⟩` as a product over grid modes. Each mode holds two real
/// oscillators displaced by `√(2dk)·Re χ̃` and `√(2dk)·Im χ̃`.
pub fn coherent_overlap_oracle(p1: &ClumpProfile, p2: &ClumpProfile, grid: &ModeGrid, n_max: usize) -> f64 {
    let scale = (2.0 * grid.dk()).sqrt();
    grid.k_values()
        .iter()
        .map(|&k| {
            let (a, b) = (chi_momentum(k, p1) * scale, chi_momentum(k, p2) * scale);
            truncated_coherent_overlap(a.re, b.re, n_max) * truncated_coherent_overlap(a.im, b.im, n_max)
        })
        .product()
}

/// Coefficients `c[n·(n_max+1) + n′]` of a two-mode state over `|n⟩_a|n′⟩_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    pub n_max: usize,
    pub coeffs: Vec<C64>,
}

impl TwoModeState {
    fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn get(&self, n: usize, np: usize) -> C64 {
        self.coeffs[n * self.dim() + np]
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest coefficient on the last row or column, relative to the norm.
    pub fn boundary_tail(&self) -> f64 {
        let n = self.n_max;
        let worst = (0..=n).map(|k| self.get(n, k).norm().max(self.get(k, n).norm())).fold(0.0, f64::max);
        worst / self.norm()
    }

    /// `(a + b†) ψ` with the truncated operators.
    fn apply_a_plus_bdag(&self) -> Vec<C64> {
        let d = self.dim();
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for n in 0..d {
            for np in 0..d {
                let mut v = C64::new(0.0, 0.0);
                if n < self.n_max {
                    v += self.get(n + 1, np) * ((n + 1) as f64).sqrt();
                }
                if np > 0 {
                    v += self.get(n, np - 1) * (np as f64).sqrt();
                }
                out[n * d + np] = v;
            }
        }
        out
    }

    /// `(a† + b) ψ` with the truncated operators.
    fn apply_adag_plus_b(&self) -> Vec<C64> {
        let d = self.dim();
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for n in 0..d {
            for np in 0..d {
                let mut v = C64::new(0.0, 0.0);
                if n > 0 {
                    v += self.get(n - 1, np) * (n as f64).sqrt();
                }
                if np < self.n_max {
                    v += self.get(n, np + 1) * ((np + 1) as f64).sqrt();
                }
                out[n * d + np] = v;
            }
        }
        out
    }
}

/// `e^{-a†b†} e^{u a† + v b†}|0⟩` projected onto `n, n′ ≤ n_max`.
pub fn field_eigenstate(u: C64, v: C64, n_max: usize) -> Result<TwoModeState> {
    let d = n_max + 1;
    // e^{u a† + v b†}|0⟩ has coefficients uⁿ vⁿ′ / √(n! n′!).
    let cu = scaled_powers(u, n_max);
    let cv = scaled_powers(v, n_max);
    let mut coeffs = vec![C64::new(0.0, 0.0); d * d];
    for n in 0..d {
        for np in 0..d {
            // Σ_j (-1)^j/j! (a†b†)^j |n-j, n′-j⟩ expands to
            // Σ_j (-1)^j √(n! n′!)/(j! (n-j)! (n′-j)!) u^{n-j} v^{n′-j};
            // written with the normalized powers cu, cv:
            // Σ_j (-1)^j C(n,j)^{1/2} C(n′,j)^{1/2} cu[n-j] cv[n′-j]
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..=n.min(np) {
                let w = (ln_binom(n, j) + ln_binom(np, j)) / 2.0;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += cu[n - j] * cv[np - j] * (sign * w.exp());
            }
            coeffs[n * d + np] = acc;
        }
    }
    let state = TwoModeState { n_max, coeffs };
    let norm = state.norm();
    if !norm.is_finite() {
        return Err(Error::Regime(format!("two-mode state norm overflows at n_max = {n_max}, |u| = {:e}", u.norm())));
    }
    Ok(state)
}

fn scaled_powers(z: C64, n_max: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut c = C64::new(1.0, 0.0);
    for n in 0..=n_max {
        if n > 0 {
            c *= z / (n as f64).sqrt();
        }
        out.push(c);
    }
    out
}

fn ln_binom(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

/// Residual of the field-eigenvalue equation for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenResidual {
    /// `√(dk/4πω)·(‖(A-u)ψ‖ + ‖(A†-v)ψ‖)/‖ψ‖` with `A = a + b†`: a bound on
    /// `‖(φ̂ₖ(x) - fₖ(x))ψ‖/‖ψ‖` uniform in `x`.
    pub residual: f64,
    /// `⟨ψ|φ̂ₖ(0)|ψ⟩/⟨ψ|ψ⟩`.
    pub field_expectation: f64,
    /// The eigenvalue `fₖ(0) = (2dk/√2π)·Re f̃`.
    pub eigenvalue: f64,
    pub boundary_tail: f64,
}

/// Truncated `|f⟩` for one mode, `e^{-a†b†} e^{√(2ωdk)(a† f̃ + b† f̃*)}|0⟩`,
/// tested against the mode's part of the field operator,
/// `φ̂ₖ(x) = √(dk/4πω)[(a+b†)e^{ikx} + (a†+b)e^{-ikx}]`.
pub fn eigenstate_residual(f_tilde: C64, k: f64, params: &ModelParams, n_max: usize) -> Result<EigenResidual> {
    check("k", k, k > 0.0, "positive")?;
    let dk = params.dk();
    let omega = params.omega(k);
    let c = (2.0 * omega * dk).sqrt();
    let (u, v) = (f_tilde * c, f_tilde.conj() * c);
    let psi = field_eigenstate(u, v, n_max)?;
    let norm = psi.norm();
    let pref = (dk / (4.0 * PI * omega)).sqrt();

    let av = psi.apply_a_plus_bdag();
    let bv = psi.apply_adag_plus_b();
    let mut r1 = 0.0;
    let mut r2 = 0.0;
    let mut expect = C64::new(0.0, 0.0);
    for (idx, c0) in psi.coeffs.iter().enumerate() {
        r1 += (av[idx] - u * c0).norm_sqr();
        r2 += (bv[idx] - v * c0).norm_sqr();
        expect += c0.conj() * (av[idx] + bv[idx]);
    }
    let residual = pref * (r1.sqrt() + r2.sqrt()) / norm;
    if !residual.is_finite() {
        return Err(Error::Regime("eigenstate residual overflowed".into()));
    }
    Ok(EigenResidual {
        residual,
        field_expectation: pref * expect.re / (norm * norm),
        eigenvalue: 2.0 * dk / (2.0 * PI).sqrt() * f_tilde.re,
        boundary_tail: psi.boundary_tail(),
    })
}
