//! Time integration of `u_t + a(uⁿ)_x + (bℋu_t + u_yy)_x = 0`.
//!
//! Solving for `u_t` gives `u_t = E'u + N(u)` with the linear part handled
//! exactly by [`LinearGroup`] and `N(u) = −a∂x(1+bℋ∂x)⁻¹(uⁿ)`. States are
//! carried as spectra; the `ξ = 0` column is never touched by either part.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::families::Packet;
use crate::grid::{
    forward_transform, forward_transform_with, inverse_transform, inverse_transform_with,
    signed_mode, Field2D, GridSpec, Spectrum2D,
};
use crate::multipliers::{grid_symbol, multiply_spectrum, nonlinear_multiplier, Symbol};
use crate::norms::{f_space_norm, NormIndices};
use crate::par::{self, Exec};
use crate::propagator::LinearGroup;

/// Growth of `max|u|` over its initial value that counts as blow-up.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub a_coef: f64,
    pub b_coef: f64,
    pub n_power: u32,
    pub grid: GridSpec,
    pub dt: f64,
    pub t_end: f64,
    pub picard_tol: f64,
    pub picard_max: usize,
    pub dealias: bool,
    /// Multiplies the nonlinear symbol by `−η²`.
    pub nonlinear_includes_dyy: bool,
    /// Steps between stored frames of [`solve`].
    pub record_every: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            a_coef: 1.0,
            b_coef: 1.0,
            n_power: 2,
            grid: GridSpec::default(),
            dt: 0.01,
            t_end: 1.0,
            picard_tol: 1e-10,
            picard_max: 50,
            dealias: true,
            nonlinear_includes_dyy: false,
            record_every: 10,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !self.a_coef.is_finite() {
            return config(format!("a must be finite (got {})", self.a_coef));
        }
        if !(self.b_coef.is_finite() && self.b_coef > 0.0) {
            return config(format!("b must be > 0 (got {})", self.b_coef));
        }
        if self.n_power < 2 {
            return config(format!("n must be >= 2 (got {})", self.n_power));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return config(format!("dt must be > 0 (got {})", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return config(format!("t_end must be > 0 (got {})", self.t_end));
        }
        if self.dt > self.t_end {
            return config(format!(
                "dt ({}) must not exceed t_end ({})",
                self.dt, self.t_end
            ));
        }
        if !(self.picard_tol.is_finite() && self.picard_tol > 0.0) {
            return config(format!("picard_tol must be > 0 (got {})", self.picard_tol));
        }
        if self.picard_max == 0 {
            return config("picard_max must be >= 1");
        }
        if self.record_every == 0 {
            return config("record_every must be >= 1");
        }
        Ok(())
    }

    /// Symbol applied to `uⁿ`.
    pub fn nonlinear_symbol(&self) -> Result<Symbol> {
        let m = nonlinear_multiplier(self.a_coef, self.b_coef)?;
        Ok(if self.nonlinear_includes_dyy {
            m.product(&Symbol::dyy())
        } else {
            m
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Field2D>,
    pub norms: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn last(&self) -> &Field2D {
        self.states
            .last()
            .expect("trajectory has at least the initial frame")
    }

    /// Attaches `‖u(t)‖_ℱ` for every frame.
    pub fn with_norms(mut self, idx: NormIndices) -> Result<Self> {
        let norms = par::map(Exec::default(), &self.states, |u| f_space_norm(u, idx))
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
        self.norms = Some(norms);
        Ok(self)
    }
}

/// Grid tables shared by every evaluation of the right-hand side.
#[derive(Clone, Debug)]
pub struct Integrator {
    pub params: SolverParams,
    pub group: LinearGroup,
    symbol: Vec<Complex64>,
    keep: Option<Vec<bool>>,
    exec: Exec,
}

fn dealias_mask(spec: GridSpec, n_power: u32) -> Vec<bool> {
    let frac = 2.0 / (n_power as f64 + 1.0);
    let cx = frac * (spec.nx / 2) as f64;
    let cy = frac * (spec.ny / 2) as f64;
    let mut keep = vec![false; spec.len()];
    for k in 0..spec.nx {
        let kx = signed_mode(k, spec.nx).unsigned_abs() as f64;
        for l in 0..spec.ny {
            let ly = signed_mode(l, spec.ny).unsigned_abs() as f64;
            keep[spec.index(k, l)] = kx <= cx && ly <= cy;
        }
    }
    keep
}

impl Integrator {
    pub fn new(params: SolverParams) -> Result<Self> {
        Integrator::with_exec(params, Exec::default())
    }

    pub fn with_exec(params: SolverParams, exec: Exec) -> Result<Self> {
        params.validate()?;
        let group = LinearGroup::new(params.grid, params.b_coef)?;
        let symbol = grid_symbol(params.grid, &params.nonlinear_symbol()?)?;
        let keep = params
            .dealias
            .then(|| dealias_mask(params.grid, params.n_power));
        Ok(Integrator {
            params,
            group,
            symbol,
            keep,
            exec,
        })
    }

    fn truncate(&self, s: &mut Spectrum2D) {
        if let Some(keep) = &self.keep {
            for (c, &k) in s.coeffs.iter_mut().zip(keep) {
                if !k {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Spectrum of `N(u)` from the spectrum of `u`. Returns `max|u|` too.
    pub fn nonlinear_spectrum(&self, u_hat: &Spectrum2D, t: f64) -> Result<(Spectrum2D, f64)> {
        if self.params.a_coef == 0.0 {
            let u = inverse_transform_with(u_hat, self.exec)?;
            return Ok((Spectrum2D::zeros(u_hat.spec), u.max_abs()));
        }
        let mut s = u_hat.clone();
        self.truncate(&mut s);
        let mut u = inverse_transform_with(&s, self.exec)?;
        let max_abs = u.max_abs();
        let n = self.params.n_power;
        par::for_each_chunk(self.exec, &mut u.values, self.params.grid.ny, |_, row| {
            for v in row.iter_mut() {
                *v = v.powu(n);
            }
        });
        if u.values
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::Divergence {
                t,
                max_abs,
                last_healthy_t: t,
            });
        }
        let mut w = forward_transform_with(&u, self.exec)?;
        self.truncate(&mut w);
        multiply_spectrum(&mut w, &self.symbol, self.exec)?;
        Ok((w, max_abs))
    }

    /// One exponential Heun step on spectra.
    pub fn step_spectrum(&self, u_hat: &Spectrum2D, dt: f64, t: f64) -> Result<(Spectrum2D, f64)> {
        let (n0, max_abs) = self.nonlinear_spectrum(u_hat, t)?;
        let e = self.group.table(dt);
        let mut pred = u_hat.clone();
        for ((p, nv), ev) in pred.coeffs.iter_mut().zip(&n0.coeffs).zip(&e) {
            *p = ev * (*p + dt * nv);
        }
        let (n1, _) = self.nonlinear_spectrum(&pred, t + dt)?;
        let mut out = u_hat.clone();
        for (((o, a), b), ev) in out
            .coeffs
            .iter_mut()
            .zip(&n0.coeffs)
            .zip(&n1.coeffs)
            .zip(&e)
        {
            *o = ev * *o + 0.5 * dt * (ev * a + b);
        }
        Ok((out, max_abs))
    }
}

/// `N(u) = −a∂x(1+bℋ∂x)⁻¹(uⁿ)` on a physical field.
pub fn nonlinear_term(u: &Field2D, p: &SolverParams) -> Result<Field2D> {
    let integ = Integrator::new(SolverParams { grid: u.spec, ..*p })?;
    let (s, _) = integ.nonlinear_spectrum(&forward_transform(u)?, 0.0)?;
    inverse_transform(&s)
}

/// One step of the exponential Heun scheme on a physical field.
pub fn etd_step(u: &Field2D, dt: f64, p: &SolverParams) -> Result<Field2D> {
    if !(dt.is_finite() && dt > 0.0) {
        return config(format!("dt must be > 0 (got {dt})"));
    }
    let integ = Integrator::new(SolverParams { grid: u.spec, ..*p })?;
    let (s, _) = integ.step_spectrum(&forward_transform(u)?, dt, 0.0)?;
    let out = inverse_transform(&s)?;
    if out
        .values
        .iter()
        .any(|v| !(v.re.is_finite() && v.im.is_finite()))
    {
        return Err(Error::Divergence {
            t: dt,
            max_abs: f64::INFINITY,
            last_healthy_t: 0.0,
        });
    }
    Ok(out)
}

/// Marches [`etd_step`] from `0` to `t_end`, storing every `record_every`-th
/// frame and the final one.
pub fn solve(phi: &Field2D, p: &SolverParams) -> Result<Trajectory> {
    solve_with(phi, p, Exec::default())
}

pub fn solve_with(phi: &Field2D, p: &SolverParams, exec: Exec) -> Result<Trajectory> {
    let p = SolverParams {
        grid: phi.spec,
        ..*p
    };
    let integ = Integrator::with_exec(p, exec)?;
    let steps = (p.t_end / p.dt).round().max(1.0) as usize;
    let dt = p.t_end / steps as f64;
    let max0 = phi.max_abs();
    let limit = DIVERGENCE_FACTOR * max0;

    let mut u_hat = forward_transform_with(phi, exec)?;
    let mut times = vec![0.0];
    let mut states = vec![phi.clone()];
    let mut last_healthy_t = 0.0;
    for k in 0..steps {
        let t = k as f64 * dt;
        let (next, max_abs) = integ.step_spectrum(&u_hat, dt, t).map_err(|e| match e {
            Error::Divergence { t, max_abs, .. } => Error::Divergence {
                t,
                max_abs,
                last_healthy_t,
            },
            other => other,
        })?;
        if !max_abs.is_finite() || (max0 > 0.0 && max_abs > limit) {
            return Err(Error::Divergence {
                t,
                max_abs,
                last_healthy_t,
            });
        }
        u_hat = next;
        let t_next = (k + 1) as f64 * dt;
        if (k + 1) % p.record_every == 0 || k + 1 == steps {
            let u = inverse_transform_with(&u_hat, exec)?;
            let m = u.max_abs();
            if !m.is_finite() || (max0 > 0.0 && m > limit) {
                return Err(Error::Divergence {
                    t: t_next,
                    max_abs: m,
                    last_healthy_t,
                });
            }
            last_healthy_t = t_next;
            times.push(t_next);
            states.push(u);
        }
    }
    Ok(Trajectory {
        times,
        states,
        norms: None,
    })
}

/// Outcome of the whole-interval fixed-point iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct PicardRun {
    pub trajectory: Trajectory,
    /// `sup_t ‖u_{k+1} − u_k‖` per iteration.
    pub distances: Vec<f64>,
    pub iterations: usize,
}

impl PicardRun {
    /// Successive distance ratios `d_{k+1}/d_k`, skipping iterations that
    /// already hit round-off.
    pub fn ratios(&self) -> Vec<f64> {
        self.distances
            .windows(2)
            .filter(|w| w[0] > 1e-13)
            .map(|w| w[1] / w[0])
            .collect()
    }

    pub fn max_ratio(&self) -> f64 {
        self.ratios().into_iter().fold(0.0, f64::max)
    }
}

/// Fixed point of `u(t) = E(t)φ + ∫₀ᵗ E(t−τ) N(u(τ)) dτ` on `m_steps + 1`
/// equispaced nodes, trapezoid in `τ`.
pub fn picard_solve(
    phi: &Field2D,
    t_final: f64,
    m_steps: usize,
    p: &SolverParams,
) -> Result<PicardRun> {
    if m_steps < 8 {
        return config(format!(
            "Picard needs at least 8 quadrature intervals (got {m_steps})"
        ));
    }
    if !(t_final.is_finite() && t_final > 0.0) {
        return config(format!("Picard horizon must be > 0 (got {t_final})"));
    }
    let p = SolverParams {
        grid: phi.spec,
        ..*p
    };
    let integ = Integrator::with_exec(p, Exec::Sequential)?;
    let h = t_final / m_steps as f64;
    let nodes: Vec<f64> = (0..=m_steps).map(|i| i as f64 * h).collect();
    let phi_hat = forward_transform(phi)?;
    let free: Vec<Spectrum2D> = nodes
        .iter()
        .map(|&t| {
            integ
                .group
                .apply_spectrum_with(&phi_hat, t, Exec::Sequential)
        })
        .collect::<Result<_>>()?;
    let tables: Vec<Vec<Complex64>> = (0..=m_steps)
        .map(|d| integ.group.table(d as f64 * h))
        .collect();

    let mut current = free.clone();
    let mut distances = Vec::new();
    for iter in 1..=p.picard_max {
        let nl: Vec<Spectrum2D> = par::map(Exec::default(), &current, |u| {
            integ.nonlinear_spectrum(u, 0.0).map(|(s, _)| s)
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let next: Vec<Spectrum2D> = par::map_range(Exec::default(), nodes.len(), |i| {
            let mut acc = free[i].clone();
            for j in 0..=i {
                if i == 0 {
                    break;
                }
                let w = if j == 0 || j == i { 0.5 * h } else { h };
                let e = &tables[i - j];
                for ((a, n), ev) in acc.coeffs.iter_mut().zip(&nl[j].coeffs).zip(e) {
                    *a += w * ev * n;
                }
            }
            acc
        });
        let dist = next
            .iter()
            .zip(&current)
            .map(|(a, b)| {
                let d: f64 = a
                    .coeffs
                    .iter()
                    .zip(&b.coeffs)
                    .map(|(x, y)| (x - y).norm_sqr())
                    .sum();
                (d * a.spec.dx() * a.spec.dy()).sqrt()
            })
            .fold(0.0, f64::max);
        if !dist.is_finite() {
            return Err(Error::Divergence {
                t: t_final,
                max_abs: f64::INFINITY,
                last_healthy_t: 0.0,
            });
        }
        distances.push(dist);
        current = next;
        if dist < p.picard_tol {
            let states = current
                .iter()
                .map(inverse_transform)
                .collect::<Result<Vec<_>>>()?;
            return Ok(PicardRun {
                trajectory: Trajectory {
                    times: nodes,
                    states,
                    norms: None,
                },
                distances,
                iterations: iter,
            });
        }
    }
    let last_ratio = match distances.as_slice() {
        [.., a, b] if *a > 0.0 => b / a,
        _ => f64::NAN,
    };
    Err(Error::NonContraction {
        iterations: p.picard_max,
        last_ratio,
    })
}

/// Largest `T` with `T·c(T) ≤ M/(M+‖φ‖)ⁿ` and `n·c(T)(M+‖φ‖)^{n−1}T < 1`,
/// located by bisection.
#[allow(non_snake_case)]
pub fn estimate_T(
    phi_norm: f64,
    m_radius: f64,
    n_power: u32,
    c_growth: &dyn Fn(f64) -> f64,
) -> Result<f64> {
    if !(phi_norm > 0.0 && m_radius > 0.0) {
        return config("estimate_T needs positive data norm and radius");
    }
    const FLOOR: f64 = 1e-8;
    let n = n_power as f64;
    let r = m_radius + phi_norm;
    let ok = |t: f64| {
        let c = c_growth(t);
        t * c <= m_radius / r.powf(n) && n * c * r.powf(n - 1.0) * t < 1.0
    };
    if !ok(FLOOR) {
        return config(format!(
            "no admissible existence time above {FLOOR:e} (norm {phi_norm}, radius {m_radius})"
        ));
    }
    let mut lo = FLOOR;
    let mut hi = 1.0;
    while ok(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Ok(lo);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Nondecreasing interpolant of `max_{s≤t} ‖E(s)φ‖_ℱ / ‖φ‖_ℱ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthModel {
    pub times: Vec<f64>,
    pub running_max: Vec<f64>,
}

impl GrowthModel {
    pub fn calibrate(phi: &Field2D, idx: NormIndices, b_coef: f64, times: &[f64]) -> Result<Self> {
        let curve = crate::propagator::weighted_growth_curve(phi, idx, times, b_coef)?;
        let n0 = f_space_norm(phi, idx)?;
        let mut running = Vec::with_capacity(times.len());
        let mut m: f64 = 1.0;
        for v in &curve.norms {
            m = m.max(v / n0);
            running.push(m);
        }
        Ok(GrowthModel {
            times: times.to_vec(),
            running_max: running,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let ts = &self.times;
        if ts.is_empty() {
            return 1.0;
        }
        if t <= ts[0] {
            return self.running_max[0];
        }
        for w in 0..ts.len() - 1 {
            if t <= ts[w + 1] {
                let s = (t - ts[w]) / (ts[w + 1] - ts[w]);
                return self.running_max[w] + s * (self.running_max[w + 1] - self.running_max[w]);
            }
        }
        *self.running_max.last().unwrap()
    }
}

/// `sup_t ‖u_φ − u_{φ+δ}‖_ℱ / ‖δ‖_ℱ` for a seeded smooth `δ` with
/// `‖δ‖_ℱ = eps`.
pub fn continuity_of_data_check(
    phi: &Field2D,
    eps: f64,
    p: &SolverParams,
    idx: NormIndices,
    seed: u64,
) -> Result<f64> {
    if eps == 0.0 {
        return Ok(0.0);
    }
    let spec = phi.spec;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reach = 0.25 * spec.lx.min(spec.ly);
    let kmax = 0.25 * (std::f64::consts::PI / spec.dx()).min(std::f64::consts::PI / spec.dy());
    let raw = Packet::random(&mut rng, reach.min(4.0), kmax.min(2.0)).sample(spec)?;
    let delta = raw.scale(eps / f_space_norm(&raw, idx)?);
    let base = solve(phi, p)?;
    let pert = solve(&phi.add(&delta)?, p)?;
    let mut worst: f64 = 0.0;
    for (a, b) in base.states.iter().zip(&pert.states) {
        worst = worst.max(f_space_norm(&a.sub(b)?, idx)? / eps);
    }
    Ok(worst)
}
