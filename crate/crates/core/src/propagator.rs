//! The linear group `E(t)`, its symbol derivatives, and weighted growth
//! curves.
//!
//! `E(t)` multiplies the spectrum by `exp(t·m)` where `m` is the grid table of
//! `iξη²/(1+b|ξ|)`. The table is Nyquist-symmetrized before exponentiation so
//! the group stays unimodular and real-to-real.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{config, input, Error, Result};
use crate::grid::{
    forward_transform, inverse_transform, sample_real, Field2D, GridSpec, Spectrum2D,
};
use crate::multipliers::{grid_symbol, linear_symbol, sign};
use crate::norms::{f_space_norm, weighted_l2, NormIndices};
use crate::par::{self, Exec};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Precomputed generator table for one grid and one `b`.
#[derive(Clone, Debug)]
pub struct LinearGroup {
    pub spec: GridSpec,
    pub b_coef: f64,
    generator: Vec<Complex64>,
}

impl LinearGroup {
    pub fn new(spec: GridSpec, b_coef: f64) -> Result<Self> {
        let generator = grid_symbol(spec, &linear_symbol(b_coef)?)?;
        Ok(LinearGroup {
            spec,
            b_coef,
            generator,
        })
    }

    /// Grid values of `exp(t·m)`.
    pub fn table(&self, t: f64) -> Vec<Complex64> {
        self.generator.iter().map(|g| (g * t).exp()).collect()
    }

    pub fn apply_spectrum(&self, s: &Spectrum2D, t: f64) -> Result<Spectrum2D> {
        self.apply_spectrum_with(s, t, Exec::default())
    }

    pub fn apply_spectrum_with(&self, s: &Spectrum2D, t: f64, exec: Exec) -> Result<Spectrum2D> {
        if s.spec != self.spec {
            return Err(Error::Structural(format!(
                "spectrum grid {:?} does not match group grid {:?}",
                s.spec, self.spec
            )));
        }
        let mut out = s.clone();
        let ny = self.spec.ny;
        let generator = &self.generator;
        par::for_each_chunk(exec, &mut out.coeffs, ny, |k, row| {
            let g = &generator[k * ny..(k + 1) * ny];
            for (c, m) in row.iter_mut().zip(g) {
                *c *= (m * t).exp();
            }
        });
        Ok(out)
    }

    pub fn apply(&self, phi: &Field2D, t: f64) -> Result<Field2D> {
        let s = forward_transform(phi)?;
        inverse_transform(&self.apply_spectrum(&s, t)?)
    }
}

/// `E(t)φ`.
pub fn evolve_linear(phi: &Field2D, t: f64, b_coef: f64) -> Result<Field2D> {
    if !(t.is_finite() && t >= 0.0) {
        return config(format!("t must be finite and >= 0 (got {t})"));
    }
    LinearGroup::new(phi.spec, b_coef)?.apply(phi, t)
}

/// `‖E(t₁)E(t₂)φ − E(t₁+t₂)φ‖`.
pub fn group_property_check(phi: &Field2D, t1: f64, t2: f64, b_coef: f64) -> Result<f64> {
    if t1 < 0.0 || t2 < 0.0 {
        return config("group times must be >= 0");
    }
    let g = LinearGroup::new(phi.spec, b_coef)?;
    let s = forward_transform(phi)?;
    let two = g.apply_spectrum(&g.apply_spectrum(&s, t2)?, t1)?;
    let one = g.apply_spectrum(&s, t1 + t2)?;
    let diff = Spectrum2D {
        spec: s.spec,
        coeffs: two
            .coeffs
            .iter()
            .zip(&one.coeffs)
            .map(|(a, b)| a - b)
            .collect(),
    };
    Ok(diff.l2_norm())
}

/// `c·(itη²)^p·δ^{(k)}(ξ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeltaTerm {
    pub derivative_order: u32,
    pub scale: f64,
    pub it_eta2_power: u32,
}

impl DeltaTerm {
    pub fn coefficient(&self, t: f64, eta: f64) -> Complex64 {
        (I * t * eta * eta).powu(self.it_eta2_power) * self.scale
    }
}

/// `c·(itη²)^p·sign(ξ)^q·(1+b|ξ|)^{−m}·F`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct XiTerm {
    pub coef: f64,
    pub p: u32,
    pub q: u32,
    pub m: u32,
}

/// `c·(itξ/(1+b|ξ|))^p·η^k·F`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaTerm {
    pub coef: f64,
    pub p: u32,
    pub k: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum RegularPart {
    Xi(Vec<XiTerm>),
    Eta(Vec<EtaTerm>),
}

/// `∂^j F` of `F(t,ξ,η) = exp(itξη²/(1+b|ξ|))` split into a part that is
/// smooth off `ξ = 0` and point masses at the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymbolDerivative {
    pub order: usize,
    pub b_coef: f64,
    pub regular: RegularPart,
    pub delta_terms: Vec<DeltaTerm>,
}

/// `F` itself.
pub fn group_symbol(t: f64, xi: f64, eta: f64, b_coef: f64) -> Complex64 {
    (I * (t * xi * eta * eta / (1.0 + b_coef * xi.abs()))).exp()
}

impl SymbolDerivative {
    /// Regular part at `ξ ≠ 0` (at `ξ = 0` this is the `ξ → 0⁺` limit).
    pub fn regular_part(&self, t: f64, xi: f64, eta: f64) -> Complex64 {
        let f = group_symbol(t, xi, eta, self.b_coef);
        let d = 1.0 + self.b_coef * xi.abs();
        let s = if xi == 0.0 { 1.0 } else { sign(xi) };
        match &self.regular {
            RegularPart::Xi(terms) => {
                let z = I * t * eta * eta;
                terms
                    .iter()
                    .map(|tm| {
                        z.powu(tm.p) * (tm.coef * s.powi(tm.q as i32) * d.powi(-(tm.m as i32)))
                    })
                    .sum::<Complex64>()
                    * f
            }
            RegularPart::Eta(terms) => {
                let c = I * t * xi / d;
                terms
                    .iter()
                    .map(|tm| c.powu(tm.p) * (tm.coef * eta.powi(tm.k as i32)))
                    .sum::<Complex64>()
                    * f
            }
        }
    }

    /// Sum of absolute term values, a scale for relative comparisons.
    pub fn magnitude(&self, t: f64, xi: f64, eta: f64) -> f64 {
        let d = 1.0 + self.b_coef * xi.abs();
        match &self.regular {
            RegularPart::Xi(terms) => {
                let z = t * eta * eta;
                terms
                    .iter()
                    .map(|tm| (tm.coef * z.powi(tm.p as i32) * d.powi(-(tm.m as i32))).abs())
                    .sum()
            }
            RegularPart::Eta(terms) => {
                let c = (t * xi / d).abs();
                terms
                    .iter()
                    .map(|tm| (tm.coef * c.powi(tm.p as i32) * eta.abs().powi(tm.k as i32)).abs())
                    .sum()
            }
        }
    }
}

fn merge_xi(terms: Vec<XiTerm>) -> Vec<XiTerm> {
    let mut acc: BTreeMap<(u32, u32, u32), f64> = BTreeMap::new();
    for t in terms {
        *acc.entry((t.p, t.q, t.m)).or_default() += t.coef;
    }
    acc.into_iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|((p, q, m), coef)| XiTerm { coef, p, q, m })
        .collect()
}

/// `∂_ξ^j F` for `j ∈ 1..=4`.
pub fn symbol_deriv_xi(j: usize, b_coef: f64) -> Result<SymbolDerivative> {
    if !(1..=4).contains(&j) {
        return config(format!("xi-derivative order must be in 1..=4 (got {j})"));
    }
    if !(b_coef.is_finite() && b_coef > 0.0) {
        return config(format!("b_coef must be > 0 (got {b_coef})"));
    }
    // ∂_ξ F = (itη²)(1+b|ξ|)^{−2} F
    let mut terms = vec![XiTerm {
        coef: 1.0,
        p: 1,
        q: 0,
        m: 2,
    }];
    let mut deltas: Vec<DeltaTerm> = Vec::new();
    for _ in 1..j {
        // a jump in sign(ξ) at the origin leaves 2·(coefficient at ξ = 0)·δ
        let mut fresh: BTreeMap<u32, f64> = BTreeMap::new();
        for t in terms.iter().filter(|t| t.q == 1) {
            *fresh.entry(t.p).or_default() += 2.0 * t.coef;
        }
        for d in deltas.iter_mut() {
            d.derivative_order += 1;
        }
        deltas.extend(
            fresh
                .into_iter()
                .filter(|(_, c)| *c != 0.0)
                .map(|(p, c)| DeltaTerm {
                    derivative_order: 0,
                    scale: c,
                    it_eta2_power: p,
                }),
        );

        let mut next = Vec::with_capacity(terms.len() * 2);
        for t in &terms {
            next.push(XiTerm {
                coef: -(t.m as f64) * b_coef * t.coef,
                p: t.p,
                q: (t.q + 1) % 2,
                m: t.m + 1,
            });
            next.push(XiTerm {
                coef: t.coef,
                p: t.p + 1,
                q: t.q,
                m: t.m + 2,
            });
        }
        terms = merge_xi(next);
    }
    deltas.sort_by_key(|d| (std::cmp::Reverse(d.derivative_order), d.it_eta2_power));
    Ok(SymbolDerivative {
        order: j,
        b_coef,
        regular: RegularPart::Xi(terms),
        delta_terms: deltas,
    })
}

/// `∂_η^j F` for `j ≥ 1`, as a polynomial in `η` and `c = itξ/(1+b|ξ|)`.
pub fn symbol_deriv_eta(j: usize, b_coef: f64) -> Result<SymbolDerivative> {
    if j == 0 {
        return config("eta-derivative order must be >= 1");
    }
    if !(b_coef.is_finite() && b_coef > 0.0) {
        return config(format!("b_coef must be > 0 (got {b_coef})"));
    }
    // P_{j+1} = ∂_η P_j + 2cη P_j with P_0 = 1
    let mut poly: BTreeMap<(u32, u32), f64> = BTreeMap::from([((0, 0), 1.0)]);
    for _ in 0..j {
        let mut next: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for (&(p, k), &c) in &poly {
            if k > 0 {
                *next.entry((p, k - 1)).or_default() += c * k as f64;
            }
            *next.entry((p + 1, k + 1)).or_default() += 2.0 * c;
        }
        poly = next;
    }
    let terms = poly
        .into_iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|((p, k), coef)| EtaTerm { coef, p, k })
        .collect();
    Ok(SymbolDerivative {
        order: j,
        b_coef,
        regular: RegularPart::Eta(terms),
        delta_terms: Vec::new(),
    })
}

/// `(t, ‖E(t)φ‖_ℱ)` samples and the fitted polynomial degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthCurve {
    pub indices: NormIndices,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub degree: f64,
}

/// Least-squares slope of `log y` against `log(1 + t)` over the upper half of
/// the time range.
pub fn fit_growth_degree(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.len() != values.len() || times.len() < 2 {
        return input("growth fit needs at least two (t, value) pairs");
    }
    let (lo, hi) = times
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| {
            (a.min(t), b.max(t))
        });
    let mid = 0.5 * (lo + hi);
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= mid)
        .map(|(t, v)| ((1.0 + t).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return input("growth fit needs two points in the upper half of the time range");
    }
    Ok(least_squares_slope(&pts))
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

pub fn weighted_growth_curve(
    phi: &Field2D,
    idx: NormIndices,
    times: &[f64],
    b_coef: f64,
) -> Result<GrowthCurve> {
    let n0 = f_space_norm(phi, idx)?;
    if !n0.is_finite() {
        return input("initial data has a non-finite weighted norm");
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return config("growth-curve times must be finite and >= 0");
    }
    let group = LinearGroup::new(phi.spec, b_coef)?;
    let s = forward_transform(phi)?;
    let norms = par::map(Exec::default(), times, |&t| -> Result<f64> {
        let u = inverse_transform(&group.apply_spectrum_with(&s, t, Exec::Sequential)?)?;
        f_space_norm(&u, idx)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let degree = if times.len() >= 2 {
        fit_growth_degree(times, &norms)?
    } else {
        0.0
    };
    Ok(GrowthCurve {
        indices: idx,
        times: times.to_vec(),
        norms,
        degree,
    })
}

/// Removes `φ̂(0,η)` with a localized carrier:
/// `φ − κ(x)·∫φ(x',y)dx'`, `κ = e^{−x²/w²}/(w√π)`.
///
/// Zeroing the `ξ = 0` column on the box would instead subtract the box
/// average, a constant whose `|x|³`-weighted norm grows with the box.
pub fn project_zero_x_mean(phi: &Field2D, width: f64) -> Result<Field2D> {
    let spec = phi.spec;
    let mut out = phi.clone();
    let norm = 1.0 / (width * std::f64::consts::PI.sqrt());
    for j in 0..spec.ny {
        let mass: Complex64 = (0..spec.nx).map(|i| phi.at(i, j)).sum::<Complex64>() * spec.dx();
        for i in 0..spec.nx {
            let x = spec.x(i) / width;
            out.values[spec.index(i, j)] -= mass * (norm * (-x * x).exp());
        }
    }
    Ok(out)
}

/// Box-size dependence of `‖(|x|³+1)E(t)φ‖` with and without the
/// `φ̂(0,η)` component.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentScan {
    pub times: Vec<f64>,
    /// `max_η |φ̂(0,η)|` on the base grid (continuum normalization).
    pub zero_column_max: f64,
    pub given_base: Vec<f64>,
    pub given_doubled: Vec<f64>,
    pub projected_base: Vec<f64>,
    pub projected_doubled: Vec<f64>,
}

impl MomentScan {
    pub fn given_ratio(&self) -> Vec<f64> {
        ratio(&self.given_doubled, &self.given_base)
    }

    pub fn projected_ratio(&self) -> Vec<f64> {
        ratio(&self.projected_doubled, &self.projected_base)
    }
}

fn ratio(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x / y).collect()
}

/// Runs the `r₁ = 3` weighted norm on `base` and on the same grid with `lx`
/// and `nx` doubled.
pub fn moment_condition_scan<F>(
    phi: F,
    base: GridSpec,
    times: &[f64],
    b_coef: f64,
    carrier_width: f64,
) -> Result<MomentScan>
where
    F: Fn(f64, f64) -> f64 + Sync + Send + Copy,
{
    let run = |spec: GridSpec| -> Result<(Vec<f64>, Vec<f64>, f64)> {
        let f = sample_real(phi, spec)?;
        let p = project_zero_x_mean(&f, carrier_width)?;
        let group = LinearGroup::new(spec, b_coef)?;
        let sf = forward_transform(&f)?;
        let sp = forward_transform(&p)?;
        let col = (0..spec.ny)
            .map(|l| sf.continuum(0, l).norm())
            .fold(0.0, f64::max);
        let mut a = Vec::with_capacity(times.len());
        let mut b = Vec::with_capacity(times.len());
        for &t in times {
            a.push(weighted_l2(
                &inverse_transform(&group.apply_spectrum(&sf, t)?)?,
                3.0,
                0.0,
            )?);
            b.push(weighted_l2(
                &inverse_transform(&group.apply_spectrum(&sp, t)?)?,
                3.0,
                0.0,
            )?);
        }
        Ok((a, b, col))
    };
    let (given_base, projected_base, zero_column_max) = run(base)?;
    let (given_doubled, projected_doubled, _) = run(base.doubled_x())?;
    Ok(MomentScan {
        times: times.to_vec(),
        zero_column_max,
        given_base,
        given_doubled,
        projected_base,
        projected_doubled,
    })
}
