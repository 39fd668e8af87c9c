//! Fourier multipliers on the periodic box.
//!
//! Every operator here is `f ↦ (m(ξ,η) f̂)^∨` for some [`Symbol`]. Symbols are
//! evaluated on the grid by [`grid_symbol`], which averages over `±ξ_N` on the
//! Nyquist column (and `±η_N` on the Nyquist row). That mode is its own mirror
//! image, so the average is what keeps Hermitian symbols real-to-real.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{config, Error, Result};
use crate::grid::{
    fft_line, forward_transform_with, inverse_transform_with, Field2D, GridSpec, LineSpec,
    Spectrum2D,
};
use crate::par::{self, Exec};

const I: Complex64 = Complex64::new(0.0, 1.0);

type SymbolFn = dyn Fn(f64, f64) -> Complex64 + Send + Sync;

/// A named complex function of `(ξ, η)`.
#[derive(Clone)]
pub struct Symbol {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    eval: Arc<SymbolFn>,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("name", &self.name)
            .field("params", &self.params)
            .finish()
    }
}

impl Symbol {
    pub fn new<F>(name: impl Into<String>, params: &[(&str, f64)], eval: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Symbol {
            name: name.into(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            eval: Arc::new(eval),
        }
    }

    #[inline]
    pub fn eval(&self, xi: f64, eta: f64) -> Complex64 {
        (self.eval)(xi, eta)
    }

    /// Pointwise product `m₁·m₂`.
    pub fn product(&self, other: &Symbol) -> Symbol {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let mut params = self.params.clone();
        params.extend(other.params.clone());
        Symbol {
            name: format!("{}*{}", self.name, other.name),
            params,
            eval: Arc::new(move |x, y| a(x, y) * b(x, y)),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Symbol {
        let a = self.eval.clone();
        Symbol {
            name: format!("({c})*{}", self.name),
            params: self.params.clone(),
            eval: Arc::new(move |x, y| c * a(x, y)),
        }
    }

    /// Complex conjugate symbol (the adjoint operator).
    pub fn conj(&self) -> Symbol {
        let a = self.eval.clone();
        Symbol {
            name: format!("conj({})", self.name),
            params: self.params.clone(),
            eval: Arc::new(move |x, y| a(x, y).conj()),
        }
    }

    pub fn identity() -> Symbol {
        Symbol::new("1", &[], |_, _| Complex64::new(1.0, 0.0))
    }

    /// `∂x`.
    pub fn dx() -> Symbol {
        Symbol::new("i*xi", &[], |xi, _| I * xi)
    }

    /// `∂y²`.
    pub fn dyy() -> Symbol {
        Symbol::new("-eta^2", &[], |_, eta| Complex64::new(-eta * eta, 0.0))
    }

    pub fn hilbert_x() -> Symbol {
        Symbol::new("-i*sign(xi)", &[], |xi, _| -I * sign(xi))
    }
}

/// `sign` with `sign(0) = 0`.
#[inline]
pub fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Axis selector for one-directional multipliers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    /// Radial `(ξ² + η²)^{1/2}`.
    Isotropic,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return config(format!("{name} must be > 0 (got {v})"));
    }
    Ok(())
}

/// `(1 + b|ξ|)⁻¹`, the symbol of `(1 + bℋ∂x)⁻¹`.
#[allow(non_snake_case)]
pub fn composed_symbol_HdxResolvent(b_coef: f64) -> Result<Symbol> {
    positive("b_coef", b_coef)?;
    Ok(Symbol::new(
        "1/(1+b|xi|)",
        &[("b", b_coef)],
        move |xi, _| Complex64::new(1.0 / (1.0 + b_coef * xi.abs()), 0.0),
    ))
}

/// `−a·iξ/(1 + b|ξ|)`, the operator applied to `uⁿ`.
pub fn nonlinear_multiplier(a_coef: f64, b_coef: f64) -> Result<Symbol> {
    positive("b_coef", b_coef)?;
    if !a_coef.is_finite() {
        return config(format!("a_coef must be finite (got {a_coef})"));
    }
    Ok(Symbol::new(
        "-a*i*xi/(1+b|xi|)",
        &[("a", a_coef), ("b", b_coef)],
        move |xi, _| -a_coef * I * xi / (1.0 + b_coef * xi.abs()),
    ))
}

/// Generator `iξη²/(1 + b|ξ|)` of the linear group.
pub fn linear_symbol(b_coef: f64) -> Result<Symbol> {
    positive("b_coef", b_coef)?;
    Ok(Symbol::new(
        "i*xi*eta^2/(1+b|xi|)",
        &[("b", b_coef)],
        move |xi, eta| I * (xi * eta * eta / (1.0 + b_coef * xi.abs())),
    ))
}

/// `|ξ|^b`, `|η|^b` or `|(ξ,η)|^b`.
pub fn frac_symbol(b: f64, axis: Axis) -> Result<Symbol> {
    positive("b", b)?;
    Ok(Symbol::new(
        format!("|{axis:?}|^b"),
        &[("b", b)],
        move |xi, eta| {
            let r = match axis {
                Axis::X => xi.abs(),
                Axis::Y => eta.abs(),
                Axis::Isotropic => xi.hypot(eta),
            };
            Complex64::new(r.powf(b), 0.0)
        },
    ))
}

/// `(1 + ξ²)^{s/2}` and its `y`/isotropic variants.
pub fn bessel_symbol(s: f64, axis: Axis) -> Symbol {
    Symbol::new(format!("J^s[{axis:?}]"), &[("s", s)], move |xi, eta| {
        let q = match axis {
            Axis::X => xi * xi,
            Axis::Y => eta * eta,
            Axis::Isotropic => xi * xi + eta * eta,
        };
        Complex64::new((1.0 + q).powf(s / 2.0), 0.0)
    })
}

/// Evaluates `m` on the grid in FFT order with Nyquist symmetrization.
pub fn grid_symbol(spec: GridSpec, m: &Symbol) -> Result<Vec<Complex64>> {
    grid_symbol_with(spec, m, Exec::default())
}

pub fn grid_symbol_with(spec: GridSpec, m: &Symbol, exec: Exec) -> Result<Vec<Complex64>> {
    let etas = spec.etas();
    let (kn, ln) = (spec.nx / 2, spec.ny / 2);
    let mut out = vec![Complex64::new(0.0, 0.0); spec.len()];
    par::for_each_chunk(exec, &mut out, spec.ny, |k, row| {
        let xi = spec.xi(k);
        for (l, v) in row.iter_mut().enumerate() {
            let eta = etas[l];
            *v = match (k == kn, l == ln) {
                (false, false) => m.eval(xi, eta),
                (true, false) => 0.5 * (m.eval(xi, eta) + m.eval(-xi, eta)),
                (false, true) => 0.5 * (m.eval(xi, eta) + m.eval(xi, -eta)),
                (true, true) => {
                    0.25 * (m.eval(xi, eta)
                        + m.eval(-xi, eta)
                        + m.eval(xi, -eta)
                        + m.eval(-xi, -eta))
                }
            };
        }
    });
    if let Some(p) = out
        .iter()
        .position(|v| !(v.re.is_finite() && v.im.is_finite()))
    {
        let (k, l) = (p / spec.ny, p % spec.ny);
        return config(format!(
            "symbol {} is not finite at (xi, eta) = ({}, {})",
            m.name,
            spec.xi(k),
            spec.eta(l)
        ));
    }
    Ok(out)
}

/// Multiplies a spectrum by precomputed grid symbol values.
pub fn multiply_spectrum(s: &mut Spectrum2D, values: &[Complex64], exec: Exec) -> Result<()> {
    if values.len() != s.coeffs.len() {
        return Err(Error::Structural(format!(
            "symbol table has {} entries, spectrum {}",
            values.len(),
            s.coeffs.len()
        )));
    }
    let ny = s.spec.ny;
    par::for_each_chunk(exec, &mut s.coeffs, ny, |k, row| {
        let m = &values[k * ny..(k + 1) * ny];
        for (c, v) in row.iter_mut().zip(m) {
            *c *= v;
        }
    });
    Ok(())
}

pub fn apply_multiplier(f: &Field2D, m: &Symbol) -> Result<Field2D> {
    apply_multiplier_with(f, m, Exec::default())
}

pub fn apply_multiplier_with(f: &Field2D, m: &Symbol, exec: Exec) -> Result<Field2D> {
    f.check_shape()?;
    let table = grid_symbol_with(f.spec, m, exec)?;
    let mut s = forward_transform_with(f, exec)?;
    multiply_spectrum(&mut s, &table, exec)?;
    inverse_transform_with(&s, exec)
}

/// `ℋ` in `x`, symbol `−i·sign(ξ)`.
pub fn hilbert_x(f: &Field2D) -> Result<Field2D> {
    apply_multiplier(f, &Symbol::hilbert_x())
}

/// `D^b` along an axis, symbol `|ξ|^b`.
pub fn frac_deriv(f: &Field2D, b: f64, axis: Axis) -> Result<Field2D> {
    apply_multiplier(f, &frac_symbol(b, axis)?)
}

/// `J^s`, symbol `(1 + ξ²)^{s/2}` (or the `y`/isotropic variant).
pub fn bessel_potential(f: &Field2D, s: f64, axis: Axis) -> Result<Field2D> {
    apply_multiplier(f, &bessel_symbol(s, axis))
}

/// Applies a 1D symbol `m(ξ)` to samples on a periodic line.
pub fn apply_line_multiplier(
    vals: &[Complex64],
    line: LineSpec,
    m: impl Fn(f64) -> Complex64,
) -> Result<Vec<Complex64>> {
    if vals.len() != line.n {
        return Err(Error::Structural(format!(
            "line has {} samples, spec needs {}",
            vals.len(),
            line.n
        )));
    }
    let mut data = vals.to_vec();
    fft_line(&mut data, false);
    let kn = line.n / 2;
    for (k, c) in data.iter_mut().enumerate() {
        let xi = line.xi(k);
        let v = if k == kn {
            0.5 * (m(xi) + m(-xi))
        } else {
            m(xi)
        };
        *c *= v;
    }
    fft_line(&mut data, true);
    Ok(data)
}
