//! Periodic-box discretization of the plane.
//!
//! A [`GridSpec`] samples `[-lx, lx) x [-ly, ly)` on an `nx x ny` lattice.
//! Physical samples live in [`Field2D`] (row-major, `x` is the slow index) and
//! their unitary DFT in [`Spectrum2D`], stored in standard FFT order so the
//! signed mode of index `k` is `k` for `k < n/2` and `k - n` otherwise.
//!
//! Wavenumbers are kept in physical units, `xi_k = pi k / lx`, so operator
//! symbols can be evaluated directly on `(xi, eta)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{config, Error, Result};
use crate::par::{self, Exec};

/// Lattice description of the truncated plane.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            nx: 512,
            ny: 512,
            lx: 40.0 * PI,
            ly: 40.0 * PI,
        }
    }
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        let g = GridSpec { nx, ny, lx, ly };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("nx", self.nx), ("ny", self.ny)] {
            if n < 8 || n % 2 != 0 {
                return config(format!("{name} must be even and >= 8 (got {n})"));
            }
        }
        for (name, l) in [("lx", self.lx), ("ly", self.ly)] {
            if !(l.is_finite() && l > 0.0) {
                return config(format!(
                    "{name} must be a positive finite half-width (got {l})"
                ));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.ly / self.ny as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.lx + i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        -self.ly + j as f64 * self.dy()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// Wavenumber of x-mode index `k` (FFT order).
    pub fn xi(&self, k: usize) -> f64 {
        PI * signed_mode(k, self.nx) as f64 / self.lx
    }

    /// Wavenumber of y-mode index `l` (FFT order).
    pub fn eta(&self, l: usize) -> f64 {
        PI * signed_mode(l, self.ny) as f64 / self.ly
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y(j)).collect()
    }

    pub fn xis(&self) -> Vec<f64> {
        (0..self.nx).map(|k| self.xi(k)).collect()
    }

    pub fn etas(&self) -> Vec<f64> {
        (0..self.ny).map(|l| self.eta(l)).collect()
    }

    /// Spacing of the discrete x-frequency lattice.
    pub fn dxi(&self) -> f64 {
        PI / self.lx
    }

    pub fn deta(&self) -> f64 {
        PI / self.ly
    }

    /// FFT-order index of signed x-mode `m`.
    pub fn x_mode_index(&self, m: i64) -> usize {
        mode_index(m, self.nx)
    }

    pub fn y_mode_index(&self, m: i64) -> usize {
        mode_index(m, self.ny)
    }

    /// Same physical resolution on a box twice as wide in x.
    pub fn doubled_x(&self) -> GridSpec {
        GridSpec {
            nx: self.nx * 2,
            lx: self.lx * 2.0,
            ..*self
        }
    }
}

/// Signed mode number of FFT-order index `k` on an `n`-point axis.
#[inline]
pub fn signed_mode(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

#[inline]
pub fn mode_index(m: i64, n: usize) -> usize {
    m.rem_euclid(n as i64) as usize
}

/// Physical samples `u(x_i, y_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field2D {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
}

/// Unitary DFT coefficients indexed by `(k, l)` in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum2D {
    pub spec: GridSpec,
    pub coeffs: Vec<Complex64>,
}

impl Field2D {
    pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Structural(format!(
                "field has {} values, grid {}x{} needs {}",
                values.len(),
                spec.nx,
                spec.ny,
                spec.len()
            )));
        }
        Ok(Field2D { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Field2D {
            spec,
            values: vec![Complex64::new(0.0, 0.0); spec.len()],
        }
    }

    pub fn from_real(spec: GridSpec, values: &[f64]) -> Result<Self> {
        Field2D::new(
            spec,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.spec.index(i, j)]
    }

    pub fn check_shape(&self) -> Result<()> {
        if self.values.len() != self.spec.len() {
            return Err(Error::Structural(format!(
                "field has {} values, grid needs {}",
                self.values.len(),
                self.spec.len()
            )));
        }
        Ok(())
    }

    pub fn same_grid(&self, other: &Field2D) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::Structural(format!(
                "grid mismatch: {:?} vs {:?}",
                self.spec, other.spec
            )));
        }
        Ok(())
    }

    /// `‖f‖_{L²}` by the midpoint rule on the box.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.spec.dx() * self.spec.dy()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    /// `∫∫ u dx dy`.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * (self.spec.dx() * self.spec.dy())
    }

    pub fn scale(&self, a: f64) -> Field2D {
        self.map(|v| v * a)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field2D {
        Field2D {
            spec: self.spec,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(
        &self,
        other: &Field2D,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Field2D> {
        self.same_grid(other)?;
        Ok(Field2D {
            spec: self.spec,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Field2D) -> Result<Field2D> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field2D) -> Result<Field2D> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Field2D) -> Result<Field2D> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Multiplies by a real function of position.
    pub fn weighted(&self, w: impl Fn(f64, f64) -> f64) -> Field2D {
        let spec = self.spec;
        let mut out = self.clone();
        for i in 0..spec.nx {
            let x = spec.x(i);
            for j in 0..spec.ny {
                out.values[spec.index(i, j)] *= w(x, spec.y(j));
            }
        }
        out
    }

    /// Drops imaginary parts.
    pub fn real_part(&self) -> Field2D {
        self.map(|v| Complex64::new(v.re, 0.0))
    }
}

impl Spectrum2D {
    pub fn zeros(spec: GridSpec) -> Self {
        Spectrum2D {
            spec,
            coeffs: vec![Complex64::new(0.0, 0.0); spec.len()],
        }
    }

    pub fn at(&self, k: usize, l: usize) -> Complex64 {
        self.coeffs[self.spec.index(k, l)]
    }

    /// `‖f‖_{L²}` through Parseval; agrees with [`Field2D::l2_norm`].
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|v| v.norm_sqr()).sum();
        (s * self.spec.dx() * self.spec.dy()).sqrt()
    }

    /// Weighted Plancherel norm `‖w(ξ,η) f̂‖`.
    pub fn weighted_norm(&self, w: impl Fn(f64, f64) -> f64) -> f64 {
        let spec = self.spec;
        let etas = spec.etas();
        let mut s = 0.0;
        for k in 0..spec.nx {
            let xi = spec.xi(k);
            for (l, &eta) in etas.iter().enumerate() {
                let wv = w(xi, eta);
                s += (self.coeffs[spec.index(k, l)] * wv).norm_sqr();
            }
        }
        (s * spec.dx() * spec.dy()).sqrt()
    }

    /// Scale turning a unitary DFT coefficient into the continuum transform
    /// `(2π)^{-1} ∫∫ f e^{-i(xξ+yη)}` up to the box-origin phase.
    pub fn continuum_scale(&self) -> f64 {
        let s = self.spec;
        (s.len() as f64).sqrt() * s.dx() * s.dy() / (2.0 * PI)
    }

    /// Continuum Fourier transform `(2π)^{-1} ∫∫ f e^{-i(xξ+yη)} dx dy`
    /// sampled at `(ξ_k, η_l)`, including the phase of the box origin.
    pub fn continuum(&self, k: usize, l: usize) -> Complex64 {
        let s = self.spec;
        let parity = (signed_mode(k, s.nx) + signed_mode(l, s.ny)).rem_euclid(2);
        let sign = if parity == 0 { 1.0 } else { -1.0 };
        self.at(k, l) * (sign * self.continuum_scale())
    }
}

type Plan = Arc<dyn Fft<f64>>;

fn plan(n: usize, inverse: bool) -> Plan {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Plan>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

fn transpose(src: &[Complex64], rows: usize, cols: usize, exec: Exec) -> Vec<Complex64> {
    let mut dst = vec![Complex64::new(0.0, 0.0); src.len()];
    par::for_each_chunk(exec, &mut dst, rows, |c, out| {
        for (r, o) in out.iter_mut().enumerate() {
            *o = src[r * cols + c];
        }
    });
    dst
}

/// In-place unnormalized 2D DFT of a row-major `nx x ny` buffer.
fn fft2_in_place(data: &mut Vec<Complex64>, nx: usize, ny: usize, inverse: bool, exec: Exec) {
    let py = plan(ny, inverse);
    par::for_each_chunk(exec, data, ny, |_, row| py.process(row));
    let mut cols = transpose(data, nx, ny, exec);
    let px = plan(nx, inverse);
    par::for_each_chunk(exec, &mut cols, nx, |_, col| px.process(col));
    *data = transpose(&cols, ny, nx, exec);
}

/// Unitary forward DFT.
pub fn forward_transform(f: &Field2D) -> Result<Spectrum2D> {
    forward_transform_with(f, Exec::default())
}

pub fn forward_transform_with(f: &Field2D, exec: Exec) -> Result<Spectrum2D> {
    f.check_shape()?;
    let s = f.spec;
    let mut data = f.values.clone();
    fft2_in_place(&mut data, s.nx, s.ny, false, exec);
    let norm = 1.0 / (s.len() as f64).sqrt();
    data.iter_mut().for_each(|c| *c *= norm);
    Ok(Spectrum2D {
        spec: s,
        coeffs: data,
    })
}

/// Unitary inverse DFT.
pub fn inverse_transform(f: &Spectrum2D) -> Result<Field2D> {
    inverse_transform_with(f, Exec::default())
}

pub fn inverse_transform_with(f: &Spectrum2D, exec: Exec) -> Result<Field2D> {
    let s = f.spec;
    if f.coeffs.len() != s.len() {
        return Err(Error::Structural(format!(
            "spectrum has {} coefficients, grid needs {}",
            f.coeffs.len(),
            s.len()
        )));
    }
    let mut data = f.coeffs.clone();
    fft2_in_place(&mut data, s.nx, s.ny, true, exec);
    let norm = 1.0 / (s.len() as f64).sqrt();
    data.iter_mut().for_each(|c| *c *= norm);
    Ok(Field2D {
        spec: s,
        values: data,
    })
}

/// Samples a closed-form function on the lattice.
pub fn sample<F>(f: F, spec: GridSpec) -> Result<Field2D>
where
    F: Fn(f64, f64) -> Complex64 + Sync + Send,
{
    spec.validate()?;
    let mut values = vec![Complex64::new(0.0, 0.0); spec.len()];
    par::for_each_chunk(Exec::default(), &mut values, spec.ny, |i, row| {
        let x = spec.x(i);
        for (j, v) in row.iter_mut().enumerate() {
            *v = f(x, spec.y(j));
        }
    });
    if let Some(pos) = values
        .iter()
        .position(|v| !(v.re.is_finite() && v.im.is_finite()))
    {
        let (i, j) = (pos / spec.ny, pos % spec.ny);
        return Err(Error::Input(format!(
            "non-finite sample at grid point (i={i}, j={j}) = ({}, {})",
            spec.x(i),
            spec.y(j)
        )));
    }
    Ok(Field2D { spec, values })
}

/// Real-valued convenience wrapper around [`sample`].
pub fn sample_real<F>(f: F, spec: GridSpec) -> Result<Field2D>
where
    F: Fn(f64, f64) -> f64 + Sync + Send,
{
    sample(move |x, y| Complex64::new(f(x, y), 0.0), spec)
}

/// One periodic axis `[-l, l)` with `n` points, used for 1D slices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineSpec {
    pub n: usize,
    pub l: f64,
}

impl LineSpec {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return config(format!("line length must be even and >= 8 (got {n})"));
        }
        if !(l.is_finite() && l > 0.0) {
            return config(format!("line half-width must be positive (got {l})"));
        }
        Ok(LineSpec { n, l })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.l + i as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn xi(&self, k: usize) -> f64 {
        PI * signed_mode(k, self.n) as f64 / self.l
    }

    pub fn refined(&self) -> LineSpec {
        LineSpec {
            n: self.n * 2,
            l: self.l,
        }
    }
}

/// Unitary 1D DFT in place.
pub fn fft_line(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    plan(n, inverse).process(data);
    let norm = 1.0 / (n as f64).sqrt();
    data.iter_mut().for_each(|c| *c *= norm);
}
