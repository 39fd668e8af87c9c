//! Seeded test-function families shared by the norm, oracle and experiment
//! harnesses.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grid::{sample_real, Field2D, GridSpec};

/// `A·exp(−((x−x₀)/σx)² − ((y−y₀)/σy)²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gaussian {
    pub amp: f64,
    pub x0: f64,
    pub y0: f64,
    pub sx: f64,
    pub sy: f64,
}

impl Gaussian {
    pub fn unit() -> Self {
        Gaussian {
            amp: 1.0,
            x0: 0.0,
            y0: 0.0,
            sx: 1.0,
            sy: 1.0,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let u = (x - self.x0) / self.sx;
        let v = (y - self.y0) / self.sy;
        self.amp * (-u * u - v * v).exp()
    }

    pub fn sample(&self, spec: GridSpec) -> Result<Field2D> {
        let g = *self;
        sample_real(move |x, y| g.eval(x, y), spec)
    }

    /// Random signed Gaussian centred within `reach` of the origin.
    pub fn random(rng: &mut ChaCha8Rng, reach: f64) -> Gaussian {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        Gaussian {
            amp: sign * rng.gen_range(0.5..2.0),
            x0: rng.gen_range(-reach..reach),
            y0: rng.gen_range(-reach..reach),
            sx: rng.gen_range(0.5..2.0),
            sy: rng.gen_range(0.5..2.0),
        }
    }
}

/// Smooth localized bump with a random modulation: a Gaussian or `sech²`
/// envelope times `cos(kx·x + ky·y + phase)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Packet {
    pub envelope: Gaussian,
    pub sech: bool,
    pub kx: f64,
    pub ky: f64,
    pub phase: f64,
}

impl Packet {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let e = &self.envelope;
        let env = if self.sech {
            let s = 1.0 / ((x - e.x0) / e.sx).cosh();
            let v = (y - e.y0) / e.sy;
            e.amp * s * s * (-v * v).exp()
        } else {
            e.eval(x, y)
        };
        env * (self.kx * x + self.ky * y + self.phase).cos()
    }

    pub fn sample(&self, spec: GridSpec) -> Result<Field2D> {
        let p = *self;
        sample_real(move |x, y| p.eval(x, y), spec)
    }

    /// Random packet whose envelope stays well inside a box of half-width
    /// `reach` and whose carrier stays below `kmax`.
    pub fn random(rng: &mut ChaCha8Rng, reach: f64, kmax: f64) -> Packet {
        let w = rng.gen_range(0.6..1.6);
        let mut carrier = || {
            if kmax > 0.0 {
                rng.gen_range(-kmax..kmax)
            } else {
                0.0
            }
        };
        let (kx, ky) = (carrier(), carrier());
        Packet {
            envelope: Gaussian {
                amp: rng.gen_range(0.5..2.0),
                x0: rng.gen_range(-reach..reach),
                y0: rng.gen_range(-reach..reach),
                sx: w,
                sy: w * rng.gen_range(0.7..1.4),
            },
            sech: rng.gen_bool(0.5),
            kx,
            ky,
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
        }
    }
}

/// Complex samples of a 1D function.
pub fn line_samples(xs: &[f64], f: impl Fn(f64) -> f64) -> Vec<Complex64> {
    xs.iter().map(|&x| Complex64::new(f(x), 0.0)).collect()
}
