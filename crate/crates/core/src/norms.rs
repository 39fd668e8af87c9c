//! Anisotropic Sobolev norms, polynomially weighted L² norms, and the
//! combined ℱ^{s₁,s₂}_{r₁,r₂} norm, plus the empirical embedding, algebra and
//! interpolation checks built on them.

use serde::{Deserialize, Serialize};

use crate::error::{config, input, Result};
use crate::grid::{forward_transform, Field2D};
use crate::multipliers::{apply_multiplier, bessel_symbol, Axis};

/// Indices `(s₁, s₂, r₁, r₂)` of ℱ^{s₁,s₂}_{r₁,r₂}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormIndices {
    pub s1: f64,
    pub s2: f64,
    pub r1: f64,
    pub r2: f64,
}

impl Default for NormIndices {
    fn default() -> Self {
        NormIndices {
            s1: 1.0,
            s2: 2.0,
            r1: 1.0,
            r2: 1.0,
        }
    }
}

impl NormIndices {
    pub fn new(s1: f64, s2: f64, r1: f64, r2: f64) -> Result<Self> {
        let idx = NormIndices { s1, s2, r1, r2 };
        idx.validate()?;
        Ok(idx)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("s1", self.s1),
            ("s2", self.s2),
            ("r1", self.r1),
            ("r2", self.r2),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return config(format!("{name} must be finite and >= 0 (got {v})"));
            }
        }
        Ok(())
    }

    /// `1/s₁ + 1/s₂ < 2`, `s₂ ≥ max(2r₁, r₂)` and `r₁ < 5/2`.
    pub fn well_posed(&self) -> bool {
        embedding_condition(self.s1, self.s2)
            && self.s2 >= (2.0 * self.r1).max(self.r2)
            && self.r1 < 2.5
    }
}

fn embedding_condition(s1: f64, s2: f64) -> bool {
    s1 > 0.0 && s2 > 0.0 && 1.0 / s1 + 1.0 / s2 < 2.0
}

fn nonneg(pairs: &[(&str, f64)]) -> Result<()> {
    for (name, v) in pairs {
        if !(v.is_finite() && *v >= 0.0) {
            return config(format!("{name} must be finite and >= 0 (got {v})"));
        }
    }
    Ok(())
}

/// `‖(1 + |ξ|^{s₁} + |η|^{s₂}) f̂‖`.
pub fn sobolev_aniso(f: &Field2D, s1: f64, s2: f64) -> Result<f64> {
    nonneg(&[("s1", s1), ("s2", s2)])?;
    let s = forward_transform(f)?;
    Ok(s.weighted_norm(|xi, eta| 1.0 + xi.abs().powf(s1) + eta.abs().powf(s2)))
}

/// `‖(|x|^{r₁} + |y|^{r₂}) f‖`.
pub fn weighted_l2(f: &Field2D, r1: f64, r2: f64) -> Result<f64> {
    nonneg(&[("r1", r1), ("r2", r2)])?;
    f.check_shape()?;
    Ok(f.weighted(|x, y| x.abs().powf(r1) + y.abs().powf(r2))
        .l2_norm())
}

/// `(‖f‖²_{H^{s₁,s₂}} + ‖f‖²_{L²_{r₁,r₂}})^{1/2}`.
pub fn f_space_norm(f: &Field2D, idx: NormIndices) -> Result<f64> {
    idx.validate()?;
    let h = sobolev_aniso(f, idx.s1, idx.s2)?;
    let w = weighted_l2(f, idx.r1, idx.r2)?;
    Ok(h.hypot(w))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingReport {
    pub condition: bool,
    /// `‖f‖_∞ / ‖f‖_{H^{s₁,s₂}}` for each sample.
    pub ratios: Vec<f64>,
    /// Max of `ratios` when the condition holds.
    pub constant: Option<f64>,
}

pub fn embedding_check(s1: f64, s2: f64, samples: &[Field2D]) -> Result<EmbeddingReport> {
    nonneg(&[("s1", s1), ("s2", s2)])?;
    let condition = embedding_condition(s1, s2);
    let mut ratios = Vec::with_capacity(samples.len());
    for (i, f) in samples.iter().enumerate() {
        let h = sobolev_aniso(f, s1, s2)?;
        if h == 0.0 {
            return input(format!("embedding sample {i} is identically zero"));
        }
        ratios.push(f.max_abs() / h);
    }
    let constant = condition.then(|| ratios.iter().cloned().fold(0.0, f64::max));
    Ok(EmbeddingReport {
        condition,
        ratios,
        constant,
    })
}

/// `‖fg‖_ℱ / (‖f‖_ℱ ‖g‖_ℱ)`.
pub fn algebra_ratio(f: &Field2D, g: &Field2D, idx: NormIndices) -> Result<f64> {
    let nf = f_space_norm(f, idx)?;
    let ng = f_space_norm(g, idx)?;
    if nf == 0.0 || ng == 0.0 {
        return input("algebra_ratio needs two nonzero fields");
    }
    let fg = f.mul(g)?;
    Ok(f_space_norm(&fg, idx)? / (nf * ng))
}

/// Interpolation inequality with `v` on the same axis as `u`.
pub fn interpolation_check(
    f: &Field2D,
    a: f64,
    b: f64,
    theta: f64,
    u_axis: Axis,
) -> Result<(f64, f64)> {
    interpolation_check_axes(f, a, b, theta, u_axis, u_axis)
}

/// Returns `(‖J_u^{θa}(⟨v⟩^{(1−θ)b} f)‖, ‖⟨v⟩^b f‖^{1−θ} ‖J_u^a f‖^θ)`.
pub fn interpolation_check_axes(
    f: &Field2D,
    a: f64,
    b: f64,
    theta: f64,
    u_axis: Axis,
    v_axis: Axis,
) -> Result<(f64, f64)> {
    if !(theta > 0.0 && theta < 1.0) {
        return config(format!("theta must lie in (0, 1) (got {theta})"));
    }
    nonneg(&[("a", a), ("b", b)])?;
    let bracket = |p: f64| {
        move |x: f64, y: f64| {
            let v = match v_axis {
                Axis::X => x * x,
                Axis::Y => y * y,
                Axis::Isotropic => x * x + y * y,
            };
            (1.0 + v).powf(p / 2.0)
        }
    };
    let inner = f.weighted(bracket((1.0 - theta) * b));
    let lhs = apply_multiplier(&inner, &bessel_symbol(theta * a, u_axis))?.l2_norm();
    let vb = f.weighted(bracket(b)).l2_norm();
    let ja = forward_transform(f)?.weighted_norm(|xi, eta| {
        let q = match u_axis {
            Axis::X => xi * xi,
            Axis::Y => eta * eta,
            Axis::Isotropic => xi * xi + eta * eta,
        };
        (1.0 + q).powf(a / 2.0)
    });
    Ok((lhs, vb.powf(1.0 - theta) * ja.powf(theta)))
}
