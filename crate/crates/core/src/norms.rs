//! Conserved quantities and norms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::evolution::Trajectory;
use crate::spectral::{to_physical, truncate_two_thirds, SpectralField};
use crate::symbols::DispersionParams;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnisoIndex {
    pub s1: f64,
    pub s2: f64,
}

impl AnisoIndex {
    pub const L2: AnisoIndex = AnisoIndex { s1: 0.0, s2: 0.0 };

    pub fn new(s1: f64, s2: f64) -> Self {
        AnisoIndex { s1, s2 }
    }
}

/// Exponents `(q, r)` of `L^q_t L^r_{xy}`; `f64::INFINITY` for sup norms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MixedNormSpec {
    q: f64,
    r: f64,
}

impl MixedNormSpec {
    pub fn new(q: f64, r: f64) -> Result<Self> {
        if !(q > 2.0) {
            return Err(invalid("q", format!("must lie in (2, ∞], got {q}")));
        }
        if !(r >= 2.0) {
            return Err(invalid("r", format!("must lie in [2, ∞], got {r}")));
        }
        Ok(MixedNormSpec { q, r })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `1/q + 1/r = 1/2`.
    pub fn strichartz_admissible(&self) -> bool {
        (1.0 / self.q + 1.0 / self.r - 0.5).abs() < 1e-12
    }

    /// Smoothing exponent `γ = (1 − 2/r)(1/2 − α/4)` of the linear estimate.
    pub fn smoothing_gamma(&self, alpha: f64) -> f64 {
        (1.0 - 2.0 / self.r) * (0.5 - alpha / 4.0)
    }
}

/// `∫u²` by quadrature on the physical grid.
pub fn mass(u: &SpectralField) -> f64 {
    let p = to_physical(u);
    p.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() * u.grid().cell_area()
}

/// `∫u²` by Plancherel.
pub fn mass_spectral(u: &SpectralField) -> f64 {
    u.grid().area() * u.coeff_norm_sq()
}

/// `½∫|D_x^{α/2}u|² + ½∫|∂ₓ⁻¹∂ᵧu|²`.
pub fn quadratic_energy(params: &DispersionParams, u: &SpectralField) -> Result<f64> {
    u.require_zero_x_mean()?;
    let g = u.grid();
    let a = params.alpha();
    let s: f64 = u
        .coeffs()
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let (ix, iy) = g.split(idx);
            let (xi, eta) = (g.xi(ix), g.eta(iy));
            if xi == 0.0 {
                0.0
            } else {
                (xi.abs().powf(a) + eta * eta / (xi * xi)) * c.norm_sqr()
            }
        })
        .sum();
    Ok(0.5 * g.area() * s)
}

/// `∫u³/6` on the 2/3-truncated field.
pub fn cubic_energy(u: &SpectralField) -> f64 {
    let p = to_physical(&truncate_two_thirds(u));
    p.samples.iter().map(|c| c.re * c.re * c.re).sum::<f64>() * u.grid().cell_area() / 6.0
}

pub fn energy_alpha(params: &DispersionParams, u: &SpectralField) -> Result<f64> {
    Ok(quadratic_energy(params, u)? + cubic_energy(u))
}

fn weighted_norm(u: &SpectralField, w: impl Fn(f64, f64) -> f64) -> Result<f64> {
    let g = u.grid();
    let mut s = 0.0;
    for (idx, c) in u.coeffs().iter().enumerate() {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let (ix, iy) = g.split(idx);
        let wk = w(g.xi(ix), g.eta(iy));
        if !wk.is_finite() {
            return Err(invalid("index", format!("weight is infinite at (ξ, η) = ({}, {})", g.xi(ix), g.eta(iy))));
        }
        s += wk * wk * c.norm_sqr();
    }
    Ok((g.area() * s).sqrt())
}

/// `‖u‖_{H^{s₁,s₂}}`, or the homogeneous `|ξ|^{s₁}|η|^{s₂}` version.
pub fn sobolev_aniso(u: &SpectralField, idx: AnisoIndex, homogeneous: bool) -> Result<f64> {
    let AnisoIndex { s1, s2 } = idx;
    if homogeneous {
        if s1 < 0.0 {
            u.require_zero_x_mean()?;
        }
        let pw = |v: f64, s: f64| if s == 0.0 { 1.0 } else { v.abs().powf(s) };
        weighted_norm(u, |xi, eta| pw(xi, s1) * pw(eta, s2))
    } else {
        let pw = |v: f64, s: f64| if s == 0.0 { 1.0 } else { (1.0 + v * v).powf(s / 2.0) };
        weighted_norm(u, |xi, eta| pw(xi, s1) * pw(eta, s2))
    }
}

/// `‖p û‖` with `p = 1 + |ξ|^{α/2} + |η|/|ξ|`.
pub fn energy_space_norm(params: &DispersionParams, u: &SpectralField) -> Result<f64> {
    u.require_zero_x_mean()?;
    let a = params.alpha();
    weighted_norm(&u.without_x_mean(), |xi, eta| 1.0 + xi.abs().powf(a / 2.0) + eta.abs() / xi.abs())
}

/// `‖u‖_{L^r}` on the physical grid.
pub fn lebesgue_norm(u: &SpectralField, r: f64) -> f64 {
    let p = to_physical(u);
    if r.is_infinite() {
        p.max_abs()
    } else {
        p.integral_abs_pow(r).powf(1.0 / r)
    }
}

/// `‖u‖_{L^q_t L^r_{xy}}` over the snapshots, trapezoidal in time.
pub fn spacetime_norm(traj: &Trajectory, spec: MixedNormSpec) -> Result<f64> {
    let n = traj.len();
    if n == 0 || (n < 2 && spec.q.is_finite()) {
        return Err(invalid("trajectory", format!("need at least 2 snapshots for q = {}, got {n}", spec.q)));
    }
    let inner: Vec<f64> = traj.fields.par_iter().map(|f| lebesgue_norm(f, spec.r)).collect();
    if spec.q.is_infinite() {
        return Ok(inner.iter().fold(0.0, |m, &v| m.max(v)));
    }
    let h = traj.times[1] - traj.times[0];
    for w in traj.times.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1e-300) {
            return Err(Error::InvalidParameter { name: "trajectory", reason: "snapshots are not equally spaced".into() });
        }
    }
    let q = spec.q;
    let mut s = 0.0;
    for (k, v) in inner.iter().enumerate() {
        let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        s += w * v.powf(q);
    }
    Ok((h * s).powf(1.0 / q))
}
