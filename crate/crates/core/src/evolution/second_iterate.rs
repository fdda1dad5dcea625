//! The high×low piece of the second Picard iterate for box data, by
//! quadrature in continuum frequency space.
//!
//! Data: `φ̂₁ = γ^{−3/2} 1_{D₁}`, `φ̂₂ = γ^{−3/2} N^{−s₁−(1+α/2)s₂} 1_{D₂}` with
//! `Dᵢ = D̃ᵢ ∪ (−D̃ᵢ)`. The output is
//!
//! ```text
//! |û₂(t,p)| = |ξ| / (|D₁|^{1/2}|D₂|^{1/2} N^{s₁+(1+α/2)s₂}) · |∫ t φ(tΩ(p₁, p−p₁)) dp₁|
//! φ(z) = (e^{−iz} − 1)/z
//! ```
//!
//! Coordinates near `D̃₂` are stored as offsets from `(N, H)` so that
//! `γ`-scale differences survive at large `N`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{gauss_legendre, gl_interval};
use crate::symbols::{omega1_stable, DispersionParams, IllposedBoxes};

/// Axis-aligned frequency box, optionally unioned with its reflection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FreqBoxSpec {
    pub xi_range: (f64, f64),
    pub eta_range: (f64, f64),
    pub mirrored: bool,
}

impl FreqBoxSpec {
    pub fn new(xi_range: (f64, f64), eta_range: (f64, f64), mirrored: bool) -> Result<Self> {
        let (a, b) = xi_range;
        let (c, d) = eta_range;
        if !(0.0 < a && a < b) {
            return Err(invalid("xi_range", format!("need 0 < a < b, got [{a}, {b}]")));
        }
        if !(c < d) {
            return Err(invalid("eta_range", format!("need c < d, got [{c}, {d}]")));
        }
        Ok(FreqBoxSpec { xi_range, eta_range, mirrored })
    }

    pub fn area(&self) -> f64 {
        let one = (self.xi_range.1 - self.xi_range.0) * (self.eta_range.1 - self.eta_range.0);
        if self.mirrored {
            2.0 * one
        } else {
            one
        }
    }

    /// `D̃₁`, `D̃₂` for the given boxes.
    pub fn illposed_pair(b: &IllposedBoxes) -> (FreqBoxSpec, FreqBoxSpec) {
        let e = b.d1_eta_half();
        let g = b.gamma;
        (
            FreqBoxSpec { xi_range: (0.5 * g, g), eta_range: (-e, e), mirrored: true },
            FreqBoxSpec { xi_range: (b.n, b.n + g), eta_range: (b.h, b.h + g * g), mirrored: true },
        )
    }
}

#[inline]
fn phi_kernel(z: f64) -> Complex64 {
    if z.abs() < 1e-4 {
        Complex64::new(-z / 2.0, -1.0 + z * z / 6.0)
    } else {
        let (s, c) = z.sin_cos();
        Complex64::new((c - 1.0) / z, -s / z)
    }
}

/// `(1+ξ²)^{s₁/2}(1+η²)^{s₂/2}`.
#[inline]
fn sobolev_weight(xi: f64, eta: f64, sbar: (f64, f64)) -> f64 {
    let w1 = if sbar.0 == 0.0 { 1.0 } else { (1.0 + xi * xi).powf(sbar.0 / 2.0) };
    let w2 = if sbar.1 == 0.0 { 1.0 } else { (1.0 + eta * eta).powf(sbar.1 / 2.0) };
    w1 * w2
}

fn breakpoints(a: (f64, f64), b: (f64, f64)) -> Vec<f64> {
    let mut v = vec![a.0 + b.0, a.0 + b.1, a.1 + b.0, a.1 + b.1];
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn panels(bp: &[f64], rule: &(Vec<f64>, Vec<f64>)) -> Vec<(f64, f64)> {
    bp.windows(2).filter(|w| w[1] > w[0]).flat_map(|w| gl_interval(w[0], w[1], rule).collect::<Vec<_>>()).collect()
}

/// `∫ |û₂|² w²` over the outputs of `σD̃₁ + D̃₂`.
fn piece_norm_sq(params: &DispersionParams, b: &IllposedBoxes, sigma: f64, sbar: (f64, f64), t: f64, q: usize) -> f64 {
    let a = params.alpha();
    let g = b.gamma;
    let e = b.d1_eta_half();
    // σD̃₁ in absolute ξ; D̃₂ as offsets from (N, H).
    let x1 = if sigma > 0.0 { (0.5 * g, g) } else { (-g, -0.5 * g) };
    let y1 = (-e, e);
    let x2 = (0.0, g);
    let y2 = (0.0, g * g);
    let rule = gauss_legendre(q);
    let outer_x = panels(&breakpoints(x1, x2), &rule);
    let outer_y = panels(&breakpoints(y1, y2), &rule);
    let d1_area = 2.0 * (0.5 * g) * (2.0 * e);
    let d2_area = 2.0 * g * g * g;
    let pref = 1.0 / ((d1_area * d2_area).sqrt() * b.n.powf(sbar.0 + (1.0 + a / 2.0) * sbar.1));

    let nodes: Vec<(f64, f64, f64)> = outer_x
        .iter()
        .flat_map(|&(x, wx)| outer_y.iter().map(move |&(y, wy)| (x, y, wx * wy)))
        .collect();
    let vals: Vec<f64> = nodes
        .par_iter()
        .map(|&(x, y, w)| {
            // p₁ ∈ σD̃₁ with p − p₁ ∈ D̃₂.
            let (lo_x, hi_x) = (x1.0.max(x - x2.1), x1.1.min(x - x2.0));
            let (lo_y, hi_y) = (y1.0.max(y - y2.1), y1.1.min(y - y2.0));
            if !(hi_x > lo_x && hi_y > lo_y) {
                return 0.0;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (xi1, wx) in gl_interval(lo_x, hi_x, &rule) {
                let xi2 = b.n + (x - xi1);
                let o1 = omega1_stable(a, xi1, xi2);
                for (eta1, wy) in gl_interval(lo_y, hi_y, &rule) {
                    let eta2 = b.h + (y - eta1);
                    let cross = eta1 * xi2 - eta2 * xi1;
                    let om = o1 - cross * cross / (xi1 * xi2 * (xi1 + xi2));
                    acc += phi_kernel(t * om) * (t * wx * wy);
                }
            }
            let xi = b.n + x;
            let eta = b.h + y;
            let amp = xi.abs() * pref * acc.norm() * sobolev_weight(xi, eta, sbar);
            w * amp * amp
        })
        .collect();
    vals.iter().sum()
}

fn norm_at(params: &DispersionParams, b: &IllposedBoxes, sbar: (f64, f64), t: f64, q: usize) -> f64 {
    // Mirrored pieces contribute equally.
    let s = piece_norm_sq(params, b, 1.0, sbar, t, q) + piece_norm_sq(params, b, -1.0, sbar, t, q);
    (2.0 * s).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SecondIterate {
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub gamma: f64,
    pub t: f64,
    pub quad_res: usize,
    /// Norm at `2·quad_res`.
    pub norm: f64,
    pub norm_coarse: f64,
    pub rel_change: f64,
}

/// `‖u₂(t)‖_{H^{s̄}}` of the high×low piece. Errors if doubling `quad_res`
/// moves the result by more than 1%.
pub fn second_iterate_boxdata(
    params: &DispersionParams,
    n: f64,
    gamma: f64,
    sbar: (f64, f64),
    t: f64,
    quad_res: usize,
) -> Result<SecondIterate> {
    if quad_res < 8 {
        return Err(invalid("quad_res", format!("need at least 8 nodes, got {quad_res}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", format!("must be nonnegative, got {t}")));
    }
    let b = IllposedBoxes::new(params, n, gamma)?;
    let coarse = norm_at(params, &b, sbar, t, quad_res);
    let fine = norm_at(params, &b, sbar, t, 2 * quad_res);
    let rel = if fine == 0.0 { (coarse - fine).abs() } else { (coarse - fine).abs() / fine };
    if rel > 0.01 {
        return Err(Error::Quadrature(format!(
            "N = {n}: quad_res {quad_res} → {coarse:e}, {} → {fine:e} (change {rel:.3e})",
            2 * quad_res
        )));
    }
    Ok(SecondIterate { alpha: params.alpha(), n, gamma, t, quad_res, norm: fine, norm_coarse: coarse, rel_change: rel })
}

/// `(‖φ₁‖_{H^{s̄}}, ‖φ₂‖_{H^{s̄}})` by Gauss–Legendre over the boxes.
pub fn data_norms(params: &DispersionParams, n: f64, gamma: f64, sbar: (f64, f64), quad_res: usize) -> Result<(f64, f64)> {
    let b = IllposedBoxes::new(params, n, gamma)?;
    let a = params.alpha();
    let rule = gauss_legendre(quad_res.max(2));
    let (d1, d2) = FreqBoxSpec::illposed_pair(&b);
    let box_int = |bx: &FreqBoxSpec| -> f64 {
        let mut s = 0.0;
        for (xi, wx) in gl_interval(bx.xi_range.0, bx.xi_range.1, &rule) {
            for (eta, wy) in gl_interval(bx.eta_range.0, bx.eta_range.1, &rule) {
                let w = sobolev_weight(xi, eta, sbar);
                s += wx * wy * w * w;
            }
        }
        // The reflected box has the same weights.
        2.0 * s
    };
    let g3 = gamma.powi(3);
    let n1 = (box_int(&d1) / g3).sqrt();
    let n2 = (box_int(&d2) / g3).sqrt() / n.powf(sbar.0 + (1.0 + a / 2.0) * sbar.1);
    Ok((n1, n2))
}
