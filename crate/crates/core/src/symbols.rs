//! Dispersion relation `ω(ξ,η) = |ξ|^α ξ + η²/ξ`, the three-wave resonance
//! function and the geometry of the characteristic surfaces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DispersionParams {
    alpha: f64,
}

impl DispersionParams {
    /// Accepts `2 ≤ α < 4`.
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && (2.0..4.0).contains(&alpha)) {
            return Err(invalid("alpha", format!("must lie in [2, 4), got {alpha}")));
        }
        Ok(DispersionParams { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `g(ξ) = |ξ|^α ξ`.
    #[inline]
    pub fn g(&self, xi: f64) -> f64 {
        xi.abs().powf(self.alpha) * xi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FreqPoint {
    pub xi: f64,
    pub eta: f64,
}

impl FreqPoint {
    pub fn new(xi: f64, eta: f64) -> Result<Self> {
        if xi == 0.0 || !xi.is_finite() || !eta.is_finite() {
            return Err(invalid("xi", format!("need finite ξ ≠ 0, got ({xi}, {eta})")));
        }
        Ok(FreqPoint { xi, eta })
    }

    pub fn add(self, o: FreqPoint) -> FreqPoint {
        FreqPoint { xi: self.xi + o.xi, eta: self.eta + o.eta }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FreqPair {
    pub p1: FreqPoint,
    pub p2: FreqPoint,
}

impl FreqPair {
    pub fn new(p1: FreqPoint, p2: FreqPoint) -> Result<Self> {
        if p1.xi + p2.xi == 0.0 {
            return Err(invalid("xi1 + xi2", "must be nonzero"));
        }
        Ok(FreqPair { p1, p2 })
    }

    pub fn from_coords(xi1: f64, eta1: f64, xi2: f64, eta2: f64) -> Result<Self> {
        Self::new(FreqPoint::new(xi1, eta1)?, FreqPoint::new(xi2, eta2)?)
    }

    pub fn swapped(self) -> Self {
        FreqPair { p1: self.p2, p2: self.p1 }
    }

    pub fn sum(&self) -> FreqPoint {
        self.p1.add(self.p2)
    }

    /// `η₁ξ₂ − η₂ξ₁`.
    pub fn cross(&self) -> f64 {
        self.p1.eta * self.p2.xi - self.p2.eta * self.p1.xi
    }
}

pub fn omega(params: &DispersionParams, p: FreqPoint) -> f64 {
    params.g(p.xi) + p.eta * p.eta / p.xi
}

pub fn grad_omega(params: &DispersionParams, p: FreqPoint) -> (f64, f64) {
    let a = params.alpha;
    let s = p.eta / p.xi;
    ((a + 1.0) * p.xi.abs().powf(a) - s * s, 2.0 * s)
}

pub fn surface_normal(params: &DispersionParams, p: FreqPoint) -> [f64; 3] {
    let (gx, gy) = grad_omega(params, p);
    [1.0, -gx, -gy]
}

pub fn omega1_part(params: &DispersionParams, q: FreqPair) -> f64 {
    let (a, b) = (q.p1.xi, q.p2.xi);
    params.g(a + b) - params.g(a) - params.g(b)
}

pub fn omega2_part(q: FreqPair) -> f64 {
    let (a, b) = (q.p1.xi, q.p2.xi);
    let c = q.cross();
    c * c / (a * b * (a + b))
}

pub fn resonance_fraction(params: &DispersionParams, q: FreqPair) -> f64 {
    omega1_part(params, q) - omega2_part(q)
}

pub fn resonance_difference(params: &DispersionParams, q: FreqPair) -> f64 {
    omega(params, q.sum()) - omega(params, q.p1) - omega(params, q.p2)
}

/// `g(a+b) − g(a) − g(b)` without cancellation when `|a| ≪ |b|`.
pub fn omega1_stable(alpha: f64, a: f64, b: f64) -> f64 {
    let (s, l) = if a.abs() <= b.abs() { (a, b) } else { (b, a) };
    let g = |x: f64| x.abs().powf(alpha) * x;
    // g(l+s) − g(l) = sign(l)|l|^{α+1}((1+s/l)^{α+1} − 1)
    let r = s / l;
    let head = l.signum() * l.abs().powf(alpha + 1.0) * ((alpha + 1.0) * r.ln_1p()).exp_m1();
    head - g(s)
}

pub fn normal_determinant_numeric(params: &DispersionParams, q: FreqPair) -> f64 {
    let n1 = surface_normal(params, q.p1);
    let n2 = surface_normal(params, q.p2);
    let n3 = surface_normal(params, q.sum());
    n1[0] * (n2[1] * n3[2] - n2[2] * n3[1]) - n1[1] * (n2[0] * n3[2] - n2[2] * n3[0])
        + n1[2] * (n2[0] * n3[1] - n2[1] * n3[0])
}

pub fn normal_determinant_closed(params: &DispersionParams, q: FreqPair) -> f64 {
    let (a, b) = (q.p1.xi, q.p2.xi);
    let c = q.cross();
    let d = a * b * (a + b);
    let inner = (params.alpha + 1.0) * (params.g(a) + params.g(b) - params.g(a + b)) - c * c / d;
    -2.0 * c / d * inner
}

/// Min and max of a sampled ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    fn empty() -> Self {
        Range { min: f64::INFINITY, max: f64::NEG_INFINITY }
    }

    fn push(&mut self, v: f64) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
    }

    fn merge(self, o: Range) -> Range {
        Range { min: self.min.min(o.min), max: self.max.max(o.max) }
    }

    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.min >= lo && self.max <= hi
    }
}

/// The thin boxes `D̃₁ = [γ/2, γ] × [−√(1+α)γ², √(1+α)γ²]` and
/// `D̃₂ = [N, N+γ] × [H, H+γ²]`, `H = √(1+α) N^{(α+2)/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IllposedBoxes {
    pub alpha: f64,
    pub n: f64,
    pub gamma: f64,
    pub h: f64,
}

impl IllposedBoxes {
    pub fn new(params: &DispersionParams, n: f64, gamma: f64) -> Result<Self> {
        if !(n.is_finite() && n > 1.0) {
            return Err(invalid("N", format!("must exceed 1, got {n}")));
        }
        if !(gamma.is_finite() && gamma > 0.0 && gamma < 1.0 && gamma < n) {
            return Err(invalid("gamma", format!("need 0 < γ < min(1, N), got {gamma}")));
        }
        if n + gamma == n || gamma * gamma == 0.0 {
            return Err(invalid("gamma", format!("box of zero width at N = {n}, γ = {gamma}")));
        }
        let a = params.alpha;
        Ok(IllposedBoxes { alpha: a, n, gamma, h: (1.0 + a).sqrt() * n.powf((a + 2.0) / 2.0) })
    }

    /// `γ = N^{−(α−1)/2−θ}`.
    pub fn gamma_for(alpha: f64, n: f64, theta: f64) -> f64 {
        n.powf(-(alpha - 1.0) / 2.0 - theta)
    }

    pub fn d1_eta_half(&self) -> f64 {
        (1.0 + self.alpha).sqrt() * self.gamma * self.gamma
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResonanceScan {
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub gamma: f64,
    pub theta: f64,
    pub samples: usize,
    pub seed: u64,
    /// `|Ω¹| / (N^α γ)`
    pub omega1_ratio: Range,
    /// `|Ω| / (N^{α−1} γ²)`
    pub omega_ratio: Range,
}

impl ResonanceScan {
    /// One flat JSON record per ratio.
    pub fn json_records(&self) -> Vec<serde_json::Value> {
        [("omega1", self.omega1_ratio), ("omega", self.omega_ratio)]
            .into_iter()
            .map(|(q, r)| {
                serde_json::json!({
                    "alpha": self.alpha, "N": self.n, "gamma": self.gamma, "theta": self.theta,
                    "quantity": q, "ratio_min": r.min, "ratio_max": r.max,
                    "samples": self.samples, "seed": self.seed,
                })
            })
            .collect()
    }
}

const CHUNK: usize = 4096;

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Uniform samples from `D̃₁ × D̃₂`; reports the two size-law ratio ranges.
pub fn resonance_size_scan(
    params: &DispersionParams,
    n: f64,
    gamma: f64,
    samples: usize,
    seed: u64,
) -> Result<ResonanceScan> {
    let b = IllposedBoxes::new(params, n, gamma)?;
    if samples == 0 {
        return Err(invalid("samples", "must be positive"));
    }
    let a = params.alpha;
    let s1 = n.powf(a) * gamma;
    let s2 = n.powf(a - 1.0) * gamma * gamma;
    let e1 = b.d1_eta_half();
    let chunks = samples.div_ceil(CHUNK);
    let (r1, r2) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let (mut r1, mut r2) = (Range::empty(), Range::empty());
            for _ in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let xi1 = rng.gen_range(0.5 * gamma..=gamma);
                let eta1 = rng.gen_range(-e1..=e1);
                let dxi2 = rng.gen_range(0.0..=gamma);
                let deta2 = rng.gen_range(0.0..=gamma * gamma);
                let xi2 = n + dxi2;
                let eta2 = b.h + deta2;
                let o1 = omega1_stable(a, xi1, xi2);
                let cross = eta1 * xi2 - eta2 * xi1;
                let o2 = cross * cross / (xi1 * xi2 * (xi1 + xi2));
                r1.push(o1.abs() / s1);
                r2.push((o1 - o2).abs() / s2);
            }
            (r1, r2)
        })
        .reduce(|| (Range::empty(), Range::empty()), |x, y| (x.0.merge(y.0), x.1.merge(y.1)));
    let theta = -gamma.ln() / n.ln() - (a - 1.0) / 2.0;
    Ok(ResonanceScan { alpha: a, n, gamma, theta, samples, seed, omega1_ratio: r1, omega_ratio: r2 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransversalityReport {
    pub alpha: f64,
    pub n_max: f64,
    pub n_min: f64,
    pub threshold: f64,
    pub accepted: usize,
    pub attempts: usize,
    pub seed: u64,
    /// `|η₁ξ₂ − η₂ξ₁| / (N_max^{α/2+1} N_min)`
    pub cross_ratio: Range,
    /// `|η₁/ξ₁ − η₂/ξ₂| / N_max^{α/2}`
    pub slope_gap_ratio: Range,
    /// `|∇ω(p₁) − ∇ω(p₂)| / N_max^{α/2}`
    pub grad_gap_ratio: Range,
}

/// Rejection-samples resonant pairs `|Ω| ≤ c|Ω¹|` with `|ξ₁| ∈ [N_max, 2N_max]`,
/// `|ξ₂| ∈ [N_min, 2N_min]` and reports the transversality ratios.
pub fn transversality_check(
    params: &DispersionParams,
    n_max: f64,
    n_min: f64,
    samples: usize,
    threshold: f64,
    seed: u64,
) -> Result<TransversalityReport> {
    if !(n_max > 0.0 && n_min > 0.0 && n_min <= n_max) {
        return Err(invalid("n_min", format!("need 0 < N_min ≤ N_max, got {n_min}, {n_max}")));
    }
    if samples == 0 {
        return Err(invalid("samples", "must be positive"));
    }
    let a = params.alpha;
    let half = n_max.powf(a / 2.0);
    let r1 = 4.0 * half * n_max;
    let r2 = 4.0 * half * n_min;
    let max_chunks = (samples * 1000).div_ceil(CHUNK).max(1);
    let batch = rayon::current_num_threads().max(1) * 2;

    let mut accepted: Vec<FreqPair> = Vec::with_capacity(samples);
    let mut next = 0usize;
    while accepted.len() < samples && next < max_chunks {
        let hi = (next + batch).min(max_chunks);
        let found: Vec<Vec<FreqPair>> = (next..hi)
            .into_par_iter()
            .map(|c| {
                let mut rng = chunk_rng(seed, c);
                let mut out = Vec::new();
                for _ in 0..CHUNK {
                    let xi1 = rng.gen_range(n_max..=2.0 * n_max);
                    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                    let xi2 = sign * rng.gen_range(n_min..=2.0 * n_min);
                    let eta1 = rng.gen_range(-r1..=r1);
                    let eta2 = rng.gen_range(-r2..=r2);
                    let Ok(q) = FreqPair::from_coords(xi1, eta1, xi2, eta2) else { continue };
                    let o1 = omega1_part(params, q);
                    if resonance_fraction(params, q).abs() <= threshold * o1.abs() {
                        out.push(q);
                    }
                }
                out
            })
            .collect();
        for v in found {
            accepted.extend(v);
        }
        next = hi;
    }
    if accepted.is_empty() {
        return Err(Error::EmptySample(format!(
            "no pair with |Ω| ≤ {threshold}|Ω¹| for N_max = {n_max}, N_min = {n_min}"
        )));
    }
    accepted.truncate(samples);
    let (mut cr, mut sg, mut gg) = (Range::empty(), Range::empty(), Range::empty());
    for q in &accepted {
        cr.push(q.cross().abs() / (half * n_max * n_min));
        sg.push((q.p1.eta / q.p1.xi - q.p2.eta / q.p2.xi).abs() / half);
        let (g1, g2) = (grad_omega(params, q.p1), grad_omega(params, q.p2));
        gg.push((g1.0 - g2.0).hypot(g1.1 - g2.1) / half);
    }
    Ok(TransversalityReport {
        alpha: a,
        n_max,
        n_min,
        threshold,
        accepted: accepted.len(),
        attempts: next * CHUNK,
        seed,
        cross_ratio: cr,
        slope_gap_ratio: sg,
        grad_gap_ratio: gg,
    })
}
