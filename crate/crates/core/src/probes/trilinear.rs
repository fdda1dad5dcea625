//! Trilinear convolution integrals on affine `(τ, ξ, η)` lattices.
//!
//! A lattice is `{B k : k ∈ ℤ³}` for a basis `B`. A lattice function stores
//! values on the index box `origin + [0, dims)`. The integral
//! `∫(f₁ ∗ f₂) f₃` is approximated by `|det B|² Σ f₁(a) f₂(b) f₃(a+b)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftDirection;

use super::ExperimentRecord;
use crate::error::{invalid, Error, Result};
use crate::spectral::fft3;
use crate::symbols::{grad_omega, omega, omega1_part, DispersionParams, FreqPair, FreqPoint};

/// Basis columns as `(τ, ξ, η)` vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice3 {
    pub basis: [[f64; 3]; 3],
}

impl Lattice3 {
    pub fn unit() -> Self {
        Lattice3 { basis: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] }
    }

    pub fn cell_volume(&self) -> f64 {
        let [a, b, c] = self.basis;
        (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])).abs()
    }

    pub fn point(&self, k: [i64; 3]) -> [f64; 3] {
        let mut p = [0.0; 3];
        for (c, &kc) in k.iter().enumerate() {
            for (pi, bi) in p.iter_mut().zip(self.basis[c]) {
                *pi += kc as f64 * bi;
            }
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeFunction {
    pub lattice: Lattice3,
    pub origin: [i64; 3],
    pub dims: [usize; 3],
    pub values: Vec<f64>,
}

impl LatticeFunction {
    pub fn zeros(lattice: Lattice3, origin: [i64; 3], dims: [usize; 3]) -> Self {
        LatticeFunction { lattice, origin, dims, values: vec![0.0; dims[0] * dims[1] * dims[2]] }
    }

    #[inline]
    pub fn index(&self, i: [usize; 3]) -> usize {
        (i[0] * self.dims[1] + i[1]) * self.dims[2] + i[2]
    }

    pub fn get_global(&self, k: [i64; 3]) -> f64 {
        let mut i = [0usize; 3];
        for c in 0..3 {
            let d = k[c] - self.origin[c];
            if d < 0 || d >= self.dims[c] as i64 {
                return 0.0;
            }
            i[c] = d as usize;
        }
        self.values[self.index(i)]
    }

    pub fn scale(&self, s: f64) -> Self {
        LatticeFunction { values: self.values.iter().map(|v| v * s).collect(), ..self.clone() }
    }

    pub fn sum_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// `(Σ f² |det B|)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.sum_sq() * self.lattice.cell_volume()).sqrt()
    }

    fn check(&self) -> Result<()> {
        if self.values.len() != self.dims.iter().product::<usize>() {
            return Err(invalid("values", "length does not match dims"));
        }
        if self.values.iter().any(|v| !(*v >= 0.0)) {
            return Err(invalid("values", "lattice functions must be nonnegative"));
        }
        Ok(())
    }
}

fn check_compatible(fs: [&LatticeFunction; 3]) -> Result<()> {
    for f in fs {
        f.check()?;
        if f.lattice != fs[0].lattice {
            return Err(Error::GridMismatch("lattice functions live on different lattices".into()));
        }
    }
    Ok(())
}

/// `Σ_{a,b} f₁(a) f₂(b) f₃(a+b)` via a zero-padded FFT convolution.
pub fn trilinear_integral(f1: &LatticeFunction, f2: &LatticeFunction, f3: &LatticeFunction) -> Result<f64> {
    check_compatible([f1, f2, f3])?;
    let p: [usize; 3] = std::array::from_fn(|c| f1.dims[c] + f2.dims[c] - 1);
    let len = p[0] * p[1] * p[2];
    let embed = |f: &LatticeFunction| {
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        for i0 in 0..f.dims[0] {
            for i1 in 0..f.dims[1] {
                for i2 in 0..f.dims[2] {
                    buf[(i0 * p[1] + i1) * p[2] + i2] = Complex64::new(f.values[f.index([i0, i1, i2])], 0.0);
                }
            }
        }
        fft3(&mut buf, p, FftDirection::Forward);
        buf
    };
    let a = embed(f1);
    let b = embed(f2);
    let mut c: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    fft3(&mut c, p, FftDirection::Inverse);
    let norm = 1.0 / len as f64;
    let base: [i64; 3] = std::array::from_fn(|k| f1.origin[k] + f2.origin[k]);
    let mut total = 0.0;
    for m0 in 0..p[0] {
        for m1 in 0..p[1] {
            for m2 in 0..p[2] {
                let v3 = f3.get_global([base[0] + m0 as i64, base[1] + m1 as i64, base[2] + m2 as i64]);
                if v3 != 0.0 {
                    total += c[(m0 * p[1] + m1) * p[2] + m2].re * norm * v3;
                }
            }
        }
    }
    Ok(total)
}

/// The same sum by direct enumeration of pairs.
pub fn trilinear_integral_direct(f1: &LatticeFunction, f2: &LatticeFunction, f3: &LatticeFunction) -> Result<f64> {
    check_compatible([f1, f2, f3])?;
    let pts = |f: &LatticeFunction| {
        let mut v = Vec::new();
        for i0 in 0..f.dims[0] {
            for i1 in 0..f.dims[1] {
                for i2 in 0..f.dims[2] {
                    let val = f.values[f.index([i0, i1, i2])];
                    if val != 0.0 {
                        v.push(([f.origin[0] + i0 as i64, f.origin[1] + i1 as i64, f.origin[2] + i2 as i64], val));
                    }
                }
            }
        }
        v
    };
    let (a, b) = (pts(f1), pts(f2));
    let mut total = 0.0;
    for (ka, va) in &a {
        for (kb, vb) in &b {
            total += va * vb * f3.get_global([ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]]);
        }
    }
    Ok(total)
}

pub(crate) const MAX_AXIS: usize = 32;

/// Frequency patch in lattice coordinates: `|(k_a h_a, k_b h_b) − centre| ≤ half` componentwise.
struct Patch {
    centre: (f64, f64),
    half: (f64, f64),
    modulation: f64,
}

/// Shell lattice for a sheared frequency basis. `frame` maps lattice
/// coordinates `(a, b)` to `(ξ, η) = a·e_a + b·e_b`; `shear` is the group
/// velocity whose tangent plane the τ-axis follows.
struct ShellLattice {
    lattice: Lattice3,
    e_a: (f64, f64),
    e_b: (f64, f64),
    h: [f64; 3],
    shear: (f64, f64),
}

impl ShellLattice {
    fn new(h_tau: f64, e_a: (f64, f64), e_b: (f64, f64), h_a: f64, h_b: f64, shear: (f64, f64)) -> Self {
        let col = |e: (f64, f64), h: f64| [h * (shear.0 * e.0 + shear.1 * e.1), h * e.0, h * e.1];
        ShellLattice {
            lattice: Lattice3 { basis: [[h_tau, 0.0, 0.0], col(e_a, h_a), col(e_b, h_b)] },
            e_a,
            e_b,
            h: [h_tau, h_a, h_b],
            shear,
        }
    }

    fn coords(&self, p: FreqPoint) -> (f64, f64) {
        let det = self.e_a.0 * self.e_b.1 - self.e_a.1 * self.e_b.0;
        ((p.xi * self.e_b.1 - p.eta * self.e_b.0) / det, (self.e_a.0 * p.eta - self.e_a.1 * p.xi) / det)
    }

    /// Indicator of `{|τ − ω| ≤ L} ∩ patch`, as a lattice function of ones.
    fn support(&self, params: &DispersionParams, patch: &Patch) -> Result<LatticeFunction> {
        let [ht, ha, hb] = self.h;
        let a_lo = ((patch.centre.0 - patch.half.0) / ha).ceil() as i64;
        let a_hi = ((patch.centre.0 + patch.half.0) / ha).floor() as i64;
        let b_lo = ((patch.centre.1 - patch.half.1) / hb).ceil() as i64;
        let b_hi = ((patch.centre.1 + patch.half.1) / hb).floor() as i64;
        let mut cells = Vec::new();
        let (mut t_lo, mut t_hi) = (i64::MAX, i64::MIN);
        for ka in a_lo..=a_hi {
            for kb in b_lo..=b_hi {
                let (a, b) = (ka as f64 * ha, kb as f64 * hb);
                let xi = a * self.e_a.0 + b * self.e_b.0;
                let eta = a * self.e_a.1 + b * self.e_b.1;
                if xi == 0.0 {
                    continue;
                }
                let w = omega(params, FreqPoint { xi, eta });
                let sheared = self.shear.0 * xi + self.shear.1 * eta;
                let lo = ((w - patch.modulation - sheared) / ht).ceil() as i64;
                let hi = ((w + patch.modulation - sheared) / ht).floor() as i64;
                if lo <= hi {
                    t_lo = t_lo.min(lo);
                    t_hi = t_hi.max(hi);
                    cells.push((ka, kb, lo, hi));
                }
            }
        }
        if cells.is_empty() {
            return Err(Error::Support(format!(
                "empty admissible support: τ-spacing {ht:e} cannot resolve a shell of half-width {:e}",
                patch.modulation
            )));
        }
        let origin = [t_lo, a_lo, b_lo];
        let dims = [(t_hi - t_lo + 1) as usize, (a_hi - a_lo + 1) as usize, (b_hi - b_lo + 1) as usize];
        if dims.iter().any(|&d| d > MAX_AXIS) {
            return Err(Error::Resolution(format!("probe lattice needs {dims:?} nodes, limit {MAX_AXIS} per axis")));
        }
        let mut f = LatticeFunction::zeros(self.lattice, origin, dims);
        for (ka, kb, lo, hi) in cells {
            for kt in lo..=hi {
                let i = f.index([(kt - t_lo) as usize, (ka - a_lo) as usize, (kb - b_lo) as usize]);
                f.values[i] = 1.0;
            }
        }
        Ok(f)
    }
}

fn fill_uniform(f: &LatticeFunction, rng: &mut ChaCha8Rng) -> LatticeFunction {
    let mut g = f.clone();
    for v in g.values.iter_mut() {
        if *v != 0.0 {
            *v = rng.gen::<f64>();
        }
    }
    g
}

/// Best trial of `|det B|² Σ f₁f₂f₃ / (C ∏‖fᵢ‖)`; returns `(measured, comparator)`.
fn best_trial(supports: &[LatticeFunction; 3], constant: f64, trials: usize, rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let vol = supports[0].lattice.cell_volume();
    let mut best = (0.0, 1.0);
    let mut best_ratio = -1.0;
    for _ in 0..trials {
        let f: Vec<LatticeFunction> = supports.iter().map(|s| fill_uniform(s, rng)).collect();
        let m = trilinear_integral(&f[0], &f[1], &f[2])? * vol * vol;
        let c = constant * f.iter().map(|g| g.l2_norm()).product::<f64>();
        if m / c > best_ratio {
            best_ratio = m / c;
            best = (m, c);
        }
    }
    Ok(best)
}

fn probe_rng(seed: u64, tag: u64, n1: f64, n2: f64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ tag);
    rng.set_stream(((n1.log2().round() as i64 + 512) * 1024 + n2.log2().round() as i64 + 512) as u64);
    rng
}

const LW_NODES: f64 = 14.0;
const LW_KAPPA: f64 = 1.0;

/// Loomis–Whitney ratio at explicit centres `p₁`, `p₂` with `Ω(p₁,p₂) ≈ 0`.
#[allow(clippy::too_many_arguments)]
pub fn lw_ratio_at(
    params: &DispersionParams,
    p1: FreqPoint,
    p2: FreqPoint,
    n1: f64,
    n2: f64,
    l: [f64; 3],
    trials: usize,
    seed: u64,
) -> Result<ExperimentRecord> {
    let a = params.alpha();
    let lmax = l.iter().cloned().fold(0.0, f64::max);
    let lmin = l.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(lmin > 0.0) || lmax > n1.powf(a) * n2 / 8.0 {
        return Err(invalid("L", format!("need 0 < Lᵢ ≤ N1^α N2 / 8, got {l:?}")));
    }
    let inputs = [("N1", n1), ("N2", n2), ("L1", l[0]), ("L2", l[1]), ("L3", l[2]), ("trials", trials as f64)];
    let comparator_const = n1.powf(-0.75 * a + 0.5) * n2.powf(-0.5) * (l[0] * l[1] * l[2]).sqrt();
    let q = FreqPair::new(p1, p2)?;
    let cross = q.cross();
    if cross.abs() <= 1e-12 * (p1.eta * p2.xi).abs().max((p2.eta * p1.xi).abs()).max(1.0) {
        let mut r = ExperimentRecord::new("lw", a, &inputs, f64::NAN, comparator_const);
        r.status = super::Status::OutsideHypothesis;
        return Ok(r);
    }
    let p3 = q.sum();
    let (g3, g1p, g2p) = (grad_omega(params, p3), grad_omega(params, p1), grad_omega(params, p2));
    let g1 = (g3.0 - g1p.0, g3.1 - g1p.1);
    let g2 = (g3.0 - g2p.0, g3.1 - g2p.1);
    let n_g2 = g2.0.hypot(g2.1);
    let t2 = (-g2.1 / n_g2, g2.0 / n_g2);
    let dot = g1.0 * t2.0 + g1.1 * t2.1;
    let t2 = (t2.0 / dot.abs(), t2.1 / dot.abs());
    let s = (g2.0 / (n_g2 * n_g2), g2.1 / (n_g2 * n_g2));
    let half = LW_KAPPA * lmax;
    let h = 2.0 * half / LW_NODES;
    let sl = ShellLattice::new(2.0 * lmin / 4.0, t2, s, h, h, g1p);
    let patch = |p: FreqPoint, scale: f64, li: f64| Patch { centre: sl.coords(p), half: (scale * half, scale * half), modulation: li };
    let supports = [
        sl.support(params, &patch(p1, 1.0, l[0]))?,
        sl.support(params, &patch(p2, 1.0, l[1]))?,
        sl.support(params, &patch(p3, 2.0, l[2]))?,
    ];
    let mut rng = probe_rng(seed, 0x4c57, n1, n2);
    let (m, c) = best_trial(&supports, comparator_const, trials, &mut rng)?;
    Ok(ExperimentRecord::new("lw", a, &inputs, m, c))
}

/// Resonant centres `p₁ = (¾N₁, η₁)`, `p₂ = (¾N₂, 0)` with `η₁` solving `Ω = 0`.
pub fn lw_centres(params: &DispersionParams, n1: f64, n2: f64) -> Result<(FreqPoint, FreqPoint)> {
    let (xi1, xi2) = (0.75 * n1, 0.75 * n2);
    let o1 = omega1_part(params, FreqPair::from_coords(xi1, 0.0, xi2, 0.0)?);
    let eta1 = (o1 * xi1 * (xi1 + xi2) / xi2).sqrt();
    Ok((FreqPoint::new(xi1, eta1)?, FreqPoint::new(xi2, 0.0)?))
}

pub fn lw_ratio(params: &DispersionParams, n1: f64, n2: f64, l: [f64; 3], trials: usize, seed: u64) -> Result<ExperimentRecord> {
    if n2 > n1 {
        return Err(invalid("N2", format!("need N2 ≤ N1, got {n2} > {n1}")));
    }
    let (p1, p2) = lw_centres(params, n1, n2)?;
    lw_ratio_at(params, p1, p2, n1, n2, l, trials, seed)
}

pub fn lw_sweep(params: &DispersionParams, n1s: &[f64], n2: f64, l: [f64; 3], trials: usize, seed: u64) -> Result<Vec<ExperimentRecord>> {
    n1s.iter().map(|&n1| lw_ratio(params, n1, n2, l, trials, seed)).collect()
}

const NR_NODES: f64 = 14.0;

/// Non-resonant ratio with all modulations `L = κ N₁ N₂^α` and low/high
/// centres `(¾N₁, 0)`, `(¾N₂, 0)`.
pub fn nonresonant_ratio(params: &DispersionParams, n1: f64, n2: f64, kappa: f64, trials: usize, seed: u64) -> Result<ExperimentRecord> {
    let a = params.alpha();
    if !(n1 * 4.0 <= n2) {
        return Err(invalid("N1", format!("need N1 ≤ N2/4, got N1 = {n1}, N2 = {n2}")));
    }
    if !(kappa >= 1.0) {
        return Err(invalid("kappa", format!("need Lmax ≥ N1 N2^α, got κ = {kappa}")));
    }
    let l = kappa * n1 * n2.powf(a);
    let inputs = [("N1", n1), ("N2", n2), ("L", l), ("trials", trials as f64)];
    let comparator_const = l.powf(1.5) / l.powf(0.25) * n2.powf(-a / 2.0) * n1.powf(0.25);
    let p1 = FreqPoint::new(0.75 * n1, 0.0)?;
    let p2 = FreqPoint::new(0.75 * n2, 0.0)?;
    let p3 = p1.add(p2);
    let hh = (l * n1).sqrt() / 2.0;
    let h_xi = 0.5 * n1 / NR_NODES;
    let h_eta = 2.0 * hh / NR_NODES;
    let sl = ShellLattice::new(l / 2.0, (1.0, 0.0), (0.0, 1.0), h_xi, h_eta, grad_omega(params, p2));
    let patch = |p: FreqPoint, s: f64| Patch { centre: (p.xi, p.eta), half: (s * 0.25 * n1, s * hh), modulation: l };
    let supports = [sl.support(params, &patch(p1, 1.0))?, sl.support(params, &patch(p2, 1.0))?, sl.support(params, &patch(p3, 2.0))?];
    let mut rng = probe_rng(seed, 0x4e52, n1, n2);
    let (m, c) = best_trial(&supports, comparator_const, trials, &mut rng)?;
    Ok(ExperimentRecord::new("nonresonant", a, &inputs, m, c))
}

pub fn nonresonant_sweep(params: &DispersionParams, n1: f64, n2s: &[f64], kappa: f64, trials: usize, seed: u64) -> Result<Vec<ExperimentRecord>> {
    n2s.iter().map(|&n2| nonresonant_ratio(params, n1, n2, kappa, trials, seed)).collect()
}
