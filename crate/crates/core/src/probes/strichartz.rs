//! Linear, low-frequency and bilinear Strichartz ratios on the evolution grid.
//!
//! Sweeps over a frequency scale `N` use boxes adapted to `N`: the box
//! follows the natural anisotropic scaling of the data, so the lattice
//! resolves the same number of modes across the band at every `N`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::ExperimentRecord;
use crate::error::{invalid, Error, Result};
use crate::evolution::{propagate_linear, Trajectory};
use crate::norms::{spacetime_norm, MixedNormSpec};
use crate::spectral::{fractional_x_derivative, to_physical, FrequencyGrid, SpectralField};
use crate::symbols::{grad_omega, omega1_part, DispersionParams, FreqPair, FreqPoint};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn linear_trajectory(params: &DispersionParams, u0: &SpectralField, t_final: f64, snapshots: usize) -> Result<Trajectory> {
    let times: Vec<f64> = (0..snapshots).map(|j| t_final * j as f64 / (snapshots - 1) as f64).collect();
    let fields = times.par_iter().map(|&t| propagate_linear(params, u0, t)).collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { times, fields })
}

fn check_snapshots(snapshots: usize) -> Result<()> {
    if snapshots < 32 {
        return Err(invalid("snapshots", format!("need at least 32 per window, got {snapshots}")));
    }
    Ok(())
}

/// `‖D_x^{−γ}U(t)u₀‖_{L^q([0,T]; L^r)} / ‖u₀‖_{L²}`, `γ = (1−2/r)(1/2−α/4)`.
pub fn linear_strichartz_ratio(
    params: &DispersionParams,
    spec: MixedNormSpec,
    u0: &SpectralField,
    t_final: f64,
    snapshots: usize,
) -> Result<ExperimentRecord> {
    if !spec.strichartz_admissible() {
        return Err(invalid("spec", format!("(q, r) = ({}, {}) is not admissible", spec.q(), spec.r())));
    }
    check_snapshots(snapshots)?;
    u0.require_zero_x_mean()?;
    let gamma = spec.smoothing_gamma(params.alpha());
    let w = fractional_x_derivative(u0, -gamma)?;
    let traj = linear_trajectory(params, &w, t_final, snapshots)?;
    let measured = if u0.max_abs() == 0.0 { 0.0 } else { spacetime_norm(&traj, spec)? };
    Ok(ExperimentRecord::new(
        "linear_strichartz",
        params.alpha(),
        &[("q", spec.q()), ("r", spec.r()), ("T", t_final), ("snapshots", snapshots as f64)],
        measured,
        u0.l2_norm(),
    ))
}

/// Real band data at scale `N` on an `N`-adapted box, with window
/// `T = N^{−(α+1)}`: `û₀ = sin²(2π(|ξ|/N − ½)) e^{−η²/(2σ²)}` on `N/2 < |ξ| ≤ N`,
/// `σ = N^{(α+2)/2}/2`.
pub fn scaled_band_data(params: &DispersionParams, n: f64) -> Result<(SpectralField, f64)> {
    let a = params.alpha();
    let sy = n.powf((a + 2.0) / 2.0);
    let grid = FrequencyGrid::new(TWO_PI * 16.0 / n, TWO_PI * 4.0 / sy, 128, 64)?;
    let sigma = 0.5 * sy;
    let u0 = SpectralField::from_fn(grid, true, |xi, eta| {
        let s = xi.abs() / n;
        if s > 0.5 && s <= 1.0 {
            let b = (TWO_PI * (s - 0.5)).sin();
            Complex64::new(b * b * (-eta * eta / (2.0 * sigma * sigma)).exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok((u0, n.powf(-(a + 1.0))))
}

pub fn linear_strichartz_sweep(
    params: &DispersionParams,
    spec: MixedNormSpec,
    bands: &[f64],
    snapshots: usize,
) -> Result<Vec<ExperimentRecord>> {
    bands
        .iter()
        .map(|&n| {
            let (u0, t) = scaled_band_data(params, n)?;
            let mut r = linear_strichartz_ratio(params, spec, &u0, t, snapshots)?;
            r.inputs.insert("N".into(), n);
            Ok(r)
        })
        .collect()
}

/// `‖U(t)u₀‖_{L⁴([0,1]; L⁴)} / (K^{1/4} N^{1/8} ‖u₀‖)` for `û₀` supported in an
/// interval of length at most `K` on which `N/2 ≤ |ξ| ≤ 2N`.
pub fn lowfreq_l4_ratio(
    params: &DispersionParams,
    u0: &SpectralField,
    n: f64,
    k: f64,
    snapshots: usize,
) -> Result<ExperimentRecord> {
    check_snapshots(snapshots)?;
    let g = u0.grid();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (idx, c) in u0.coeffs().iter().enumerate() {
        if *c != Complex64::new(0.0, 0.0) {
            let xi = g.xi(g.split(idx).0);
            lo = lo.min(xi);
            hi = hi.max(xi);
        }
    }
    if lo.is_finite() {
        let inside = |x: f64| x.abs() >= 0.5 * n && x.abs() <= 2.0 * n;
        if hi - lo > k * (1.0 + 1e-12) || !inside(lo) || !inside(hi) || lo.signum() != hi.signum() {
            return Err(Error::Support(format!(
                "ξ-support [{lo}, {hi}] is not an interval of length ≤ K = {k} inside N/2 ≤ |ξ| ≤ 2N, N = {n}"
            )));
        }
    }
    let spec = MixedNormSpec::new(4.0, 4.0)?;
    let traj = linear_trajectory(params, u0, 1.0, snapshots)?;
    let measured = if lo.is_finite() { spacetime_norm(&traj, spec)? } else { 0.0 };
    Ok(ExperimentRecord::new(
        "lowfreq_l4",
        params.alpha(),
        &[("N", n), ("K", k), ("snapshots", snapshots as f64)],
        measured,
        k.powf(0.25) * n.powf(0.125) * u0.l2_norm(),
    ))
}

/// Complex data on `ξ ∈ [N, 2N]` (`K = N`) with `η`-width `√N`, on a box
/// scaled by `1/N` in x and `1/√N` in y.
pub fn lowfreq_data(n: f64) -> Result<SpectralField> {
    let grid = FrequencyGrid::new(TWO_PI * 8.0 / n, TWO_PI * 4.0 / n.sqrt(), 64, 128)?;
    Ok(SpectralField::from_fn(grid, false, |xi, eta| {
        let s = xi / n;
        if (1.0..=2.0).contains(&s) {
            let b = (std::f64::consts::PI * (s - 1.0)).sin();
            Complex64::new(b * b * (-eta * eta / (2.0 * n)).exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

pub fn lowfreq_sweep(params: &DispersionParams, ns: &[f64], snapshots: usize) -> Result<Vec<ExperimentRecord>> {
    ns.iter().map(|&n| lowfreq_l4_ratio(params, &lowfreq_data(n)?, n, n, snapshots)).collect()
}

/// Two Gaussian wave packets in a resonant configuration whose paths cross
/// once at `T/2`, with the box and window sized from their group velocities.
#[derive(Clone, Debug)]
pub struct BilinearSetup {
    pub grid: FrequencyGrid,
    pub u0: SpectralField,
    pub v0: SpectralField,
    pub t_final: f64,
    pub p1: FreqPoint,
    pub p2: FreqPoint,
}

const MAX_BILINEAR_POINTS: usize = 1 << 22;

fn next_pow2(x: f64) -> usize {
    (x.max(8.0).ceil() as usize).next_power_of_two()
}

impl BilinearSetup {
    /// `jitter ∈ [0,1)³` perturbs the centres and the η-width.
    pub fn new(params: &DispersionParams, n1: f64, n2: f64, jitter: [f64; 3]) -> Result<Self> {
        if !(n1 >= 4.0 * n2 && n2 > 0.0) {
            return Err(invalid("N1", format!("need N1 ≥ 4 N2, got N1 = {n1}, N2 = {n2}")));
        }
        let a = params.alpha();
        let xi1 = n1 * (0.7 + 0.1 * jitter[0]);
        let xi2 = n2 * (0.7 + 0.1 * jitter[1]);
        // η₁ = 0 frame; η₂ solves Ω(p₁, p₂) = 0.
        let o1 = omega1_part(params, FreqPair::from_coords(xi1, 0.0, xi2, 0.0)?);
        let eta2 = (o1 * xi2 * (xi1 + xi2) / xi1).sqrt();
        let p1 = FreqPoint::new(xi1, 0.0)?;
        let p2 = FreqPoint::new(xi2, eta2)?;
        let sxi = n2 / 10.0;
        let seta = (0.15 + 0.2 * jitter[2]) * n2 * n1.powf(a / 2.0);

        let v1 = grad_omega(params, p1);
        let v2 = grad_omega(params, p2);
        let (vx, vy) = (v1.0 - v2.0, v1.1 - v2.1);
        let (lx0, ly0) = (1.0 / sxi, 1.0 / seta);
        let tau = 1.0 / ((vx / lx0).powi(2) + (vy / ly0).powi(2)).sqrt();
        let t_final = 12.0 * tau;
        let spread = |p: FreqPoint| {
            let (xi, eta) = (p.xi, p.eta);
            let wxx = a * (a + 1.0) * xi.abs().powf(a - 1.0) * xi.signum() + 2.0 * eta * eta / xi.powi(3);
            let wxy = -2.0 * eta / (xi * xi);
            let wyy = 2.0 / xi;
            (t_final * (wxx.abs() * sxi + wxy.abs() * seta), t_final * (wxy.abs() * sxi + wyy.abs() * seta))
        };
        let (s1x, s1y) = spread(p1);
        let (s2x, s2y) = spread(p2);
        let length_x = 1.25 * (vx.abs() * t_final + 12.0 * lx0 + s1x + s2x);
        let length_y = 1.25 * (vy.abs() * t_final + 12.0 * ly0 + s1y + s2y);
        let modes_x = next_pow2(3.0 * n1 * length_x / TWO_PI + 4.0);
        let eta_top = eta2.abs() + 8.0 * seta;
        let modes_y = next_pow2(2.4 * eta_top * length_y / TWO_PI + 4.0);
        if modes_x * modes_y > MAX_BILINEAR_POINTS {
            return Err(Error::Resolution(format!(
                "bilinear box needs {modes_x}x{modes_y} modes for N1 = {n1}, N2 = {n2}"
            )));
        }
        let grid = FrequencyGrid::new(length_x, length_y, modes_x, modes_y)?;
        if n1 > grid.dealias_xi_max() {
            return Err(Error::Resolution(format!("N1 = {n1} lies outside the 2/3 ball of the grid")));
        }
        // Packets move with velocity −∇ω; start them so both reach the centre at T/2.
        let (cx, cy) = (0.5 * length_x, 0.5 * length_y);
        let packet = |p: FreqPoint, v: (f64, f64), band: (f64, f64)| {
            let (ax, ay) = (cx + v.0 * t_final / 2.0, cy + v.1 * t_final / 2.0);
            SpectralField::from_fn(grid, false, |xi, eta| {
                if xi <= band.0 || xi > band.1 {
                    return Complex64::new(0.0, 0.0);
                }
                let e = -((xi - p.xi) / sxi).powi(2) / 2.0 - ((eta - p.eta) / seta).powi(2) / 2.0;
                if e < -60.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let (s, c) = (-(xi * ax + eta * ay)).sin_cos();
                Complex64::new(c, s) * e.exp()
            })
        };
        let u0 = packet(p1, v1, (0.5 * n1, n1));
        let v0 = packet(p2, v2, (0.5 * n2, n2));
        let (nu, nv) = (u0.l2_norm(), v0.l2_norm());
        Ok(BilinearSetup { grid, u0: u0.scale(1.0 / nu), v0: v0.scale(1.0 / nv), t_final, p1, p2 })
    }
}

/// `‖U(t)u₀ · U(t)v₀‖_{L²([0,T]×box)}`, trapezoidal in time.
pub fn bilinear_l2(params: &DispersionParams, u0: &SpectralField, v0: &SpectralField, t_final: f64, snapshots: usize) -> Result<f64> {
    check_snapshots(snapshots)?;
    let h = t_final / (snapshots - 1) as f64;
    let cell = u0.grid().cell_area();
    let vals = (0..snapshots)
        .into_par_iter()
        .map(|j| {
            let t = j as f64 * h;
            let pu = to_physical(&propagate_linear(params, u0, t)?);
            let pv = to_physical(&propagate_linear(params, v0, t)?);
            Ok(pu.samples.iter().zip(&pv.samples).map(|(a, b)| a.norm_sqr() * b.norm_sqr()).sum::<f64>() * cell)
        })
        .collect::<Result<Vec<f64>>>()?;
    let s: f64 = vals.iter().enumerate().map(|(j, v)| if j == 0 || j == snapshots - 1 { 0.5 * v } else { *v }).sum();
    Ok((h * s).sqrt())
}

/// Largest ratio `‖uv‖ / (N₂^{1/2} N₁^{−α/4} ‖u₀‖‖v₀‖)` over seeded trials.
pub fn bilinear_ratio(params: &DispersionParams, n1: f64, n2: f64, trials: usize, seed: u64) -> Result<ExperimentRecord> {
    const SNAPSHOTS: usize = 64;
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n1.log2() as i64 + 512) * 1024 + n2.log2() as i64 + 512) as u64);
    let jitters: Vec<[f64; 3]> = (0..trials).map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect();
    let mut best = 0.0f64;
    let mut t_best = 0.0;
    for j in jitters {
        let s = BilinearSetup::new(params, n1, n2, j)?;
        let m = bilinear_l2(params, &s.u0, &s.v0, s.t_final, SNAPSHOTS)?;
        if m > best {
            best = m;
            t_best = s.t_final;
        }
    }
    Ok(ExperimentRecord::new(
        "bilinear",
        params.alpha(),
        &[("N1", n1), ("N2", n2), ("trials", trials as f64), ("T", t_best)],
        best,
        n2.sqrt() * n1.powf(-params.alpha() / 4.0),
    ))
}

pub fn bilinear_sweep(params: &DispersionParams, n1s: &[f64], n2: f64, trials: usize, seed: u64) -> Result<Vec<ExperimentRecord>> {
    n1s.iter().map(|&n1| bilinear_ratio(params, n1, n2, trials, seed)).collect()
}
