//! Time evolution of `∂ₜu = iω(D)u + ½∂ₓ(u²)`.

mod picard;
mod second_iterate;

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral::{self, io, x_derivative, FrequencyGrid, SpectralField};
use crate::symbols::DispersionParams;

pub use picard::{picard_iterate, picard_sequence};
pub use second_iterate::{data_norms, second_iterate_boxdata, FreqBoxSpec, SecondIterate};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `ω(ξ,η)` on the lattice; zero on the ξ = 0 plane.
#[inline]
pub(crate) fn lattice_omega(params: &DispersionParams, xi: f64, eta: f64) -> f64 {
    if xi == 0.0 {
        0.0
    } else {
        params.g(xi) + eta * eta / xi
    }
}

/// `U(t) f`, multiplier `e^{itω(ξ,η)}`.
pub fn propagate_linear(params: &DispersionParams, f: &SpectralField, t: f64) -> Result<SpectralField> {
    f.require_zero_x_mean()?;
    Ok(propagate_unchecked(params, f, t))
}

pub(crate) fn propagate_unchecked(params: &DispersionParams, f: &SpectralField, t: f64) -> SpectralField {
    if t == 0.0 {
        return f.clone();
    }
    f.without_x_mean().apply_multiplier(|xi, eta| {
        let (s, c) = (t * lattice_omega(params, xi, eta)).sin_cos();
        Complex64::new(c, s)
    })
}

/// `½∂ₓ(u²)` with the 2/3 rule.
pub fn nonlinearity(u: &SpectralField) -> Result<SpectralField> {
    nonlinearity_with(u, true)
}

pub(crate) fn nonlinearity_with(u: &SpectralField, dealias: bool) -> Result<SpectralField> {
    let sq = spectral::product(u, u, dealias)?;
    Ok(x_derivative(&sq).scale(0.5))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Etdrk4,
    Strang,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Etdrk4 => "etdrk4",
            Scheme::Strang => "strang",
        })
    }
}

fn default_true() -> bool {
    true
}

fn default_stride() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionConfig {
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub scheme: Scheme,
    #[serde(default = "default_true")]
    pub dealias: bool,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    /// Off gives the exact linear flow.
    #[serde(default = "default_true")]
    pub nonlinear: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig { dt: 1e-3, t_final: 1.0, scheme: Scheme::Etdrk4, dealias: true, snapshot_stride: 10, nonlinear: true }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(invalid("T", format!("must be nonnegative, got {}", self.t_final)));
        }
        if self.t_final > 0.0 && self.dt > self.t_final {
            return Err(invalid("dt", format!("dt = {} exceeds T = {}", self.dt, self.t_final)));
        }
        if self.snapshot_stride == 0 {
            return Err(invalid("snapshot_stride", "must be at least 1"));
        }
        Ok(())
    }

    /// Step count and the step actually used, `T / n` with `n = ⌈T/dt⌉`.
    pub fn steps(&self) -> (usize, f64) {
        if self.t_final == 0.0 {
            return (0, self.dt);
        }
        let n = (self.t_final / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_final / n as f64)
    }
}

/// Precomputed one-step map for a fixed grid and step size.
pub struct Stepper {
    grid: FrequencyGrid,
    dt: f64,
    scheme: Scheme,
    dealias: bool,
    nonlinear: bool,
    e: Vec<Complex64>,
    e2: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

// Contour points for the ETDRK4 coefficient means.
const CONTOUR: usize = 32;

fn etd_coefficients(z: Complex64, h: f64) -> [Complex64; 4] {
    let mut acc = [ZERO; 4];
    for j in 0..CONTOUR {
        let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / CONTOUR as f64;
        let lr = z + Complex64::new(th.cos(), th.sin());
        let el = lr.exp();
        let lr3 = lr * lr * lr;
        acc[0] += ((lr * 0.5).exp() - 1.0) / lr;
        acc[1] += (-4.0 - lr + el * (4.0 - 3.0 * lr + lr * lr)) / lr3;
        acc[2] += (2.0 + lr + el * (lr - 2.0)) / lr3;
        acc[3] += (-4.0 - 3.0 * lr - lr * lr + el * (4.0 - lr)) / lr3;
    }
    acc.map(|a| a * (h / CONTOUR as f64))
}

impl Stepper {
    pub fn new(params: &DispersionParams, grid: FrequencyGrid, dt: f64, scheme: Scheme) -> Self {
        let n = grid.len();
        let phase = |t: f64| -> Vec<Complex64> {
            (0..n)
                .map(|idx| {
                    let (ix, iy) = grid.split(idx);
                    let w = lattice_omega(params, grid.xi(ix), grid.eta(iy));
                    if grid.xi(ix) == 0.0 {
                        ZERO
                    } else {
                        let (s, c) = (t * w).sin_cos();
                        Complex64::new(c, s)
                    }
                })
                .collect()
        };
        let (e, e2) = match scheme {
            Scheme::Etdrk4 => (phase(dt), phase(dt / 2.0)),
            Scheme::Strang => (Vec::new(), phase(dt / 2.0)),
        };
        let (mut q, mut f1, mut f2, mut f3) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        if scheme == Scheme::Etdrk4 {
            let coef: Vec<[Complex64; 4]> = (0..n)
                .into_par_iter()
                .map(|idx| {
                    let (ix, iy) = grid.split(idx);
                    let w = lattice_omega(params, grid.xi(ix), grid.eta(iy));
                    etd_coefficients(Complex64::new(0.0, dt * w), dt)
                })
                .collect();
            q = coef.iter().map(|c| c[0]).collect();
            f1 = coef.iter().map(|c| c[1]).collect();
            f2 = coef.iter().map(|c| c[2]).collect();
            f3 = coef.iter().map(|c| c[3]).collect();
        }
        Stepper {
            grid,
            dt,
            scheme,
            dealias: true,
            nonlinear: true,
            e,
            e2,
            q,
            f1,
            f2,
            f3,
        }
    }

    pub fn dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn nonlinear(mut self, on: bool) -> Self {
        self.nonlinear = on;
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn nl(&self, v: &[Complex64], real: bool) -> Result<Vec<Complex64>> {
        let f = SpectralField::from_coeffs(self.grid, v.to_vec(), real)?;
        Ok(nonlinearity_with(&f, self.dealias)?.into_coeffs())
    }

    /// One step; `index` only labels a non-finite error.
    pub fn step(&self, u: &SpectralField, index: usize) -> Result<SpectralField> {
        if u.grid() != &self.grid {
            return Err(Error::GridMismatch("stepper and field grids differ".into()));
        }
        let real = u.is_real();
        let v = u.without_x_mean().into_coeffs();
        let mul = |a: &[Complex64], b: &[Complex64]| -> Vec<Complex64> { a.iter().zip(b).map(|(x, y)| x * y).collect() };
        let out = if !self.nonlinear {
            let e = if self.scheme == Scheme::Etdrk4 { self.e.clone() } else { mul(&self.e2, &self.e2) };
            mul(&v, &e)
        } else {
            match self.scheme {
                Scheme::Etdrk4 => {
                    let nv = self.nl(&v, real)?;
                    let a: Vec<Complex64> = (0..v.len()).map(|i| self.e2[i] * v[i] + self.q[i] * nv[i]).collect();
                    let na = self.nl(&a, real)?;
                    let b: Vec<Complex64> = (0..v.len()).map(|i| self.e2[i] * v[i] + self.q[i] * na[i]).collect();
                    let nb = self.nl(&b, real)?;
                    let c: Vec<Complex64> =
                        (0..v.len()).map(|i| self.e2[i] * a[i] + self.q[i] * (2.0 * nb[i] - nv[i])).collect();
                    let nc = self.nl(&c, real)?;
                    (0..v.len())
                        .map(|i| {
                            self.e[i] * v[i] + nv[i] * self.f1[i] + 2.0 * (na[i] + nb[i]) * self.f2[i] + nc[i] * self.f3[i]
                        })
                        .collect()
                }
                Scheme::Strang => {
                    let h = self.dt;
                    let w = mul(&v, &self.e2);
                    let n0 = self.nl(&w, real)?;
                    let mid: Vec<Complex64> = w.iter().zip(&n0).map(|(a, b)| a + b * (0.5 * h)).collect();
                    let n1 = self.nl(&mid, real)?;
                    let w: Vec<Complex64> = w.iter().zip(&n1).map(|(a, b)| a + b * h).collect();
                    mul(&w, &self.e2)
                }
            }
        };
        let f = SpectralField::from_coeffs(self.grid, out, real)?.without_x_mean();
        if !f.is_finite() {
            return Err(Error::NonFinite { step: index });
        }
        Ok(f)
    }
}

pub fn step(params: &DispersionParams, u: &SpectralField, dt: f64, scheme: Scheme) -> Result<SpectralField> {
    u.require_zero_x_mean()?;
    Stepper::new(params, *u.grid(), dt, scheme).step(u, 0)
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fields: Vec<SpectralField>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &SpectralField {
        self.fields.last().expect("trajectory has at least one snapshot")
    }
}

/// Steps to `T`, keeping `t = 0`, every `snapshot_stride`-th step and the final step.
pub fn solve(params: &DispersionParams, u0: &SpectralField, config: &EvolutionConfig) -> Result<Trajectory> {
    config.validate()?;
    u0.require_zero_x_mean()?;
    let (n, h) = config.steps();
    let mut traj = Trajectory { times: vec![0.0], fields: vec![u0.without_x_mean()] };
    if n == 0 {
        return Ok(traj);
    }
    let stepper = Stepper::new(params, *u0.grid(), h, config.scheme)
        .dealias(config.dealias)
        .nonlinear(config.nonlinear);
    let mut u = u0.without_x_mean();
    for k in 1..=n {
        u = stepper.step(&u, k)?;
        if k % config.snapshot_stride == 0 || k == n {
            traj.times.push(k as f64 * h);
            traj.fields.push(u.clone());
        }
    }
    Ok(traj)
}

#[derive(Serialize)]
struct TrajectoryManifest<'a> {
    alpha: f64,
    dt: f64,
    #[serde(rename = "T")]
    t_final: f64,
    scheme: String,
    snapshots: &'a [f64],
    files: Vec<String>,
}

/// Writes `snapshot_NNNNN.fkpi` files and `trajectory.json` into `dir`.
pub fn export_trajectory(dir: &Path, params: &DispersionParams, config: &EvolutionConfig, traj: &Trajectory) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for (k, f) in traj.fields.iter().enumerate() {
        let name = format!("snapshot_{k:05}.fkpi");
        let mut w = std::io::BufWriter::new(fs::File::create(dir.join(&name))?);
        io::write_field(&mut w, f)?;
        files.push(name);
    }
    let m = TrajectoryManifest {
        alpha: params.alpha(),
        dt: config.steps().1,
        t_final: config.t_final,
        scheme: config.scheme.to_string(),
        snapshots: &traj.times,
        files,
    };
    fs::write(dir.join("trajectory.json"), serde_json::to_string_pretty(&m)?)?;
    Ok(())
}
