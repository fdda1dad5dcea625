//! Fourier representation of fields on a periodic box.
//!
//! A field is `u(x,y) = Σ c_k e^{i(ξ_k x + η_k y)}` with `ξ_k = 2πk_x/L_x`,
//! `η_k = 2πk_y/L_y`. Coefficients are stored row-major in FFT order with the
//! y index contiguous. The Nyquist row and column are always zero, so the
//! lattice is symmetric under `k ↦ −k`.
//!
//! Norms follow Plancherel on the box: `∫|u|² = L_x L_y Σ|c_k|²`.

mod fft;
pub mod io;

use num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub(crate) use fft::fft3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyGrid {
    pub length_x: f64,
    pub length_y: f64,
    pub modes_x: usize,
    pub modes_y: usize,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        let l = 2.0 * std::f64::consts::PI * 16.0;
        FrequencyGrid { length_x: l, length_y: l, modes_x: 256, modes_y: 256 }
    }
}

impl FrequencyGrid {
    pub fn new(length_x: f64, length_y: f64, modes_x: usize, modes_y: usize) -> Result<Self> {
        let g = FrequencyGrid { length_x, length_y, modes_x, modes_y };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length_x.is_finite() && self.length_x > 0.0) {
            return Err(invalid("length_x", format!("must be positive, got {}", self.length_x)));
        }
        if !(self.length_y.is_finite() && self.length_y > 0.0) {
            return Err(invalid("length_y", format!("must be positive, got {}", self.length_y)));
        }
        for (name, m) in [("modes_x", self.modes_x), ("modes_y", self.modes_y)] {
            if m < 8 || m % 2 != 0 {
                return Err(invalid(name, format!("must be even and >= 8, got {m}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.modes_x * self.modes_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix * self.modes_y + iy
    }

    #[inline]
    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.modes_y, idx % self.modes_y)
    }

    /// Signed integer wavenumber for a storage index along an axis of `m` modes.
    #[inline]
    pub fn signed(i: usize, m: usize) -> i64 {
        if i < m / 2 {
            i as i64
        } else {
            i as i64 - m as i64
        }
    }

    #[inline]
    pub fn kx(&self, ix: usize) -> i64 {
        Self::signed(ix, self.modes_x)
    }

    #[inline]
    pub fn ky(&self, iy: usize) -> i64 {
        Self::signed(iy, self.modes_y)
    }

    pub fn dxi(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length_x
    }

    pub fn deta(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length_y
    }

    #[inline]
    pub fn xi(&self, ix: usize) -> f64 {
        self.kx(ix) as f64 * self.dxi()
    }

    #[inline]
    pub fn eta(&self, iy: usize) -> f64 {
        self.ky(iy) as f64 * self.deta()
    }

    /// Largest resolved |ξ| (one below Nyquist).
    pub fn xi_max(&self) -> f64 {
        (self.modes_x / 2 - 1) as f64 * self.dxi()
    }

    pub fn eta_max(&self) -> f64 {
        (self.modes_y / 2 - 1) as f64 * self.deta()
    }

    pub fn x(&self, ix: usize) -> f64 {
        ix as f64 * self.length_x / self.modes_x as f64
    }

    pub fn y(&self, iy: usize) -> f64 {
        iy as f64 * self.length_y / self.modes_y as f64
    }

    pub fn area(&self) -> f64 {
        self.length_x * self.length_y
    }

    pub fn cell_area(&self) -> f64 {
        self.area() / self.len() as f64
    }

    #[inline]
    pub fn is_nyquist(&self, ix: usize, iy: usize) -> bool {
        ix == self.modes_x / 2 || iy == self.modes_y / 2
    }

    /// Storage index of `−k`.
    #[inline]
    pub fn mirror(&self, idx: usize) -> usize {
        let (ix, iy) = self.split(idx);
        self.index((self.modes_x - ix) % self.modes_x, (self.modes_y - iy) % self.modes_y)
    }

    /// 2/3-rule ball: `3|k| < m` along both axes.
    #[inline]
    pub fn in_dealias_ball(&self, ix: usize, iy: usize) -> bool {
        3 * self.kx(ix).unsigned_abs() < self.modes_x as u64
            && 3 * self.ky(iy).unsigned_abs() < self.modes_y as u64
    }

    /// Largest |ξ| kept by the 2/3 rule.
    pub fn dealias_xi_max(&self) -> f64 {
        ((self.modes_x - 1) / 3) as f64 * self.dxi()
    }

    fn check_same(&self, other: &FrequencyGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// Samples on the physical grid, `samples[ix*my + iy] = u(x_ix, y_iy)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    pub grid: FrequencyGrid,
    pub samples: Vec<Complex64>,
}

impl PhysicalField {
    pub fn from_real(grid: FrequencyGrid, values: &[f64]) -> Self {
        PhysicalField { grid, samples: values.iter().map(|&v| Complex64::new(v, 0.0)).collect() }
    }

    pub fn from_fn(grid: FrequencyGrid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let samples = (0..grid.len())
            .map(|idx| {
                let (ix, iy) = grid.split(idx);
                f(grid.x(ix), grid.y(iy))
            })
            .collect();
        PhysicalField { grid, samples }
    }

    pub fn is_real(&self) -> bool {
        self.samples.iter().all(|c| c.im == 0.0)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.re).collect()
    }

    /// Riemann sum of `|u|^p`, exact for trigonometric polynomials of low enough degree.
    pub fn integral_abs_pow(&self, p: f64) -> f64 {
        let w = self.grid.cell_area();
        self.samples.iter().map(|c| c.norm().powf(p)).sum::<f64>() * w
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: FrequencyGrid,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl SpectralField {
    pub fn zeros(grid: FrequencyGrid, real: bool) -> Self {
        SpectralField { grid, coeffs: vec![ZERO; grid.len()], real }
    }

    /// Builds a field from raw coefficients. Nyquist modes are zeroed; if
    /// `real`, coefficients are replaced by their Hermitian part.
    pub fn from_coeffs(grid: FrequencyGrid, coeffs: Vec<Complex64>, real: bool) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} coefficients for a {}x{} grid",
                coeffs.len(),
                grid.modes_x,
                grid.modes_y
            )));
        }
        let mut f = SpectralField { grid, coeffs, real };
        f.zero_nyquist();
        if real {
            f.hermitian_average();
        }
        Ok(f)
    }

    /// Coefficients from a function of `(ξ, η)`. For a real field the value at
    /// `−k` is taken as the conjugate of the value at `k`.
    pub fn from_fn(grid: FrequencyGrid, real: bool, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let coeffs = (0..grid.len())
            .map(|idx| {
                let (ix, iy) = grid.split(idx);
                if grid.is_nyquist(ix, iy) {
                    ZERO
                } else {
                    f(grid.xi(ix), grid.eta(iy))
                }
            })
            .collect();
        let mut out = SpectralField { grid, coeffs, real };
        if real {
            out.hermitian_copy();
        }
        out
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn get(&self, kx: i64, ky: i64) -> Complex64 {
        let ix = kx.rem_euclid(self.grid.modes_x as i64) as usize;
        let iy = ky.rem_euclid(self.grid.modes_y as i64) as usize;
        self.coeffs[self.grid.index(ix, iy)]
    }

    /// Sets `c(kx, ky)`; for real fields also sets `c(−k)` to the conjugate.
    pub fn set(&mut self, kx: i64, ky: i64, value: Complex64) {
        let ix = kx.rem_euclid(self.grid.modes_x as i64) as usize;
        let iy = ky.rem_euclid(self.grid.modes_y as i64) as usize;
        if self.grid.is_nyquist(ix, iy) {
            return;
        }
        let idx = self.grid.index(ix, iy);
        let m = self.grid.mirror(idx);
        if self.real {
            if m == idx {
                self.coeffs[idx] = Complex64::new(value.re, 0.0);
            } else {
                self.coeffs[idx] = value;
                self.coeffs[m] = value.conj();
            }
        } else {
            self.coeffs[idx] = value;
        }
    }

    fn zero_nyquist(&mut self) {
        let g = self.grid;
        for ix in 0..g.modes_x {
            self.coeffs[g.index(ix, g.modes_y / 2)] = ZERO;
        }
        for iy in 0..g.modes_y {
            self.coeffs[g.index(g.modes_x / 2, iy)] = ZERO;
        }
    }

    /// Replace by the Hermitian part `(c(k) + conj c(−k))/2`.
    fn hermitian_average(&mut self) {
        for idx in 0..self.coeffs.len() {
            let m = self.grid.mirror(idx);
            if idx < m {
                let avg = (self.coeffs[idx] + self.coeffs[m].conj()) * 0.5;
                self.coeffs[idx] = avg;
                self.coeffs[m] = avg.conj();
            } else if idx == m {
                self.coeffs[idx].im = 0.0;
            }
        }
    }

    /// Overwrite `c(−k)` with `conj c(k)` for the lower index of each pair.
    fn hermitian_copy(&mut self) {
        for idx in 0..self.coeffs.len() {
            let m = self.grid.mirror(idx);
            if idx < m {
                self.coeffs[m] = self.coeffs[idx].conj();
            } else if idx == m {
                self.coeffs[idx].im = 0.0;
            }
        }
    }

    /// Exact check `c(−k) == conj c(k)` for all k.
    pub fn is_hermitian(&self) -> bool {
        (0..self.coeffs.len()).all(|idx| self.coeffs[self.grid.mirror(idx)] == self.coeffs[idx].conj())
    }

    /// `max |c(0, ky)|`.
    pub fn x_mean_residual(&self) -> f64 {
        (0..self.grid.modes_y).fold(0.0, |m, iy| m.max(self.coeffs[self.grid.index(0, iy)].norm()))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Errors unless `max |c(0,ky)| ≤ 1e−12 · max |c|`.
    pub fn require_zero_x_mean(&self) -> Result<()> {
        let r = self.x_mean_residual();
        if r > 1e-12 * self.max_abs() {
            return Err(Error::NonzeroXMean { residual: r });
        }
        Ok(())
    }

    pub fn has_zero_x_mean(&self) -> bool {
        self.require_zero_x_mean().is_ok()
    }

    /// Removes the ξ = 0 plane.
    pub fn without_x_mean(&self) -> Self {
        let mut out = self.clone();
        for iy in 0..self.grid.modes_y {
            out.coeffs[self.grid.index(0, iy)] = ZERO;
        }
        out
    }

    /// Pointwise multiplier `m(ξ, η)`. For real fields `m` must satisfy
    /// `m(−ξ,−η) = conj m(ξ,η)`; symmetry is then restored exactly.
    pub fn apply_multiplier(&self, m: impl Fn(f64, f64) -> Complex64 + Sync) -> Self {
        let g = self.grid;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                if c == ZERO {
                    return ZERO;
                }
                let (ix, iy) = g.split(idx);
                c * m(g.xi(ix), g.eta(iy))
            })
            .collect();
        let mut out = SpectralField { grid: g, coeffs, real: self.real };
        if out.real {
            out.hermitian_copy();
        }
        out
    }

    /// Keeps coefficients where `keep(ξ, η)` holds.
    pub fn restrict(&self, keep: impl Fn(f64, f64) -> bool) -> Self {
        let g = self.grid;
        let mut out = self.clone();
        for (idx, c) in out.coeffs.iter_mut().enumerate() {
            let (ix, iy) = g.split(idx);
            if !keep(g.xi(ix), g.eta(iy)) {
                *c = ZERO;
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            real: self.real,
        }
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &SpectralField, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| op(a, b)).collect(),
            real: self.real && other.real,
        })
    }

    /// `Σ |c_k|²`.
    pub fn coeff_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `‖u‖_{L²}` of the represented function, via Plancherel.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.area() * self.coeff_norm_sq()).sqrt()
    }

    /// Largest coefficient difference, for comparisons in tests.
    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

pub fn to_physical(f: &SpectralField) -> PhysicalField {
    let g = f.grid;
    let mut data = f.coeffs.clone();
    fft::fft2(&mut data, g.modes_x, g.modes_y, FftDirection::Inverse);
    if f.real {
        for c in data.iter_mut() {
            c.im = 0.0;
        }
    }
    PhysicalField { grid: g, samples: data }
}

pub fn to_spectral(p: &PhysicalField, grid: &FrequencyGrid) -> Result<SpectralField> {
    if p.samples.len() != grid.len() || p.grid.modes_x != grid.modes_x || p.grid.modes_y != grid.modes_y {
        return Err(Error::GridMismatch(format!(
            "{} samples on {}x{} vs grid {}x{}",
            p.samples.len(),
            p.grid.modes_x,
            p.grid.modes_y,
            grid.modes_x,
            grid.modes_y
        )));
    }
    let real = p.is_real();
    let mut data = p.samples.clone();
    fft::fft2(&mut data, grid.modes_x, grid.modes_y, FftDirection::Forward);
    let norm = 1.0 / grid.len() as f64;
    for c in data.iter_mut() {
        *c *= norm;
    }
    SpectralField::from_coeffs(*grid, data, real)
}

pub fn x_derivative(f: &SpectralField) -> SpectralField {
    f.apply_multiplier(|xi, _| Complex64::new(0.0, xi))
}

pub fn y_derivative(f: &SpectralField) -> SpectralField {
    f.apply_multiplier(|_, eta| Complex64::new(0.0, eta))
}

/// `∂ₓ⁻¹`: division by `iξ`; the ξ = 0 plane stays zero.
pub fn x_antiderivative(f: &SpectralField) -> Result<SpectralField> {
    f.require_zero_x_mean()?;
    Ok(f.without_x_mean().apply_multiplier(|xi, _| {
        if xi == 0.0 {
            ZERO
        } else {
            Complex64::new(0.0, -1.0 / xi)
        }
    }))
}

/// `D_x^s`: multiplier `|ξ|^s`.
pub fn fractional_x_derivative(f: &SpectralField, s: f64) -> Result<SpectralField> {
    if s == 0.0 {
        return Ok(f.clone());
    }
    if s < 0.0 {
        f.require_zero_x_mean()?;
        return Ok(f.without_x_mean().apply_multiplier(|xi, _| {
            if xi == 0.0 {
                ZERO
            } else {
                Complex64::new(xi.abs().powf(s), 0.0)
            }
        }));
    }
    Ok(f.apply_multiplier(|xi, _| Complex64::new(xi.abs().powf(s), 0.0)))
}

/// Dyadic frequency scale `N = 2^j`, `j ∈ ℤ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyadicBand {
    n: f64,
}

impl DyadicBand {
    pub fn new(n: f64) -> Result<Self> {
        if !(n.is_finite() && n > 0.0) || n.log2().fract() != 0.0 {
            return Err(invalid("N", format!("must be a power of two, got {n}")));
        }
        Ok(DyadicBand { n })
    }

    pub fn pow2(j: i32) -> Self {
        DyadicBand { n: 2f64.powi(j) }
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    /// Support of the sharp projector: `N/2 < |ξ| ≤ N`.
    pub fn contains(&self, xi: f64) -> bool {
        let a = xi.abs();
        a > 0.5 * self.n && a <= self.n
    }

    /// The enlarged band `N/8 ≤ |ξ| ≤ 8N`.
    pub fn contains_wide(&self, xi: f64) -> bool {
        let a = xi.abs();
        a >= self.n / 8.0 && a <= 8.0 * self.n
    }
}

pub fn project_dyadic(f: &SpectralField, band: DyadicBand) -> SpectralField {
    f.restrict(|xi, _| band.contains(xi))
}

/// All bands whose sharp support meets the resolved ξ lattice, ascending.
pub fn dyadic_bands(grid: &FrequencyGrid) -> Vec<DyadicBand> {
    let lo = grid.dxi().log2().ceil() as i32;
    let hi = grid.xi_max().log2().ceil() as i32;
    (lo..=hi).map(DyadicBand::pow2).collect()
}

/// Pointwise product, with 2/3-rule truncation before and after when `dealias`.
pub fn product(f: &SpectralField, g: &SpectralField, dealias: bool) -> Result<SpectralField> {
    f.grid.check_same(&g.grid)?;
    let grid = f.grid;
    let trunc = |h: &SpectralField| {
        if dealias {
            truncate_two_thirds(h)
        } else {
            h.clone()
        }
    };
    let pf = to_physical(&trunc(f));
    let pg = to_physical(&trunc(g));
    let real = f.real && g.real;
    let samples = pf
        .samples
        .iter()
        .zip(&pg.samples)
        .map(|(a, b)| if real { Complex64::new(a.re * b.re, 0.0) } else { a * b })
        .collect();
    let out = to_spectral(&PhysicalField { grid, samples }, &grid)?;
    let out = SpectralField { real, ..out };
    Ok(trunc(&out))
}

pub fn dealiased_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    product(f, g, true)
}

pub fn truncate_two_thirds(f: &SpectralField) -> SpectralField {
    let g = f.grid;
    let mut out = f.clone();
    for (idx, c) in out.coeffs.iter_mut().enumerate() {
        let (ix, iy) = g.split(idx);
        if !g.in_dealias_ball(ix, iy) {
            *c = ZERO;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> FrequencyGrid {
        FrequencyGrid::new(2.0 * std::f64::consts::PI, 4.0 * std::f64::consts::PI, 16, 8).unwrap()
    }

    #[test]
    fn rejects_odd_or_small_modes() {
        assert!(FrequencyGrid::new(1.0, 1.0, 6, 8).is_err());
        assert!(FrequencyGrid::new(1.0, 1.0, 9, 8).is_err());
        assert!(FrequencyGrid::new(0.0, 1.0, 8, 8).is_err());
    }

    #[test]
    fn mirror_is_involution_and_nyquist_free() {
        let g = grid();
        for idx in 0..g.len() {
            assert_eq!(g.mirror(g.mirror(idx)), idx);
            let (ix, iy) = g.split(idx);
            if !g.is_nyquist(ix, iy) {
                let (mx, my) = g.split(g.mirror(idx));
                assert_eq!(g.kx(mx), -g.kx(ix));
                assert_eq!(g.ky(my), -g.ky(iy));
            }
        }
    }

    #[test]
    fn constant_maps_to_zero_mode() {
        let g = grid();
        let p = PhysicalField::from_real(g, &vec![1.0; g.len()]);
        let f = to_spectral(&p, &g).unwrap();
        for (idx, c) in f.coeffs().iter().enumerate() {
            let expect = if idx == 0 { 1.0 } else { 0.0 };
            assert!((c - Complex64::new(expect, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn single_mode_is_cosine() {
        let g = grid();
        let mut f = SpectralField::zeros(g, true);
        f.set(1, 0, Complex64::new(1.0, 0.0));
        let p = to_physical(&f);
        for idx in 0..g.len() {
            let (ix, _) = g.split(idx);
            let x = g.x(ix);
            assert!((p.samples[idx].re - 2.0 * (2.0 * std::f64::consts::PI * x / g.length_x).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn antiderivative_of_unit_mode() {
        let g = grid();
        let mut f = SpectralField::zeros(g, false);
        f.set(1, 3, Complex64::new(1.0, 0.0));
        let a = x_antiderivative(&f).unwrap();
        let expect = Complex64::new(0.0, -g.length_x / (2.0 * std::f64::consts::PI));
        assert!((a.get(1, 3) - expect).norm() < 1e-14);

        let mut bad = SpectralField::zeros(g, false);
        bad.set(0, 1, Complex64::new(1.0, 0.0));
        assert!(matches!(x_antiderivative(&bad), Err(Error::NonzeroXMean { .. })));
    }

    #[test]
    fn dyadic_membership() {
        let b = DyadicBand::new(4.0).unwrap();
        assert!(b.contains(3.0) && b.contains(-4.0) && !b.contains(2.0));
        assert!(b.contains_wide(0.5) && b.contains_wide(32.0) && !b.contains_wide(33.0));
        assert!(DyadicBand::new(3.0).is_err());
        assert!(DyadicBand::new(0.125).is_ok());
    }

    #[test]
    fn product_of_two_modes() {
        let g = FrequencyGrid::new(2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI, 32, 8).unwrap();
        let mut a = SpectralField::zeros(g, true);
        a.set(2, 0, Complex64::new(1.0, 0.0));
        let mut b = SpectralField::zeros(g, true);
        b.set(3, 0, Complex64::new(1.0, 0.0));
        let p = dealiased_product(&a, &b).unwrap();
        for idx in 0..g.len() {
            let (ix, iy) = g.split(idx);
            let k = g.kx(ix).abs();
            let on = iy == 0 && (k == 1 || k == 5);
            let c = p.coeffs()[idx].norm();
            if on {
                assert!((c - 1.0).abs() < 1e-13);
            } else {
                assert!(c < 1e-13);
            }
        }
        assert!(p.is_hermitian());
    }
}
