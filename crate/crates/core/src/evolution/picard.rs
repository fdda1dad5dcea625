//! Picard iterates of the Duhamel map on `[0, T]`.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use rayon::prelude::*;

use super::{nonlinearity, propagate_unchecked};
use crate::error::{invalid, Error, Result};
use crate::quadrature::cumulative_simpson;
use crate::spectral::SpectralField;
use crate::symbols::DispersionParams;

#[derive(Clone)]
struct Coeffs(Vec<Complex64>);

impl Add for Coeffs {
    type Output = Coeffs;
    fn add(self, o: Coeffs) -> Coeffs {
        Coeffs(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Mul<f64> for Coeffs {
    type Output = Coeffs;
    fn mul(self, s: f64) -> Coeffs {
        Coeffs(self.0.iter().map(|a| a * s).collect())
    }
}

/// `u⁽ᵏ⁾(T)` for `k = 0..=k_max`, with `u⁽⁰⁾(t) = U(t)u₀` and
/// `u⁽ᵐ⁺¹⁾(t) = U(t)[u₀ + ∫₀ᵗ U(−s) N(u⁽ᵐ⁾(s)) ds]`, the integral by
/// Simpson's rule on nodes spaced at most `dt` (even node count).
pub fn picard_sequence(
    params: &DispersionParams,
    u0: &SpectralField,
    k_max: usize,
    t_final: f64,
    dt: f64,
) -> Result<Vec<SpectralField>> {
    if !(t_final > 0.0 && dt > 0.0 && dt <= t_final) {
        return Err(invalid("dt", format!("need 0 < dt ≤ T, got dt = {dt}, T = {t_final}")));
    }
    u0.require_zero_x_mean()?;
    let u0 = u0.without_x_mean();
    let mut n = (t_final / dt - 1e-9).ceil().max(2.0) as usize;
    n += n % 2;
    let h = t_final / n as f64;
    let times: Vec<f64> = (0..=n).map(|j| j as f64 * h).collect();

    let mut iterate: Vec<SpectralField> = times.par_iter().map(|&t| propagate_unchecked(params, &u0, t)).collect();
    let mut finals = vec![iterate[n].clone()];
    let real = u0.is_real();
    let grid = *u0.grid();
    for _ in 0..k_max {
        let w: Vec<Coeffs> = times
            .par_iter()
            .zip(&iterate)
            .map(|(&t, u)| Ok(Coeffs(propagate_unchecked(params, &nonlinearity(u)?, -t).into_coeffs())))
            .collect::<Result<_>>()?;
        let integral = cumulative_simpson(&w, h);
        iterate = times
            .par_iter()
            .zip(integral)
            .map(|(&t, c)| {
                let inner = SpectralField::from_coeffs(grid, c.0, real)?.add(&u0)?;
                Ok(propagate_unchecked(params, &inner, t))
            })
            .collect::<Result<_>>()?;
        let last = iterate[n].clone();
        if !last.is_finite() {
            return Err(Error::NonFinite { step: finals.len() });
        }
        finals.push(last);
    }
    Ok(finals)
}

pub fn picard_iterate(
    params: &DispersionParams,
    u0: &SpectralField,
    k: usize,
    t_final: f64,
    dt: f64,
) -> Result<SpectralField> {
    Ok(picard_sequence(params, u0, k, t_final, dt)?.pop().expect("nonempty"))
}
