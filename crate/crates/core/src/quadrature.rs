//! Gauss–Legendre rules and cumulative Simpson integration.

use std::ops::{Add, Mul};

/// Nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// A rule on `[a, b]` as `(node, weight)` pairs.
pub fn gl_interval(a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> impl Iterator<Item = (f64, f64)> + '_ {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    rule.0.iter().zip(&rule.1).map(move |(&x, &w)| (c + h * x, h * w))
}

/// `∫₀^{t_j} f` at every node `t_j = j·h`, fourth order: composite Simpson at
/// even `j`, Simpson plus a three-eighths panel at odd `j ≥ 3`, and the
/// quadratic-interpolant formula at `j = 1`.
pub fn cumulative_simpson<T>(values: &[T], h: f64) -> Vec<T>
where
    T: Clone + Add<Output = T> + Mul<f64, Output = T>,
{
    let n = values.len();
    assert!(n >= 3, "need at least three nodes");
    let f = |j: usize| values[j].clone();
    let zero = f(0) * 0.0;
    let mut even = vec![zero.clone(); n];
    let mut out = vec![zero.clone(); n];
    let mut j = 2;
    while j < n {
        even[j] = even[j - 2].clone() + (f(j - 2) + f(j - 1) * 4.0 + f(j)) * (h / 3.0);
        j += 2;
    }
    for j in 0..n {
        out[j] = if j % 2 == 0 {
            even[j].clone()
        } else if j == 1 {
            (f(0) * 5.0 + f(1) * 8.0 + f(2) * -1.0) * (h / 12.0)
        } else {
            even[j - 3].clone() + (f(j - 3) + f(j - 2) * 3.0 + f(j - 1) * 3.0 + f(j)) * (3.0 * h / 8.0)
        };
    }
    out
}
