//! Compares Picard iterates with the time-stepped solution; each iterate
//! gains two powers of the amplitude.
//!
//! ```text
//! cargo run --release --example picard
//! ```

use std::f64::consts::PI;

use fkpi_core::evolution::{picard_sequence, solve, EvolutionConfig};
use fkpi_core::spectral::{FrequencyGrid, SpectralField};
use fkpi_core::symbols::DispersionParams;
use num_complex::Complex64;

fn main() -> fkpi_core::Result<()> {
    let p = DispersionParams::new(2.5)?;
    let grid = FrequencyGrid::new(2.0 * PI * 2.0, 2.0 * PI * 2.0, 32, 32)?;
    let t = 0.25;
    let dt = t / 400.0;
    for eps in [0.4, 0.2, 0.1] {
        let u0 = SpectralField::from_fn(grid, true, |xi, eta| Complex64::new(0.0, xi * (-0.5 * (xi * xi + eta * eta)).exp()));
        let u0 = u0.scale(eps / u0.max_abs());
        let cfg = EvolutionConfig { dt, t_final: t, snapshot_stride: usize::MAX, ..Default::default() };
        let exact = solve(&p, &u0, &cfg)?.last().clone();
        let gaps: Vec<String> =
            picard_sequence(&p, &u0, 3, t, dt)?.iter().map(|u| format!("{:.3e}", u.max_abs_diff(&exact))).collect();
        println!("eps {eps}: |u^(k) - u| for k = 0..3: {}", gaps.join("  "));
    }
    Ok(())
}
