//! Evolves a small dipole with ETDRK4 and prints mass and energy drift.
//!
//! ```text
//! cargo run --release --example conservation
//! ```

use std::f64::consts::PI;

use fkpi_core::evolution::{solve, EvolutionConfig, Scheme};
use fkpi_core::norms::{energy_alpha, mass_spectral};
use fkpi_core::spectral::{FrequencyGrid, SpectralField};
use fkpi_core::symbols::DispersionParams;
use num_complex::Complex64;

fn main() -> fkpi_core::Result<()> {
    let p = DispersionParams::new(3.0)?;
    let grid = FrequencyGrid::new(2.0 * PI * 8.0, 2.0 * PI * 8.0, 128, 128)?;
    let u0 = SpectralField::from_fn(grid, true, |xi, eta| Complex64::new(0.0, xi * (-2.0 * (xi * xi + eta * eta)).exp()));
    let u0 = u0.scale(0.1 / u0.l2_norm());
    for scheme in [Scheme::Etdrk4, Scheme::Strang] {
        let cfg = EvolutionConfig { dt: 1e-3, t_final: 0.5, scheme, snapshot_stride: 50, ..Default::default() };
        let traj = solve(&p, &u0, &cfg)?;
        let (m0, e0) = (mass_spectral(&u0), energy_alpha(&p, &u0)?);
        println!("{scheme:?}");
        for (t, u) in traj.times.iter().zip(&traj.fields) {
            let dm = (mass_spectral(u) - m0).abs() / m0;
            let de = (energy_alpha(&p, u)? - e0).abs() / e0.abs();
            println!("  t = {t:.3}  mass drift {dm:.2e}  energy drift {de:.2e}");
        }
    }
    Ok(())
}
