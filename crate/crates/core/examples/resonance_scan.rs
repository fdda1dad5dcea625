//! Samples the thin high×low boxes and prints the range of both resonance
//! size ratios as `N` grows.
//!
//! ```text
//! cargo run --release --example resonance_scan -- 2.5
//! ```

use fkpi_core::symbols::{resonance_size_scan, DispersionParams, IllposedBoxes};

fn main() -> fkpi_core::Result<()> {
    let alpha: f64 = std::env::args().nth(1).map_or(Ok(2.5), |s| s.parse()).expect("alpha must be a number");
    let p = DispersionParams::new(alpha)?;
    let theta = 0.05;
    println!("{:>6} {:>10} {:>22} {:>22}", "N", "gamma", "|Omega1| ratio", "|Omega| ratio");
    for k in 4..=10 {
        let n = 2f64.powi(k);
        let gamma = IllposedBoxes::gamma_for(alpha, n, theta);
        let s = resonance_size_scan(&p, n, gamma, 10_000, 7)?;
        println!(
            "{n:>6} {gamma:>10.3e} [{:>9.3e}, {:>9.3e}] [{:>9.3e}, {:>9.3e}]",
            s.omega1_ratio.min, s.omega1_ratio.max, s.omega_ratio.min, s.omega_ratio.max
        );
    }
    Ok(())
}
