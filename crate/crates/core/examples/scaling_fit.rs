//! Fits the scaling exponent of anisotropic Sobolev norms of a rescaled
//! dipole and compares it with the predicted value.
//!
//! ```text
//! cargo run --release --example scaling_fit
//! ```

use fkpi_core::norms::AnisoIndex;
use fkpi_core::probes::scaling_exponent_fit;
use fkpi_core::symbols::DispersionParams;

fn main() -> fkpi_core::Result<()> {
    let lambdas: Vec<f64> = (0..=4).map(|k| 2f64.powf(k as f64 / 4.0)).collect();
    for alpha in [2.0, 3.0] {
        let p = DispersionParams::new(alpha)?;
        for idx in [AnisoIndex::new(0.0, 0.0), AnisoIndex::new(1.0, 0.0), AnisoIndex::new(0.0, 0.5)] {
            let fit = scaling_exponent_fit(&p, idx, &lambdas)?;
            println!(
                "alpha {alpha}, (s1, s2) = ({}, {}): slope {:.5}, predicted {:.5}, pass {}",
                idx.s1, idx.s2, fit.slope, fit.predicted, fit.record.pass
            );
        }
    }
    Ok(())
}
