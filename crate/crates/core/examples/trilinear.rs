//! Trilinear convolution estimates on sheared frequency–modulation lattices.
//!
//! ```text
//! cargo run --release --example trilinear
//! ```

use fkpi_core::probes::{lw_sweep, nonresonant_sweep, Criterion, SweepSummary};
use fkpi_core::symbols::DispersionParams;

fn main() -> fkpi_core::Result<()> {
    let p = DispersionParams::new(3.0)?;
    let band = Criterion::Band { lo: -10.0, hi: 0.1 };

    let lw = lw_sweep(&p, &[8.0, 16.0, 32.0, 64.0], 2.0, [1.0; 3], 4, 1)?;
    for r in &lw {
        println!("lw  N1 = {:>4}: ratio {:.4e} ({:?})", r.input("N1").unwrap_or(f64::NAN), r.ratio, r.status);
    }
    let s = SweepSummary::fit("lw", 3.0, "N1", &lw, band);
    println!("lw slope {:.4}, pass {}", s.slope, s.pass);

    let nr = nonresonant_sweep(&p, 1.0, &[8.0, 16.0, 32.0, 64.0], 16.0, 4, 1)?;
    for r in &nr {
        println!("nr  N2 = {:>4}: ratio {:.4e} ({:?})", r.input("N2").unwrap_or(f64::NAN), r.ratio, r.status);
    }
    let s = SweepSummary::fit("nonresonant", 3.0, "N2", &nr, band);
    println!("non-resonant slope {:.4}, pass {}", s.slope, s.pass);
    Ok(())
}
