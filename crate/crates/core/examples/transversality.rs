//! Rejection-samples nearly resonant pairs and reports how far apart their
//! slopes and group velocities stay.
//!
//! ```text
//! cargo run --release --example transversality
//! ```

use fkpi_core::symbols::{transversality_check, DispersionParams};

fn main() -> fkpi_core::Result<()> {
    let p = DispersionParams::new(3.0)?;
    for n_min in [1.0, 2.0, 4.0, 8.0, 16.0] {
        let r = transversality_check(&p, 64.0, n_min, 2000, 0.1, 1)?;
        println!(
            "N_min {n_min:>4}: accepted {}/{} cross [{:.3}, {:.3}] slope gap [{:.3}, {:.3}] grad gap min {:.3}",
            r.accepted,
            r.attempts,
            r.cross_ratio.min,
            r.cross_ratio.max,
            r.slope_gap_ratio.min,
            r.slope_gap_ratio.max,
            r.grad_gap_ratio.min
        );
    }
    Ok(())
}
