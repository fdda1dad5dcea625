//! Dispersion symbol, resonance function and the normal determinant at a few
//! frequency triples.
//!
//! ```text
//! cargo run --example determinant
//! ```

use fkpi_core::symbols::{
    grad_omega, normal_determinant_closed, normal_determinant_numeric, omega, omega1_stable, resonance_difference,
    resonance_fraction, DispersionParams, FreqPair,
};

fn main() -> fkpi_core::Result<()> {
    let cases = [(2.0, (1.0, 1.0, 1.0, -1.0)), (2.5, (3.0, -2.0, 0.5, 4.0)), (3.0, (10.0, 7.0, -0.25, 1.0))];
    for (alpha, (x1, e1, x2, e2)) in cases {
        let p = DispersionParams::new(alpha)?;
        let q = FreqPair::from_coords(x1, e1, x2, e2)?;
        println!("alpha = {alpha}, p1 = ({x1}, {e1}), p2 = ({x2}, {e2})");
        println!("  omega(p1) = {:.6}, grad omega(p1) = {:?}", omega(&p, q.p1), grad_omega(&p, q.p1));
        println!(
            "  resonance: fraction {:.12}, difference {:.12}, stable part {:.12}",
            resonance_fraction(&p, q),
            resonance_difference(&p, q),
            omega1_stable(alpha, x1, x2)
        );
        println!(
            "  normal determinant: numeric {:.12}, closed form {:.12}",
            normal_determinant_numeric(&p, q),
            normal_determinant_closed(&p, q)
        );
    }
    Ok(())
}
