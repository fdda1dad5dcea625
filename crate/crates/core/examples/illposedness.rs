//! Growth of the second Picard iterate on thin high×low frequency boxes.
//! The fitted slope changes sign as `alpha` crosses the critical value.
//!
//! ```text
//! cargo run --release --example illposedness -- 2.2
//! ```

use fkpi_core::probes::illposedness_growth_study;
use fkpi_core::symbols::DispersionParams;

fn main() -> fkpi_core::Result<()> {
    let alpha: f64 = std::env::args().nth(1).map_or(Ok(2.0), |s| s.parse()).expect("alpha must be a number");
    let p = DispersionParams::new(alpha)?;
    let ns: Vec<f64> = (8..=13).map(|k| 2f64.powi(k)).collect();
    let study = illposedness_growth_study(&p, 0.05, &ns, (0.0, 0.0), 1.0, 24)?;
    for it in &study.iterates {
        println!("N = {:>6}: gamma {:.3e}, |u2(1)| = {:.4e}, quadrature change {:.1e}", it.n, it.gamma, it.norm, it.rel_change);
    }
    println!(
        "slope {:.4}, predicted {:.4}, sign consistent {}, pass {}",
        study.summary.slope, study.predicted, study.sign_ok, study.pass
    );
    Ok(())
}
