//! Linear, low-frequency and bilinear estimate sweeps with their fitted
//! slopes and the shifted-comparator control.
//!
//! ```text
//! cargo run --release --example strichartz_sweep            # linear and low-frequency
//! cargo run --release --example strichartz_sweep -- bilinear
//! ```

use fkpi_core::norms::MixedNormSpec;
use fkpi_core::probes::{
    bilinear_sweep, linear_strichartz_sweep, lowfreq_sweep, Criterion, ExperimentRecord, SweepSummary,
};
use fkpi_core::symbols::DispersionParams;

fn report(name: &str, var: &str, recs: &[ExperimentRecord]) {
    let s = SweepSummary::fit(name, 3.0, var, recs, Criterion::Band { lo: -10.0, hi: 0.1 });
    let c = s.with_comparator_shift(0.25);
    println!("{name}");
    for (x, r) in s.xs.iter().zip(&s.ratios) {
        println!("  {var} = {x:>5}: ratio {r:.4e}");
    }
    println!("  slope {:.4} ({}), control slope {:.4} ({})", s.slope, verdict(s.pass), c.slope, verdict(c.pass));
}

fn verdict(pass: bool) -> &'static str {
    if pass { "pass" } else { "fail" }
}

fn main() -> fkpi_core::Result<()> {
    let p = DispersionParams::new(3.0)?;
    let ns = [8.0, 16.0, 32.0, 64.0];
    if std::env::args().nth(1).as_deref() == Some("bilinear") {
        report("bilinear", "N1", &bilinear_sweep(&p, &[8.0, 16.0, 32.0, 64.0], 2.0, 2, 1)?);
        return Ok(());
    }
    report("linear L4", "N", &linear_strichartz_sweep(&p, MixedNormSpec::new(4.0, 4.0)?, &ns, 64)?);
    report("low-frequency L4", "N", &lowfreq_sweep(&p, &ns, 64)?);
    Ok(())
}
