//! Drives the batch runner from a JSON configuration, as the `fkpi-lab`
//! binary does, and lists the files it writes.
//!
//! ```text
//! cargo run --release --example batch_config
//! ```

use fkpi_core::runner::{load_config, run};

fn main() -> fkpi_core::Result<()> {
    let dir = std::env::temp_dir().join("fkpi-batch-example");
    let text = r#"{
        "command": "transversality",
        "alpha": 2.5,
        "seed": 3,
        "transversality": { "n_min": [1, 2, 4, 8], "samples": 500 }
    }"#;
    let overrides = [("output_dir".to_string(), serde_json::to_string(&dir).expect("path"))];
    let cfg = load_config(Some(text), &overrides)?;
    let outcome = run(&cfg)?;
    println!("pass {} with {} records", outcome.pass, outcome.records);
    for entry in std::fs::read_dir(&outcome.output_dir)? {
        println!("  {}", entry?.path().display());
    }
    print!("{}", std::fs::read_to_string(outcome.output_dir.join("records.csv"))?);
    Ok(())
}
