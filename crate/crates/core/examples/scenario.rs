//! Run a JSON scenario end to end and write CSV and VTK artifacts.
//!
//! `cargo run --example scenario -- path/to/config.json`; defaults to the demo.

use std::path::{Path, PathBuf};

use viscontact::scenario::{run_scenario, ScenarioConfig};

fn main() -> viscontact::error::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/demo.json"));
    let cfg = ScenarioConfig::load(&path)?;
    let out = std::env::temp_dir().join("viscontact-example");
    let summary = run_scenario(&cfg, &out)?;
    print!("{}", summary.conditions);
    println!("largest energy balance residual: {:.2e}", summary.energy.max_abs_residual());
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
