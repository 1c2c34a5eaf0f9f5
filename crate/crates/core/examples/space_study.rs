//! Mesh convergence against a reference solution two refinements beyond the finest level.

use std::path::Path;

use viscontact::analysis::spatial_convergence_study;
use viscontact::scenario::{FieldConfig, ScenarioConfig};
use viscontact::timestepper::TimeGrid;

fn main() -> viscontact::error::Result<()> {
    let mut cfg = ScenarioConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/demo.json"))?;
    cfg.mesh.nx = 2;
    cfg.mesh.ny = 2;
    let u0 = FieldConfig::Zero;
    let v0 = FieldConfig::Bump { amplitude: [0.2, -0.4], center: [0.5, 0.5], radius: 0.45 };
    let grid = TimeGrid::new(0.5, 10)?;
    let table = spatial_convergence_study(|l| cfg.build_problem(l), 3, 4, grid, &u0, &v0, &cfg.run_options(), true)?;
    print!("{}", table.to_csv());
    if let Some(o) = table.orders().last() {
        println!("final observed order {o:.3}");
    }
    Ok(())
}
