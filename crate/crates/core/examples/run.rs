//! Fully discrete run of a loaded block sliding on a moving foundation, with wear.

use std::sync::Arc;

use viscontact::analysis::energy_diagnostics;
use viscontact::fem::{Lame, MaterialParams};
use viscontact::friction::FrictionData;
use viscontact::mesh::{build_rect_mesh, SideTags};
use viscontact::problem::ContactProblem;
use viscontact::scenario::{FieldConfig, LoadsConfig, Profile};
use viscontact::timestepper::{run_fully_discrete, RunOptions, TimeGrid};

fn main() -> viscontact::error::Result<()> {
    let mesh = build_rect_mesh(8, 8, 1.0, 1.0, SideTags::clamped_left_contact_bottom())?;
    // Downward body force growing linearly in time.
    let loads = LoadsConfig { body: Profile::Linear { value: [0.0, 0.0], rate: [0.0, -1.0] }, traction: Profile::Zero };
    let p = ContactProblem::new(
        mesh,
        MaterialParams::uniform(Lame::new(1.0, 1.0), Lame::new(1.0, 0.5), 1.0),
        FrictionData::uniform(0.35, 0.3, [0.1, 0.0]),
        Arc::new(loads),
    )?;
    let grid = TimeGrid::new(1.0, 64)?;
    let opts = RunOptions { wear_stride: 16, ..Default::default() };
    let traj = run_fully_discrete(&p, grid, &FieldConfig::Zero, &FieldConfig::Zero, &opts)?;
    println!("converged: {}", traj.converged());
    println!("max |v|_V {:.4e}, max |z|_H {:.4e}", traj.max_velocity_v(&p.dynamics), traj.max_acceleration_h(&p.dynamics));
    let its: usize = traj.reports.iter().map(|r| r.inner_iterations).sum();
    println!("{its} Newton iterations over {} steps", grid.steps);

    let e = energy_diagnostics(&traj, &p.dynamics);
    println!("\n{:>4} {:>12} {:>12} {:>12}", "k", "stored", "work", "residual");
    for r in e.rows.iter().step_by(16) {
        println!("{:>4} {:>12.4e} {:>12.4e} {:>12.4e}", r.k, r.stored, r.work, r.residual);
    }

    // Wear is minus the normal displacement on the contact part.
    println!("\nwear along the contact side");
    for (k, w) in &traj.wear {
        let line: Vec<String> = w.values.iter().map(|x| format!("{:+.2e}", x + 0.0)).collect();
        println!("k = {k:>3}: {}", line.join(" "));
    }
    Ok(())
}
