//! Energy bookkeeping of an unloaded vibrating block: stored energy decays and the
//! balance closes to round-off when the foundation is at rest.

use std::sync::Arc;

use viscontact::analysis::energy_diagnostics;
use viscontact::fem::{Lame, MaterialParams, NoLoad};
use viscontact::friction::FrictionData;
use viscontact::mesh::{build_rect_mesh, SideTags};
use viscontact::problem::ContactProblem;
use viscontact::scenario::FieldConfig;
use viscontact::timestepper::{run_fully_discrete, RunOptions, TimeGrid};

fn main() -> viscontact::error::Result<()> {
    let mesh = build_rect_mesh(6, 6, 1.0, 1.0, SideTags::clamped_left_contact_bottom())?;
    let p = ContactProblem::new(
        mesh,
        MaterialParams::uniform(Lame::new(1.0, 1.0), Lame::new(0.2, 0.1), 1.0),
        FrictionData::uniform(0.35, 0.3, [0.0, 0.0]),
        Arc::new(NoLoad),
    )?;
    let v0 = FieldConfig::Bump { amplitude: [0.3, -0.5], center: [0.6, 0.4], radius: 0.4 };
    let traj = run_fully_discrete(&p, TimeGrid::new(2.0, 80)?, &FieldConfig::Zero, &v0, &RunOptions::default())?;
    let e = energy_diagnostics(&traj, &p.dynamics);

    println!("{:>4} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}", "k", "kinetic", "elastic", "viscous", "friction", "numerical", "residual");
    for r in e.rows.iter().step_by(10) {
        println!(
            "{:>4} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.2e}",
            r.k, r.kinetic, r.elastic, r.viscous, r.friction, r.numerical, r.residual
        );
    }
    let e0 = e.initial_energy();
    println!("\nE0 = {e0:.4e}, max |residual| / E0 = {:.2e}", e.max_abs_residual() / e0);
    println!("stored energy nonincreasing: {}", e.stored_nonincreasing(1e-12 * e0));
    Ok(())
}
