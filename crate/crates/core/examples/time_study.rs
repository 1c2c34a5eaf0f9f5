//! Cauchy convergence in the time step, with and without friction.

use std::path::Path;

use viscontact::analysis::cauchy_convergence_study;
use viscontact::friction::ContactField;
use viscontact::scenario::ScenarioConfig;
use viscontact::timestepper::discrete_initial_data;

fn main() -> viscontact::error::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/frictionless.json");
    for frictional in [false, true] {
        let mut cfg = ScenarioConfig::load(&path)?;
        if frictional {
            cfg.friction.beta = ContactField::Constant(0.3);
            cfg.friction.mu = ContactField::Constant(0.3);
            cfg.friction.v_star = [0.1, 0.0];
        }
        let p = cfg.build_problem(0)?;
        let (u0, v0) = discrete_initial_data(&p, &cfg.initial.displacement, &cfg.initial.velocity)?;
        let steps: Vec<usize> = (0..5).map(|i| 16 << i).collect();
        let s = cauchy_convergence_study(&p.dynamics, &p, cfg.time.t_final, &steps, &u0, &v0, &cfg.run_options(), true)?;
        println!("{} displacement", if frictional { "frictional" } else { "frictionless" });
        print!("{}", s.displacement.to_csv());
        println!("velocity");
        print!("{}", s.velocity.to_csv());
        println!();
    }
    Ok(())
}
