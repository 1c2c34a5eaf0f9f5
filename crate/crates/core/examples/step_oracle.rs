//! Compare the nested fixed-point solver with the enumeration oracle on a tiny mesh.

use std::sync::Arc;

use viscontact::analysis::{brute_force_step_oracle, vi_gap, MAX_ORACLE_DIM};
use viscontact::fem::{Lame, MaterialParams};
use viscontact::friction::FrictionData;
use viscontact::linalg::Vector;
use viscontact::mesh::{build_rect_mesh, SideTags};
use viscontact::problem::{ContactProblem, LoadSource};
use viscontact::scenario::{LoadsConfig, Profile};
use viscontact::vi_step::{StepProblem, StepSolver, Tolerances};

fn main() -> viscontact::error::Result<()> {
    let mesh = build_rect_mesh(2, 1, 1.0, 1.0, SideTags::clamped_left_contact_bottom())?;
    let loads = LoadsConfig { body: Profile::Constant { value: [0.4, -1.0] }, traction: Profile::Zero };
    let p = ContactProblem::new(
        mesh,
        MaterialParams::uniform(Lame::new(1.0, 0.5), Lame::new(1.0, 0.2), 1.0),
        FrictionData::uniform(0.2, 0.4, [0.3, 0.0]),
        Arc::new(loads),
    )?;
    let n = p.n_free();
    assert!(n <= MAX_ORACLE_DIM);
    let tau = 0.05;
    let load = p.averaged(1, tau);
    let u0 = Vector::from_fn(n, |i, _| 0.01 * (i as f64).sin());
    let v0 = Vector::from_fn(n, |i, _| 0.1 * (i as f64).cos());
    let sp = StepProblem::new(&p.dynamics, tau, &load, &u0, &v0);

    let (v, rep) = StepSolver::new(&p.dynamics, tau, Tolerances::default())?.fixed_point_h(&sp)?;
    let oracle = brute_force_step_oracle(&p.dynamics, &sp)?;
    let diff = p.dynamics.v_norm(&(&v - &oracle.velocity));
    println!("{n} unknowns, {} h-iterations, {} g-iterations", rep.h_iterations, rep.g_iterations);
    println!("oracle: {} sign patterns tried, {} consistent, violation {:.2e}", oracle.patterns_tried, oracle.consistent, oracle.violation);
    println!("|v_solver - v_oracle|_V = {diff:.3e}");
    println!("inequality gap of the solver against the oracle: {:.3e}", vi_gap(&p.dynamics, &sp, &v, &oracle.velocity));
    Ok(())
}
