//! One-dimensional step with friction: the solver reproduces the soft-threshold formula.

use viscontact::fem::ViscousOperator;
use viscontact::friction::{ContactPoint, DiscreteContact};
use viscontact::linalg::{csr_from_triplets, Vector};
use viscontact::vi_step::{DiscreteDynamics, StepProblem, StepSolver, Tolerances};

fn main() -> viscontact::error::Result<()> {
    let (q, c) = (2.0, 1.0);
    let one = |x: f64| csr_from_triplets(1, &[(0, 0, x)]);
    // Friction bound c, independent of the displacement.
    let contact = DiscreteContact {
        dim: 1,
        points: vec![ContactPoint { weight: c, mu: 1.0, normal: vec![], bias: 1.0, tangent: vec![(0, 1.0)], slip: 0.0, offset: 0.0 }],
    };
    let d = DiscreteDynamics::new(one(q), one(0.0), ViscousOperator::Linear(one(0.0)), one(1.0), contact, 1e-10)?;
    let solver = StepSolver::new(&d, 1.0, Tolerances::default())?;
    println!("{:>6} {:>12} {:>12} {:>6}", "f", "solver", "exact", "iters");
    for f in [-3.0, -1.0, -0.5, 0.0, 0.5, 1.5, 3.0] {
        let sp = StepProblem { tau: 1.0, rhs: Vector::from_element(1, f), prev_velocity: Vector::zeros(1) };
        let (v, rep) = solver.fixed_point_h(&sp)?;
        let exact = f64::signum(f) * (f64::abs(f) - c).max(0.0) / q;
        println!("{f:>6.2} {:>12.3e} {exact:>12.3e} {:>6}", v[0], rep.inner_iterations);
    }
    Ok(())
}
