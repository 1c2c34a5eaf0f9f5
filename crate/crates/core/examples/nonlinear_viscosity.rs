//! Replace the linear viscous matrix by a strongly monotone nonlinear law.

use std::path::Path;
use std::sync::Arc;

use viscontact::fem::{Lame, StrainComponents, ViscousLaw};
use viscontact::scenario::ScenarioConfig;
use viscontact::timestepper::run_fully_discrete;

/// Linear part plus a saturating term `gamma e / sqrt(1 + |e|^2)`.
struct Saturating {
    linear: Lame,
    gamma: f64,
}

fn dot(a: StrainComponents, b: StrainComponents) -> f64 {
    a[0] * b[0] + a[1] * b[1] + 2.0 * a[2] * b[2]
}

fn axpy(a: f64, x: StrainComponents, y: StrainComponents) -> StrainComponents {
    [a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2]]
}

impl ViscousLaw for Saturating {
    fn stress(&self, e: StrainComponents) -> StrainComponents {
        let s = (1.0 + dot(e, e)).sqrt();
        axpy(self.gamma / s, e, self.linear.apply(e))
    }
    fn stress_derivative(&self, e: StrainComponents, d: StrainComponents) -> StrainComponents {
        let s = (1.0 + dot(e, e)).sqrt();
        let lin = axpy(self.gamma / s, d, self.linear.apply(d));
        axpy(-self.gamma * dot(e, d) / s.powi(3), e, lin)
    }
    fn potential(&self, e: StrainComponents) -> f64 {
        0.5 * dot(self.linear.apply(e), e) + self.gamma * ((1.0 + dot(e, e)).sqrt() - 1.0)
    }
}

fn main() -> viscontact::error::Result<()> {
    let mut cfg = ScenarioConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/demo.json"))?;
    cfg.mesh.nx = 4;
    cfg.mesh.ny = 4;
    let grid = cfg.grid()?;
    let linear = cfg.build_problem(0)?;
    let law = Saturating { linear: Lame::new(1.0, 0.5), gamma: 0.5 };
    let nonlinear = cfg.build_problem(0)?.with_viscous_law(Arc::new(law));
    for (name, p) in [("linear", &linear), ("saturating", &nonlinear)] {
        let t = run_fully_discrete(p, grid, &cfg.initial.displacement, &cfg.initial.velocity, &cfg.run_options())?;
        let its: usize = t.reports.iter().map(|r| r.inner_iterations).sum();
        let u = t.displacement.last().unwrap();
        println!("{name:<11} converged {}  |u(T)|_V {:.5e}  Newton iterations {its}", t.converged(), p.dynamics.v_norm(u));
    }
    Ok(())
}
