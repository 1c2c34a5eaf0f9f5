//! Implicit time stepping over a uniform grid and the time interpolants of its output.
//!
//! Step `k` finds the velocity `v_k` of the step inequality, then sets
//! `u_k = u_{k-1} + tau v_k` and `z_k = (v_k - v_{k-1}) / tau`.

use crate::error::{Error, Result};
use crate::fem::{elliptic_projection, VectorField};
use crate::friction::{wear_field, WearField};
use crate::linalg::Vector;
use crate::problem::{ContactProblem, LoadSource};
use crate::vi_step::{ContractionBounds, DiscreteDynamics, SolverReport, StepProblem, StepSolver, Tolerances};

/// Uniform grid `t_k = k T / N` of `[0, T]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t_final: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, steps: usize) -> Result<Self> {
        if steps == 0 || !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::InvalidInput(format!("time grid needs T > 0 and N >= 1, got T = {t_final}, N = {steps}")));
        }
        Ok(TimeGrid { t_final, steps })
    }

    pub fn tau(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.t_final
        } else {
            k as f64 * self.tau()
        }
    }

    /// Index `k` with `t` in `(t_{k-1}, t_k]`, or 0 for `t = 0`.
    fn interval(&self, t: f64) -> Result<usize> {
        if !(0.0..=self.t_final).contains(&t) {
            return Err(Error::InvalidInput(format!("time {t} outside [0, {}]", self.t_final)));
        }
        if t == 0.0 {
            return Ok(0);
        }
        let k = (t / self.tau()).ceil() as usize;
        Ok(k.clamp(1, self.steps))
    }
}

/// Which sequence of a trajectory to read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Displacement,
    Velocity,
    Acceleration,
}

/// Options of a time run.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub tolerances: Tolerances,
    /// A priori contraction factors; reported as warnings when not below one.
    pub bounds: Option<ContractionBounds>,
    /// Store a wear snapshot every `wear_stride` steps (and at the last step); 0 means every step.
    pub wear_stride: usize,
}

/// Nodal sequences of a run on the free coordinates.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub displacement: Vec<Vector>,
    pub velocity: Vec<Vector>,
    /// `z_0` is set to `z_1`.
    pub acceleration: Vec<Vector>,
    /// Averaged loads `f_k`; entry 0 is zero.
    pub loads: Vec<Vector>,
    /// Report of step `k` at index `k - 1`.
    pub reports: Vec<SolverReport>,
    /// `(k, wear)` snapshots, filled by the finite element driver.
    pub wear: Vec<(usize, WearField)>,
}

impl Trajectory {
    fn sequence(&self, which: Quantity) -> &[Vector] {
        match which {
            Quantity::Displacement => &self.displacement,
            Quantity::Velocity => &self.velocity,
            Quantity::Acceleration => &self.acceleration,
        }
    }

    /// Piecewise affine interpolant through the nodal values.
    pub fn interp_affine(&self, t: f64, which: Quantity) -> Result<Vector> {
        let k = self.grid.interval(t)?;
        let seq = self.sequence(which);
        if k == 0 {
            return Ok(seq[0].clone());
        }
        let s = (t - self.grid.time(k)) / self.grid.tau();
        Ok(&seq[k] + s * (&seq[k] - &seq[k - 1]))
    }

    /// Right-continuous piecewise constant interpolant, equal to the initial value at `t = 0`.
    pub fn interp_constant(&self, t: f64, which: Quantity) -> Result<Vector> {
        let k = self.grid.interval(t)?;
        Ok(self.sequence(which)[k].clone())
    }

    pub fn max_velocity_v(&self, dynamics: &DiscreteDynamics) -> f64 {
        self.velocity.iter().map(|v| dynamics.v_norm(v)).fold(0.0, f64::max)
    }

    /// Largest `|z_k|_H` over `k >= 1`.
    pub fn max_acceleration_h(&self, dynamics: &DiscreteDynamics) -> f64 {
        self.acceleration.iter().skip(1).map(|z| dynamics.h_norm(z)).fold(0.0, f64::max)
    }

    pub fn converged(&self) -> bool {
        self.reports.iter().all(|r| r.converged)
    }
}

/// March the step inequality over the grid from `(u0, v0)` on the free coordinates.
pub fn run_semi_discrete(
    dynamics: &DiscreteDynamics,
    loads: &dyn LoadSource,
    grid: TimeGrid,
    u0: &Vector,
    v0: &Vector,
    options: &RunOptions,
) -> Result<Trajectory> {
    let n = dynamics.dim();
    if u0.len() != n || v0.len() != n {
        return Err(Error::InvalidInput(format!("initial data of size {}/{} for {n} coordinates", u0.len(), v0.len())));
    }
    let tau = grid.tau();
    let mut solver = StepSolver::new(dynamics, tau, options.tolerances)?;
    if let Some(b) = options.bounds {
        solver = solver.with_bounds(b);
    }
    let mut traj = Trajectory {
        grid,
        displacement: vec![u0.clone()],
        velocity: vec![v0.clone()],
        acceleration: vec![Vector::zeros(n)],
        loads: vec![Vector::zeros(n)],
        reports: Vec::with_capacity(grid.steps),
        wear: Vec::new(),
    };
    for k in 1..=grid.steps {
        let load = loads.averaged(k, tau);
        let (u_prev, v_prev) = (&traj.displacement[k - 1], &traj.velocity[k - 1]);
        let problem = StepProblem::new(dynamics, tau, &load, u_prev, v_prev);
        let (v, report) = solver
            .fixed_point_h(&problem)
            .map_err(|e| Error::StepFailed { step: k, source: Box::new(e) })?;
        let u = u_prev + tau * &v;
        let z = (&v - v_prev) / tau;
        traj.displacement.push(u);
        traj.velocity.push(v);
        traj.acceleration.push(z);
        traj.loads.push(load);
        traj.reports.push(report);
    }
    traj.acceleration[0] = traj.acceleration[1].clone();
    Ok(traj)
}

/// Discrete initial data: projections of the initial fields in the strain inner product.
pub fn discrete_initial_data(
    problem: &ContactProblem,
    u0: &dyn VectorField,
    v0: &dyn VectorField,
) -> Result<(Vector, Vector)> {
    Ok((
        elliptic_projection(&problem.mesh, &problem.dofmap, u0)?,
        elliptic_projection(&problem.mesh, &problem.dofmap, v0)?,
    ))
}

/// Run the finite element scheme on the problem's mesh and record wear snapshots.
pub fn run_fully_discrete(
    problem: &ContactProblem,
    grid: TimeGrid,
    u0: &dyn VectorField,
    v0: &dyn VectorField,
    options: &RunOptions,
) -> Result<Trajectory> {
    let (u0, v0) = discrete_initial_data(problem, u0, v0)?;
    let mut traj = run_semi_discrete(&problem.dynamics, problem, grid, &u0, &v0, options)?;
    let stride = options.wear_stride.max(1);
    for k in 0..=grid.steps {
        if k % stride == 0 || k == grid.steps {
            let full = problem.expand(&traj.displacement[k]);
            traj.wear.push((k, wear_field(&full, &problem.system.contact_edges)));
        }
    }
    Ok(traj)
}
