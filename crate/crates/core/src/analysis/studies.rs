//! Convergence studies: Cauchy sequences in the time step and in the mesh size.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::{prolongate, VectorField};
use crate::linalg::{quad_form, Vector};
use crate::mesh::GridInfo;
use crate::problem::{ContactProblem, LoadSource};
use crate::timestepper::{run_fully_discrete, run_semi_discrete, RunOptions, TimeGrid, Trajectory};
use crate::vi_step::DiscreteDynamics;

#[derive(Clone, Debug, PartialEq)]
pub struct RateRow {
    /// Time step or mesh size.
    pub parameter: f64,
    pub error: f64,
    /// Observed order against the previous row.
    pub order: Option<f64>,
}

/// Errors against a discretization parameter with observed orders.
#[derive(Clone, Debug, PartialEq)]
pub struct RateTable {
    pub parameter_name: &'static str,
    pub rows: Vec<RateRow>,
    /// Set when some error vanishes, so no order can be formed.
    pub degenerate: bool,
}

impl RateTable {
    pub fn new(parameter_name: &'static str, points: &[(f64, f64)]) -> Self {
        let degenerate = points.iter().any(|&(_, e)| e == 0.0);
        let rows = points
            .iter()
            .enumerate()
            .map(|(i, &(parameter, error))| {
                let order = (i > 0 && !degenerate).then(|| {
                    let (p0, e0) = points[i - 1];
                    (e0 / error).ln() / (p0 / parameter).ln()
                });
                RateRow { parameter, error, order }
            })
            .collect();
        RateTable { parameter_name, rows, degenerate }
    }

    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }

    pub fn min_order(&self) -> Option<f64> {
        self.orders().into_iter().reduce(f64::min)
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("level,{},error,order\n", self.parameter_name);
        for (i, r) in self.rows.iter().enumerate() {
            let order = r.order.map(|o| format!("{o:.16e}")).unwrap_or_default();
            let _ = writeln!(s, "{i},{:.16e},{:.16e},{order}", r.parameter, r.error);
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_csv())?)
    }
}

/// Result of [`cauchy_convergence_study`].
#[derive(Clone, Debug)]
pub struct TimeStudy {
    /// `max_t |u_tau - u_{tau/2}|_V` of the affine displacement interpolants.
    pub displacement: RateTable,
    /// `L^2(0, T; V)` distance of the piecewise constant velocity interpolants.
    pub velocity: RateTable,
}

fn map_maybe_parallel<T: Sync, R: Send>(items: &[T], parallel: bool, f: impl Fn(&T) -> Result<R> + Sync) -> Result<Vec<R>> {
    if parallel {
        items.par_iter().map(&f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

/// Gaps between the runs with `N` and `2N` steps; `steps` must double from one entry to the next.
///
/// The displacement gap is piecewise linear on the finer grid, so its maximum is attained
/// at a node of that grid and is computed exactly there.
#[allow(clippy::too_many_arguments)]
pub fn cauchy_convergence_study(
    dynamics: &DiscreteDynamics,
    loads: &dyn LoadSource,
    t_final: f64,
    steps: &[usize],
    u0: &Vector,
    v0: &Vector,
    options: &RunOptions,
    parallel: bool,
) -> Result<TimeStudy> {
    if steps.len() < 3 {
        return Err(Error::InvalidInput("a time study needs at least three step counts".into()));
    }
    if steps.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::InvalidInput(format!("step counts must double: {steps:?}")));
    }
    let runs = map_maybe_parallel(steps, parallel, |&n| {
        run_semi_discrete(dynamics, loads, TimeGrid::new(t_final, n)?, u0, v0, options)
    })?;
    let mut disp = Vec::new();
    let mut vel = Vec::new();
    for pair in runs.windows(2) {
        let (c, f) = (&pair[0], &pair[1]);
        disp.push((c.grid.tau(), displacement_gap(dynamics, c, f)?));
        vel.push((c.grid.tau(), velocity_gap(dynamics, c, f)));
    }
    Ok(TimeStudy { displacement: RateTable::new("tau", &disp), velocity: RateTable::new("tau", &vel) })
}

fn displacement_gap(dynamics: &DiscreteDynamics, coarse: &Trajectory, fine: &Trajectory) -> Result<f64> {
    let mut gap: f64 = 0.0;
    for k in 0..=fine.grid.steps {
        let t = fine.grid.time(k);
        let d = coarse.interp_affine(t, crate::timestepper::Quantity::Displacement)? - &fine.displacement[k];
        gap = gap.max(dynamics.v_norm(&d));
    }
    Ok(gap)
}

fn velocity_gap(dynamics: &DiscreteDynamics, coarse: &Trajectory, fine: &Trajectory) -> f64 {
    let tau = fine.grid.tau();
    let sum: f64 = (1..=fine.grid.steps)
        .map(|j| {
            let d = &coarse.velocity[j.div_ceil(2)] - &fine.velocity[j];
            tau * dynamics.v_norm(&d).powi(2)
        })
        .sum();
    sum.sqrt()
}

fn nested(coarse: &GridInfo, fine: &GridInfo) -> bool {
    coarse.lx == fine.lx
        && coarse.ly == fine.ly
        && coarse.tags == fine.tags
        && fine.nx % coarse.nx == 0
        && fine.ny % coarse.ny == 0
        && fine.nx / coarse.nx == fine.ny / coarse.ny
}

/// Mesh study: `build(l)` returns the problem on the mesh refined `l` times. Levels
/// `0..levels` are compared against level `reference` at every time node, after
/// prolongation to the reference mesh; the error is `max_k |u_h^k - u_ref^k|_V`.
#[allow(clippy::too_many_arguments)]
pub fn spatial_convergence_study<F>(
    build: F,
    levels: usize,
    reference: usize,
    grid: TimeGrid,
    u0: &dyn VectorField,
    v0: &dyn VectorField,
    options: &RunOptions,
    parallel: bool,
) -> Result<RateTable>
where
    F: Fn(usize) -> Result<ContactProblem> + Sync,
{
    if levels < 3 {
        return Err(Error::InvalidInput("a mesh study needs at least three levels".into()));
    }
    if reference < levels + 1 {
        return Err(Error::InvalidInput(format!(
            "reference level {reference} must be at least two refinements beyond the finest level {}",
            levels - 1
        )));
    }
    let mut ids: Vec<usize> = (0..levels).collect();
    ids.push(reference);
    let problems = map_maybe_parallel(&ids, parallel, |&l| build(l))?;
    let refp = problems.last().unwrap();
    let ref_grid = refp.mesh.grid.as_ref().ok_or_else(|| Error::InvalidMesh("reference mesh has no grid structure".into()))?;
    for p in &problems[..levels] {
        let g = p.mesh.grid.as_ref().ok_or_else(|| Error::InvalidMesh("study meshes need grid structure".into()))?;
        if !nested(g, ref_grid) || g.nx == ref_grid.nx {
            return Err(Error::InvalidMesh(format!(
                "mesh {}x{} is not a proper coarsening of the reference {}x{}",
                g.nx, g.ny, ref_grid.nx, ref_grid.ny
            )));
        }
    }
    let runs = map_maybe_parallel(&problems, parallel, |p| run_fully_discrete(p, grid, u0, v0, options))?;
    let ref_run = runs.last().unwrap();
    let ref_u: Vec<Vector> = ref_run.displacement.iter().map(|u| refp.expand(u)).collect();
    let points = map_maybe_parallel(&ids[..levels], parallel, |&l| {
        let (p, run) = (&problems[l], &runs[l]);
        let mut err: f64 = 0.0;
        for (k, u) in run.displacement.iter().enumerate() {
            let d = prolongate(&p.mesh, &p.expand(u), &refp.mesh)? - &ref_u[k];
            err = err.max(quad_form(&refp.system.gram, &d).max(0.0).sqrt());
        }
        Ok((p.mesh.mesh_size(), err))
    })?;
    Ok(RateTable::new("h", &points))
}
