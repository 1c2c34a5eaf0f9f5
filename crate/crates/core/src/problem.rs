//! Finite element instance of the contact problem on one mesh.

use std::sync::Arc;

use crate::error::Result;
use crate::fem::{
    average_load, build_dofmap, AssembledSystem, DofMap, LoadCase, MaterialParams, NonlinearViscous, ViscousLaw,
    ViscousOperator,
};
use crate::friction::{DiscreteContact, FrictionData};
use crate::linalg::Vector;
use crate::mesh::TriMesh;
use crate::vi_step::DiscreteDynamics;

/// Source of time-averaged load vectors on the free coordinates.
pub trait LoadSource: Sync {
    /// Mean load over `[t_{k-1}, t_k]`.
    fn averaged(&self, k: usize, tau: f64) -> Vector;
}

/// Load given as a function of time, averaged with two-point Gauss quadrature.
pub struct TimeLoad<F>(pub F);

impl<F: Fn(f64) -> Vector + Sync> LoadSource for TimeLoad<F> {
    fn averaged(&self, k: usize, tau: f64) -> Vector {
        crate::fem::time_average(k, tau, &self.0)
    }
}

/// Identically zero load of a given dimension.
pub struct ZeroLoad(pub usize);

impl LoadSource for ZeroLoad {
    fn averaged(&self, _: usize, _: f64) -> Vector {
        Vector::zeros(self.0)
    }
}

/// Mesh, material, contact data and loads with the assembled operators.
#[derive(Clone)]
pub struct ContactProblem {
    pub mesh: TriMesh,
    pub dofmap: DofMap,
    pub material: MaterialParams,
    pub friction: FrictionData,
    pub system: AssembledSystem,
    pub dynamics: DiscreteDynamics,
    pub loads: Arc<dyn LoadCase>,
}

impl ContactProblem {
    pub fn new(mesh: TriMesh, material: MaterialParams, friction: FrictionData, loads: Arc<dyn LoadCase>) -> Result<Self> {
        let dofmap = build_dofmap(&mesh);
        let system = AssembledSystem::assemble(&mesh, &dofmap, &material)?;
        friction.validate(system.contact_edges.len())?;
        let contact =
            DiscreteContact::from_edges(&system.contact_edges, &friction, dofmap.n_dofs, Some(&dofmap.full_to_free));
        let dynamics = DiscreteDynamics::new(
            dofmap.restrict_matrix(&system.mass),
            dofmap.restrict_matrix(&system.elastic),
            ViscousOperator::Linear(dofmap.restrict_matrix(&system.viscous)),
            dofmap.restrict_matrix(&system.gram),
            contact,
            friction.eps_reg,
        )?;
        Ok(ContactProblem { mesh, dofmap, material, friction, system, dynamics, loads })
    }

    /// Replace the linear viscous operator by a general viscosity law.
    pub fn with_viscous_law(mut self, law: Arc<dyn ViscousLaw>) -> Self {
        self.dynamics.viscous = ViscousOperator::Nonlinear(NonlinearViscous::new(&self.mesh, &self.dofmap, law));
        self
    }

    pub fn n_free(&self) -> usize {
        self.dofmap.n_free()
    }

    pub fn expand(&self, free: &Vector) -> Vector {
        self.dofmap.expand(free)
    }

    pub fn restrict(&self, full: &Vector) -> Vector {
        self.dofmap.restrict(full)
    }
}

impl LoadSource for ContactProblem {
    fn averaged(&self, k: usize, tau: f64) -> Vector {
        self.dofmap.restrict(&average_load(&self.mesh, &self.dofmap, self.loads.as_ref(), k, tau))
    }
}
