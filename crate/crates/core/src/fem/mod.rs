//! Vector P1 finite elements: degrees of freedom, operator assembly and loads.
//!
//! All matrices are assembled over the full set of `2 * n_vertices` degrees of
//! freedom; the clamped ones are eliminated afterwards by restriction to the free
//! set. Element contributions are computed in parallel and accumulated in
//! element order, so assembled matrices are bit-identical to a sequential run.

mod element;
mod load;
mod projection;
mod viscous;

pub use element::{Element, StrainComponents};
pub use load::{assemble_load, average_load, time_average, LoadCase, NoLoad};
pub use projection::{elliptic_projection, projection_error, prolongate, VectorField, ZeroField};
pub use viscous::{IsotropicViscous, NonlinearViscous, ViscousLaw, ViscousOperator};

use nalgebra_sparse::CsrMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{csr_from_triplets, restrict, Vector};
use crate::mesh::{BoundaryTag, TriMesh};

/// Map between mesh vertices and displacement degrees of freedom.
///
/// Vertex `v` owns dofs `2v` (x component) and `2v + 1` (y component).
#[derive(Clone, Debug)]
pub struct DofMap {
    pub n_dofs: usize,
    pub free: Vec<usize>,
    pub constrained: Vec<usize>,
    pub full_to_free: Vec<Option<usize>>,
}

impl DofMap {
    pub fn dof(vertex: usize, component: usize) -> usize {
        2 * vertex + component
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    /// Extract the free entries of a full vector.
    pub fn restrict(&self, full: &Vector) -> Vector {
        Vector::from_iterator(self.free.len(), self.free.iter().map(|&d| full[d]))
    }

    /// Embed a free vector into a full one with zero clamped entries.
    pub fn expand(&self, free: &Vector) -> Vector {
        let mut full = Vector::zeros(self.n_dofs);
        for (i, &d) in self.free.iter().enumerate() {
            full[d] = free[i];
        }
        full
    }

    pub fn restrict_matrix(&self, a: &CsrMatrix<f64>) -> CsrMatrix<f64> {
        restrict(a, &self.free, &self.full_to_free)
    }
}

/// Build the dof map; both components of every vertex on a clamped edge are constrained.
pub fn build_dofmap(mesh: &TriMesh) -> DofMap {
    let n_dofs = 2 * mesh.n_vertices();
    let mut clamped = vec![false; mesh.n_vertices()];
    for e in mesh.edges_with_tag(BoundaryTag::Dirichlet) {
        clamped[e.vertices[0]] = true;
        clamped[e.vertices[1]] = true;
    }
    let mut free = Vec::new();
    let mut constrained = Vec::new();
    let mut full_to_free = vec![None; n_dofs];
    for d in 0..n_dofs {
        if clamped[d / 2] {
            constrained.push(d);
        } else {
            full_to_free[d] = Some(free.len());
            free.push(d);
        }
    }
    DofMap { n_dofs, free, constrained, full_to_free }
}

/// Lamé pair of an isotropic linear tensor `C e = 2 mu e + lambda tr(e) I`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lame {
    pub mu: f64,
    pub lambda: f64,
}

impl Lame {
    pub fn new(mu: f64, lambda: f64) -> Self {
        Lame { mu, lambda }
    }

    /// Smallest eigenvalue of the tensor on symmetric 2x2 matrices (strong monotonicity constant).
    pub fn monotonicity(&self) -> f64 {
        (2.0 * self.mu).min(2.0 * self.mu + 2.0 * self.lambda)
    }

    /// Largest eigenvalue of the tensor on symmetric 2x2 matrices (Lipschitz constant).
    pub fn bound(&self) -> f64 {
        (2.0 * self.mu).max(2.0 * self.mu + 2.0 * self.lambda)
    }

    /// `C e` for tensor components `(e11, e22, e12)`.
    pub fn apply(&self, e: StrainComponents) -> StrainComponents {
        let tr = e[0] + e[1];
        [
            2.0 * self.mu * e[0] + self.lambda * tr,
            2.0 * self.mu * e[1] + self.lambda * tr,
            2.0 * self.mu * e[2],
        ]
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) || !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "{what} Lamé pair needs mu > 0 and lambda >= 0, got mu = {}, lambda = {}",
                self.mu, self.lambda
            )));
        }
        Ok(())
    }
}

/// Mass density, constant or piecewise constant per triangle.
#[derive(Clone, Debug, PartialEq)]
pub enum Density {
    Uniform(f64),
    PerTriangle(Vec<f64>),
}

impl Density {
    pub fn value(&self, triangle: usize) -> f64 {
        match self {
            Density::Uniform(r) => *r,
            Density::PerTriangle(v) => v[triangle],
        }
    }

    fn min(&self) -> f64 {
        match self {
            Density::Uniform(r) => *r,
            Density::PerTriangle(v) => v.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}

/// Kelvin-Voigt material: elastic and viscous isotropic tensors and the density.
#[derive(Clone, Debug, PartialEq)]
pub struct MaterialParams {
    pub elastic: Lame,
    pub viscous: Lame,
    pub density: Density,
    /// Positive lower bound of the density.
    pub rho_star: f64,
}

impl MaterialParams {
    pub fn uniform(elastic: Lame, viscous: Lame, rho: f64) -> Self {
        MaterialParams { elastic, viscous, density: Density::Uniform(rho), rho_star: rho }
    }

    pub fn validate(&self, mesh: &TriMesh) -> Result<()> {
        self.elastic.validate("elastic")?;
        self.viscous.validate("viscous")?;
        if let Density::PerTriangle(v) = &self.density {
            if v.len() != mesh.n_triangles() {
                return Err(Error::InvalidInput(format!(
                    "density has {} values for {} triangles",
                    v.len(),
                    mesh.n_triangles()
                )));
            }
        }
        if !(self.rho_star > 0.0) || !(self.density.min() >= self.rho_star) {
            return Err(Error::InvalidInput(format!(
                "density must stay above rho_star = {} > 0 (minimum {})",
                self.rho_star,
                self.density.min()
            )));
        }
        Ok(())
    }
}

/// Quadrature data of one contact edge.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactEdge {
    pub vertices: [usize; 2],
    /// Full dof indices `[[ax, ay], [bx, by]]` of the two endpoints.
    pub dofs: [[usize; 2]; 2],
    pub length: f64,
    pub normal: [f64; 2],
    pub tangent: [f64; 2],
}

pub fn contact_edges(mesh: &TriMesh) -> Vec<ContactEdge> {
    mesh.edges_with_tag(BoundaryTag::Contact)
        .map(|e| {
            let [a, b] = e.vertices;
            ContactEdge {
                vertices: [a, b],
                dofs: [[2 * a, 2 * a + 1], [2 * b, 2 * b + 1]],
                length: mesh.edge_length(e),
                normal: e.normal,
                tangent: e.tangent,
            }
        })
        .collect()
}

/// Assembled operators over the full dof set.
#[derive(Clone, Debug)]
pub struct AssembledSystem {
    /// Density-weighted mass matrix.
    pub mass: CsrMatrix<f64>,
    /// Elastic stiffness.
    pub elastic: CsrMatrix<f64>,
    /// Viscous stiffness of the isotropic viscous tensor.
    pub viscous: CsrMatrix<f64>,
    /// Strain Gram matrix defining the energy norm of the displacement space.
    pub gram: CsrMatrix<f64>,
    /// Unweighted vector mass matrix of the contact boundary.
    pub contact_mass: CsrMatrix<f64>,
    pub contact_edges: Vec<ContactEdge>,
    pub n_free: usize,
}

impl AssembledSystem {
    pub fn assemble(mesh: &TriMesh, dofmap: &DofMap, material: &MaterialParams) -> Result<Self> {
        material.validate(mesh)?;
        Ok(AssembledSystem {
            mass: assemble_mass(mesh, dofmap, &material.density),
            elastic: assemble_elastic(mesh, dofmap, &material.elastic),
            viscous: assemble_viscous(mesh, dofmap, &material.viscous),
            gram: assemble_gram(mesh, dofmap),
            contact_mass: assemble_boundary_mass(mesh, dofmap, BoundaryTag::Contact),
            contact_edges: contact_edges(mesh),
            n_free: dofmap.n_free(),
        })
    }
}

fn assemble_elementwise<F>(mesh: &TriMesh, dofmap: &DofMap, local: F) -> CsrMatrix<f64>
where
    F: Fn(usize, &Element) -> [[f64; 6]; 6] + Sync,
{
    let blocks: Vec<([usize; 6], [[f64; 6]; 6])> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let el = Element::new(mesh, t);
            (el.dofs(), local(t, &el))
        })
        .collect();
    let mut triplets = Vec::with_capacity(36 * blocks.len());
    for (dofs, k) in &blocks {
        for i in 0..6 {
            for j in 0..6 {
                triplets.push((dofs[i], dofs[j], k[i][j]));
            }
        }
    }
    csr_from_triplets(dofmap.n_dofs, &triplets)
}

/// Density-weighted mass matrix, three-point edge-midpoint quadrature per triangle.
pub fn assemble_mass(mesh: &TriMesh, dofmap: &DofMap, density: &Density) -> CsrMatrix<f64> {
    assemble_elementwise(mesh, dofmap, |t, el| el.mass(density.value(t)))
}

/// Stiffness of the isotropic elastic tensor.
pub fn assemble_elastic(mesh: &TriMesh, dofmap: &DofMap, lame: &Lame) -> CsrMatrix<f64> {
    assemble_elementwise(mesh, dofmap, |_, el| el.stiffness(lame))
}

/// Stiffness of the isotropic viscous tensor.
pub fn assemble_viscous(mesh: &TriMesh, dofmap: &DofMap, lame: &Lame) -> CsrMatrix<f64> {
    assemble_elementwise(mesh, dofmap, |_, el| el.stiffness(lame))
}

/// Gram matrix of `(eps(u), eps(v))`, the identity tensor (`mu = 1/2, lambda = 0`).
pub fn assemble_gram(mesh: &TriMesh, dofmap: &DofMap) -> CsrMatrix<f64> {
    assemble_elastic(mesh, dofmap, &Lame::new(0.5, 0.0))
}

/// Vector mass matrix of the boundary part `tag` (exact for P1 traces).
pub fn assemble_boundary_mass(mesh: &TriMesh, dofmap: &DofMap, tag: BoundaryTag) -> CsrMatrix<f64> {
    let mut triplets = Vec::new();
    for e in mesh.edges_with_tag(tag) {
        let len = mesh.edge_length(e);
        for (ia, &a) in e.vertices.iter().enumerate() {
            for (ib, &b) in e.vertices.iter().enumerate() {
                let m = if ia == ib { len / 3.0 } else { len / 6.0 };
                for c in 0..2 {
                    triplets.push((DofMap::dof(a, c), DofMap::dof(b, c), m));
                }
            }
        }
    }
    csr_from_triplets(dofmap.n_dofs, &triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matvec, max_abs, max_asymmetry, quad_form, to_dense};
    use crate::mesh::{build_rect_mesh, SideTags};
    use approx::assert_relative_eq;

    fn unit(nx: usize, ny: usize) -> TriMesh {
        build_rect_mesh(nx, ny, nx as f64, ny as f64, SideTags::clamped_left_contact_bottom()).unwrap()
    }

    fn field(mesh: &TriMesh, f: impl Fn([f64; 2]) -> [f64; 2]) -> Vector {
        let mut u = Vector::zeros(2 * mesh.n_vertices());
        for (v, &p) in mesh.vertices.iter().enumerate() {
            let w = f(p);
            u[2 * v] = w[0];
            u[2 * v + 1] = w[1];
        }
        u
    }

    #[test]
    fn dofmap_counts() {
        let m = unit(1, 1);
        let d = build_dofmap(&m);
        assert_eq!((d.n_dofs, d.constrained.len()), (8, 4));
        let m = unit(2, 1);
        let d = build_dofmap(&m);
        assert_eq!((d.n_dofs, d.constrained.len()), (12, 4));
        assert_eq!(d.free.len() + d.constrained.len(), d.n_dofs);
        for &c in &d.constrained {
            assert_eq!(m.vertices[c / 2][0], 0.0);
        }
    }

    #[test]
    fn mass_partition_of_unity() {
        let m = unit(1, 1);
        let d = build_dofmap(&m);
        let mass = assemble_mass(&m, &d, &Density::Uniform(1.0));
        let u = field(&m, |_| [1.0, 0.0]);
        assert_relative_eq!(quad_form(&mass, &u), 1.0, epsilon = 1e-14);
        let mass2 = assemble_mass(&m, &d, &Density::Uniform(2.0));
        assert_relative_eq!(quad_form(&mass2, &u), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn rigid_motions_are_in_the_kernel() {
        let m = unit(3, 2);
        let d = build_dofmap(&m);
        let lame = Lame::new(1.3, 0.7);
        let a = assemble_elastic(&m, &d, &lame);
        let b = assemble_viscous(&m, &d, &Lame::new(0.4, 2.0));
        for u in [field(&m, |_| [1.0, 0.0]), field(&m, |_| [0.0, 1.0]), field(&m, |p| [-p[1], p[0]])] {
            assert!(matvec(&a, &u).amax() < 1e-13);
            assert!(matvec(&b, &u).amax() < 1e-13);
        }
    }

    #[test]
    fn rigid_kernel_has_dimension_three() {
        let m = unit(1, 1);
        let d = build_dofmap(&m);
        let a = to_dense(&assemble_elastic(&m, &d, &Lame::new(1.0, 1.0)));
        let eig = nalgebra::SymmetricEigen::new(a);
        let scale = eig.eigenvalues.amax();
        let zeros = eig.eigenvalues.iter().filter(|l| l.abs() < 1e-12 * scale).count();
        assert_eq!(zeros, 3);
    }

    #[test]
    fn equal_pairs_give_equal_matrices() {
        let m = unit(2, 2);
        let d = build_dofmap(&m);
        let lame = Lame::new(0.8, 0.3);
        let a = assemble_elastic(&m, &d, &lame);
        let b = assemble_viscous(&m, &d, &lame);
        assert!((to_dense(&a) - to_dense(&b)).amax() <= 1e-14);
    }

    #[test]
    fn assembled_matrices_are_symmetric() {
        let m = unit(3, 3);
        let d = build_dofmap(&m);
        let material = MaterialParams {
            elastic: Lame::new(1.0, 2.0),
            viscous: Lame::new(0.5, 0.1),
            density: Density::PerTriangle((0..m.n_triangles()).map(|t| 1.0 + 0.1 * t as f64).collect()),
            rho_star: 1.0,
        };
        let s = AssembledSystem::assemble(&m, &d, &material).unwrap();
        for x in [&s.mass, &s.elastic, &s.viscous, &s.gram, &s.contact_mass] {
            assert!(max_asymmetry(x) <= 1e-12 * max_abs(x));
        }
    }

    #[test]
    fn gram_matches_hat_function_strain_energy() {
        // Interior vertex of a 2x2 mesh of the unit square; the x hat function has
        // strain (gx, 0, gy/2) on each triangle of its patch.
        let m = build_rect_mesh(2, 2, 1.0, 1.0, SideTags::clamped_left_contact_bottom()).unwrap();
        let d = build_dofmap(&m);
        let a = assemble_elastic(&m, &d, &Lame::new(1.0, 0.0));
        let centre = 4;
        let mut u = Vector::zeros(d.n_dofs);
        u[2 * centre] = 1.0;
        let mut oracle = 0.0;
        for tri in &m.triangles {
            if let Some(k) = tri.iter().position(|&v| v == centre) {
                let p: Vec<[f64; 2]> = tri.iter().map(|&v| m.vertices[v]).collect();
                let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
                let (j, l) = ((k + 1) % 3, (k + 2) % 3);
                let gx = (p[j][1] - p[l][1]) / (2.0 * area);
                let gy = (p[l][0] - p[j][0]) / (2.0 * area);
                // 2 mu e:e with mu = 1
                oracle += area * 2.0 * (gx * gx + 2.0 * (0.5 * gy) * (0.5 * gy));
            }
        }
        assert_relative_eq!(quad_form(&a, &u), oracle, max_relative = 1e-14);
        // 2 * int(phi_x^2) + int(phi_y^2) with both integrals equal to 2 on this patch
        assert_relative_eq!(oracle, 6.0, max_relative = 1e-14);
    }

    #[test]
    fn mass_of_interior_hat_matches_patch_integral() {
        let m = build_rect_mesh(2, 2, 1.0, 1.0, SideTags::clamped_left_contact_bottom()).unwrap();
        let d = build_dofmap(&m);
        let mass = assemble_mass(&m, &d, &Density::Uniform(3.0));
        let mut u = Vector::zeros(d.n_dofs);
        u[2 * 4 + 1] = 1.0;
        // integral of rho * phi^2 over the patch is rho * |patch| / 6
        let patch: f64 = m
            .triangles
            .iter()
            .enumerate()
            .filter(|(_, t)| t.contains(&4))
            .map(|(i, _)| m.signed_area(i))
            .sum();
        assert_relative_eq!(quad_form(&mass, &u), 3.0 * patch / 6.0, max_relative = 1e-14);
    }

    #[test]
    fn contact_mass_integrates_length() {
        let m = unit(3, 1);
        let d = build_dofmap(&m);
        let mb = assemble_boundary_mass(&m, &d, BoundaryTag::Contact);
        let u = field(&m, |_| [0.0, 1.0]);
        assert_relative_eq!(quad_form(&mb, &u), 3.0, max_relative = 1e-14);
    }

    #[test]
    fn invalid_material_rejected() {
        let m = unit(1, 1);
        let d = build_dofmap(&m);
        let bad = MaterialParams::uniform(Lame::new(-1.0, 0.0), Lame::new(1.0, 0.0), 1.0);
        assert!(AssembledSystem::assemble(&m, &d, &bad).is_err());
        let bad = MaterialParams::uniform(Lame::new(1.0, 0.0), Lame::new(1.0, 0.0), 0.0);
        assert!(AssembledSystem::assemble(&m, &d, &bad).is_err());
    }
}
