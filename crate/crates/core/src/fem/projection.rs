use crate::error::{Error, Result};
use crate::linalg::{SpdFactor, Vector};
use crate::mesh::TriMesh;

use super::element::contract;
use super::{assemble_gram, DofMap, Element, StrainComponents};

const MIDPOINTS: [[f64; 3]; 3] = [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]];

/// Smooth displacement field given with its gradient.
pub trait VectorField: Send + Sync {
    fn value(&self, x: [f64; 2]) -> [f64; 2];
    /// `grad[i][j] = d u_i / d x_j`.
    fn gradient(&self, x: [f64; 2]) -> [[f64; 2]; 2];

    fn strain(&self, x: [f64; 2]) -> StrainComponents {
        let g = self.gradient(x);
        [g[0][0], g[1][1], 0.5 * (g[0][1] + g[1][0])]
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroField;

impl VectorField for ZeroField {
    fn value(&self, _: [f64; 2]) -> [f64; 2] {
        [0.0; 2]
    }
    fn gradient(&self, _: [f64; 2]) -> [[f64; 2]; 2] {
        [[0.0; 2]; 2]
    }
}

/// Projection onto the free P1 space in the strain inner product; returns free coefficients.
pub fn elliptic_projection(mesh: &TriMesh, dofmap: &DofMap, field: &dyn VectorField) -> Result<Vector> {
    let mut rhs = Vector::zeros(dofmap.n_dofs);
    for t in 0..mesh.n_triangles() {
        let el = Element::new(mesh, t);
        let strains = el.strains();
        let dofs = el.dofs();
        for lam in MIDPOINTS {
            let e = field.strain(el.point(lam));
            for i in 0..6 {
                rhs[dofs[i]] += el.area / 3.0 * contract(e, strains[i]);
            }
        }
    }
    let rhs = dofmap.restrict(&rhs);
    if rhs.amax() == 0.0 {
        return Ok(rhs);
    }
    let gram = dofmap.restrict_matrix(&assemble_gram(mesh, dofmap));
    Ok(SpdFactor::new(&gram)?.solve(&rhs))
}

/// `|| eps(field) - eps(u_h) ||` over the domain for full coefficients `u_full`.
pub fn projection_error(mesh: &TriMesh, field: &dyn VectorField, u_full: &Vector) -> f64 {
    let mut sum = 0.0;
    for t in 0..mesh.n_triangles() {
        let el = Element::new(mesh, t);
        let local = el.dofs().map(|d| u_full[d]);
        let eh = el.strain_of(&local);
        for lam in MIDPOINTS {
            let e = field.strain(el.point(lam));
            let d = [e[0] - eh[0], e[1] - eh[1], e[2] - eh[2]];
            sum += el.area / 3.0 * contract(d, d);
        }
    }
    sum.sqrt()
}

/// Interpolate a full P1 field from `coarse` onto the vertices of `fine`.
pub fn prolongate(coarse: &TriMesh, u_coarse: &Vector, fine: &TriMesh) -> Result<Vector> {
    let mut out = Vector::zeros(2 * fine.n_vertices());
    for (v, &p) in fine.vertices.iter().enumerate() {
        let (t, lam) = coarse
            .locate(p)
            .ok_or_else(|| Error::InvalidMesh(format!("fine vertex {v} at {p:?} lies outside the coarse mesh")))?;
        let tri = coarse.triangles[t];
        for c in 0..2 {
            out[2 * v + c] = (0..3).map(|a| lam[a] * u_coarse[2 * tri[a] + c]).sum();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::build_dofmap;
    use crate::mesh::{build_rect_mesh, SideTags};

    struct Bump;
    impl VectorField for Bump {
        fn value(&self, x: [f64; 2]) -> [f64; 2] {
            let s = x[0] * (x[0] * x[1]).sin();
            [s, 0.5 * s]
        }
        fn gradient(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
            let (p, c) = ((x[0] * x[1]).sin(), (x[0] * x[1]).cos());
            let gx = p + x[0] * x[1] * c;
            let gy = x[0] * x[0] * c;
            [[gx, gy], [0.5 * gx, 0.5 * gy]]
        }
    }

    #[test]
    fn projection_error_is_first_order() {
        let mut errs = Vec::new();
        for n in [4, 8, 16] {
            let m = build_rect_mesh(n, n, 1.0, 1.0, SideTags::clamped_left_contact_bottom()).unwrap();
            let d = build_dofmap(&m);
            let u = d.expand(&elliptic_projection(&m, &d, &Bump).unwrap());
            errs.push(projection_error(&m, &Bump, &u));
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((0.85..1.3).contains(&order), "order {order}");
        }
    }

    #[test]
    fn prolongation_is_exact_on_linear_fields() {
        let tags = SideTags::clamped_left_contact_bottom();
        let c = build_rect_mesh(2, 2, 2.0, 1.0, tags).unwrap();
        let f = build_rect_mesh(8, 8, 2.0, 1.0, tags).unwrap();
        let lin = |p: [f64; 2]| [1.0 + 2.0 * p[0] - p[1], 0.5 * p[1]];
        let mut uc = Vector::zeros(2 * c.n_vertices());
        for (v, &p) in c.vertices.iter().enumerate() {
            let w = lin(p);
            uc[2 * v] = w[0];
            uc[2 * v + 1] = w[1];
        }
        let uf = prolongate(&c, &uc, &f).unwrap();
        for (v, &p) in f.vertices.iter().enumerate() {
            let w = lin(p);
            assert!((uf[2 * v] - w[0]).abs() < 1e-13 && (uf[2 * v + 1] - w[1]).abs() < 1e-13);
        }
    }
}
