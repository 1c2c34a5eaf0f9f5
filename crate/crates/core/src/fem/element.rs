use crate::mesh::TriMesh;

use super::Lame;

/// Symmetric 2x2 tensor stored as `(e11, e22, e12)`.
pub type StrainComponents = [f64; 3];

/// Geometry of one linear triangle.
#[derive(Clone, Debug)]
pub struct Element {
    pub vertices: [usize; 3],
    pub points: [[f64; 2]; 3],
    pub area: f64,
    /// Gradients of the barycentric coordinates.
    pub grads: [[f64; 2]; 3],
}

impl Element {
    pub fn new(mesh: &TriMesh, t: usize) -> Self {
        let vertices = mesh.triangles[t];
        let points = vertices.map(|v| mesh.vertices[v]);
        let [p0, p1, p2] = points;
        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let mut grads = [[0.0; 2]; 3];
        for i in 0..3 {
            let (pj, pk) = (points[(i + 1) % 3], points[(i + 2) % 3]);
            grads[i] = [(pj[1] - pk[1]) / det, (pk[0] - pj[0]) / det];
        }
        Element { vertices, points, area: 0.5 * det, grads }
    }

    /// Local dof order `[v0x, v0y, v1x, v1y, v2x, v2y]` mapped to global dofs.
    pub fn dofs(&self) -> [usize; 6] {
        let v = self.vertices;
        [2 * v[0], 2 * v[0] + 1, 2 * v[1], 2 * v[1] + 1, 2 * v[2], 2 * v[2] + 1]
    }

    /// Strain of each local basis function.
    pub fn strains(&self) -> [StrainComponents; 6] {
        let mut s = [[0.0; 3]; 6];
        for a in 0..3 {
            let [gx, gy] = self.grads[a];
            s[2 * a] = [gx, 0.0, 0.5 * gy];
            s[2 * a + 1] = [0.0, gy, 0.5 * gx];
        }
        s
    }

    /// Strain of the field with local coefficients `u`.
    pub fn strain_of(&self, u: &[f64; 6]) -> StrainComponents {
        let s = self.strains();
        let mut e = [0.0; 3];
        for (row, ui) in s.iter().zip(u) {
            for c in 0..3 {
                e[c] += row[c] * ui;
            }
        }
        e
    }

    pub fn stiffness(&self, lame: &Lame) -> [[f64; 6]; 6] {
        let s = self.strains();
        let mut k = [[0.0; 6]; 6];
        for i in 0..6 {
            let ci = lame.apply(s[i]);
            for j in 0..6 {
                k[i][j] = self.area * contract(ci, s[j]);
            }
        }
        k
    }

    /// Mass matrix with the three edge-midpoint rule (exact for quadratics).
    pub fn mass(&self, rho: f64) -> [[f64; 6]; 6] {
        const MIDPOINTS: [[f64; 3]; 3] = [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]];
        let mut m = [[0.0; 6]; 6];
        for lam in MIDPOINTS {
            let w = rho * self.area / 3.0;
            for a in 0..3 {
                for b in 0..3 {
                    let v = w * lam[a] * lam[b];
                    m[2 * a][2 * b] += v;
                    m[2 * a + 1][2 * b + 1] += v;
                }
            }
        }
        m
    }

    /// Physical point with barycentric coordinates `lam`.
    pub fn point(&self, lam: [f64; 3]) -> [f64; 2] {
        let mut p = [0.0; 2];
        for a in 0..3 {
            p[0] += lam[a] * self.points[a][0];
            p[1] += lam[a] * self.points[a][1];
        }
        p
    }
}

/// Full contraction `s : e` of two symmetric tensors in component form.
pub fn contract(s: StrainComponents, e: StrainComponents) -> f64 {
    s[0] * e[0] + s[1] * e[1] + 2.0 * s[2] * e[2]
}
