use crate::linalg::Vector;
use crate::mesh::{BoundaryTag, TriMesh};

use super::{DofMap, Element};

/// Gauss-Legendre nodes on `[0, 1]` with weights `1/2`.
pub(crate) const GAUSS2: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

/// Time dependent volume force and surface traction.
pub trait LoadCase: Send + Sync {
    fn body_force(&self, x: [f64; 2], t: f64) -> [f64; 2];
    /// Traction on the loaded boundary part.
    fn traction(&self, x: [f64; 2], t: f64) -> [f64; 2];

    /// Mean body force over `[t0, t1]`; two-point Gauss unless overridden.
    fn mean_body_force(&self, x: [f64; 2], t0: f64, t1: f64) -> [f64; 2] {
        gauss_mean(t0, t1, |t| self.body_force(x, t))
    }

    fn mean_traction(&self, x: [f64; 2], t0: f64, t1: f64) -> [f64; 2] {
        gauss_mean(t0, t1, |t| self.traction(x, t))
    }
}

fn gauss_mean(t0: f64, t1: f64, f: impl Fn(f64) -> [f64; 2]) -> [f64; 2] {
    let (a, b) = (f(t0 + GAUSS2[0] * (t1 - t0)), f(t0 + GAUSS2[1] * (t1 - t0)));
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

/// The unloaded case.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoLoad;

impl LoadCase for NoLoad {
    fn body_force(&self, _: [f64; 2], _: f64) -> [f64; 2] {
        [0.0; 2]
    }
    fn traction(&self, _: [f64; 2], _: f64) -> [f64; 2] {
        [0.0; 2]
    }
}

/// Full load vector of a body force `f0` and a traction `g` on the Neumann part.
pub fn assemble_load<F, G>(mesh: &TriMesh, dofmap: &DofMap, f0: F, g: G) -> Vector
where
    F: Fn([f64; 2]) -> [f64; 2],
    G: Fn([f64; 2]) -> [f64; 2],
{
    const MIDPOINTS: [[f64; 3]; 3] = [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]];
    let mut load = Vector::zeros(dofmap.n_dofs);
    for t in 0..mesh.n_triangles() {
        let el = Element::new(mesh, t);
        for lam in MIDPOINTS {
            let f = f0(el.point(lam));
            let w = el.area / 3.0;
            for a in 0..3 {
                let v = el.vertices[a];
                load[2 * v] += w * lam[a] * f[0];
                load[2 * v + 1] += w * lam[a] * f[1];
            }
        }
    }
    for e in mesh.edges_with_tag(BoundaryTag::Neumann) {
        let [a, b] = e.vertices;
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let len = mesh.edge_length(e);
        for s in GAUSS2 {
            let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
            let tr = g(x);
            let w = 0.5 * len;
            for (v, phi) in [(a, 1.0 - s), (b, s)] {
                load[2 * v] += w * phi * tr[0];
                load[2 * v + 1] += w * phi * tr[1];
            }
        }
    }
    load
}

/// Mean of `f` over `[t_{k-1}, t_k]` with two-point Gauss quadrature.
pub fn time_average<F>(k: usize, tau: f64, f: F) -> Vector
where
    F: Fn(f64) -> Vector,
{
    assert!(k >= 1 && tau > 0.0, "time average needs k >= 1 and tau > 0");
    let t0 = (k - 1) as f64 * tau;
    let a = f(t0 + GAUSS2[0] * tau);
    let b = f(t0 + GAUSS2[1] * tau);
    0.5 * (a + b)
}

/// Full time-averaged load vector of step `k`.
pub fn average_load(mesh: &TriMesh, dofmap: &DofMap, loads: &dyn LoadCase, k: usize, tau: f64) -> Vector {
    assert!(k >= 1 && tau > 0.0, "time average needs k >= 1 and tau > 0");
    let (t0, t1) = ((k - 1) as f64 * tau, k as f64 * tau);
    assemble_load(mesh, dofmap, |x| loads.mean_body_force(x, t0, t1), |x| loads.mean_traction(x, t0, t1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::build_dofmap;
    use crate::mesh::{build_rect_mesh, SideTags};
    use approx::assert_relative_eq;

    struct Ramp;
    impl LoadCase for Ramp {
        fn body_force(&self, _: [f64; 2], t: f64) -> [f64; 2] {
            [0.0, t]
        }
        fn traction(&self, _: [f64; 2], _: f64) -> [f64; 2] {
            [0.0; 2]
        }
    }

    #[test]
    fn partition_of_unity_sums() {
        let m = build_rect_mesh(3, 2, 1.0, 1.0, SideTags::clamped_left_contact_bottom()).unwrap();
        let d = build_dofmap(&m);
        let zero = assemble_load(&m, &d, |_| [0.0; 2], |_| [0.0; 2]);
        assert_eq!(zero.amax(), 0.0);
        let f = assemble_load(&m, &d, |_| [0.0, -1.0], |_| [0.0; 2]);
        let sy: f64 = (0..m.n_vertices()).map(|v| f[2 * v + 1]).sum();
        assert_relative_eq!(sy, -1.0, epsilon = 1e-14);
        let g = assemble_load(&m, &d, |_| [0.0; 2], |_| [1.0, 0.0]);
        let sx: f64 = (0..m.n_vertices()).map(|v| g[2 * v]).sum();
        assert_relative_eq!(sx, m.tag_length(BoundaryTag::Neumann), epsilon = 1e-14);
        assert_relative_eq!(sx, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn linear_moment_is_exact() {
        // The midpoint rule integrates x * phi_i exactly.
        let m = build_rect_mesh(2, 2, 1.0, 1.0, SideTags::clamped_left_contact_bottom()).unwrap();
        let d = build_dofmap(&m);
        let f = assemble_load(&m, &d, |x| [x[0], 0.0], |_| [0.0; 2]);
        let total: f64 = (0..m.n_vertices()).map(|v| f[2 * v]).sum();
        assert_relative_eq!(total, 0.5, epsilon = 1e-14);
        let first_moment: f64 = (0..m.n_vertices()).map(|v| m.vertices[v][0] * f[2 * v]).sum();
        assert_relative_eq!(first_moment, 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn time_averages() {
        let m = build_rect_mesh(1, 1, 1.0, 1.0, SideTags::clamped_left_contact_bottom()).unwrap();
        let d = build_dofmap(&m);
        let c = assemble_load(&m, &d, |_| [0.0, 1.0], |_| [0.0; 2]);
        let a1 = average_load(&m, &d, &Ramp, 1, 1.0);
        assert!((a1 - 0.5 * &c).amax() < 1e-15);
        let a2 = average_load(&m, &d, &Ramp, 2, 0.5);
        assert!((a2 - 0.75 * &c).amax() < 1e-15);
        let constant = time_average(3, 0.2, |_| c.clone());
        assert!((constant - &c).amax() < 1e-15);
    }
}
