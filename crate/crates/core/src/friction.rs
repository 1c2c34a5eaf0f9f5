//! The contact functional `j(g, v)`, its smoothing, traces on the contact part and wear.
//!
//! `j(g, v) = sum over contact edges of int beta |g_n| (mu |v_t - v*| + v_n)`, with
//! `v_n = v . n` and `v_t = v - v_n n`, evaluated by two-point Gauss quadrature per edge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::ContactEdge;
use crate::linalg::Vector;

const GAUSS2: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

/// Coefficient on the contact part: one value, or one value per contact edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ContactField {
    Constant(f64),
    PerEdge(Vec<f64>),
}

impl ContactField {
    pub fn value(&self, edge: usize) -> f64 {
        match self {
            ContactField::Constant(c) => *c,
            ContactField::PerEdge(v) => v[edge],
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            ContactField::Constant(c) => c.abs(),
            ContactField::PerEdge(v) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    fn min(&self) -> f64 {
        match self {
            ContactField::Constant(c) => *c,
            ContactField::PerEdge(v) => v.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    fn check(&self, name: &str, n_edges: usize) -> Result<()> {
        if let ContactField::PerEdge(v) = self {
            if v.len() != n_edges {
                return Err(Error::InvalidInput(format!(
                    "friction {name} has {} values for {n_edges} contact edges",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("friction {name} has non-finite values")));
            }
        }
        if !(self.min() >= 0.0) {
            return Err(Error::InvalidInput(format!("friction {name} must be nonnegative, minimum is {}", self.min())));
        }
        Ok(())
    }
}

/// Wear coefficient, friction coefficient, foundation velocity and smoothing width.
#[derive(Clone, Debug, PartialEq)]
pub struct FrictionData {
    pub beta: ContactField,
    pub mu: ContactField,
    pub v_star: [f64; 2],
    pub eps_reg: f64,
}

impl FrictionData {
    pub fn uniform(beta: f64, mu: f64, v_star: [f64; 2]) -> Self {
        FrictionData {
            beta: ContactField::Constant(beta),
            mu: ContactField::Constant(mu),
            v_star,
            eps_reg: default_eps_reg(v_star),
        }
    }

    pub fn frictionless() -> Self {
        Self::uniform(0.0, 0.0, [0.0; 2])
    }

    /// `beta = 0` is accepted and switches the contact term off.
    pub fn validate(&self, n_edges: usize) -> Result<()> {
        self.beta.check("beta", n_edges)?;
        self.mu.check("mu", n_edges)?;
        if !(self.eps_reg > 0.0) {
            return Err(Error::InvalidInput(format!("friction eps_reg must be positive, got {}", self.eps_reg)));
        }
        if !self.v_star.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidInput("friction v_star must be finite".into()));
        }
        Ok(())
    }
}

/// Smoothing width scaled by the foundation speed.
pub fn default_eps_reg(v_star: [f64; 2]) -> f64 {
    1e-8 * v_star[0].hypot(v_star[1]).max(1.0)
}

/// Normal and tangential parts of a field at the endpoints of one contact edge.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeTrace {
    pub normal: [f64; 2],
    pub tangential: [[f64; 2]; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContactTrace {
    pub edges: Vec<EdgeTrace>,
}

fn split(u: [f64; 2], n: [f64; 2]) -> (f64, [f64; 2]) {
    let un = u[0] * n[0] + u[1] * n[1];
    (un, [u[0] - un * n[0], u[1] - un * n[1]])
}

fn at(u: &Vector, dofs: [usize; 2]) -> [f64; 2] {
    [u[dofs[0]], u[dofs[1]]]
}

fn interp(u: &Vector, e: &ContactEdge, s: f64) -> [f64; 2] {
    let (a, b) = (at(u, e.dofs[0]), at(u, e.dofs[1]));
    [(1.0 - s) * a[0] + s * b[0], (1.0 - s) * a[1] + s * b[1]]
}

/// Decompose a full dof vector on each contact edge with the edge normal.
pub fn trace_decompose(u: &Vector, edges: &[ContactEdge]) -> ContactTrace {
    ContactTrace {
        edges: edges
            .iter()
            .map(|e| {
                let (na, ta) = split(at(u, e.dofs[0]), e.normal);
                let (nb, tb) = split(at(u, e.dofs[1]), e.normal);
                EdgeTrace { normal: [na, nb], tangential: [ta, tb] }
            })
            .collect(),
    }
}

/// `j(g, v)` for full dof vectors.
pub fn eval_j(g: &Vector, v: &Vector, friction: &FrictionData, edges: &[ContactEdge]) -> f64 {
    let vs = friction.v_star;
    let mut total = 0.0;
    for (k, e) in edges.iter().enumerate() {
        let (beta, mu) = (friction.beta.value(k), friction.mu.value(k));
        for s in GAUSS2 {
            let (gn, _) = split(interp(g, e, s), e.normal);
            let (vn, vt) = split(interp(v, e, s), e.normal);
            let slip = (vt[0] - vs[0]).hypot(vt[1] - vs[1]);
            total += 0.5 * e.length * beta * gn.abs() * (mu * slip + vn);
        }
    }
    total
}

/// Smoothed `j(g, .)` at `v` and its gradient with respect to `v`.
///
/// Only `|v_t - v*|` is smoothed, by `sqrt(|w|^2 + eps^2) - eps`; the value lies below
/// the exact one by at most `eps * int beta |g_n| mu`.
pub fn eval_j_reg(g: &Vector, v: &Vector, friction: &FrictionData, edges: &[ContactEdge]) -> Result<(f64, Vector)> {
    let eps = friction.eps_reg;
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("regularization width must be positive, got {eps}")));
    }
    let vs = friction.v_star;
    let mut total = 0.0;
    let mut grad = Vector::zeros(v.len());
    for (k, e) in edges.iter().enumerate() {
        let (beta, mu) = (friction.beta.value(k), friction.mu.value(k));
        let n = e.normal;
        for s in GAUSS2 {
            let (gn, _) = split(interp(g, e, s), n);
            let c = 0.5 * e.length * beta * gn.abs();
            if c == 0.0 {
                continue;
            }
            let (vn, vt) = split(interp(v, e, s), n);
            let w = [vt[0] - vs[0], vt[1] - vs[1]];
            let root = (w[0] * w[0] + w[1] * w[1] + eps * eps).sqrt();
            total += c * (mu * (root - eps) + vn);
            // d/dv of |P v - v*| is P w / root with P the tangential projector.
            let (_, pw) = split(w, n);
            let dv = [c * (mu * pw[0] / root + n[0]), c * (mu * pw[1] / root + n[1])];
            for (node, phi) in [(0, 1.0 - s), (1, s)] {
                grad[e.dofs[node][0]] += phi * dv[0];
                grad[e.dofs[node][1]] += phi * dv[1];
            }
        }
    }
    Ok((total, grad))
}

/// Wear on the contact vertices, `w = -u_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct WearField {
    pub vertices: Vec<usize>,
    pub values: Vec<f64>,
}

/// Wear at each contact vertex, taken with the normal of the first edge containing it.
pub fn wear_field(u: &Vector, edges: &[ContactEdge]) -> WearField {
    let mut vertices = Vec::new();
    let mut values = Vec::new();
    for e in edges {
        for (node, &vtx) in e.vertices.iter().enumerate() {
            if !vertices.contains(&vtx) {
                let (un, _) = split(at(u, e.dofs[node]), e.normal);
                vertices.push(vtx);
                values.push(-un);
            }
        }
    }
    WearField { vertices, values }
}

/// A sparse linear functional `u -> sum c_i u_i`.
pub type Functional = Vec<(usize, f64)>;

fn apply(f: &Functional, u: &Vector) -> f64 {
    f.iter().map(|&(i, c)| c * u[i]).sum()
}

/// One quadrature point of the contact functional in coordinate form.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactPoint {
    /// Quadrature weight times `beta`.
    pub weight: f64,
    pub mu: f64,
    /// Normal trace `u_n` at the point.
    pub normal: Functional,
    /// Constant added to the normal trace of the first argument; zero for boundary points.
    pub bias: f64,
    /// Scalar tangential trace `t . u` at the point.
    pub tangent: Functional,
    /// `t . v*`.
    pub slip: f64,
    /// `n . v*`; the slip magnitude is `sqrt((t.u - slip)^2 + offset^2)`.
    pub offset: f64,
}

/// The contact functional in coordinates of a finite-dimensional space:
/// `j(g, v) = sum weight |N(g) + bias| (mu sqrt((T(v) - slip)^2 + offset^2) + N(v))`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteContact {
    pub dim: usize,
    pub points: Vec<ContactPoint>,
}

impl DiscreteContact {
    pub fn empty(dim: usize) -> Self {
        DiscreteContact { dim, points: Vec::new() }
    }

    /// Quadrature form of `j` over the contact edges; `full_to_free` maps full dofs to
    /// coordinates (clamped dofs are dropped). With `None` the full dof numbering is kept.
    pub fn from_edges(
        edges: &[ContactEdge],
        friction: &FrictionData,
        n_full: usize,
        full_to_free: Option<&[Option<usize>]>,
    ) -> Self {
        let map = |d: usize| match full_to_free {
            Some(m) => m[d],
            None => Some(d),
        };
        let dim = match full_to_free {
            Some(m) => m.iter().flatten().count(),
            None => n_full,
        };
        let vs = friction.v_star;
        let mut points = Vec::with_capacity(2 * edges.len());
        for (k, e) in edges.iter().enumerate() {
            let (n, t) = (e.normal, e.tangent);
            for s in GAUSS2 {
                let mut normal = Vec::new();
                let mut tangent = Vec::new();
                for (node, phi) in [(0, 1.0 - s), (1, s)] {
                    for c in 0..2 {
                        if let Some(i) = map(e.dofs[node][c]) {
                            normal.push((i, phi * n[c]));
                            tangent.push((i, phi * t[c]));
                        }
                    }
                }
                points.push(ContactPoint {
                    weight: 0.5 * e.length * friction.beta.value(k),
                    mu: friction.mu.value(k),
                    normal,
                    bias: 0.0,
                    tangent,
                    slip: t[0] * vs[0] + t[1] * vs[1],
                    offset: n[0] * vs[0] + n[1] * vs[1],
                });
            }
        }
        DiscreteContact { dim, points }
    }

    /// True when `j(g, v)` does not depend on `g`.
    pub fn is_inert_in_first_argument(&self) -> bool {
        self.points.iter().all(|p| p.weight == 0.0 || p.normal.iter().all(|&(_, c)| c == 0.0))
    }

    /// Per-point factors `weight |N(g) + bias|` with the first argument frozen at `g`.
    pub fn frozen_weights(&self, g: &Vector) -> Vec<f64> {
        self.points.iter().map(|p| p.weight * (apply(&p.normal, g) + p.bias).abs()).collect()
    }

    pub fn value(&self, g: &Vector, v: &Vector) -> f64 {
        self.value_frozen(&self.frozen_weights(g), v)
    }

    pub fn value_frozen(&self, c: &[f64], v: &Vector) -> f64 {
        self.points
            .iter()
            .zip(c)
            .filter(|(_, &c)| c != 0.0)
            .map(|(p, &c)| {
                let w = apply(&p.tangent, v) - p.slip;
                c * (p.mu * w.hypot(p.offset) + apply(&p.normal, v))
            })
            .sum()
    }

    /// Smoothed value with frozen factors.
    pub fn reg_value_frozen(&self, c: &[f64], v: &Vector, eps: f64) -> f64 {
        self.points
            .iter()
            .zip(c)
            .filter(|(_, &c)| c != 0.0)
            .map(|(p, &c)| {
                let w = apply(&p.tangent, v) - p.slip;
                let root = (w * w + p.offset * p.offset + eps * eps).sqrt();
                c * (p.mu * (root - eps) + apply(&p.normal, v))
            })
            .sum()
    }

    /// Gradient of the smoothed value, accumulated into `grad`.
    pub fn add_reg_gradient(&self, c: &[f64], v: &Vector, eps: f64, grad: &mut Vector) {
        for (p, &c) in self.points.iter().zip(c) {
            if c == 0.0 {
                continue;
            }
            let w = apply(&p.tangent, v) - p.slip;
            let root = (w * w + p.offset * p.offset + eps * eps).sqrt();
            let dt = c * p.mu * w / root;
            for &(i, a) in &p.tangent {
                grad[i] += dt * a;
            }
            for &(i, a) in &p.normal {
                grad[i] += c * a;
            }
        }
    }

    /// Hessian entries of the smoothed value.
    pub fn reg_hessian_triplets(&self, c: &[f64], v: &Vector, eps: f64, out: &mut Vec<(usize, usize, f64)>) {
        for (p, &c) in self.points.iter().zip(c) {
            if c == 0.0 || p.mu == 0.0 {
                continue;
            }
            let w = apply(&p.tangent, v) - p.slip;
            let r2 = p.offset * p.offset + eps * eps;
            let root = (w * w + r2).sqrt();
            let h = c * p.mu * r2 / (root * root * root);
            for &(i, a) in &p.tangent {
                for &(j, b) in &p.tangent {
                    out.push((i, j, h * a * b));
                }
            }
        }
    }

    /// Zero entries covering every coupling the Hessian can create.
    pub fn pattern_triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for p in &self.points {
            for &(i, _) in &p.tangent {
                for &(j, _) in &p.tangent {
                    out.push((i, j, 0.0));
                }
            }
        }
        out
    }

    /// Smoothed value and gradient at `(g, v)`.
    pub fn regularized(&self, g: &Vector, v: &Vector, eps: f64) -> (f64, Vector) {
        let c = self.frozen_weights(g);
        let mut grad = Vector::zeros(self.dim);
        self.add_reg_gradient(&c, v, eps, &mut grad);
        (self.reg_value_frozen(&c, v, eps), grad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bottom_edge(length: f64) -> ContactEdge {
        ContactEdge {
            vertices: [0, 1],
            dofs: [[0, 1], [2, 3]],
            length,
            normal: [0.0, -1.0],
            tangent: [1.0, 0.0],
        }
    }

    fn uniform_field(x: f64, y: f64) -> Vector {
        Vector::from_vec(vec![x, y, x, y])
    }

    #[test]
    fn decomposition_examples() {
        let e = bottom_edge(1.0);
        let tr = trace_decompose(&uniform_field(3.0, 4.0), &[e.clone()]);
        assert_eq!(tr.edges[0].normal, [-4.0, -4.0]);
        assert_eq!(tr.edges[0].tangential[0], [3.0, 0.0]);
        let tr = trace_decompose(&uniform_field(0.0, -1.0), &[e.clone()]);
        assert_eq!(tr.edges[0].normal[0], 1.0);
        assert_eq!(tr.edges[0].tangential[0], [0.0, 0.0]);
        let tr = trace_decompose(&uniform_field(1.0, 0.0), &[e]);
        assert_eq!(tr.edges[0].normal[1], 0.0);
        assert_eq!(tr.edges[0].tangential[1], [1.0, 0.0]);
    }

    #[test]
    fn reconstruction_identity_on_slanted_edge() {
        let s = 0.5f64.sqrt();
        let e = ContactEdge { vertices: [0, 1], dofs: [[0, 1], [2, 3]], length: 1.0, normal: [s, -s], tangent: [s, s] };
        let u = Vector::from_vec(vec![0.3, -1.7, 2.2, 0.4]);
        let tr = trace_decompose(&u, &[e.clone()]);
        for node in 0..2 {
            let ut = tr.edges[0].tangential[node];
            let un = tr.edges[0].normal[node];
            assert!((ut[0] * e.normal[0] + ut[1] * e.normal[1]).abs() < 1e-12);
            assert!((un * e.normal[0] + ut[0] - u[2 * node]).abs() < 1e-12);
            assert!((un * e.normal[1] + ut[1] - u[2 * node + 1]).abs() < 1e-12);
        }
    }

    #[test]
    fn j_examples() {
        let e = bottom_edge(1.0);
        let f = FrictionData::uniform(1.0, 0.0, [0.0; 2]);
        // g_n = 1 and v_n = 2 for a bottom edge with outward normal (0, -1)
        let g = uniform_field(0.0, -1.0);
        let v = uniform_field(0.0, -2.0);
        assert_relative_eq!(eval_j(&g, &v, &f, &[e]), 2.0, epsilon = 1e-14);
        assert_eq!(eval_j(&Vector::zeros(4), &v, &f, &[bottom_edge(1.0)]), 0.0);

        let e = bottom_edge(2.0);
        let f = FrictionData::uniform(0.5, 1.0, [0.0; 2]);
        let g = uniform_field(0.0, 2.0);
        let v = uniform_field(3.0, 0.0);
        assert_relative_eq!(eval_j(&g, &v, &f, &[e.clone()]), 6.0, epsilon = 1e-14);

        for eps in [1e-2, 1e-4, 1e-8] {
            let fe = FrictionData { eps_reg: eps, ..f.clone() };
            let (r, _) = eval_j_reg(&g, &v, &fe, &[e.clone()]).unwrap();
            assert!(r <= 6.0 && 6.0 - r <= 2.0 * eps + 1e-14);
        }
    }

    #[test]
    fn regularized_rejects_bad_width_and_vanishes_at_zero() {
        let e = [bottom_edge(1.0)];
        let mut f = FrictionData::uniform(1.0, 1.0, [0.5, 0.0]);
        let (val, grad) = eval_j_reg(&Vector::zeros(4), &uniform_field(1.0, 1.0), &f, &e).unwrap();
        assert_eq!(val, 0.0);
        assert_eq!(grad.amax(), 0.0);
        f.eps_reg = 0.0;
        assert!(eval_j_reg(&Vector::zeros(4), &Vector::zeros(4), &f, &e).is_err());
    }

    #[test]
    fn wear_examples() {
        let e = [bottom_edge(1.0)];
        let w = wear_field(&uniform_field(0.0, 0.3), &e);
        assert_eq!(w.vertices, vec![0, 1]);
        assert_relative_eq!(w.values[0], 0.3);
        assert_eq!(wear_field(&Vector::zeros(4), &e).values, vec![0.0, 0.0]);
        assert_eq!(wear_field(&uniform_field(0.0, -1.0), &e).values, vec![-1.0, -1.0]);
    }

    #[test]
    fn coordinate_form_matches_edge_quadrature() {
        let s = 0.6;
        let edges = vec![
            bottom_edge(0.7),
            ContactEdge { vertices: [1, 2], dofs: [[2, 3], [4, 5]], length: 1.3, normal: [0.8, -s], tangent: [s, 0.8] },
        ];
        let f = FrictionData {
            beta: ContactField::PerEdge(vec![0.9, 1.4]),
            mu: ContactField::PerEdge(vec![0.3, 0.8]),
            v_star: [0.4, -0.2],
            eps_reg: 1e-3,
        };
        let dc = DiscreteContact::from_edges(&edges, &f, 6, None);
        let g = Vector::from_vec(vec![0.1, -0.5, 0.7, 0.2, -0.3, 0.9]);
        let v = Vector::from_vec(vec![1.1, 0.5, -0.7, 0.3, 0.2, -0.4]);
        assert_relative_eq!(dc.value(&g, &v), eval_j(&g, &v, &f, &edges), max_relative = 1e-13);
        let (r1, g1) = dc.regularized(&g, &v, f.eps_reg);
        let (r2, g2) = eval_j_reg(&g, &v, &f, &edges).unwrap();
        assert_relative_eq!(r1, r2, max_relative = 1e-13);
        assert!((g1 - g2).amax() < 1e-13);
        assert!(!dc.is_inert_in_first_argument());
        let none = DiscreteContact::from_edges(&edges, &FrictionData::frictionless(), 6, None);
        assert!(none.is_inert_in_first_argument());
    }

    #[test]
    fn clamped_dofs_are_dropped() {
        let edges = [bottom_edge(1.0)];
        let f = FrictionData::uniform(1.0, 0.5, [0.0; 2]);
        let map = [None, None, Some(0), Some(1)];
        let dc = DiscreteContact::from_edges(&edges, &f, 4, Some(&map));
        assert_eq!(dc.dim, 2);
        let full = Vector::from_vec(vec![0.0, 0.0, 0.4, -0.8]);
        let free = Vector::from_vec(vec![0.4, -0.8]);
        assert_relative_eq!(dc.value(&free, &free), eval_j(&full, &full, &f, &edges), max_relative = 1e-14);
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let edges = [bottom_edge(1.0)];
        let f = FrictionData::uniform(1.0, 0.7, [0.2, 0.0]);
        let dc = DiscreteContact::from_edges(&edges, &f, 4, None);
        let g = Vector::from_vec(vec![0.0, 1.0, 0.0, -0.5]);
        let c = dc.frozen_weights(&g);
        let v = Vector::from_vec(vec![0.3, 0.1, -0.2, 0.4]);
        let eps = 0.05;
        let mut trip = Vec::new();
        dc.reg_hessian_triplets(&c, &v, eps, &mut trip);
        let hm = crate::linalg::to_dense(&crate::linalg::csr_from_triplets(4, &trip));
        let h = 1e-6;
        for j in 0..4 {
            let mut vp = v.clone();
            let mut vm = v.clone();
            vp[j] += h;
            vm[j] -= h;
            let mut gp = Vector::zeros(4);
            let mut gm = Vector::zeros(4);
            dc.add_reg_gradient(&c, &vp, eps, &mut gp);
            dc.add_reg_gradient(&c, &vm, eps, &mut gm);
            let col = (gp - gm) / (2.0 * h);
            for i in 0..4 {
                assert!((col[i] - hm[(i, j)]).abs() < 1e-6);
            }
        }
    }
}
