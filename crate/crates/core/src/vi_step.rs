//! One implicit time step: the elliptic variational inequality for the new velocity,
//! solved by two nested fixed points around a smoothed convex minimization.
//!
//! With the first argument of `j` frozen at `g` and the elastic term frozen at `h`, the
//! velocity minimizes
//! `E(u) = u'Mu / (2 tau) + Phi_B(u) + j_eps(g, u) - (F - tau A h)'u`.
//! The map `g -> u_gh` contracts with factor `L_j / M_B`, and `h -> u_h` (with `g = u_h`)
//! with factor `tau L_A / (M_B - L_j)`.

use std::cell::RefCell;

use nalgebra_sparse::CsrMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::ViscousOperator;
use crate::friction::DiscreteContact;
use crate::linalg::{add_in_pattern, csr_from_triplets, energy_norm, linear_combination, matvec, quad_form, SpdFactor, Vector};

/// Operators of the dynamic problem on the free coordinates.
#[derive(Clone, Debug)]
pub struct DiscreteDynamics {
    /// Mass matrix (inner product of the pivot space).
    pub mass: CsrMatrix<f64>,
    /// Elastic operator.
    pub elastic: CsrMatrix<f64>,
    pub viscous: ViscousOperator,
    /// Gram matrix of the energy space norm.
    pub gram: CsrMatrix<f64>,
    pub contact: DiscreteContact,
    /// Final smoothing width of the friction term.
    pub eps_reg: f64,
}

impl DiscreteDynamics {
    pub fn new(
        mass: CsrMatrix<f64>,
        elastic: CsrMatrix<f64>,
        viscous: ViscousOperator,
        gram: CsrMatrix<f64>,
        contact: DiscreteContact,
        eps_reg: f64,
    ) -> Result<Self> {
        let n = mass.nrows();
        let dims = [mass.ncols(), elastic.nrows(), elastic.ncols(), viscous.dim(), gram.nrows(), gram.ncols(), contact.dim];
        if dims.iter().any(|&d| d != n) {
            return Err(Error::InvalidInput(format!("operator dimensions disagree: {n} vs {dims:?}")));
        }
        if !(eps_reg > 0.0) {
            return Err(Error::InvalidInput(format!("smoothing width must be positive, got {eps_reg}")));
        }
        Ok(DiscreteDynamics { mass, elastic, viscous, gram, contact, eps_reg })
    }

    pub fn dim(&self) -> usize {
        self.mass.nrows()
    }

    pub fn v_norm(&self, x: &Vector) -> f64 {
        energy_norm(&self.gram, x)
    }

    pub fn h_norm(&self, x: &Vector) -> f64 {
        energy_norm(&self.mass, x)
    }

    /// `(1/2) v'Mv + (1/2) u'Au`.
    pub fn stored_energy(&self, u: &Vector, v: &Vector) -> f64 {
        0.5 * quad_form(&self.mass, v) + 0.5 * quad_form(&self.elastic, u)
    }
}

/// Relative tolerances and iteration caps of the step solver.
///
/// Absolute tolerances are `rel * (1 + |F|)` with `F` the step right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub g_rel: f64,
    pub h_rel: f64,
    pub inner_rel: f64,
    pub max_newton: usize,
    pub max_g: usize,
    pub max_h: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { g_rel: 1e-9, h_rel: 1e-9, inner_rel: 1e-11, max_newton: 200, max_g: 200, max_h: 200 }
    }
}

/// A priori contraction factors of the two fixed-point maps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionBounds {
    /// `L_j / M_B`.
    pub g_factor: f64,
    /// `tau L_A / (M_B - L_j)`, infinite when `M_B <= L_j`.
    pub h_factor: f64,
}

impl ContractionBounds {
    pub fn new(m_b: f64, l_j: f64, l_a: f64, tau: f64) -> Self {
        let h_factor = if m_b > l_j { tau * l_a / (m_b - l_j) } else { f64::INFINITY };
        ContractionBounds { g_factor: l_j / m_b, h_factor }
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.g_factor >= 1.0 {
            w.push(format!("g-map contraction bound L_j/M_B = {:.4} is not below 1", self.g_factor));
        }
        if self.h_factor >= 1.0 {
            w.push(format!("h-map contraction bound tau L_A/(M_B - L_j) = {:.4} is not below 1", self.h_factor));
        }
        w
    }
}

/// Data of one step: `F = f_k + M v_{k-1} / tau - A u_{k-1}`.
#[derive(Clone, Debug)]
pub struct StepProblem {
    pub tau: f64,
    pub rhs: Vector,
    pub prev_velocity: Vector,
}

impl StepProblem {
    pub fn new(dynamics: &DiscreteDynamics, tau: f64, load: &Vector, prev_u: &Vector, prev_v: &Vector) -> Self {
        let rhs = load + matvec(&dynamics.mass, prev_v) / tau - matvec(&dynamics.elastic, prev_u);
        StepProblem { tau, rhs, prev_velocity: prev_v.clone() }
    }

    /// `M v / tau + B(v) + tau A v - F`, the smooth part of the step inequality at `v`.
    pub fn operator_residual(&self, dynamics: &DiscreteDynamics, v: &Vector) -> Vector {
        matvec(&dynamics.mass, v) / self.tau + dynamics.viscous.apply(v) + self.tau * matvec(&dynamics.elastic, v)
            - &self.rhs
    }

    /// Directional derivative of `E(v) = r(nu)'v + j(nu, v)` at `v = nu` along `d`;
    /// nonnegative for all `d` exactly when `nu` solves the step inequality.
    pub fn directional_slope(&self, dynamics: &DiscreteDynamics, nu: &Vector, residual: &Vector, d: &Vector) -> f64 {
        let c = dynamics.contact.frozen_weights(nu);
        let mut slope = residual.dot(d);
        for (p, &c) in dynamics.contact.points.iter().zip(&c) {
            if c == 0.0 {
                continue;
            }
            let t: f64 = p.tangent.iter().map(|&(i, a)| a * nu[i]).sum::<f64>() - p.slip;
            let td: f64 = p.tangent.iter().map(|&(i, a)| a * d[i]).sum();
            let nd: f64 = p.normal.iter().map(|&(i, a)| a * d[i]).sum();
            let w = t.hypot(p.offset);
            let dslip = if w > 1e-12 * (1.0 + t.abs()) { t * td / w } else { td.abs() };
            slope += c * (p.mu * dslip + nd);
        }
        slope
    }
}

/// Outcome of one inner minimization.
#[derive(Clone, Debug)]
pub struct InnerSolve {
    pub u: Vector,
    pub iterations: usize,
    /// Smaller of the final gradient norm and the last Newton step norm.
    pub residual: f64,
    /// Smoothed energies of the accepted iterates at the final width.
    pub energies: Vec<f64>,
}

/// Iteration counts, residuals and observed contraction ratios of a step solve.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolverReport {
    pub inner_iterations: usize,
    pub g_iterations: usize,
    pub h_iterations: usize,
    pub inner_residual: f64,
    pub g_residual: f64,
    pub h_residual: f64,
    /// Largest successive-difference ratio of the g-loops, when measurable.
    pub g_ratio: Option<f64>,
    pub h_ratio: Option<f64>,
    pub converged: bool,
    pub warnings: Vec<String>,
}

/// Outcome of the `g` fixed point for a fixed `h`.
#[derive(Clone, Debug)]
pub struct GLoop {
    pub u: Vector,
    pub iterations: usize,
    pub inner_iterations: usize,
    pub residual: f64,
    pub inner_residual: f64,
    pub ratios: Vec<f64>,
}

/// Ratios of successive differences above the noise floor.
fn push_ratio(ratios: &mut Vec<f64>, prev: Option<f64>, diff: f64, floor: f64) {
    if let Some(p) = prev {
        if p > floor && diff > 0.0 {
            ratios.push(diff / p);
        }
    }
}

/// Solver for the steps of one time grid.
pub struct StepSolver<'a> {
    dynamics: &'a DiscreteDynamics,
    tau: f64,
    tol: Tolerances,
    /// `M / tau + B` (linear case) with the contact Hessian pattern included.
    base: CsrMatrix<f64>,
    factor: RefCell<Option<SpdFactor>>,
    base_factor: RefCell<Option<SpdFactor>>,
    bounds: Option<ContractionBounds>,
}

impl<'a> StepSolver<'a> {
    pub fn new(dynamics: &'a DiscreteDynamics, tau: f64, tol: Tolerances) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidInput(format!("time step must be positive, got {tau}")));
        }
        let mut triplets: Vec<(usize, usize, f64)> =
            dynamics.mass.triplet_iter().map(|(i, j, &v)| (i, j, v / tau)).collect();
        if let ViscousOperator::Linear(b) = &dynamics.viscous {
            triplets.extend(b.triplet_iter().map(|(i, j, &v)| (i, j, v)));
        }
        triplets.extend(dynamics.contact.pattern_triplets());
        let base = csr_from_triplets(dynamics.dim(), &triplets);
        Ok(StepSolver {
            dynamics,
            tau,
            tol,
            base,
            factor: RefCell::new(None),
            base_factor: RefCell::new(None),
            bounds: None,
        })
    }

    /// Attach a priori contraction bounds; violations are reported as warnings.
    pub fn with_bounds(mut self, bounds: ContractionBounds) -> Self {
        self.bounds = Some(bounds);
        self
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    fn scale(&self, rhs: &Vector) -> f64 {
        1.0 + rhs.norm()
    }

    fn energy(&self, c: &[f64], b: &Vector, u: &Vector, eps: f64) -> f64 {
        let d = self.dynamics;
        0.5 * quad_form(&d.mass, u) / self.tau + d.viscous.energy(u) + d.contact.reg_value_frozen(c, u, eps) - b.dot(u)
    }

    fn gradient(&self, c: &[f64], b: &Vector, u: &Vector, eps: f64) -> Vector {
        let d = self.dynamics;
        let mut g = matvec(&d.mass, u) / self.tau + d.viscous.apply(u) - b;
        d.contact.add_reg_gradient(c, u, eps, &mut g);
        g
    }

    fn newton_direction(&self, c: &[f64], u: &Vector, eps: f64, grad: &Vector) -> Result<Vector> {
        let d = self.dynamics;
        let mut contact = Vec::new();
        d.contact.reg_hessian_triplets(c, u, eps, &mut contact);
        if contact.is_empty() && d.viscous.is_linear() {
            let mut slot = self.base_factor.borrow_mut();
            if slot.is_none() {
                *slot = Some(SpdFactor::new(&self.base)?);
            }
            return Ok(-slot.as_ref().unwrap().solve(grad));
        }
        let mut h = match &d.viscous {
            ViscousOperator::Linear(_) => self.base.clone(),
            ViscousOperator::Nonlinear(_) => linear_combination(1.0, &self.base, 1.0, &d.viscous.tangent(u)),
        };
        if !add_in_pattern(&mut h, &contact) {
            contact.extend(h.triplet_iter().map(|(i, j, &v)| (i, j, v)));
            let h = csr_from_triplets(d.dim(), &contact);
            return Ok(-SpdFactor::new(&h)?.solve(grad));
        }
        let mut slot = self.factor.borrow_mut();
        // In the linear case every Hessian shares the pattern of `base`.
        let reuse = match slot.as_mut() {
            Some(f) if d.viscous.is_linear() => f.refactor(&h).is_ok(),
            _ => false,
        };
        if !reuse {
            *slot = Some(SpdFactor::new(&h)?);
        }
        Ok(-slot.as_ref().unwrap().solve(grad))
    }

    /// Damped Newton at a fixed smoothing width.
    fn newton(&self, c: &[f64], b: &Vector, init: Vector, eps: f64, tol: f64, cap: usize) -> Result<InnerSolve> {
        let mut u = init;
        let mut e = self.energy(c, b, &u, eps);
        let mut energies = vec![e];
        let mut grad = self.gradient(c, b, &u, eps);
        for it in 0..cap {
            let gn = grad.norm();
            if gn <= tol {
                return Ok(InnerSolve { u, iterations: it, residual: gn, energies });
            }
            let dir = self.newton_direction(c, &u, eps, &grad)?;
            let slope = grad.dot(&dir);
            let step_norm = self.dynamics.v_norm(&dir);
            let resolvable = -slope > 1e-13 * (1.0 + e.abs());
            let mut alpha = 1.0;
            let mut accepted = None;
            while alpha > 1e-12 {
                let trial = &u + alpha * &dir;
                let et = self.energy(c, b, &trial, eps);
                let ok = if resolvable {
                    et <= e + 1e-4 * alpha * slope
                } else {
                    // Energy differences are below roundoff; use the gradient instead.
                    self.gradient(c, b, &trial, eps).norm() < gn
                };
                if ok {
                    accepted = Some((trial, et));
                    break;
                }
                alpha *= 0.5;
            }
            match accepted {
                Some((trial, et)) => {
                    u = trial;
                    e = et;
                    energies.push(e);
                    grad = self.gradient(c, b, &u, eps);
                    if alpha == 1.0 && step_norm <= tol {
                        let r = grad.norm().min(step_norm);
                        return Ok(InnerSolve { u, iterations: it + 1, residual: r, energies });
                    }
                }
                None if step_norm <= 1e3 * tol => {
                    return Ok(InnerSolve { u, iterations: it + 1, residual: step_norm, energies });
                }
                None => {
                    return Err(Error::NotConverged { what: "inner Newton line search", iterations: it + 1, residual: gn, ratios: vec![] });
                }
            }
        }
        let gn = grad.norm();
        Err(Error::NotConverged { what: "inner Newton", iterations: cap, residual: gn, ratios: vec![] })
    }

    /// Minimize the smoothed step energy with `j`'s first argument frozen at `g` and the
    /// elastic term frozen at `h`, starting from `init`.
    ///
    /// Newton is tried directly at the final width; on failure the width is halved from a
    /// coarse value down to the final one, warm starting each stage.
    pub fn solve_inner(&self, g: &Vector, h: &Vector, rhs: &Vector, init: &Vector) -> Result<InnerSolve> {
        let d = self.dynamics;
        let scale = self.scale(rhs);
        let tol = self.tol.inner_rel * scale;
        let b = rhs - self.tau * matvec(&d.elastic, h);
        let c = d.contact.frozen_weights(g);
        let eps = d.eps_reg;
        let direct_cap = self.tol.max_newton.min(30);
        if let Ok(s) = self.newton(&c, &b, init.clone(), eps, tol, direct_cap) {
            return Ok(s);
        }
        let mut used = direct_cap;
        let mut width = (1e-3 * (1.0 + init.amax())).max(eps);
        let mut u = init.clone();
        while width > eps {
            let stage = self.newton(&c, &b, u.clone(), width, tol.max(1e-8 * scale), self.tol.max_newton)?;
            used += stage.iterations;
            u = stage.u;
            width = (0.5 * width).max(eps);
            if width == eps {
                break;
            }
        }
        let mut last = self.newton(&c, &b, u, eps, tol, self.tol.max_newton)?;
        last.iterations += used;
        Ok(last)
    }

    /// Iterate `g -> u_gh` from `g0` until successive iterates agree to the g tolerance.
    pub fn fixed_point_g(&self, h: &Vector, rhs: &Vector, g0: &Vector) -> Result<GLoop> {
        let d = self.dynamics;
        let tol = self.tol.g_rel * self.scale(rhs);
        if d.contact.is_inert_in_first_argument() {
            let s = self.solve_inner(g0, h, rhs, g0)?;
            return Ok(GLoop {
                u: s.u,
                iterations: 1,
                inner_iterations: s.iterations,
                residual: 0.0,
                inner_residual: s.residual,
                ratios: vec![],
            });
        }
        let mut g = g0.clone();
        let mut prev = None;
        let mut ratios = Vec::new();
        let mut inner = 0;
        for m in 1..=self.tol.max_g {
            let s = self.solve_inner(&g, h, rhs, &g)?;
            inner += s.iterations;
            let diff = d.v_norm(&(&s.u - &g));
            push_ratio(&mut ratios, prev, diff, 1e2 * tol);
            if diff <= tol {
                return Ok(GLoop { u: s.u, iterations: m, inner_iterations: inner, residual: diff, inner_residual: s.residual, ratios });
            }
            prev = Some(diff);
            g = s.u;
        }
        Err(Error::NotConverged { what: "g fixed point", iterations: self.tol.max_g, residual: prev.unwrap_or(f64::NAN), ratios })
    }

    /// Solve the step inequality: iterate `h -> u_h` from the previous velocity.
    pub fn fixed_point_h(&self, problem: &StepProblem) -> Result<(Vector, SolverReport)> {
        let d = self.dynamics;
        let rhs = &problem.rhs;
        let tol = self.tol.h_rel * self.scale(rhs);
        let mut report = SolverReport::default();
        if let Some(b) = &self.bounds {
            for w in b.warnings() {
                log::warn!("{w}");
                report.warnings.push(w);
            }
        }
        let mut h = problem.prev_velocity.clone();
        let mut prev = None;
        let mut h_ratios = Vec::new();
        for m in 1..=self.tol.max_h {
            let gl = self.fixed_point_g(&h, rhs, &h)?;
            report.inner_iterations += gl.inner_iterations;
            report.g_iterations += gl.iterations;
            report.inner_residual = gl.inner_residual;
            report.g_residual = gl.residual;
            if let Some(r) = gl.ratios.iter().copied().reduce(f64::max) {
                report.g_ratio = Some(report.g_ratio.map_or(r, |x| x.max(r)));
            }
            let diff = d.v_norm(&(&gl.u - &h));
            push_ratio(&mut h_ratios, prev, diff, 1e2 * tol);
            if diff <= tol {
                report.h_iterations = m;
                report.h_residual = diff;
                report.h_ratio = h_ratios.iter().copied().reduce(f64::max);
                report.converged = true;
                return Ok((gl.u, report));
            }
            prev = Some(diff);
            h = gl.u;
        }
        Err(Error::NotConverged { what: "h fixed point", iterations: self.tol.max_h, residual: prev.unwrap_or(f64::NAN), ratios: h_ratios })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::friction::ContactPoint;

    /// One coordinate with `q = m / tau + b` and friction weight `c`: `E = q u^2/2 + c|u| - F u`.
    fn scalar(m: f64, b: f64, c: f64) -> DiscreteDynamics {
        let one = |x: f64| csr_from_triplets(1, &[(0, 0, x)]);
        let contact = DiscreteContact {
            dim: 1,
            points: vec![ContactPoint {
                weight: c,
                mu: 1.0,
                normal: vec![],
                bias: 1.0,
                tangent: vec![(0, 1.0)],
                slip: 0.0,
                offset: 0.0,
            }],
        };
        DiscreteDynamics::new(one(m), one(0.0), ViscousOperator::Linear(one(b)), one(1.0), contact, 1e-8).unwrap()
    }

    #[test]
    fn soft_threshold_examples() {
        let d = scalar(1.0, 1.0, 1.0);
        let s = StepSolver::new(&d, 1.0, Tolerances::default()).unwrap();
        let zero = Vector::zeros(1);
        for (f, expected) in [(3.0, 1.0), (0.5, 0.0), (-3.0, -1.0)] {
            let rhs = Vector::from_element(1, f);
            let u = s.solve_inner(&zero, &zero, &rhs, &zero).unwrap().u;
            assert!((u[0] - expected).abs() < 1e-8, "F = {f}: {}", u[0]);
        }
    }

    #[test]
    fn zero_data_gives_zero() {
        let d = scalar(2.0, 1.0, 0.5);
        let s = StepSolver::new(&d, 0.1, Tolerances::default()).unwrap();
        let p = StepProblem::new(&d, 0.1, &Vector::zeros(1), &Vector::zeros(1), &Vector::zeros(1));
        let (nu, rep) = s.fixed_point_h(&p).unwrap();
        assert_eq!(nu[0], 0.0);
        assert_eq!((rep.h_iterations, rep.g_iterations), (1, 1));
        assert!(rep.converged);
    }

    #[test]
    fn energies_decrease_monotonically() {
        let d = scalar(1.0, 0.5, 2.0);
        let s = StepSolver::new(&d, 1.0, Tolerances::default()).unwrap();
        let zero = Vector::zeros(1);
        let rhs = Vector::from_element(1, 7.0);
        let r = s.solve_inner(&zero, &zero, &rhs, &Vector::from_element(1, -40.0)).unwrap();
        assert!((r.u[0] - 5.0 / 1.5).abs() < 1e-8);
        for w in r.energies.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
        }
    }

    #[test]
    fn contraction_bound_examples() {
        let b = ContractionBounds::new(2.0, 1.0, 4.0, 0.1);
        assert!((b.h_factor - 0.4).abs() < 1e-15 && (b.g_factor - 0.5).abs() < 1e-15);
        assert!(b.warnings().is_empty());
        let b = ContractionBounds::new(2.0, 1.0, 4.0, 0.25);
        assert_eq!(b.h_factor, 1.0);
        assert_eq!(b.warnings().len(), 1);
        let b = ContractionBounds::new(2.0, 1.0, 4.0, 0.5);
        assert_eq!(b.h_factor, 2.0);
        assert_eq!(b.warnings().len(), 1);
        assert!(ContractionBounds::new(1.0, 2.0, 4.0, 0.1).h_factor.is_infinite());
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let d = scalar(1.0, 1.0, 1.0);
        let two = csr_from_triplets(2, &[(0, 0, 1.0), (1, 1, 1.0)]);
        assert!(DiscreteDynamics::new(two, d.elastic.clone(), d.viscous.clone(), d.gram.clone(), d.contact.clone(), 1e-8).is_err());
    }
}
