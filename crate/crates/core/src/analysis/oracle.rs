//! Independent solver for small step inequalities by exhaustive enumeration of contact states.
//!
//! The step inequality with `j`'s first argument equal to the unknown is piecewise linear:
//! once every quadrature point has a fixed sign of its normal trace and a fixed state
//! (slipping forward, slipping backward or sticking) the optimality system is linear.
//! Every state combination is solved and checked for consistency; no smoothing, no fixed point.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fem::ViscousOperator;
use crate::friction::ContactPoint;
use crate::linalg::{to_dense, Vector};
use crate::vi_step::{DiscreteDynamics, StepProblem};

/// Largest coordinate count accepted by the oracle.
pub const MAX_ORACLE_DIM: usize = 12;
const MAX_ACTIVE_POINTS: usize = 8;

/// Oracle solution with its certificate.
#[derive(Clone, Debug)]
pub struct OracleSolution {
    pub velocity: Vector,
    /// Largest violation of the inequality's directional derivative over random unit directions.
    pub violation: f64,
    pub patterns_tried: usize,
    pub consistent: usize,
}

#[derive(Clone, Copy)]
enum State {
    Forward,
    Backward,
    Stick,
    /// Frictionless point: no tangential term.
    Free,
}

fn dot(f: &[(usize, f64)], x: &DVector<f64>) -> f64 {
    f.iter().map(|&(i, a)| a * x[i]).sum()
}

/// Largest violation `max(0, -slope)` of the step inequality at `nu` over `count` random
/// directions of unit energy norm.
pub fn vi_violation(dynamics: &DiscreteDynamics, problem: &StepProblem, nu: &Vector, count: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = problem.operator_residual(dynamics, nu);
    let n = dynamics.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let mut d = Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = dynamics.v_norm(&d);
        d /= norm;
        worst = worst.max(-problem.directional_slope(dynamics, nu, &r, &d));
    }
    worst
}

/// Gap `r(nu)'(v - nu) + j(nu, v) - j(nu, nu)` of the step inequality at a test point `v`;
/// nonnegative for every `v` at the exact solution.
pub fn vi_gap(dynamics: &DiscreteDynamics, problem: &StepProblem, nu: &Vector, v: &Vector) -> f64 {
    let r = problem.operator_residual(dynamics, nu);
    r.dot(&(v - nu)) + dynamics.contact.value(nu, v) - dynamics.contact.value(nu, nu)
}

/// Solve the coupled step inequality exactly by enumerating contact states.
///
/// Requires a linear viscous operator, at most [`MAX_ORACLE_DIM`] coordinates and a
/// foundation velocity tangent to the contact part.
pub fn brute_force_step_oracle(dynamics: &DiscreteDynamics, problem: &StepProblem) -> Result<OracleSolution> {
    let n = dynamics.dim();
    if n > MAX_ORACLE_DIM {
        return Err(Error::Oracle(format!("{n} coordinates exceed the oracle limit {MAX_ORACLE_DIM}")));
    }
    let ViscousOperator::Linear(b) = &dynamics.viscous else {
        return Err(Error::Oracle("the oracle needs a linear viscous operator".into()));
    };
    let tau = problem.tau;
    let k = to_dense(&dynamics.mass) / tau + to_dense(b) + tau * to_dense(&dynamics.elastic);
    let f = problem.rhs.clone();
    let scale = 1.0 + f.norm();

    let active: Vec<&ContactPoint> = dynamics.contact.points.iter().filter(|p| p.weight != 0.0).collect();
    if active.iter().any(|p| p.offset != 0.0) {
        return Err(Error::Oracle("foundation velocity must be tangent to the contact part".into()));
    }
    if active.len() > MAX_ACTIVE_POINTS {
        return Err(Error::Oracle(format!("{} active contact points exceed {MAX_ACTIVE_POINTS}", active.len())));
    }
    let options: Vec<(Vec<f64>, Vec<State>)> = active
        .iter()
        .map(|p| {
            let signs = if p.normal.is_empty() { vec![p.bias.signum()] } else { vec![1.0, -1.0] };
            let states = if p.mu == 0.0 { vec![State::Free] } else { vec![State::Forward, State::Backward, State::Stick] };
            (signs, states)
        })
        .collect();
    let radix: Vec<usize> = options.iter().map(|(s, t)| s.len() * t.len()).collect();
    let total: usize = radix.iter().product();

    let tol = 1e-9 * scale;
    let mut best: Option<(Vector, f64)> = None;
    let mut consistent = 0;
    let mut choice = vec![(0.0, State::Free); active.len()];
    for code in 0..total {
        let mut c = code;
        for (q, (signs, states)) in options.iter().enumerate() {
            let r = c % radix[q];
            c /= radix[q];
            choice[q] = (signs[r % signs.len()], states[r / signs.len()]);
        }
        let sticks: Vec<usize> = (0..active.len()).filter(|&q| matches!(choice[q].1, State::Stick)).collect();
        let m = n + sticks.len();
        let mut mat = DMatrix::zeros(m, m);
        let mut rhs = DVector::zeros(m);
        mat.view_mut((0, 0), (n, n)).copy_from(&k);
        rhs.rows_mut(0, n).copy_from(&f);
        for (q, p) in active.iter().enumerate() {
            let (sigma, state) = choice[q];
            let xi = match state {
                State::Forward => 1.0,
                State::Backward => -1.0,
                _ => 0.0,
            };
            // c_q(nu) = sigma w (N nu + bias) multiplies mu xi T + N.
            let cw = sigma * p.weight;
            let mut dir = vec![0.0; n];
            for &(i, a) in &p.tangent {
                dir[i] += p.mu * xi * a;
            }
            for &(i, a) in &p.normal {
                dir[i] += a;
            }
            for (i, di) in dir.iter().enumerate() {
                if *di == 0.0 {
                    continue;
                }
                for &(j, a) in &p.normal {
                    mat[(i, j)] += cw * di * a;
                }
                rhs[i] -= cw * di * p.bias;
            }
        }
        for (s, &q) in sticks.iter().enumerate() {
            let p = active[q];
            for &(i, a) in &p.tangent {
                mat[(i, n + s)] += a;
                mat[(n + s, i)] += a;
            }
            rhs[n + s] = p.slip;
        }
        let Some(sol) = mat.lu().solve(&rhs) else { continue };
        let nu = sol.rows(0, n).into_owned();
        let ok = active.iter().enumerate().all(|(q, p)| {
            let (sigma, state) = choice[q];
            let normal = dot(&p.normal, &nu) + p.bias;
            if sigma * normal < -tol {
                return false;
            }
            let t = dot(&p.tangent, &nu) - p.slip;
            match state {
                State::Forward => t >= -tol,
                State::Backward => t <= tol,
                State::Stick => {
                    let s = sticks.iter().position(|&x| x == q).unwrap();
                    sol[n + s].abs() <= p.mu * p.weight * normal.abs() + tol
                }
                State::Free => true,
            }
        });
        if !ok || !sol.iter().all(|x| x.is_finite()) {
            continue;
        }
        consistent += 1;
        let violation = vi_violation(dynamics, problem, &nu, 200, 7);
        if best.as_ref().map_or(true, |(_, v)| violation < *v) {
            best = Some((nu, violation));
        }
    }
    let Some((velocity, _)) = best else {
        return Err(Error::Oracle(format!("no consistent contact state among {total} patterns")));
    };
    let violation = vi_violation(dynamics, problem, &velocity, 10_000, 11);
    if violation > 1e-7 * scale {
        return Err(Error::Oracle(format!("certificate violation {violation:.3e} above target")));
    }
    Ok(OracleSolution { velocity, violation, patterns_tried: total, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::friction::DiscreteContact;
    use crate::linalg::csr_from_triplets;

    fn scalar(q: f64, c: f64) -> DiscreteDynamics {
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
        DiscreteDynamics::new(one(q), one(0.0), ViscousOperator::Linear(one(0.0)), one(1.0), contact, 1e-8).unwrap()
    }

    #[test]
    fn soft_threshold() {
        // tau = 1 so that q = m / tau.
        let d = scalar(2.0, 1.0);
        for (f, expected) in [(3.0, 1.0), (0.5, 0.0), (-3.0, -1.0)] {
            let p = StepProblem { tau: 1.0, rhs: Vector::from_element(1, f), prev_velocity: Vector::zeros(1) };
            let s = brute_force_step_oracle(&d, &p).unwrap();
            assert!((s.velocity[0] - expected).abs() < 1e-7);
        }
    }

    #[test]
    fn zero_load_gives_zero() {
        let d = scalar(2.0, 1.0);
        let p = StepProblem { tau: 1.0, rhs: Vector::zeros(1), prev_velocity: Vector::zeros(1) };
        assert_eq!(brute_force_step_oracle(&d, &p).unwrap().velocity[0], 0.0);
    }
}
