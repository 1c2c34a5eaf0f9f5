//! Discrete energy balance of a trajectory.
//!
//! Testing step `k` with `v = 0` and `v = 2 v_k` (valid when `v* = 0`, where `j(g, .)` is
//! positively homogeneous) gives
//! `E_k - E_{k-1} + tau v'Bv + tau j(v, v) + |v_k - v_{k-1}|_M^2/2 + |u_k - u_{k-1}|_A^2/2 = tau f_k'v`
//! with stored energy `E = |v|_M^2/2 + |u|_A^2/2`. The two squared increments are the
//! numerical dissipation of the implicit scheme.

use crate::linalg::{quad_form, Vector};
use crate::timestepper::Trajectory;
use crate::vi_step::DiscreteDynamics;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnergyRow {
    pub k: usize,
    pub kinetic: f64,
    pub elastic: f64,
    pub stored: f64,
    /// `tau v'B(v)` of the step ending at `k`.
    pub viscous: f64,
    /// `tau j(v, v)`.
    pub friction: f64,
    /// Numerical dissipation of the step.
    pub numerical: f64,
    /// `tau f_k'v`.
    pub work: f64,
    /// Stored energy change plus dissipation minus work.
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnergyReport {
    pub rows: Vec<EnergyRow>,
}

impl EnergyReport {
    pub fn initial_energy(&self) -> f64 {
        self.rows.first().map_or(0.0, |r| r.stored)
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual.abs()).fold(0.0, f64::max)
    }

    /// True when the stored energy never increases by more than `slack`.
    pub fn stored_nonincreasing(&self, slack: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].stored <= w[0].stored + slack)
    }
}

pub fn energy_diagnostics(traj: &Trajectory, dynamics: &DiscreteDynamics) -> EnergyReport {
    let tau = traj.grid.tau();
    let row0 = |k: usize| {
        let (u, v) = (&traj.displacement[k], &traj.velocity[k]);
        let kinetic = 0.5 * quad_form(&dynamics.mass, v);
        let elastic = 0.5 * quad_form(&dynamics.elastic, u);
        EnergyRow { k, kinetic, elastic, stored: kinetic + elastic, ..Default::default() }
    };
    let mut rows = vec![row0(0)];
    for k in 1..traj.displacement.len() {
        let mut r = row0(k);
        let v: &Vector = &traj.velocity[k];
        let dv = v - &traj.velocity[k - 1];
        let du = &traj.displacement[k] - &traj.displacement[k - 1];
        r.viscous = tau * dynamics.viscous.apply(v).dot(v);
        r.friction = tau * dynamics.contact.value(v, v);
        r.numerical = 0.5 * quad_form(&dynamics.mass, &dv) + 0.5 * quad_form(&dynamics.elastic, &du);
        r.work = tau * traj.loads[k].dot(v);
        r.residual = r.stored - rows[k - 1].stored + r.viscous + r.friction + r.numerical - r.work;
        rows.push(r);
    }
    EnergyReport { rows }
}
