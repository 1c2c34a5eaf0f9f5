//! Constants of the abstract problem measured on the discrete spaces, and the
//! solvability conditions built from them.

use std::fmt;

use nalgebra_sparse::CsrMatrix;
use serde::Serialize;

use crate::error::Result;
use crate::friction::FrictionData;
use crate::linalg::{SpdFactor, Vector};
use crate::problem::ContactProblem;
use crate::vi_step::DiscreteDynamics;

use super::eigen::{largest_generalized, smallest_generalized};

/// Coercivity and continuity constants relative to the energy norm.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsEstimate {
    pub m_a: f64,
    pub l_a: f64,
    pub m_b: f64,
    pub l_b: f64,
    pub l_j: f64,
    pub c_j: f64,
    pub c_gamma: f64,
    /// Strong monotonicity constant of the pointwise viscosity tensor, when known.
    pub m_visc: Option<f64>,
    /// How each constant was obtained.
    pub method: String,
}

/// Generalized eigenvalue estimates; `contact_mass` is the vector mass of the contact
/// part on the same coordinates.
pub fn estimate_constants(
    dynamics: &DiscreteDynamics,
    contact_mass: &CsrMatrix<f64>,
    friction: &FrictionData,
) -> Result<ConstantsEstimate> {
    let g = &dynamics.gram;
    let gf = SpdFactor::new(g)?;
    let b = dynamics.viscous.tangent(&Vector::zeros(dynamics.dim())).into_owned();
    let c_gamma_sq = if contact_mass.nnz() == 0 { 0.0 } else { largest_generalized(contact_mass, g, &gf)?.max(0.0) };
    let l_j = c_gamma_sq * friction.beta.sup_norm() * (friction.mu.sup_norm() + 1.0);
    let method = if dynamics.viscous.is_linear() {
        "Lanczos on generalized eigenproblems against the strain Gram matrix; L_j = C_j from the trace bound"
    } else {
        "Lanczos on generalized eigenproblems (viscous constants from the tangent at zero); L_j = C_j from the trace bound"
    };
    Ok(ConstantsEstimate {
        m_a: smallest_generalized(&dynamics.elastic, g)?,
        l_a: largest_generalized(&dynamics.elastic, g, &gf)?,
        m_b: smallest_generalized(&b, g)?,
        l_b: largest_generalized(&b, g, &gf)?,
        l_j,
        c_j: l_j,
        c_gamma: c_gamma_sq.sqrt(),
        m_visc: None,
        method: method.into(),
    })
}

impl ContactProblem {
    pub fn estimate_constants(&self) -> Result<ConstantsEstimate> {
        let cm = self.dofmap.restrict_matrix(&self.system.contact_mass);
        let mut c = estimate_constants(&self.dynamics, &cm, &self.friction)?;
        if self.dynamics.viscous.is_linear() {
            c.m_visc = Some(self.material.viscous.monotonicity());
        }
        Ok(c)
    }
}

/// Outcome of one inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    /// Satisfied with a relative margin below 5%.
    Near,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Near => "NEAR",
            Verdict::Fail => "FAIL",
        })
    }
}

/// Strict inequality `lhs < rhs` with its margin `rhs - lhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

impl ConditionCheck {
    pub fn strict_less(name: &str, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        let scale = lhs.abs().max(rhs.abs());
        let verdict = if !(lhs < rhs) {
            Verdict::Fail
        } else if margin < 0.05 * scale {
            Verdict::Near
        } else {
            Verdict::Pass
        };
        ConditionCheck { name: name.into(), lhs, rhs, margin, verdict }
    }
}

/// Verdicts of the solvability conditions for a time step `tau`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn get(&self, name: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<34} {:>14.6e} < {:<14.6e} margin {:>14.6e}  {}", c.name, c.lhs, c.rhs, c.margin, c.verdict)?;
        }
        Ok(())
    }
}

/// Names of the checks produced by [`check_conditions`].
pub mod names {
    pub const LJ_BELOW_MB: &str = "L_j < M_B";
    pub const MB_BELOW_2CJ: &str = "M_B < 2 C_j";
    pub const H_CONTRACTION: &str = "tau L_A / (M_B - L_j) < 1";
    pub const TRACE_BELOW_MONOTONICITY: &str = "c_g^2 |beta| (|mu| + 1) < M_visc";
    pub const MONOTONICITY_BELOW_TWICE_TRACE: &str = "M_visc < 2 c_g^2 |beta| (|mu| + 1)";
}

/// Evaluate the solvability conditions; never fails, verdicts only.
///
/// `trace_bound` is `c_g^2 |beta| (|mu| + 1)`, which equals `L_j` in the default instance.
pub fn check_conditions(c: &ConstantsEstimate, tau: f64) -> ConditionReport {
    let mut checks = vec![
        ConditionCheck::strict_less(names::LJ_BELOW_MB, c.l_j, c.m_b),
        ConditionCheck::strict_less(names::MB_BELOW_2CJ, c.m_b, 2.0 * c.c_j),
    ];
    let h = if c.m_b > c.l_j { tau * c.l_a / (c.m_b - c.l_j) } else { f64::INFINITY };
    checks.push(ConditionCheck::strict_less(names::H_CONTRACTION, h, 1.0));
    if let Some(m) = c.m_visc {
        let trace_bound = c.l_j;
        checks.push(ConditionCheck::strict_less(names::TRACE_BELOW_MONOTONICITY, trace_bound, m));
        checks.push(ConditionCheck::strict_less(names::MONOTONICITY_BELOW_TWICE_TRACE, m, 2.0 * trace_bound));
    }
    ConditionReport { checks }
}
