//! Diagnostics: constants and solvability conditions, an enumeration oracle for small
//! steps, energy balance, Gronwall checks, randomized structural checks and convergence studies.

pub mod constants;
pub mod eigen;
pub mod energy;
pub mod gronwall;
pub mod hypotheses;
pub mod oracle;
pub mod studies;

pub use constants::{check_conditions, estimate_constants, ConditionCheck, ConditionReport, ConstantsEstimate, Verdict};
pub use energy::{energy_diagnostics, EnergyReport, EnergyRow};
pub use gronwall::{discrete_gronwall_check, GronwallVerdict};
pub use hypotheses::{run_hypothesis_suite, HypothesisCheck};
pub use oracle::{brute_force_step_oracle, vi_gap, vi_violation, OracleSolution, MAX_ORACLE_DIM};
pub use studies::{cauchy_convergence_study, spatial_convergence_study, RateRow, RateTable, TimeStudy};
