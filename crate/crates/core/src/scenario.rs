//! Scenario files and the batch drivers behind the command line tool.
//!
//! A scenario is one JSON document; unknown keys are rejected.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    cauchy_convergence_study, check_conditions, energy_diagnostics, spatial_convergence_study, ConditionReport,
    ConstantsEstimate, EnergyReport, RateTable,
};
use crate::error::{Error, Result};
use crate::fem::{Lame, LoadCase, MaterialParams, VectorField};
use crate::friction::{default_eps_reg, ContactField, FrictionData};
use crate::mesh::{build_rect_mesh, SideTags};
use crate::problem::ContactProblem;
use crate::timestepper::{discrete_initial_data, run_fully_discrete, RunOptions, TimeGrid, Trajectory};
use crate::vi_step::{ContractionBounds, Tolerances};
use crate::vtk::{write_vtk, PointField};

/// Environment variable overriding the output directory of a scenario.
pub const OUTPUT_ENV: &str = "VISCONTACT_OUT";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mesh: MeshConfig,
    pub material: MaterialConfig,
    pub friction: FrictionConfig,
    #[serde(default)]
    pub loads: LoadsConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub solver: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    #[serde(default = "SideTags::clamped_left_contact_bottom")]
    pub tags: SideTags,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub elastic: Lame,
    pub viscous: Lame,
    pub rho: f64,
    /// Lower density bound; defaults to `rho`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_star: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrictionConfig {
    pub beta: ContactField,
    pub mu: ContactField,
    #[serde(default)]
    pub v_star: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_reg: Option<f64>,
}

/// Spatially uniform load with a closed-form time profile.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    #[default]
    Zero,
    Constant { value: [f64; 2] },
    /// `value + rate t`.
    Linear { value: [f64; 2], rate: [f64; 2] },
    /// `amplitude sin(omega t + phase)`.
    Sinusoidal {
        amplitude: [f64; 2],
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl Profile {
    pub fn value(&self, t: f64) -> [f64; 2] {
        match *self {
            Profile::Zero => [0.0; 2],
            Profile::Constant { value } => value,
            Profile::Linear { value, rate } => [value[0] + rate[0] * t, value[1] + rate[1] * t],
            Profile::Sinusoidal { amplitude, omega, phase } => {
                let s = (omega * t + phase).sin();
                [amplitude[0] * s, amplitude[1] * s]
            }
        }
    }

    /// Exact mean over `[t0, t1]`.
    pub fn mean(&self, t0: f64, t1: f64) -> [f64; 2] {
        match *self {
            Profile::Sinusoidal { amplitude, omega, phase } if omega != 0.0 => {
                let m = ((omega * t0 + phase).cos() - (omega * t1 + phase).cos()) / (omega * (t1 - t0));
                [amplitude[0] * m, amplitude[1] * m]
            }
            Profile::Linear { .. } => self.value(0.5 * (t0 + t1)),
            _ => self.value(t0),
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let ok = match self {
            Profile::Zero => true,
            Profile::Constant { value } => finite(value),
            Profile::Linear { value, rate } => finite(value) && finite(rate),
            Profile::Sinusoidal { amplitude, omega, phase } => finite(amplitude) && omega.is_finite() && phase.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("loads.{name}: parameters must be finite")))
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadsConfig {
    #[serde(default)]
    pub body: Profile,
    /// Traction on the Neumann part.
    #[serde(default)]
    pub traction: Profile,
}

impl LoadCase for LoadsConfig {
    fn body_force(&self, _: [f64; 2], t: f64) -> [f64; 2] {
        self.body.value(t)
    }

    fn traction(&self, _: [f64; 2], t: f64) -> [f64; 2] {
        self.traction.value(t)
    }

    fn mean_body_force(&self, _: [f64; 2], t0: f64, t1: f64) -> [f64; 2] {
        self.body.mean(t0, t1)
    }

    fn mean_traction(&self, _: [f64; 2], t0: f64, t1: f64) -> [f64; 2] {
        self.traction.mean(t0, t1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_final: f64,
    pub steps: usize,
}

/// Initial field, projected onto the finite element space.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldConfig {
    #[default]
    Zero,
    Constant { value: [f64; 2] },
    /// `amplitude (1 - r^2 / radius^2)^3` inside the disc, zero outside.
    Bump { amplitude: [f64; 2], center: [f64; 2], radius: f64 },
}

impl FieldConfig {
    fn profile(&self, x: [f64; 2]) -> (f64, [f64; 2]) {
        match *self {
            FieldConfig::Bump { center, radius, .. } => {
                let (dx, dy) = (x[0] - center[0], x[1] - center[1]);
                let r2 = radius * radius;
                let s = 1.0 - (dx * dx + dy * dy) / r2;
                if s <= 0.0 {
                    return (0.0, [0.0; 2]);
                }
                let g = -6.0 * s * s / r2;
                (s * s * s, [g * dx, g * dy])
            }
            _ => (1.0, [0.0; 2]),
        }
    }

    fn amplitude(&self) -> [f64; 2] {
        match *self {
            FieldConfig::Zero => [0.0; 2],
            FieldConfig::Constant { value } => value,
            FieldConfig::Bump { amplitude, .. } => amplitude,
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let a = self.amplitude();
        let bad = !a.iter().all(|x| x.is_finite())
            || matches!(self, FieldConfig::Bump { radius, center, .. } if !(*radius > 0.0) || !center.iter().all(|x| x.is_finite()));
        if bad {
            return Err(Error::Config(format!("initial.{name}: needs finite values and a positive radius")));
        }
        Ok(())
    }
}

impl VectorField for FieldConfig {
    fn value(&self, x: [f64; 2]) -> [f64; 2] {
        let (p, _) = self.profile(x);
        let a = self.amplitude();
        [a[0] * p, a[1] * p]
    }

    fn gradient(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let (_, g) = self.profile(x);
        let a = self.amplitude();
        [[a[0] * g[0], a[0] * g[1]], [a[1] * g[0], a[1] * g[1]]]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default)]
    pub displacement: FieldConfig,
    #[serde(default)]
    pub velocity: FieldConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Vtk,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    /// Write fields and wear every `stride` steps, and at the last step.
    pub stride: usize,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: PathBuf::from("output"), stride: 1, formats: vec![OutputFormat::Csv, OutputFormat::Vtk] }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    /// Pretty JSON that parses back to the same scenario.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.mesh;
        if m.nx == 0 || m.ny == 0 || !(m.lx > 0.0 && m.lx.is_finite()) || !(m.ly > 0.0 && m.ly.is_finite()) {
            return Err(Error::Config("mesh: needs nx, ny >= 1 and positive finite lx, ly".into()));
        }
        let mat = &self.material;
        let rho_star = mat.rho_star.unwrap_or(mat.rho);
        if !(rho_star > 0.0) || !(mat.rho >= rho_star) || !mat.rho.is_finite() {
            return Err(Error::Config(format!("material: needs rho >= rho_star > 0, got rho = {}, rho_star = {rho_star}", mat.rho)));
        }
        for (name, l) in [("elastic", mat.elastic), ("viscous", mat.viscous)] {
            if !(l.mu > 0.0 && l.mu.is_finite()) || !(l.lambda >= 0.0 && l.lambda.is_finite()) {
                return Err(Error::Config(format!("material.{name}: needs mu > 0 and lambda >= 0")));
            }
        }
        let f = &self.friction;
        for (name, c) in [("beta", &f.beta), ("mu", &f.mu)] {
            let vals: Vec<f64> = match c {
                ContactField::Constant(x) => vec![*x],
                ContactField::PerEdge(v) => v.clone(),
            };
            if vals.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
                return Err(Error::Config(format!("friction.{name}: values must be finite and nonnegative")));
            }
        }
        if !f.v_star.iter().all(|x| x.is_finite()) || f.eps_reg.is_some_and(|e| !(e > 0.0)) {
            return Err(Error::Config("friction: v_star must be finite and eps_reg positive".into()));
        }
        self.loads.body.validate("body")?;
        self.loads.traction.validate("traction")?;
        if !(self.time.t_final > 0.0 && self.time.t_final.is_finite()) || self.time.steps == 0 {
            return Err(Error::Config("time: needs t_final > 0 and steps >= 1".into()));
        }
        self.initial.displacement.validate("displacement")?;
        self.initial.velocity.validate("velocity")?;
        let s = &self.solver;
        if !(s.g_rel > 0.0 && s.h_rel > 0.0 && s.inner_rel > 0.0) || s.max_newton == 0 || s.max_g == 0 || s.max_h == 0 {
            return Err(Error::Config("solver: tolerances must be positive and caps at least one".into()));
        }
        if self.output.stride == 0 {
            return Err(Error::Config("output: stride must be at least one".into()));
        }
        Ok(())
    }

    pub fn friction_data(&self) -> FrictionData {
        let f = &self.friction;
        FrictionData {
            beta: f.beta.clone(),
            mu: f.mu.clone(),
            v_star: f.v_star,
            eps_reg: f.eps_reg.unwrap_or_else(|| default_eps_reg(f.v_star)),
        }
    }

    pub fn is_frictionless(&self) -> bool {
        self.friction.mu.sup_norm() == 0.0 || self.friction.beta.sup_norm() == 0.0
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.time.t_final, self.time.steps)
    }

    /// Problem on the configured mesh refined `level` times by halving.
    pub fn build_problem(&self, level: usize) -> Result<ContactProblem> {
        let m = &self.mesh;
        let f = 1usize << level;
        let mesh = build_rect_mesh(m.nx * f, m.ny * f, m.lx, m.ly, m.tags)?;
        let mat = &self.material;
        let material = MaterialParams {
            rho_star: mat.rho_star.unwrap_or(mat.rho),
            ..MaterialParams::uniform(mat.elastic, mat.viscous, mat.rho)
        };
        material.validate(&mesh).map_err(|e| Error::Config(format!("material: {e}")))?;
        let friction = self.friction_data();
        let n_contact = mesh.edges_with_tag(crate::mesh::BoundaryTag::Contact).count();
        friction.validate(n_contact / f).map_err(|e| Error::Config(format!("friction: {e}")))?;
        let friction = refine_per_edge(friction, f);
        ContactProblem::new(mesh, material, friction, Arc::new(self.loads.clone()))
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions { tolerances: self.solver, bounds: None, wear_stride: self.output.stride }
    }

    /// Output directory: `cli`, else the environment override, else the configured one.
    pub fn output_dir(&self, cli: Option<&Path>) -> PathBuf {
        if let Some(p) = cli {
            return p.to_path_buf();
        }
        match std::env::var_os(OUTPUT_ENV) {
            Some(p) if !p.is_empty() => PathBuf::from(p),
            _ => self.output.directory.clone(),
        }
    }
}

/// Per-edge contact data given on the base mesh, repeated for each refined edge.
fn refine_per_edge(mut f: FrictionData, factor: usize) -> FrictionData {
    let rep = |c: ContactField| match c {
        ContactField::PerEdge(v) if factor > 1 => {
            ContactField::PerEdge(v.iter().flat_map(|&x| std::iter::repeat(x).take(factor)).collect())
        }
        c => c,
    };
    f.beta = rep(f.beta);
    f.mu = rep(f.mu);
    f
}

/// Everything a scenario run produced.
pub struct RunSummary {
    pub problem: ContactProblem,
    pub constants: ConstantsEstimate,
    pub conditions: ConditionReport,
    pub trajectory: Trajectory,
    pub energy: EnergyReport,
    pub files: Vec<PathBuf>,
}

/// Estimate constants, check conditions, march the scheme and write artifacts into `out`.
pub fn run_scenario(cfg: &ScenarioConfig, out: &Path) -> Result<RunSummary> {
    let problem = cfg.build_problem(0)?;
    let grid = cfg.grid()?;
    let constants = problem.estimate_constants()?;
    let conditions = check_conditions(&constants, grid.tau());
    let mut opts = cfg.run_options();
    opts.bounds = Some(ContractionBounds::new(constants.m_b, constants.l_j, constants.l_a, grid.tau()));
    let trajectory = run_fully_discrete(&problem, grid, &cfg.initial.displacement, &cfg.initial.velocity, &opts)?;
    let energy = energy_diagnostics(&trajectory, &problem.dynamics);

    fs::create_dir_all(out)?;
    let mut files = Vec::new();
    let path = out.join("conditions.txt");
    fs::write(&path, conditions_text(&constants, &conditions, grid.tau()))?;
    files.push(path);
    if cfg.output.formats.contains(&OutputFormat::Csv) {
        let path = out.join("trajectory.csv");
        fs::write(&path, trajectory_csv(&problem, &trajectory, &energy))?;
        files.push(path);
        let path = out.join("wear.csv");
        fs::write(&path, wear_csv(&problem, &trajectory))?;
        files.push(path);
    }
    if cfg.output.formats.contains(&OutputFormat::Vtk) {
        for k in 0..=grid.steps {
            if k % cfg.output.stride != 0 && k != grid.steps {
                continue;
            }
            let u = problem.expand(&trajectory.displacement[k]);
            let v = problem.expand(&trajectory.velocity[k]);
            let mut wear = vec![0.0; problem.mesh.n_vertices()];
            let w = crate::friction::wear_field(&u, &problem.system.contact_edges);
            for (&vx, &val) in w.vertices.iter().zip(&w.values) {
                wear[vx] = val;
            }
            let path = out.join(format!("field_{k:04}.vtk"));
            write_vtk(
                &path,
                &problem.mesh,
                &format!("step {k} t = {:.16e}", grid.time(k)),
                &[
                    ("displacement", PointField::Vector(u.as_slice())),
                    ("velocity", PointField::Vector(v.as_slice())),
                    ("wear", PointField::Scalar(&wear)),
                ],
            )?;
            files.push(path);
        }
    }
    Ok(RunSummary { problem, constants, conditions, trajectory, energy, files })
}

pub fn conditions_text(c: &ConstantsEstimate, report: &ConditionReport, tau: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# constants ({})", c.method);
    for (name, v) in [
        ("M_A", c.m_a),
        ("L_A", c.l_a),
        ("M_B", c.m_b),
        ("L_B", c.l_b),
        ("L_j", c.l_j),
        ("C_j", c.c_j),
        ("c_gamma", c.c_gamma),
    ] {
        let _ = writeln!(s, "{name:<8} {v:.16e}");
    }
    if let Some(m) = c.m_visc {
        let _ = writeln!(s, "{:<8} {m:.16e}", "M_visc");
    }
    let _ = writeln!(s, "{:<8} {tau:.16e}", "tau");
    let _ = writeln!(s, "# conditions");
    let _ = write!(s, "{report}");
    s
}

pub fn trajectory_csv(problem: &ContactProblem, traj: &Trajectory, energy: &EnergyReport) -> String {
    let d = &problem.dynamics;
    let mut s = String::from(
        "k,t,displacement_v,velocity_v,acceleration_h,kinetic,elastic,stored,viscous,friction,numerical,work,balance_residual,inner_iterations,g_iterations,h_iterations\n",
    );
    for k in 0..traj.displacement.len() {
        let e = &energy.rows[k];
        let (inner, g, h) = if k == 0 {
            (0, 0, 0)
        } else {
            let r = &traj.reports[k - 1];
            (r.inner_iterations, r.g_iterations, r.h_iterations)
        };
        let _ = writeln!(
            s,
            "{k},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{inner},{g},{h}",
            traj.grid.time(k),
            d.v_norm(&traj.displacement[k]),
            d.v_norm(&traj.velocity[k]),
            d.h_norm(&traj.acceleration[k]),
            e.kinetic,
            e.elastic,
            e.stored,
            e.viscous,
            e.friction,
            e.numerical,
            e.work,
            e.residual,
        );
    }
    s
}

/// One row per contact vertex, one column per stored wear snapshot.
pub fn wear_csv(problem: &ContactProblem, traj: &Trajectory) -> String {
    let mut s = String::from("vertex,x,y");
    for (k, _) in &traj.wear {
        let _ = write!(s, ",w_{k}");
    }
    s.push('\n');
    let Some((_, first)) = traj.wear.first() else { return s };
    for (i, &v) in first.vertices.iter().enumerate() {
        let p = problem.mesh.vertices[v];
        let _ = write!(s, "{v},{:.16e},{:.16e}", p[0], p[1]);
        for (_, w) in &traj.wear {
            let _ = write!(s, ",{:.16e}", w.values[i] + 0.0);
        }
        s.push('\n');
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StudyKind {
    Time,
    Space,
}

/// Whether a study met its threshold.
#[derive(Clone, Debug, PartialEq)]
pub enum GateOutcome {
    Passed(String),
    Failed(String),
    /// No threshold applied: gating disabled or the table is degenerate.
    Informational(String),
}

pub struct StudyOutcome {
    pub table: RateTable,
    /// Velocity table of a time study.
    pub secondary: Option<RateTable>,
    pub gate: GateOutcome,
    pub files: Vec<PathBuf>,
}

/// Time study over `levels` step counts doubling from the configured one, or mesh study
/// over `levels` meshes refined from the configured one against a reference two levels finer.
pub fn study_scenario(
    cfg: &ScenarioConfig,
    kind: StudyKind,
    levels: usize,
    gate: bool,
    parallel: bool,
    out: &Path,
) -> Result<StudyOutcome> {
    if levels < 3 {
        return Err(Error::InvalidInput(format!("a study needs at least 3 levels, got {levels}")));
    }
    let opts = cfg.run_options();
    let (table, secondary) = match kind {
        StudyKind::Time => {
            let problem = cfg.build_problem(0)?;
            let (u0, v0) = discrete_initial_data(&problem, &cfg.initial.displacement, &cfg.initial.velocity)?;
            let steps: Vec<usize> = (0..levels).map(|i| cfg.time.steps << i).collect();
            let s = cauchy_convergence_study(&problem.dynamics, &problem, cfg.time.t_final, &steps, &u0, &v0, &opts, parallel)?;
            if cfg.is_frictionless() {
                (s.displacement, Some(s.velocity))
            } else {
                (s.velocity, Some(s.displacement))
            }
        }
        StudyKind::Space => {
            let t = spatial_convergence_study(
                |l| cfg.build_problem(l),
                levels,
                levels + 1,
                cfg.grid()?,
                &cfg.initial.displacement,
                &cfg.initial.velocity,
                &opts,
                parallel,
            )?;
            (t, None)
        }
    };
    let (lo, hi) = match (kind, cfg.is_frictionless()) {
        (StudyKind::Time, true) => (0.9, f64::INFINITY),
        (StudyKind::Time, false) => (0.4, f64::INFINITY),
        (StudyKind::Space, true) => (0.8, 1.2),
        (StudyKind::Space, false) => (0.7, f64::INFINITY),
    };
    let last = table.orders().last().copied();
    let outcome = match last {
        _ if table.degenerate => GateOutcome::Informational("degenerate: some errors vanish, no order can be formed".into()),
        None => GateOutcome::Informational("no order available".into()),
        Some(o) if !gate => GateOutcome::Informational(format!("final observed order {o:.4} (not gated)")),
        Some(o) if o >= lo && o <= hi => GateOutcome::Passed(format!("final observed order {o:.4} within [{lo}, {hi}]")),
        Some(o) => GateOutcome::Failed(format!("final observed order {o:.4} outside [{lo}, {hi}]")),
    };
    fs::create_dir_all(out)?;
    let mut files = vec![out.join("rates.csv")];
    table.write_csv(&files[0])?;
    if let Some(t) = &secondary {
        let name = if cfg.is_frictionless() { "rates_velocity.csv" } else { "rates_displacement.csv" };
        let path = out.join(name);
        t.write_csv(&path)?;
        files.push(path);
    }
    Ok(StudyOutcome { table, secondary, gate: outcome, files })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "mesh": {"nx": 2, "ny": 2, "lx": 1.0, "ly": 1.0},
        "material": {"elastic": {"mu": 1.0, "lambda": 1.0}, "viscous": {"mu": 1.0, "lambda": 0.5}, "rho": 1.0},
        "friction": {"beta": 0.1, "mu": 0.3},
        "time": {"t_final": 0.1, "steps": 2}
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let cfg = ScenarioConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.output, OutputConfig::default());
        assert_eq!(ScenarioConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn unknown_key_is_named_with_line() {
        let bad = MINIMAL.replace("\"nx\": 2", "\"nx\": 2, \"nz\": 3");
        let msg = ScenarioConfig::from_json(&bad).unwrap_err().to_string();
        assert!(msg.contains("nz") && msg.contains("line 2"), "{msg}");
        let bad = MINIMAL.replace("\"time\"", "\"tim\"");
        assert!(ScenarioConfig::from_json(&bad).is_err());
    }

    #[test]
    fn negative_beta_names_friction() {
        let bad = MINIMAL.replace("\"beta\": 0.1", "\"beta\": -0.1");
        let msg = ScenarioConfig::from_json(&bad).unwrap_err().to_string();
        assert!(msg.contains("friction"), "{msg}");
    }

    #[test]
    fn sinusoid_mean_is_exact() {
        let p = Profile::Sinusoidal { amplitude: [1.0, 2.0], omega: 3.0, phase: 0.2 };
        let (t0, t1) = (0.3, 0.7);
        let n = 200_000;
        let h = (t1 - t0) / n as f64;
        let mid: f64 = (0..n).map(|i| p.value(t0 + (i as f64 + 0.5) * h)[1]).sum::<f64>() * h / (t1 - t0);
        assert!((p.mean(t0, t1)[1] - mid).abs() < 1e-9);
    }

    #[test]
    fn bump_gradient_matches_differences() {
        let f = FieldConfig::Bump { amplitude: [0.5, -1.0], center: [0.5, 0.5], radius: 0.3 };
        let x = [0.6, 0.45];
        let g = f.gradient(x);
        let e = 1e-6;
        for j in 0..2 {
            let (mut xp, mut xm) = (x, x);
            xp[j] += e;
            xm[j] -= e;
            for i in 0..2 {
                let fd = (f.value(xp)[i] - f.value(xm)[i]) / (2.0 * e);
                assert!((fd - g[i][j]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn output_dir_precedence() {
        let cfg = ScenarioConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.output_dir(Some(Path::new("x"))), PathBuf::from("x"));
    }
}
