//! Randomized checks of the operator and contact-functional hypotheses, and the
//! discrete Gronwall inequality.

use std::path::Path;

use viscontact::analysis::{discrete_gronwall_check, run_hypothesis_suite};
use viscontact::scenario::ScenarioConfig;

fn main() -> viscontact::error::Result<()> {
    let mut cfg = ScenarioConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/demo.json"))?;
    cfg.mesh.nx = 4;
    cfg.mesh.ny = 4;
    // A foundation at rest enables every check.
    cfg.friction.v_star = [0.0, 0.0];
    let p = cfg.build_problem(0)?;
    let c = p.estimate_constants()?;
    for h in run_hypothesis_suite(&p.dynamics, &c, 200, 7)? {
        let status = match (&h.skipped, h.passed) {
            (Some(why), _) => format!("skipped ({why})"),
            (None, true) => "ok".into(),
            (None, false) => "VIOLATED".into(),
        };
        println!("{:<40} {:>4} samples  worst {:>10.2e}  {status}", h.name, h.samples, h.worst);
    }

    let (tau, cst) = (0.1, 0.5);
    let g: Vec<f64> = (0..20).map(|i| 1.0 + 0.1 * i as f64).collect();
    let mut e = Vec::new();
    let mut sum = 0.0;
    for gi in &g {
        let ei = cst * gi + tau * sum;
        sum += ei;
        e.push(ei);
    }
    let v = discrete_gronwall_check(&e, &g, tau, cst);
    println!("\ngronwall on the extremal sequence: holds {}, max e / max g = {:.4} against the bound {:.4}", v.holds, v.ratio, v.bound);
    Ok(())
}
