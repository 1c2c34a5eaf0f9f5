//! Assemble a problem, measure its constants and check the solvability conditions.

use std::sync::Arc;

use viscontact::analysis::check_conditions;
use viscontact::fem::{Lame, MaterialParams, NoLoad};
use viscontact::friction::FrictionData;
use viscontact::linalg::max_asymmetry;
use viscontact::mesh::{build_rect_mesh, SideTags};
use viscontact::problem::ContactProblem;

fn main() -> viscontact::error::Result<()> {
    let mesh = build_rect_mesh(8, 8, 1.0, 1.0, SideTags::clamped_left_contact_bottom())?;
    let material = MaterialParams::uniform(Lame::new(1.0, 1.0), Lame::new(1.0, 0.5), 1.0);
    let friction = FrictionData::uniform(0.35, 0.3, [0.1, 0.0]);
    let p = ContactProblem::new(mesh, material, friction, Arc::new(NoLoad))?;
    println!("{} free dofs, {} contact edges", p.n_free(), p.system.contact_edges.len());
    let s = &p.system;
    println!("largest asymmetry: {:.1e}", [&s.mass, &s.elastic, &s.viscous].iter().map(|m| max_asymmetry(m)).fold(0.0, f64::max));

    let c = p.estimate_constants()?;
    println!("M_A {:.4} L_A {:.4} M_B {:.4} L_B {:.4} L_j {:.4} c_gamma {:.4}", c.m_a, c.l_a, c.m_b, c.l_b, c.l_j, c.c_gamma);
    println!("({})", c.method);
    for tau in [1.0 / 64.0, 0.5] {
        println!("\ntau = {tau}");
        print!("{}", check_conditions(&c, tau));
    }
    Ok(())
}
