//! Structured triangulation of a rectangle with tagged sides.

use viscontact::mesh::{build_rect_mesh, validate_mesh, BoundaryTag, SideTags};

fn main() -> viscontact::error::Result<()> {
    let tags = SideTags::clamped_left_contact_bottom();
    let mesh = build_rect_mesh(4, 2, 2.0, 1.0, tags)?;
    println!("{} vertices, {} triangles, h = {:.4}", mesh.n_vertices(), mesh.n_triangles(), mesh.mesh_size());
    for tag in [BoundaryTag::Dirichlet, BoundaryTag::Neumann, BoundaryTag::Contact] {
        println!("{tag:?}: {} edges, length {}", mesh.edges_with_tag(tag).count(), mesh.tag_length(tag));
    }
    let problems = validate_mesh(&mesh);
    println!("validation: {}", if problems.is_empty() { "ok".to_string() } else { problems.join("; ") });

    // Even nx gives a triangulation that maps onto itself under x -> lx - x.
    match mesh.mirror_permutation() {
        Some(p) => println!("mirror symmetric, vertex 0 maps to {}", p[0]),
        None => println!("not mirror symmetric"),
    }
    if let Some((t, bary)) = mesh.locate([0.3, 0.7]) {
        println!("(0.3, 0.7) lies in triangle {t} with barycentric {bary:.3?}");
    }
    Ok(())
}
