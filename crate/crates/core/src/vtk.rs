//! Legacy ASCII VTK output of nodal fields on a triangle mesh.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::TriMesh;

/// Nodal data attached to a mesh.
pub enum PointField<'a> {
    /// Interleaved `(x, y)` components, length `2 * n_vertices`.
    Vector(&'a [f64]),
    Scalar(&'a [f64]),
}

pub fn vtk_string(mesh: &TriMesh, title: &str, fields: &[(&str, PointField)]) -> Result<String> {
    let n = mesh.n_vertices();
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0\n{}\nASCII\nDATASET UNSTRUCTURED_GRID", title.replace('\n', " "));
    let _ = writeln!(s, "POINTS {n} double");
    for p in &mesh.vertices {
        let _ = writeln!(s, "{:.16e} {:.16e} 0", p[0], p[1]);
    }
    let nt = mesh.n_triangles();
    let _ = writeln!(s, "CELLS {nt} {}", 4 * nt);
    for t in &mesh.triangles {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {nt}");
    for _ in 0..nt {
        s.push_str("5\n");
    }
    if !fields.is_empty() {
        let _ = writeln!(s, "POINT_DATA {n}");
    }
    for (name, field) in fields {
        if name.contains(char::is_whitespace) {
            return Err(Error::InvalidInput(format!("VTK field name {name:?} contains whitespace")));
        }
        match field {
            PointField::Vector(v) => {
                if v.len() != 2 * n {
                    return Err(Error::InvalidInput(format!("vector field {name} has {} entries for {n} vertices", v.len())));
                }
                let _ = writeln!(s, "VECTORS {name} double");
                for c in v.chunks(2) {
                    let _ = writeln!(s, "{:.16e} {:.16e} 0", c[0], c[1]);
                }
            }
            PointField::Scalar(v) => {
                if v.len() != n {
                    return Err(Error::InvalidInput(format!("scalar field {name} has {} entries for {n} vertices", v.len())));
                }
                let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
                for x in *v {
                    let _ = writeln!(s, "{x:.16e}");
                }
            }
        }
    }
    Ok(s)
}

pub fn write_vtk(path: &Path, mesh: &TriMesh, title: &str, fields: &[(&str, PointField)]) -> Result<()> {
    std::fs::write(path, vtk_string(mesh, title, fields)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_rect_mesh, SideTags};

    #[test]
    fn layout() {
        let m = build_rect_mesh(2, 1, 1.0, 1.0, SideTags::clamped_left_contact_bottom()).unwrap();
        let u = vec![0.5; 2 * m.n_vertices()];
        let w = vec![1.0; m.n_vertices()];
        let s = vtk_string(&m, "t", &[("u", PointField::Vector(&u)), ("w", PointField::Scalar(&w))]).unwrap();
        assert!(s.contains("POINTS 6 double"));
        assert!(s.contains("CELLS 4 16"));
        assert!(s.contains("VECTORS u double"));
        assert!(s.contains("SCALARS w double 1"));
        assert!(vtk_string(&m, "t", &[("u", PointField::Scalar(&u))]).is_err());
    }
}
