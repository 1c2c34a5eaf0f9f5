//! Structured triangular meshes of rectangles with tagged boundary parts.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary part a boundary edge belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryTag {
    /// Clamped part, the displacement vanishes there.
    Dirichlet,
    /// Part carrying the prescribed surface traction.
    Neumann,
    /// Frictional contact part with the moving foundation.
    Contact,
}

impl BoundaryTag {
    pub fn vtk_code(self) -> i32 {
        match self {
            BoundaryTag::Dirichlet => 1,
            BoundaryTag::Neumann => 2,
            BoundaryTag::Contact => 3,
        }
    }
}

/// One of the four sides of the rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

/// Assignment of a boundary tag to each side of the rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SideTags {
    pub bottom: BoundaryTag,
    pub right: BoundaryTag,
    pub top: BoundaryTag,
    pub left: BoundaryTag,
}

impl SideTags {
    pub fn get(&self, side: Side) -> BoundaryTag {
        match side {
            Side::Bottom => self.bottom,
            Side::Right => self.right,
            Side::Top => self.top,
            Side::Left => self.left,
        }
    }

    /// Left side clamped, bottom in contact, top and right loaded.
    pub fn clamped_left_contact_bottom() -> Self {
        SideTags {
            bottom: BoundaryTag::Contact,
            right: BoundaryTag::Neumann,
            top: BoundaryTag::Neumann,
            left: BoundaryTag::Dirichlet,
        }
    }

    /// The same assignment after reflecting the rectangle about its vertical axis.
    pub fn mirrored(&self) -> Self {
        SideTags {
            left: self.right,
            right: self.left,
            ..*self
        }
    }

    fn any(&self, tag: BoundaryTag) -> bool {
        [self.bottom, self.right, self.top, self.left].contains(&tag)
    }
}

/// A boundary edge, oriented so that the domain lies on its left.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub tag: BoundaryTag,
    /// Outward unit normal.
    pub normal: [f64; 2],
    /// Unit tangent, pointing from the first vertex to the second.
    pub tangent: [f64; 2],
    /// The triangle owning this edge.
    pub triangle: usize,
}

impl BoundaryEdge {
    fn from_vertices(a: usize, b: usize, tag: BoundaryTag, triangle: usize, vertices: &[[f64; 2]]) -> Self {
        let (pa, pb) = (vertices[a], vertices[b]);
        let (dx, dy) = (pb[0] - pa[0], pb[1] - pa[1]);
        let len = dx.hypot(dy);
        BoundaryEdge {
            vertices: [a, b],
            tag,
            normal: [dy / len, -dx / len],
            tangent: [dx / len, dy / len],
            triangle,
        }
    }
}

/// Structured-grid metadata of a rectangle mesh, used for refinement and point location.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridInfo {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub tags: SideTags,
}

/// Triangulated two dimensional domain with a tagged boundary.
#[derive(Clone, Debug)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 2]>,
    /// Counter-clockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub grid: Option<GridInfo>,
}

impl TriMesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]))
    }

    pub fn edge_length(&self, edge: &BoundaryEdge) -> f64 {
        let (pa, pb) = (self.vertices[edge.vertices[0]], self.vertices[edge.vertices[1]]);
        (pb[0] - pa[0]).hypot(pb[1] - pa[1])
    }

    /// Total length of the boundary edges carrying `tag`.
    pub fn tag_length(&self, tag: BoundaryTag) -> f64 {
        self.boundary_edges
            .iter()
            .filter(|e| e.tag == tag)
            .map(|e| self.edge_length(e))
            .sum()
    }

    pub fn edges_with_tag(&self, tag: BoundaryTag) -> impl Iterator<Item = &BoundaryEdge> {
        self.boundary_edges.iter().filter(move |e| e.tag == tag)
    }

    /// Largest triangle diameter.
    pub fn mesh_size(&self) -> f64 {
        self.triangles
            .iter()
            .map(|tri| {
                let mut d: f64 = 0.0;
                for i in 0..3 {
                    let (p, q) = (self.vertices[tri[i]], self.vertices[tri[(i + 1) % 3]]);
                    d = d.max((q[0] - p[0]).hypot(q[1] - p[1]));
                }
                d
            })
            .fold(0.0, f64::max)
    }

    /// Locate the triangle containing `p` and return it with the barycentric coordinates of `p`.
    ///
    /// Uses the structured grid when available and falls back to a linear scan.
    pub fn locate(&self, p: [f64; 2]) -> Option<(usize, [f64; 3])> {
        const TOL: f64 = 1e-10;
        let candidates: Vec<usize> = match self.grid {
            Some(g) => {
                let i = ((p[0] / g.lx * g.nx as f64).floor().max(0.0) as usize).min(g.nx - 1);
                let j = ((p[1] / g.ly * g.ny as f64).floor().max(0.0) as usize).min(g.ny - 1);
                let c = j * g.nx + i;
                vec![2 * c, 2 * c + 1]
            }
            None => (0..self.n_triangles()).collect(),
        };
        candidates.into_iter().find_map(|t| {
            let bary = self.barycentric(t, p);
            bary.iter().all(|&l| l >= -TOL).then_some((t, bary))
        })
    }

    fn barycentric(&self, t: usize, p: [f64; 2]) -> [f64; 3] {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        let det = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]);
        let l1 = ((pb[0] - p[0]) * (pc[1] - p[1]) - (pc[0] - p[0]) * (pb[1] - p[1])) / det;
        let l2 = ((pc[0] - p[0]) * (pa[1] - p[1]) - (pa[0] - p[0]) * (pc[1] - p[1])) / det;
        [l1, l2, 1.0 - l1 - l2]
    }

    /// Vertex permutation realizing the reflection `x -> lx - x` of a structured mesh.
    pub fn mirror_permutation(&self) -> Option<Vec<usize>> {
        let g = self.grid?;
        let mut perm = vec![0; self.n_vertices()];
        for j in 0..=g.ny {
            for i in 0..=g.nx {
                perm[j * (g.nx + 1) + i] = j * (g.nx + 1) + (g.nx - i);
            }
        }
        Some(perm)
    }
}

/// Build a structured triangulation of `[0, lx] x [0, ly]` with `nx * ny` cells.
///
/// Each cell is split along one diagonal; the diagonal direction alternates in a
/// checkerboard pattern, so meshes with even `nx` are mirror symmetric and uniform
/// refinement yields nested meshes.
pub fn build_rect_mesh(nx: usize, ny: usize, lx: f64, ly: f64, tags: SideTags) -> Result<TriMesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidMesh(format!("cell counts must be positive, got {nx}x{ny}")));
    }
    if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
        return Err(Error::InvalidMesh(format!("extents must be positive, got {lx} x {ly}")));
    }
    if !tags.any(BoundaryTag::Dirichlet) {
        return Err(Error::InvalidMesh(
            "no side is clamped; the Dirichlet part must have positive length".into(),
        ));
    }

    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([lx * i as f64 / nx as f64, ly * j as f64 / ny as f64]);
        }
    }

    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v11, v01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            } else {
                triangles.push([v00, v10, v01]);
                triangles.push([v10, v11, v01]);
            }
        }
    }

    let owner = |i: usize, j: usize, a: usize, b: usize| -> usize {
        let c = j * nx + i;
        if triangles[2 * c].contains(&a) && triangles[2 * c].contains(&b) {
            2 * c
        } else {
            2 * c + 1
        }
    };

    let mut boundary_edges = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        let (a, b) = (id(i, 0), id(i + 1, 0));
        boundary_edges.push(BoundaryEdge::from_vertices(a, b, tags.bottom, owner(i, 0, a, b), &vertices));
    }
    for j in 0..ny {
        let (a, b) = (id(nx, j), id(nx, j + 1));
        boundary_edges.push(BoundaryEdge::from_vertices(a, b, tags.right, owner(nx - 1, j, a, b), &vertices));
    }
    for i in (0..nx).rev() {
        let (a, b) = (id(i + 1, ny), id(i, ny));
        boundary_edges.push(BoundaryEdge::from_vertices(a, b, tags.top, owner(i, ny - 1, a, b), &vertices));
    }
    for j in (0..ny).rev() {
        let (a, b) = (id(0, j + 1), id(0, j));
        boundary_edges.push(BoundaryEdge::from_vertices(a, b, tags.left, owner(0, j, a, b), &vertices));
    }

    Ok(TriMesh {
        vertices,
        triangles,
        boundary_edges,
        grid: Some(GridInfo { nx, ny, lx, ly, tags }),
    })
}

/// Check every mesh invariant and describe each violation. An empty report means the mesh is valid.
pub fn validate_mesh(mesh: &TriMesh) -> Vec<String> {
    let mut report = Vec::new();
    let nv = mesh.n_vertices();

    for (t, tri) in mesh.triangles.iter().enumerate() {
        if tri.iter().any(|&v| v >= nv) {
            report.push(format!("vertex index out of range, triangle {t}"));
            continue;
        }
        let area = mesh.signed_area(t);
        if area < 0.0 {
            report.push(format!("negative area, triangle {t}"));
        } else if area == 0.0 {
            report.push(format!("zero area, triangle {t}"));
        }
    }
    if !report.is_empty() && report.iter().any(|r| r.starts_with("vertex index")) {
        return report;
    }

    let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    let mut incidence: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for i in 0..3 {
            incidence.entry(key(tri[i], tri[(i + 1) % 3])).or_default().push(t);
        }
    }

    let mut tagged: HashMap<(usize, usize), usize> = HashMap::new();
    for (e, edge) in mesh.boundary_edges.iter().enumerate() {
        let [a, b] = edge.vertices;
        if a >= nv || b >= nv {
            report.push(format!("vertex index out of range, boundary edge {e}"));
            continue;
        }
        if let Some(prev) = tagged.insert(key(a, b), e) {
            report.push(format!("boundary edge {e} duplicates boundary edge {prev}"));
        }
        match incidence.get(&key(a, b)) {
            None => report.push(format!("boundary edge {e} is not an edge of any triangle")),
            Some(owners) if owners.len() != 1 => {
                report.push(format!("boundary edge {e} belongs to {} triangles", owners.len()))
            }
            Some(owners) => {
                if owners[0] != edge.triangle {
                    report.push(format!("boundary edge {e} records the wrong owner triangle"));
                }
                check_normal(mesh, e, edge, owners[0], &mut report);
            }
        }
    }

    for (&(a, b), owners) in &incidence {
        match owners.len() {
            1 if !tagged.contains_key(&(a, b)) => {
                report.push(format!("boundary edge ({a}, {b}) carries no tag"));
            }
            1 | 2 => {}
            n => report.push(format!("edge ({a}, {b}) is shared by {n} triangles")),
        }
    }

    if mesh.tag_length(BoundaryTag::Dirichlet) <= 0.0 {
        report.push("Dirichlet part has zero measure (Gamma_1 length must be positive)".into());
    }
    report
}

fn check_normal(mesh: &TriMesh, e: usize, edge: &BoundaryEdge, owner: usize, report: &mut Vec<String>) {
    let n = edge.normal;
    if ((n[0] * n[0] + n[1] * n[1]).sqrt() - 1.0).abs() > 1e-12 {
        report.push(format!("normal of boundary edge {e} is not unit length"));
    }
    let t = edge.tangent;
    if (n[0] * t[0] + n[1] * t[1]).abs() > 1e-12 {
        report.push(format!("tangent of boundary edge {e} is not orthogonal to its normal"));
    }
    let [a, b] = edge.vertices;
    let opposite = mesh.triangles[owner]
        .iter()
        .copied()
        .find(|&v| v != a && v != b)
        .unwrap_or(a);
    let (pa, pb, po) = (mesh.vertices[a], mesh.vertices[b], mesh.vertices[opposite]);
    let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
    if n[0] * (mid[0] - po[0]) + n[1] * (mid[1] - po[1]) <= 0.0 {
        report.push(format!("normal of boundary edge {e} points into the domain"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tags(left: BoundaryTag, right: BoundaryTag, top: BoundaryTag, bottom: BoundaryTag) -> SideTags {
        SideTags { bottom, right, top, left }
    }

    #[test]
    fn smallest_mesh_counts() {
        let mesh = build_rect_mesh(1, 1, 1.0, 1.0, SideTags::clamped_left_contact_bottom()).unwrap();
        assert_eq!(mesh.n_vertices(), 4);
        assert_eq!(mesh.n_triangles(), 2);
        assert_eq!(mesh.boundary_edges.len(), 4);
        assert!(validate_mesh(&mesh).is_empty());
    }

    #[test]
    fn two_by_one_contact_length() {
        use BoundaryTag::*;
        let mesh = build_rect_mesh(2, 1, 2.0, 1.0, tags(Dirichlet, Neumann, Neumann, Contact)).unwrap();
        assert_eq!(mesh.n_vertices(), 6);
        assert_eq!(mesh.n_triangles(), 4);
        assert_relative_eq!(mesh.tag_length(Contact), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_unclamped_and_empty() {
        use BoundaryTag::*;
        assert!(build_rect_mesh(1, 1, 1.0, 1.0, tags(Contact, Contact, Contact, Contact)).is_err());
        let ok = SideTags::clamped_left_contact_bottom();
        assert!(build_rect_mesh(0, 1, 1.0, 1.0, ok).is_err());
        assert!(build_rect_mesh(1, 1, 0.0, 1.0, ok).is_err());
        assert!(build_rect_mesh(1, 1, 1.0, -1.0, ok).is_err());
    }

    #[test]
    fn flipped_triangle_is_reported() {
        let mut mesh = build_rect_mesh(1, 1, 1.0, 1.0, SideTags::clamped_left_contact_bottom()).unwrap();
        mesh.triangles[0].swap(1, 2);
        let report = validate_mesh(&mesh);
        assert!(report.iter().any(|r| r == "negative area, triangle 0"), "{report:?}");
    }

    #[test]
    fn missing_dirichlet_is_reported() {
        let mut mesh = build_rect_mesh(2, 2, 1.0, 1.0, SideTags::clamped_left_contact_bottom()).unwrap();
        mesh.boundary_edges.retain(|e| e.tag != BoundaryTag::Dirichlet);
        let report = validate_mesh(&mesh);
        assert!(report.iter().any(|r| r.contains("Gamma_1")), "{report:?}");
        assert!(report.iter().any(|r| r.contains("carries no tag")), "{report:?}");
    }

    #[test]
    fn inward_normal_is_reported() {
        let mut mesh = build_rect_mesh(1, 1, 1.0, 1.0, SideTags::clamped_left_contact_bottom()).unwrap();
        let n = mesh.boundary_edges[0].normal;
        mesh.boundary_edges[0].normal = [-n[0], -n[1]];
        let report = validate_mesh(&mesh);
        assert!(report.iter().any(|r| r.contains("points into the domain")), "{report:?}");
    }

    #[test]
    fn bottom_normal_points_down() {
        let mesh = build_rect_mesh(3, 2, 1.5, 1.0, SideTags::clamped_left_contact_bottom()).unwrap();
        for e in mesh.edges_with_tag(BoundaryTag::Contact) {
            assert_eq!(e.normal, [0.0, -1.0]);
        }
    }

    #[test]
    fn locate_finds_vertices_and_centroids() {
        let mesh = build_rect_mesh(3, 2, 1.5, 1.0, SideTags::clamped_left_contact_bottom()).unwrap();
        for t in 0..mesh.n_triangles() {
            let [a, b, c] = mesh.triangles[t];
            let p = [
                (mesh.vertices[a][0] + mesh.vertices[b][0] + mesh.vertices[c][0]) / 3.0,
                (mesh.vertices[a][1] + mesh.vertices[b][1] + mesh.vertices[c][1]) / 3.0,
            ];
            let (found, bary) = mesh.locate(p).unwrap();
            assert_eq!(found, t);
            for l in bary {
                assert_relative_eq!(l, 1.0 / 3.0, epsilon = 1e-12);
            }
        }
        assert!(mesh.locate([1.5, 1.0]).is_some());
    }

    #[test]
    fn even_meshes_are_mirror_symmetric() {
        let mesh = build_rect_mesh(4, 2, 2.0, 1.0, SideTags::clamped_left_contact_bottom()).unwrap();
        let perm = mesh.mirror_permutation().unwrap();
        let mut mirrored: Vec<[usize; 3]> = mesh
            .triangles
            .iter()
            .map(|t| {
                let mut m = [perm[t[0]], perm[t[1]], perm[t[2]]];
                m.sort();
                m
            })
            .collect();
        let mut original: Vec<[usize; 3]> = mesh
            .triangles
            .iter()
            .map(|t| {
                let mut m = *t;
                m.sort();
                m
            })
            .collect();
        mirrored.sort();
        original.sort();
        assert_eq!(mirrored, original);
    }
}
