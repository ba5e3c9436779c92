use std::fmt;

use super::{point_segment_distance, PolyMesh};

/// Tolerance on the total area of a tessellation of the unit square.
pub const AREA_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Signed area is not positive (clockwise or degenerate cell).
    Orientation { cell: usize, area: f64 },
    RepeatedVertex { cell: usize, vertex: usize },
    /// Edge used by more than two cells.
    OverusedEdge { edge: [usize; 2], cells: Vec<usize> },
    /// Edge shared by two cells traversing it in the same direction.
    SameOrientation { edge: [usize; 2], cells: [usize; 2] },
    /// Edge used by a single cell that does not lie on the boundary of the unit square.
    Hanging { edge: [usize; 2], cell: usize },
    /// Boundary flag of a vertex disagrees with the boundary edges it belongs to.
    BoundaryFlag { vertex: usize },
    OutsideDomain { vertex: usize },
    Unreferenced { vertex: usize },
    Coverage { total_area: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Orientation { cell, area } => {
                write!(f, "orientation: cell {cell} has signed area {area:e}")
            }
            Violation::RepeatedVertex { cell, vertex } => {
                write!(f, "cell {cell} repeats vertex {vertex} consecutively")
            }
            Violation::OverusedEdge { edge, cells } => {
                write!(f, "conformity: edge {edge:?} used by {} cells {cells:?}", cells.len())
            }
            Violation::SameOrientation { edge, cells } => {
                write!(f, "conformity: edge {edge:?} traversed in the same direction by cells {cells:?}")
            }
            Violation::Hanging { edge, cell } => {
                write!(f, "conformity: edge {edge:?} of cell {cell} has no neighbour and is not on the boundary")
            }
            Violation::BoundaryFlag { vertex } => {
                write!(f, "boundary closure: vertex {vertex} flag does not match the boundary edges")
            }
            Violation::OutsideDomain { vertex } => write!(f, "vertex {vertex} lies outside the unit square"),
            Violation::Unreferenced { vertex } => write!(f, "vertex {vertex} is not used by any cell"),
            Violation::Coverage { total_area } => {
                write!(f, "coverage: cell areas sum to {total_area} instead of 1")
            }
        }
    }
}

/// Outcome of [`validate_mesh`]: violations plus shape-regularity indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// min over cells of (shortest edge) / h_E.
    pub min_edge_ratio: f64,
    /// min over cells of (centroid-to-boundary distance) / h_E.
    pub min_inradius_ratio: f64,
    pub total_area: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check orientation, conformity, boundary closure and coverage. Never fails; problems are
/// listed in the report.
pub fn validate_mesh(mesh: &PolyMesh) -> ValidationReport {
    let mut violations = Vec::new();
    let verts = mesh.vertices();
    let mut min_edge_ratio = f64::INFINITY;
    let mut min_inradius_ratio = f64::INFINITY;
    let mut used = vec![false; verts.len()];

    for (c, cell) in mesh.cells().iter().enumerate() {
        if cell.area <= 0.0 {
            violations.push(Violation::Orientation { cell: c, area: cell.area });
        }
        let ids = &cell.vertex_ids;
        let n = ids.len();
        for i in 0..n {
            used[ids[i]] = true;
            if ids[i] == ids[(i + 1) % n] {
                violations.push(Violation::RepeatedVertex { cell: c, vertex: ids[i] });
            }
            let a = verts[ids[i]];
            let b = verts[ids[(i + 1) % n]];
            if cell.diameter > 0.0 {
                min_edge_ratio = min_edge_ratio.min(a.dist(b) / cell.diameter);
                min_inradius_ratio =
                    min_inradius_ratio.min(point_segment_distance(cell.centroid, a, b) / cell.diameter);
            }
        }
    }

    let mut on_boundary_edge = vec![false; verts.len()];
    for (e, edge) in mesh.edges().iter().enumerate() {
        let [a, b] = edge.vertices;
        match edge.cells.as_slice() {
            [c] => {
                if mesh.is_boundary_edge(e) {
                    on_boundary_edge[a] = true;
                    on_boundary_edge[b] = true;
                } else {
                    violations.push(Violation::Hanging { edge: edge.vertices, cell: *c });
                }
            }
            [c0, c1] => {
                if traverses_forward(mesh, *c0, a, b) == traverses_forward(mesh, *c1, a, b) {
                    violations.push(Violation::SameOrientation { edge: edge.vertices, cells: [*c0, *c1] });
                }
            }
            cells => violations.push(Violation::OverusedEdge { edge: edge.vertices, cells: cells.to_vec() }),
        }
    }

    for (v, p) in verts.iter().enumerate() {
        if p.x < -super::BOUNDARY_TOL
            || p.x > 1.0 + super::BOUNDARY_TOL
            || p.y < -super::BOUNDARY_TOL
            || p.y > 1.0 + super::BOUNDARY_TOL
        {
            violations.push(Violation::OutsideDomain { vertex: v });
        }
        if !used[v] {
            violations.push(Violation::Unreferenced { vertex: v });
        } else if mesh.boundary_flags()[v] != on_boundary_edge[v] {
            violations.push(Violation::BoundaryFlag { vertex: v });
        }
    }

    let total_area = mesh.total_area();
    if (total_area - 1.0).abs() > AREA_TOL {
        violations.push(Violation::Coverage { total_area });
    }

    ValidationReport { violations, min_edge_ratio, min_inradius_ratio, total_area }
}

fn traverses_forward(mesh: &PolyMesh, cell: usize, a: usize, b: usize) -> bool {
    let ids = &mesh.cells()[cell].vertex_ids;
    let n = ids.len();
    (0..n).any(|i| ids[i] == a && ids[(i + 1) % n] == b)
}
