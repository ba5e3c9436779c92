//! Polygonal tessellations of the unit square.
//!
//! A [`PolyMesh`] owns its vertices and counter-clockwise cells, and derives the
//! undirected edge table and boundary flags on construction. Meshes come from the
//! Cartesian generator, the Lloyd-relaxed Voronoi generator, or the text format in
//! [`io`].

mod cartesian;
mod geometry;
pub mod io;
mod validate;
mod voronoi;

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Result, VemError};

pub use cartesian::generate_cartesian;
pub use geometry::{cell_geometry, point_segment_distance, signed_area, CellGeometry, Vertex2};
use geometry::raw_geometry;
pub use io::{read_mesh, write_mesh};
pub use validate::{validate_mesh, ValidationReport, Violation};
pub use voronoi::{generate_voronoi, generate_voronoi_with_log, VoronoiLog};

/// Absolute tolerance used to decide whether a vertex lies on the boundary of the unit square.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// One polygonal element with cached geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonCell {
    /// Vertex indices in counter-clockwise order.
    pub vertex_ids: Vec<usize>,
    /// Signed area, positive for valid (counter-clockwise) cells.
    pub area: f64,
    pub centroid: Vertex2,
    /// Maximum distance between two vertices (h_E).
    pub diameter: f64,
}

/// Undirected edge with its adjacent cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Endpoints, smaller index first.
    pub vertices: [usize; 2],
    /// Cells using this edge, in order of first appearance.
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyMesh {
    vertices: Vec<Vertex2>,
    cells: Vec<PolygonCell>,
    boundary: Vec<bool>,
    edges: Vec<Edge>,
    /// For each cell, the global edge id of local edge `i` (from vertex `i` to `i+1`).
    cell_edges: Vec<Vec<usize>>,
    h_max: f64,
}

impl PolyMesh {
    /// Build a mesh from raw vertices and cells.
    ///
    /// Only finiteness, index ranges and cell sizes are checked here. Orientation, conformity
    /// and coverage are reported by [`validate_mesh`]; a clockwise cell keeps a negative area.
    pub fn new(vertices: Vec<Vertex2>, cells: Vec<Vec<usize>>) -> Result<Self> {
        if let Some((i, _)) = vertices.iter().enumerate().find(|(_, p)| !p.is_finite()) {
            return Err(VemError::InvalidInput(format!("vertex {i} has non-finite coordinates")));
        }
        let mut polys = Vec::with_capacity(cells.len());
        for (c, ids) in cells.into_iter().enumerate() {
            if let Some(&bad) = ids.iter().find(|&&v| v >= vertices.len()) {
                return Err(VemError::InvalidInput(format!(
                    "cell {c}: vertex index {bad} out of range (nv = {})",
                    vertices.len()
                )));
            }
            if ids.len() < 3 {
                return Err(VemError::InvalidInput(format!("cell {c}: needs at least 3 vertices")));
            }
            let pts: Vec<Vertex2> = ids.iter().map(|&v| vertices[v]).collect();
            let g = raw_geometry(&pts);
            polys.push(PolygonCell { vertex_ids: ids, area: g.area, centroid: g.centroid, diameter: g.diameter });
        }
        let boundary = vertices.iter().map(|&p| on_unit_square_boundary(p)).collect();

        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut cell_edges = Vec::with_capacity(polys.len());
        for (c, cell) in polys.iter().enumerate() {
            let n = cell.vertex_ids.len();
            let mut local = Vec::with_capacity(n);
            for i in 0..n {
                let a = cell.vertex_ids[i];
                let b = cell.vertex_ids[(i + 1) % n];
                let key = (a.min(b), a.max(b));
                let id = *index.entry(key).or_insert_with(|| {
                    edges.push(Edge { vertices: [key.0, key.1], cells: Vec::new() });
                    edges.len() - 1
                });
                edges[id].cells.push(c);
                local.push(id);
            }
            cell_edges.push(local);
        }
        let h_max = polys.iter().map(|c| c.diameter).fold(0.0, f64::max);
        Ok(Self { vertices, cells: polys, boundary, edges, cell_edges, h_max })
    }

    pub fn vertices(&self) -> &[Vertex2] {
        &self.vertices
    }

    pub fn cells(&self) -> &[PolygonCell] {
        &self.cells
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    /// Global edge ids of the cell's edges, local edge `i` joining vertex `i` to `i+1`.
    pub fn cell_edges(&self, cell: usize) -> &[usize] {
        &self.cell_edges[cell]
    }

    pub fn cell_vertices(&self, cell: usize) -> Vec<Vertex2> {
        self.cells[cell].vertex_ids.iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area).sum()
    }

    /// True when both endpoints lie on the same side of the unit square.
    pub fn is_boundary_edge(&self, edge: usize) -> bool {
        let [a, b] = self.edges[edge].vertices;
        same_boundary_side(self.vertices[a], self.vertices[b])
    }

    /// A copy of the mesh with cells listed in the given order.
    pub fn permute_cells(&self, order: &[usize]) -> Result<Self> {
        let cells = order.iter().map(|&c| self.cells[c].vertex_ids.clone()).collect();
        Self::new(self.vertices.clone(), cells)
    }
}

pub(crate) fn on_unit_square_boundary(p: Vertex2) -> bool {
    p.x.abs() <= BOUNDARY_TOL
        || (p.x - 1.0).abs() <= BOUNDARY_TOL
        || p.y.abs() <= BOUNDARY_TOL
        || (p.y - 1.0).abs() <= BOUNDARY_TOL
}

pub(crate) fn same_boundary_side(a: Vertex2, b: Vertex2) -> bool {
    let near = |u: f64, v: f64| (u - v).abs() <= BOUNDARY_TOL;
    (near(a.x, 0.0) && near(b.x, 0.0))
        || (near(a.x, 1.0) && near(b.x, 1.0))
        || (near(a.y, 0.0) && near(b.y, 0.0))
        || (near(a.y, 1.0) && near(b.y, 1.0))
}

/// Mesh family of a refinement ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFamily {
    Cartesian,
    Voronoi,
}

impl MeshFamily {
    /// Default refinement ladder: cells per side (Cartesian) or cell count (Voronoi).
    pub fn default_ladder(self) -> &'static [usize] {
        match self {
            MeshFamily::Cartesian => &[8, 16, 32, 64, 128],
            MeshFamily::Voronoi => &[64, 256, 1024, 4096],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MeshFamily::Cartesian => "cartesian",
            MeshFamily::Voronoi => "voronoi",
        }
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeshFamily {
    type Err = VemError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cartesian" => Ok(MeshFamily::Cartesian),
            "voronoi" | "polymesher" => Ok(MeshFamily::Voronoi),
            other => Err(VemError::InvalidInput(format!("unknown mesh family '{other}'"))),
        }
    }
}

pub const DEFAULT_LLOYD_ITERS: usize = 100;
pub const DEFAULT_SEED: u64 = 42;

/// Everything needed to regenerate one mesh of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshFamilySpec {
    pub family: MeshFamily,
    pub resolution: usize,
    pub rng_seed: u64,
    pub lloyd_iters: usize,
}

impl MeshFamilySpec {
    pub fn cartesian(n: usize) -> Self {
        Self { family: MeshFamily::Cartesian, resolution: n, rng_seed: 0, lloyd_iters: 0 }
    }

    pub fn voronoi(n_cells: usize, rng_seed: u64, lloyd_iters: usize) -> Self {
        Self { family: MeshFamily::Voronoi, resolution: n_cells, rng_seed, lloyd_iters }
    }

    pub fn generate(&self) -> Result<PolyMesh> {
        match self.family {
            MeshFamily::Cartesian => generate_cartesian(self.resolution),
            MeshFamily::Voronoi => generate_voronoi(self.resolution, self.rng_seed, self.lloyd_iters),
        }
    }
}
