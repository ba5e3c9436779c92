use crate::error::{Result, VemError};
use crate::mesh::{PolyMesh, Vertex2};
use crate::polybasis::{dim_poly, edge_rules};
use crate::vemlocal::DofLayout;

/// Global numbering of the degrees of freedom of a conforming mesh.
///
/// Vertex DOFs come first (vertex index), then the `k - 1` interior nodes of every edge
/// (edge index, nodes ordered from the lower to the higher global vertex index), then the
/// cell-private moments, blocked per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalDofMap {
    pub k: usize,
    pub n_vertex_dofs: usize,
    pub n_edge_dofs: usize,
    pub n_moment_dofs: usize,
    /// Local-to-global map of every cell, in local DOF order.
    pub cell_dofs: Vec<Vec<usize>>,
    /// `true` for vertex and edge DOFs on the boundary of the unit square.
    pub boundary: Vec<bool>,
    /// Positions of the vertex and edge DOFs.
    pub node_positions: Vec<Vertex2>,
}

impl GlobalDofMap {
    pub fn total(&self) -> usize {
        self.n_vertex_dofs + self.n_edge_dofs + self.n_moment_dofs
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary.iter().filter(|&&b| b).count()
    }

    pub fn n_free(&self) -> usize {
        self.total() - self.n_boundary()
    }

    /// Position of a vertex or edge DOF; `None` for moments.
    pub fn node_position(&self, dof: usize) -> Option<Vertex2> {
        self.node_positions.get(dof).copied()
    }
}

pub fn build_dof_map(mesh: &PolyMesh, k: usize) -> Result<GlobalDofMap> {
    if k == 0 {
        return Err(VemError::InvalidInput("order must be at least 1".into()));
    }
    for (e, edge) in mesh.edges().iter().enumerate() {
        let [a, b] = edge.vertices;
        match edge.cells.len() {
            1 if !mesh.is_boundary_edge(e) => {
                return Err(VemError::NonConforming(format!(
                    "edge ({a}, {b}) belongs to cell {} only but is not on the boundary",
                    edge.cells[0]
                )))
            }
            1 | 2 => {}
            _ => {
                return Err(VemError::NonConforming(format!("edge ({a}, {b}) is shared by {} cells", edge.cells.len())))
            }
        }
        if edge.cells.len() == 2 {
            let ca = &mesh.cells()[edge.cells[0]].vertex_ids;
            let cb = &mesh.cells()[edge.cells[1]].vertex_ids;
            if directed(ca, a, b) == directed(cb, a, b) {
                return Err(VemError::NonConforming(format!(
                    "cells {} and {} traverse edge ({a}, {b}) in the same direction",
                    edge.cells[0], edge.cells[1]
                )));
            }
        }
    }

    let nv = mesh.num_vertices();
    let ne = mesh.num_edges();
    let per_edge = k - 1;
    let per_cell = dim_poly(k as i32 - 2);
    let n_edge_dofs = ne * per_edge;
    let first_moment = nv + n_edge_dofs;
    let (nodes, _) = edge_rules(k, 0);

    let mut node_positions = mesh.vertices().to_vec();
    let mut boundary = mesh.boundary_flags().to_vec();
    for (e, edge) in mesh.edges().iter().enumerate() {
        let (p, q) = (mesh.vertices()[edge.vertices[0]], mesh.vertices()[edge.vertices[1]]);
        let on_boundary = edge.cells.len() == 1;
        debug_assert!(!on_boundary || mesh.is_boundary_edge(e));
        for &t in &nodes[1..k] {
            node_positions.push(p.lerp(q, t));
            boundary.push(on_boundary);
        }
    }
    boundary.resize(first_moment + per_cell * mesh.num_cells(), false);

    let cell_dofs = mesh
        .cells()
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let n = cell.vertex_ids.len();
            let layout = DofLayout::new(k, n);
            let mut map = vec![0; layout.total()];
            for i in 0..n {
                map[layout.vertex(i)] = cell.vertex_ids[i];
            }
            for (i, &e) in mesh.cell_edges(c).iter().enumerate() {
                let forward = cell.vertex_ids[i] < cell.vertex_ids[(i + 1) % n];
                for j in 0..per_edge {
                    let g = if forward { j } else { per_edge - 1 - j };
                    map[layout.edge(i, j)] = nv + e * per_edge + g;
                }
            }
            for a in 0..per_cell {
                map[layout.moment(a)] = first_moment + c * per_cell + a;
            }
            map
        })
        .collect();

    Ok(GlobalDofMap {
        k,
        n_vertex_dofs: nv,
        n_edge_dofs,
        n_moment_dofs: per_cell * mesh.num_cells(),
        cell_dofs,
        boundary,
        node_positions,
    })
}

fn directed(ids: &[usize], a: usize, b: usize) -> bool {
    let n = ids.len();
    (0..n).any(|i| ids[i] == a && ids[(i + 1) % n] == b)
}
