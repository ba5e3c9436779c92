use nalgebra::DMatrix;
use rayon::prelude::*;

use super::dofmap::{build_dof_map, GlobalDofMap};
use super::sparse::CsrMatrix;
use crate::error::Result;
use crate::mesh::{PolyMesh, Vertex2};
use crate::polybasis::polygon_quadrature_resolving;
use crate::vemlocal::{local_load, local_stiffness_with, DiffusionTensor, EnlargementPolicy, MethodKind, VemElement};

/// Quadrature used for data integrals (load and errors).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataQuadrature {
    /// Exactness degree; `None` means `2k + 6`.
    pub degree: Option<usize>,
    /// Oscillation wavelengths of the data in x and y, used to subdivide the cell rule.
    pub wavelength: Option<[f64; 2]>,
    /// Cap on the number of uniform subdivisions of each fan triangle.
    pub max_level: usize,
}

/// Default cap on data-quadrature subdivision levels.
pub const MAX_DATA_LEVEL: usize = 6;

impl Default for DataQuadrature {
    fn default() -> Self {
        Self { degree: None, wavelength: None, max_level: MAX_DATA_LEVEL }
    }
}

impl DataQuadrature {
    pub fn degree_for(&self, k: usize) -> usize {
        self.degree.unwrap_or(2 * k + 6)
    }

    pub fn rule(&self, elem: &VemElement) -> Result<crate::polybasis::QuadRule> {
        polygon_quadrature_resolving(
            &elem.vertices,
            elem.geometry.centroid,
            self.degree_for(elem.k()),
            self.wavelength,
            self.max_level,
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct AssemblyOptions {
    pub policy: EnlargementPolicy,
    pub data: DataQuadrature,
}

/// Assembled global system before boundary conditions.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub method: MethodKind,
    pub k: usize,
    pub dofs: GlobalDofMap,
    pub a: CsrMatrix,
    pub a_pi: CsrMatrix,
    pub a_s: CsrMatrix,
    pub b: Vec<f64>,
    /// Monomial coefficients of the elliptic projection, per cell.
    pub pi_star: Vec<DMatrix<f64>>,
    /// Enlargement used by each cell (zero for the standard method).
    pub ell: Vec<usize>,
}

impl SparseSystem {
    pub fn free_dofs(&self) -> Vec<usize> {
        (0..self.dofs.total()).filter(|&i| !self.dofs.boundary[i]).collect()
    }
}

struct CellContribution {
    a_pi: DMatrix<f64>,
    a_s: DMatrix<f64>,
    load: nalgebra::DVector<f64>,
    pi_star: DMatrix<f64>,
    ell: usize,
}

/// Assemble the global stiffness (split into consistency and stabilization parts) and load.
///
/// Cells are processed in parallel; contributions are merged in cell order, so the result
/// does not depend on scheduling.
pub fn assemble(
    mesh: &PolyMesh,
    k: usize,
    method: MethodKind,
    tensor: &DiffusionTensor,
    f: &(dyn Fn(Vertex2) -> f64 + Sync),
    opts: &AssemblyOptions,
) -> Result<SparseSystem> {
    let dofs = build_dof_map(mesh, k)?;
    let contributions: Vec<Result<CellContribution>> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let elem = VemElement::new(mesh.cell_vertices(c), k).map_err(|e| e.at_cell(c))?;
            let st = local_stiffness_with(&elem, method, tensor, opts.policy).map_err(|e| e.at_cell(c))?;
            let rule = opts.data.rule(&elem).map_err(|e| e.at_cell(c))?;
            let load = local_load(&elem, &st.projections, f, &rule);
            let ell = st.projections.ell;
            let pi_star = st.projections.pi_nabla.pi_star;
            Ok(CellContribution { a_pi: st.a_pi, a_s: st.a_s, load, pi_star, ell })
        })
        .collect();

    let n = dofs.total();
    let mut t_pi = Vec::new();
    let mut t_s = Vec::new();
    let mut b = vec![0.0; n];
    let mut pi_star = Vec::with_capacity(mesh.num_cells());
    let mut ell = Vec::with_capacity(mesh.num_cells());
    for (c, contribution) in contributions.into_iter().enumerate() {
        let cc = contribution?;
        let map = &dofs.cell_dofs[c];
        for (i, &gi) in map.iter().enumerate() {
            b[gi] += cc.load[i];
            for (j, &gj) in map.iter().enumerate() {
                t_pi.push((gi, gj, cc.a_pi[(i, j)]));
                if method == MethodKind::StandardVem {
                    t_s.push((gi, gj, cc.a_s[(i, j)]));
                }
            }
        }
        pi_star.push(cc.pi_star);
        ell.push(cc.ell);
    }
    let a_pi = CsrMatrix::from_triplets(n, &t_pi);
    let a_s = CsrMatrix::from_triplets(n, &t_s);
    let a = a_pi.add(&a_s);
    Ok(SparseSystem { method, k, dofs, a, a_pi, a_s, b, pi_star, ell })
}

/// System restricted to the free DOFs after Dirichlet elimination.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub method: MethodKind,
    pub k: usize,
    pub a: CsrMatrix,
    pub b: Vec<f64>,
    /// Global indices of the free DOFs, ascending.
    pub free: Vec<usize>,
    /// Full-length vector holding the prescribed boundary values (zero elsewhere).
    pub lifted: Vec<f64>,
}

impl ReducedSystem {
    /// Global DOF vector from the free-DOF solution.
    pub fn expand(&self, x_free: &[f64]) -> Vec<f64> {
        let mut x = self.lifted.clone();
        for (&g, &v) in self.free.iter().zip(x_free) {
            x[g] = v;
        }
        x
    }
}

/// Eliminate boundary DOFs with value zero.
pub fn apply_dirichlet_homogeneous(system: &SparseSystem) -> ReducedSystem {
    apply_dirichlet(system, &vec![0.0; system.dofs.total()])
}

/// Eliminate boundary DOFs, fixing them to the matching entries of `values`
/// (a full-length vector; non-boundary entries are ignored).
pub fn apply_dirichlet(system: &SparseSystem, values: &[f64]) -> ReducedSystem {
    let n = system.dofs.total();
    assert_eq!(values.len(), n);
    let lifted: Vec<f64> = (0..n).map(|i| if system.dofs.boundary[i] { values[i] } else { 0.0 }).collect();
    let free = system.free_dofs();
    let a_lift = system.a.matvec(&lifted);
    let b = free.iter().map(|&g| system.b[g] - a_lift[g]).collect();
    ReducedSystem { method: system.method, k: system.k, a: system.a.submatrix(&free), b, free, lifted }
}

/// Boundary values of `g` at the boundary DOF nodes (zero elsewhere).
pub fn boundary_values(dofs: &GlobalDofMap, g: impl Fn(Vertex2) -> f64) -> Vec<f64> {
    (0..dofs.total())
        .map(|i| match (dofs.boundary[i], dofs.node_position(i)) {
            (true, Some(p)) => g(p),
            _ => 0.0,
        })
        .collect()
}

/// Global DOF vector of `g`: nodal values at vertex and edge nodes, scaled moments per cell
/// (integrated with `quadrature`).
pub fn interpolate(
    mesh: &PolyMesh,
    dofs: &GlobalDofMap,
    g: &(dyn Fn(Vertex2) -> f64 + Sync),
    quadrature: &DataQuadrature,
) -> Result<Vec<f64>> {
    let mut x: Vec<f64> = (0..dofs.total()).map(|i| dofs.node_position(i).map_or(0.0, g)).collect();
    if dofs.k >= 2 {
        let local: Vec<Result<nalgebra::DVector<f64>>> = (0..mesh.num_cells())
            .into_par_iter()
            .map(|c| {
                let elem = VemElement::new(mesh.cell_vertices(c), dofs.k).map_err(|e| e.at_cell(c))?;
                let rule = quadrature.rule(&elem).map_err(|e| e.at_cell(c))?;
                Ok(elem.interpolate(g, &rule))
            })
            .collect();
        for (c, v) in local.into_iter().enumerate() {
            let v = v?;
            let layout = crate::vemlocal::DofLayout::new(dofs.k, mesh.cells()[c].vertex_ids.len());
            for a in 0..layout.n_moments() {
                x[dofs.cell_dofs[c][layout.moment(a)]] = v[layout.moment(a)];
            }
        }
    }
    Ok(x)
}
