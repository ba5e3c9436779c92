//! Global DOF numbering, sparse assembly, Dirichlet elimination and the linear solve.

mod dofmap;
mod solve;
mod sparse;
mod system;

pub use dofmap::{build_dof_map, GlobalDofMap};
pub use solve::{conjugate_gradient, solve, SolveReport, SolverKind, CG_TOL, RESIDUAL_TOL};
pub use sparse::CsrMatrix;
pub use system::{
    apply_dirichlet, apply_dirichlet_homogeneous, assemble, boundary_values, interpolate, AssemblyOptions, DataQuadrature,
    ReducedSystem, SparseSystem, MAX_DATA_LEVEL,
};

use crate::error::{Result, VemError};

/// `||A^S||_inf / ||A^Pi||_inf` with the maximum absolute row sum of the full global parts.
pub fn stab_consistency_ratio(a_s: &CsrMatrix, a_pi: &CsrMatrix) -> Result<f64> {
    let (num, den) = (a_s.norm_inf(), a_pi.norm_inf());
    if num == 0.0 {
        return Err(VemError::InvalidInput("stabilization part is zero (stabilization-free method?)".into()));
    }
    if den == 0.0 {
        return Err(VemError::InvalidInput("consistency part is zero".into()));
    }
    Ok(num / den)
}
