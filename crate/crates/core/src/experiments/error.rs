use nalgebra::DMatrix;
use rayon::prelude::*;

use super::cases::TestCase;
use crate::assembly::{DataQuadrature, GlobalDofMap};
use crate::error::{Result, VemError};
use crate::mesh::PolyMesh;
use crate::vemlocal::VemElement;

/// Parts of the relative energy error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyError {
    pub e_star: f64,
    /// `sum_E ||sqrt(K) grad(u - Pi u_h)||^2`.
    pub numerator_sq: f64,
    /// `||sqrt(K) grad u||^2`.
    pub denominator_sq: f64,
}

/// Relative energy error of the elliptic projection of `solution`.
pub fn energy_error(
    mesh: &PolyMesh,
    dofs: &GlobalDofMap,
    solution: &[f64],
    case: &TestCase,
    pi_star: &[DMatrix<f64>],
    quadrature: &DataQuadrature,
) -> Result<EnergyError> {
    let k = dofs.k;
    if pi_star.len() != mesh.num_cells() || solution.len() != dofs.total() {
        return Err(VemError::InvalidInput("solution or projections do not match the mesh".into()));
    }
    let parts: Vec<Result<(f64, f64)>> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let elem = VemElement::new(mesh.cell_vertices(c), k).map_err(|e| e.at_cell(c))?;
            let rule = quadrature.rule(&elem).map_err(|e| e.at_cell(c))?;
            let local = nalgebra::DVector::from_iterator(
                dofs.cell_dofs[c].len(),
                dofs.cell_dofs[c].iter().map(|&g| solution[g]),
            );
            let coeffs = &pi_star[c] * local;
            let basis = elem.basis(k);
            let (mut gx, mut gy) = (vec![0.0; basis.len()], vec![0.0; basis.len()]);
            let (mut num, mut den) = (0.0, 0.0);
            for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                basis.grad_into(p, &mut gx, &mut gy);
                let px: f64 = coeffs.iter().zip(&gx).map(|(c, g)| c * g).sum();
                let py: f64 = coeffs.iter().zip(&gy).map(|(c, g)| c * g).sum();
                let [ux, uy] = case.grad_u(p);
                let (ex, ey) = (ux - px, uy - py);
                num += w * (case.k_diag[0] * ex * ex + case.k_diag[1] * ey * ey);
                den += w * case.energy_density(p);
            }
            Ok((num, den))
        })
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for part in parts {
        let (n, d) = part?;
        num += n;
        den += d;
    }
    if den <= 0.0 {
        return Err(VemError::InvalidInput("exact solution has zero energy".into()));
    }
    Ok(EnergyError { e_star: (num / den).sqrt(), numerator_sq: num, denominator_sq: den })
}

/// `log(e_prev / e_last) / log(h_prev / h_last)`.
pub fn convergence_rate(e_prev: f64, e_last: f64, h_prev: f64, h_last: f64) -> Result<f64> {
    if !(e_prev > 0.0 && e_last > 0.0 && h_prev > 0.0 && h_last > 0.0) {
        return Err(VemError::InvalidInput("errors and mesh sizes must be positive".into()));
    }
    if h_prev <= h_last {
        return Err(VemError::InvalidInput(format!("mesh size must decrease ({h_prev} -> {h_last})")));
    }
    Ok((e_prev / e_last).ln() / (h_prev / h_last).ln())
}
