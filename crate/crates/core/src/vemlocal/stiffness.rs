use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::dofs::min_ell;
use super::projection::{ProjectionPack, VemElement};
use super::tensor::{spectral_norm, DiffusionTensor};
use super::MethodKind;
use crate::error::{Result, VemError};
use crate::mesh::Vertex2;
use crate::polybasis::{dim_poly, weighted_gram, QuadRule};

/// Relative eigenvalue threshold of the rank check.
pub const RANK_TOL: f64 = 1e-9;

/// Largest increase over the minimal enlargement tried by [`EnlargementPolicy::FirstFullRank`].
pub const MAX_EXTRA_ELL: usize = 3;

/// How the stabilization-free method picks the enlargement `ell` of each element.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnlargementPolicy {
    /// Smallest `ell` satisfying the counting inequality; a rank defect is an error.
    Minimal,
    /// Start from the minimal `ell` and increase it (at most [`MAX_EXTRA_ELL`] times) until
    /// the local matrix has only the constants in its kernel.
    #[default]
    FirstFullRank,
}

/// Local stiffness split into its consistency and stabilization parts.
#[derive(Debug, Clone)]
pub struct LocalStiffness {
    pub a_pi: DMatrix<f64>,
    /// Zero for the stabilization-free method.
    pub a_s: DMatrix<f64>,
    /// `a_pi + a_s`, symmetrized.
    pub a: DMatrix<f64>,
    /// Largest spectral norm of `K` over the element's quadrature points.
    pub k_inf: f64,
    pub projections: ProjectionPack,
}

/// Local stiffness of `elem` for `method` and diffusion tensor `tensor`, with the default
/// enlargement policy.
pub fn local_stiffness(elem: &VemElement, method: MethodKind, tensor: &DiffusionTensor) -> Result<LocalStiffness> {
    local_stiffness_with(elem, method, tensor, EnlargementPolicy::default())
}

/// Local stiffness with an explicit enlargement policy.
///
/// The stabilization-free matrix must have only the constants in its kernel; otherwise
/// [`VemError::StabilizationFree`] is returned with the rank found for the last `ell` tried.
pub fn local_stiffness_with(
    elem: &VemElement,
    method: MethodKind,
    tensor: &DiffusionTensor,
    policy: EnlargementPolicy,
) -> Result<LocalStiffness> {
    if method == MethodKind::StandardVem {
        return stiffness_from_pack(elem, ProjectionPack::build(elem, method)?, tensor);
    }
    let ndof = elem.layout.total();
    let ell0 = min_ell(elem.k(), elem.n_vertices());
    let tries = match policy {
        EnlargementPolicy::Minimal => 0,
        EnlargementPolicy::FirstFullRank => MAX_EXTRA_ELL,
    };
    let mut rank = 0;
    for ell in ell0..=ell0 + tries {
        let st = stiffness_from_pack(elem, ProjectionPack::build_with_ell(elem, method, ell)?, tensor)?;
        rank = numerical_rank(&st.a);
        if rank + 1 >= ndof {
            return Ok(st);
        }
    }
    Err(VemError::StabilizationFree { cell: 0, rank, expected: ndof - 1 })
}

fn stiffness_from_pack(elem: &VemElement, pack: ProjectionPack, tensor: &DiffusionTensor) -> Result<LocalStiffness> {
    let method = pack.method;
    let d = pack.grad_degree;
    let nd = dim_poly(d as i32);
    let p = &pack.pi0_grad;

    let (w, k_inf) = match tensor {
        DiffusionTensor::Constant(kk) => {
            let m = pack.gram.view((0, 0), (nd, nd)).clone_owned();
            let mut w = DMatrix::zeros(2 * nd, 2 * nd);
            for (bi, bj) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                w.view_mut((bi * nd, bj * nd), (nd, nd)).copy_from(&(&m * kk[(bi, bj)]));
            }
            (w, spectral_norm(kk))
        }
        DiffusionTensor::Variable(_) => {
            let rule = elem.quadrature(2 * d + 4)?;
            let basis = elem.basis(d);
            let mut k_inf: f64 = 0.0;
            for &q in &rule.points {
                k_inf = k_inf.max(spectral_norm(&tensor.eval_checked(q)?));
            }
            let mut w = DMatrix::zeros(2 * nd, 2 * nd);
            for (bi, bj) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let block = weighted_gram(&basis, &rule, |q| tensor.eval(q)[(bi, bj)]);
                w.view_mut((bi * nd, bj * nd), (nd, nd)).copy_from(&block);
            }
            (w, k_inf)
        }
    };
    let a_pi = symmetrize(p.transpose() * w * p);
    let ndof = elem.layout.total();
    let a_s = match method {
        MethodKind::StandardVem => {
            let r = DMatrix::identity(ndof, ndof) - &pack.pi_nabla.pi_dof;
            symmetrize(r.transpose() * r * k_inf)
        }
        MethodKind::E2vem => DMatrix::zeros(ndof, ndof),
    };
    let a = symmetrize(&a_pi + &a_s);
    Ok(LocalStiffness { a_pi, a_s, a, k_inf, projections: pack })
}

/// Number of eigenvalues above `RANK_TOL` times the largest one in magnitude.
pub fn numerical_rank(a: &DMatrix<f64>) -> usize {
    let eig = SymmetricEigen::new(a.clone());
    let top = eig.eigenvalues.amax();
    eig.eigenvalues.iter().filter(|&&l| l > RANK_TOL * top).count()
}

fn symmetrize(a: DMatrix<f64>) -> DMatrix<f64> {
    (&a + a.transpose()) * 0.5
}

/// Local load `\int_E f Pi^0_{k-1} phi_i`, integrated with `rule`.
pub fn local_load(elem: &VemElement, pack: &ProjectionPack, f: impl Fn(Vertex2) -> f64, rule: &QuadRule) -> DVector<f64> {
    let degree = elem.k() - 1;
    let basis = elem.basis(degree);
    let n = basis.len();
    let mut fm = DVector::zeros(n);
    let mut m = vec![0.0; n];
    for (&p, &w) in rule.points.iter().zip(&rule.weights) {
        basis.eval_into(p, &mut m);
        let fw = f(p) * w;
        for a in 0..n {
            fm[a] += fw * m[a];
        }
    }
    pack.pi0_val.transpose() * fm
}
