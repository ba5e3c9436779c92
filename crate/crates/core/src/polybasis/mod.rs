//! Scaled monomial bases and quadrature on polygons and edges.

mod monomial;
mod quadrature;

use nalgebra::DMatrix;

use crate::error::{Result, VemError};
use crate::mesh::{CellGeometry, Vertex2};

pub use monomial::{
    scaled_monomial_eval, scaled_monomial_grad, scaled_monomial_laplacian, MonomialIndex, ScaledMonomials,
};
pub use quadrature::{
    edge_rules, gauss_legendre, gauss_lobatto, lagrange_basis, polygon_quadrature, polygon_quadrature_resolving,
    triangle_quadrature, unit_interval_rule, QuadRule,
};

/// Dimension of the bivariate polynomials of total degree at most `k`; zero for `k < 0`.
pub fn dim_poly(k: i32) -> usize {
    if k < 0 {
        0
    } else {
        let k = k as usize;
        (k + 1) * (k + 2) / 2
    }
}

/// Gram matrix `M[a][b] = \int_E m_a m_b` of the scaled monomials of degree <= `degree`.
pub fn monomial_gram(vertices: &[Vertex2], geometry: &CellGeometry, degree: usize) -> Result<DMatrix<f64>> {
    let basis = ScaledMonomials::new(geometry.centroid, geometry.diameter, degree);
    let rule = polygon_quadrature(vertices, geometry.centroid, 2 * degree)?;
    let gram = weighted_gram(&basis, &rule, |_| 1.0);
    if gram.clone().cholesky().is_none() {
        return Err(VemError::Degenerate { cell: 0, what: format!("monomial Gram matrix of degree {degree}") });
    }
    Ok(gram)
}

/// `\int w m_a m_b` over the points of `rule`.
pub fn weighted_gram(basis: &ScaledMonomials, rule: &QuadRule, weight: impl Fn(Vertex2) -> f64) -> DMatrix<f64> {
    let n = basis.len();
    let mut gram = DMatrix::zeros(n, n);
    let mut m = vec![0.0; n];
    for (&p, &w) in rule.points.iter().zip(&rule.weights) {
        basis.eval_into(p, &mut m);
        let ww = w * weight(p);
        for a in 0..n {
            let wa = ww * m[a];
            for b in a..n {
                gram[(a, b)] += wa * m[b];
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            gram[(a, b)] = gram[(b, a)];
        }
    }
    gram
}
