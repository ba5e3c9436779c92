//! Element projectors.
//!
//! All projectors are matrices acting on the local DOF vector. Polynomials are expressed
//! in the scaled monomials of the element (centroid, diameter) in graded-lex order.

use nalgebra::{DMatrix, DVector};

use super::dofs::{min_ell, DofLayout};
use super::MethodKind;
use crate::error::{Result, VemError};
use crate::mesh::{cell_geometry, CellGeometry, Vertex2};
use crate::polybasis::{
    dim_poly, edge_rules, lagrange_basis, monomial_gram, polygon_quadrature, MonomialIndex, QuadRule,
    ScaledMonomials,
};

/// Geometry and DOF layout of one polygon for a method of order `k`.
#[derive(Debug, Clone)]
pub struct VemElement {
    pub vertices: Vec<Vertex2>,
    pub geometry: CellGeometry,
    pub layout: DofLayout,
    /// Gauss–Lobatto parameters of the `k + 1` nodes of every edge, in `[0, 1]`.
    pub edge_nodes: Vec<f64>,
}

/// Quadrature on one edge, with the trace basis (Lagrange through the edge nodes) tabulated.
struct EdgeQuad {
    points: Vec<Vertex2>,
    /// Weights including the edge length.
    weights: Vec<f64>,
    /// `lagrange[q][j]`: value of the `j`-th node's Lagrange polynomial at point `q`.
    lagrange: Vec<Vec<f64>>,
    /// Outward unit normal.
    normal: Vertex2,
}

impl VemElement {
    pub fn new(vertices: Vec<Vertex2>, k: usize) -> Result<Self> {
        let geometry = cell_geometry(&vertices)?;
        let layout = DofLayout::new(k, vertices.len());
        let (edge_nodes, _) = edge_rules(k, 0);
        Ok(Self { vertices, geometry, layout, edge_nodes })
    }

    pub fn k(&self) -> usize {
        self.layout.k
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn area(&self) -> f64 {
        self.geometry.area
    }

    pub fn basis(&self, degree: usize) -> ScaledMonomials {
        ScaledMonomials::new(self.geometry.centroid, self.geometry.diameter, degree)
    }

    pub fn edge_endpoints(&self, e: usize) -> (Vertex2, Vertex2) {
        (self.vertices[e], self.vertices[(e + 1) % self.n_vertices()])
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.n_vertices()).map(|e| {
            let (a, b) = self.edge_endpoints(e);
            a.dist(b)
        }).sum()
    }

    /// Positions of the boundary DOFs (vertices, then interior edge nodes) in DOF order.
    pub fn boundary_nodes(&self) -> Vec<Vertex2> {
        let k = self.k();
        let mut nodes = self.vertices.clone();
        for e in 0..self.n_vertices() {
            let (a, b) = self.edge_endpoints(e);
            nodes.extend(self.edge_nodes[1..k].iter().map(|&t| a.lerp(b, t)));
        }
        nodes
    }

    /// Cell quadrature exact to `degree`.
    pub fn quadrature(&self, degree: usize) -> Result<QuadRule> {
        polygon_quadrature(&self.vertices, self.geometry.centroid, degree)
    }

    fn edge_quad(&self, e: usize, degree: usize) -> EdgeQuad {
        let (a, b) = self.edge_endpoints(e);
        let len = a.dist(b);
        let (_, (ts, ws)) = edge_rules(self.k(), degree);
        let d = b - a;
        EdgeQuad {
            points: ts.iter().map(|&t| a.lerp(b, t)).collect(),
            weights: ws.iter().map(|w| w * len).collect(),
            lagrange: ts.iter().map(|&t| lagrange_basis(&self.edge_nodes, t)).collect(),
            normal: Vertex2::new(d.y / len, -d.x / len),
        }
    }

    /// DOF vector of a function: nodal values on the boundary and scaled moments computed
    /// with `rule`.
    pub fn interpolate(&self, f: impl Fn(Vertex2) -> f64, rule: &QuadRule) -> DVector<f64> {
        let layout = self.layout;
        let mut dofs = DVector::zeros(layout.total());
        for (i, p) in self.boundary_nodes().into_iter().enumerate() {
            dofs[i] = f(p);
        }
        let nm = layout.n_moments();
        if nm > 0 {
            let basis = self.basis(self.k() - 2);
            let mut m = vec![0.0; nm];
            for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                basis.eval_into(p, &mut m);
                let fw = f(p) * w / self.area();
                for a in 0..nm {
                    dofs[layout.moment(a)] += fw * m[a];
                }
            }
        }
        dofs
    }

    /// DOF vector of the polynomial `sum_a coeffs[a] m_a`.
    pub fn interpolate_polynomial(&self, coeffs: &[f64]) -> Result<DVector<f64>> {
        let degree = degree_of_len(coeffs.len());
        let basis = self.basis(degree);
        let rule = self.quadrature(degree + self.k().saturating_sub(2))?;
        Ok(self.interpolate(|p| basis.combine(coeffs, p), &rule))
    }
}

fn degree_of_len(len: usize) -> usize {
    (0..).find(|&d| dim_poly(d as i32) >= len).unwrap()
}

/// Matrices realizing the elliptic projection onto `P_k`.
#[derive(Debug, Clone)]
pub struct PiNabla {
    /// `D[i][a]`: DOF `i` of monomial `m_a`.
    pub d: DMatrix<f64>,
    /// Right-hand side of the projection problem (row 0: average condition).
    pub b: DMatrix<f64>,
    /// `G = B D`.
    pub g: DMatrix<f64>,
    /// Monomial coefficients of the projection, `G^{-1} B`.
    pub pi_star: DMatrix<f64>,
    /// The projection in DOF space, `D G^{-1} B`.
    pub pi_dof: DMatrix<f64>,
}

/// Build `D`, `B`, `G` and the elliptic projector of degree `k`.
///
/// Row `a > 0` of `B` realizes `(grad v, grad m_a) = -(v, lap m_a) + (v, dm_a/dn)_{dE}`;
/// the interior term reads the moment DOFs and the boundary term integrates the edge
/// traces exactly. Row 0 is the boundary average for `k = 1` and the mean value for `k > 1`.
pub fn build_pi_nabla(elem: &VemElement, gram: &DMatrix<f64>) -> Result<PiNabla> {
    let k = elem.k();
    let layout = elem.layout;
    let nk = dim_poly(k as i32);
    let ndof = layout.total();
    let h = elem.geometry.diameter;
    let area = elem.area();
    let basis = elem.basis(k);

    let mut d = DMatrix::zeros(ndof, nk);
    for (i, p) in elem.boundary_nodes().into_iter().enumerate() {
        let m = basis.eval(p);
        for a in 0..nk {
            d[(i, a)] = m[a];
        }
    }
    for b in 0..layout.n_moments() {
        for a in 0..nk {
            d[(layout.moment(b), a)] = gram[(b, a)] / area;
        }
    }

    let mut b_mat = DMatrix::zeros(nk, ndof);
    let mut gx = vec![0.0; nk];
    let mut gy = vec![0.0; nk];
    let perimeter = elem.perimeter();
    for e in 0..elem.n_vertices() {
        let quad = elem.edge_quad(e, 2 * k);
        for (q, &p) in quad.points.iter().enumerate() {
            basis.grad_into(p, &mut gx, &mut gy);
            let w = quad.weights[q];
            for j in 0..=k {
                let dof = layout.edge_node(e, j);
                let wl = w * quad.lagrange[q][j];
                for a in 1..nk {
                    b_mat[(a, dof)] += wl * (gx[a] * quad.normal.x + gy[a] * quad.normal.y);
                }
                if k == 1 {
                    b_mat[(0, dof)] += wl / perimeter;
                }
            }
        }
    }
    if k >= 2 {
        b_mat[(0, layout.moment(0))] = 1.0;
        for (a, alpha) in MonomialIndex::up_to(k).enumerate().skip(1) {
            let (ax, ay) = (alpha.ax, alpha.ay);
            if ax >= 2 {
                let c = (ax * (ax - 1)) as f64 / (h * h);
                let beta = MonomialIndex::new(ax - 2, ay).position();
                b_mat[(a, layout.moment(beta))] -= c * area;
            }
            if ay >= 2 {
                let c = (ay * (ay - 1)) as f64 / (h * h);
                let beta = MonomialIndex::new(ax, ay - 2).position();
                b_mat[(a, layout.moment(beta))] -= c * area;
            }
        }
    }

    let g = &b_mat * &d;
    let lu = g.clone().lu();
    let pi_star = lu
        .solve(&b_mat)
        .ok_or_else(|| VemError::Degenerate { cell: 0, what: "singular projection matrix G".into() })?;
    let pi_dof = &d * &pi_star;
    Ok(PiNabla { d, b: b_mat, g, pi_star, pi_dof })
}

/// `G` computed directly: `\int grad m_a . grad m_b` for `a > 0`, and the average
/// condition applied to `m_b` in row 0.
pub fn consistency_gram_direct(elem: &VemElement) -> Result<DMatrix<f64>> {
    let k = elem.k();
    let nk = dim_poly(k as i32);
    let basis = elem.basis(k);
    let rule = elem.quadrature(2 * k)?;
    let mut g = DMatrix::zeros(nk, nk);
    let (mut gx, mut gy) = (vec![0.0; nk], vec![0.0; nk]);
    for (&p, &w) in rule.points.iter().zip(&rule.weights) {
        basis.grad_into(p, &mut gx, &mut gy);
        for a in 1..nk {
            for b in 0..nk {
                g[(a, b)] += w * (gx[a] * gx[b] + gy[a] * gy[b]);
            }
        }
        if k >= 2 {
            let m = basis.eval(p);
            for b in 0..nk {
                g[(0, b)] += w * m[b] / elem.area();
            }
        }
    }
    if k == 1 {
        let perimeter = elem.perimeter();
        for e in 0..elem.n_vertices() {
            let quad = elem.edge_quad(e, k);
            for (&p, &w) in quad.points.iter().zip(&quad.weights) {
                let m = basis.eval(p);
                for b in 0..nk {
                    g[(0, b)] += w * m[b] / perimeter;
                }
            }
        }
    }
    Ok(g)
}

/// Linear maps DOFs -> `\int_E v_h m_a` for every `|a| <= top_degree`.
///
/// Moments of degree `<= k - 2` are read from the DOFs; the remaining ones follow from the
/// enhancement conditions, `\int_E v_h m_a = \int_E (Pi^nabla_k v_h) m_a`.
pub fn recover_moments(elem: &VemElement, top_degree: usize, pi: &PiNabla, gram: &DMatrix<f64>) -> DMatrix<f64> {
    let k = elem.k();
    let layout = elem.layout;
    let n_top = dim_poly(top_degree as i32);
    let nk = dim_poly(k as i32);
    let n_low = layout.n_moments();
    let mut moments = DMatrix::zeros(n_top, layout.total());
    for a in 0..n_top.min(n_low) {
        moments[(a, layout.moment(a))] = elem.area();
    }
    if n_top > n_low {
        let block = gram.view((n_low, 0), (n_top - n_low, nk)) * &pi.pi_star;
        moments.rows_mut(n_low, n_top - n_low).copy_from(&block);
    }
    moments
}

/// L2 projection of the gradient onto `[P_degree]^2`.
///
/// Returns a `2 dim(P_degree) x ndof` matrix: the first half of the rows are the
/// x-component coefficients, the second half the y-component coefficients.
pub fn build_pi0_grad(
    elem: &VemElement,
    degree: usize,
    moments: &DMatrix<f64>,
    gram: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let k = elem.k();
    let layout = elem.layout;
    let nd = dim_poly(degree as i32);
    let ndof = layout.total();
    let h = elem.geometry.diameter;
    let basis = elem.basis(degree);
    if degree > 0 && moments.nrows() < dim_poly(degree as i32 - 1) {
        return Err(VemError::InvalidInput(format!(
            "gradient projection of degree {degree} needs moments up to degree {}",
            degree - 1
        )));
    }

    let mut rhs = DMatrix::zeros(2 * nd, ndof);
    for (a, alpha) in MonomialIndex::up_to(degree).enumerate() {
        if alpha.ax >= 1 {
            let beta = MonomialIndex::new(alpha.ax - 1, alpha.ay).position();
            let c = alpha.ax as f64 / h;
            for i in 0..ndof {
                rhs[(a, i)] -= c * moments[(beta, i)];
            }
        }
        if alpha.ay >= 1 {
            let beta = MonomialIndex::new(alpha.ax, alpha.ay - 1).position();
            let c = alpha.ay as f64 / h;
            for i in 0..ndof {
                rhs[(nd + a, i)] -= c * moments[(beta, i)];
            }
        }
    }
    let mut m = vec![0.0; nd];
    for e in 0..elem.n_vertices() {
        let quad = elem.edge_quad(e, k + degree);
        for (q, &p) in quad.points.iter().enumerate() {
            basis.eval_into(p, &mut m);
            for j in 0..=k {
                let dof = layout.edge_node(e, j);
                let wl = quad.weights[q] * quad.lagrange[q][j];
                for a in 0..nd {
                    rhs[(a, dof)] += wl * m[a] * quad.normal.x;
                    rhs[(nd + a, dof)] += wl * m[a] * quad.normal.y;
                }
            }
        }
    }

    let mass = gram.view((0, 0), (nd, nd)).clone_owned();
    let chol = mass
        .cholesky()
        .ok_or_else(|| VemError::Degenerate { cell: 0, what: format!("gradient mass matrix of degree {degree}") })?;
    let x = chol.solve(&rhs.rows(0, nd).clone_owned());
    let y = chol.solve(&rhs.rows(nd, nd).clone_owned());
    let mut out = DMatrix::zeros(2 * nd, ndof);
    out.rows_mut(0, nd).copy_from(&x);
    out.rows_mut(nd, nd).copy_from(&y);
    Ok(out)
}

/// L2 projection of values onto `P_degree`, built from recovered moments.
pub fn build_pi0_val(degree: usize, moments: &DMatrix<f64>, gram: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let nd = dim_poly(degree as i32);
    let mass = gram.view((0, 0), (nd, nd)).clone_owned();
    let chol = mass
        .cholesky()
        .ok_or_else(|| VemError::Degenerate { cell: 0, what: format!("mass matrix of degree {degree}") })?;
    Ok(chol.solve(&moments.rows(0, nd).clone_owned()))
}

/// Every projector needed to assemble one element with a given method.
#[derive(Debug, Clone)]
pub struct ProjectionPack {
    pub method: MethodKind,
    /// Enhancement enlargement (`0` for the standard method).
    pub ell: usize,
    /// Degree of the gradient projection: `k - 1` (standard) or `k + ell - 1`.
    pub grad_degree: usize,
    pub pi_nabla: PiNabla,
    /// Monomial Gram matrix of degree `max(k, k + ell)`.
    pub gram: DMatrix<f64>,
    /// Recovered moments up to degree `k + ell`.
    pub moments: DMatrix<f64>,
    pub pi0_grad: DMatrix<f64>,
    /// L2 projection onto `P_{k-1}`.
    pub pi0_val: DMatrix<f64>,
}

impl ProjectionPack {
    /// Projections with the minimal admissible enlargement.
    pub fn build(elem: &VemElement, method: MethodKind) -> Result<Self> {
        let ell = match method {
            MethodKind::StandardVem => 0,
            MethodKind::E2vem => min_ell(elem.k(), elem.n_vertices()),
        };
        Self::build_with_ell(elem, method, ell)
    }

    /// Projections with a given enlargement (ignored by the standard method).
    pub fn build_with_ell(elem: &VemElement, method: MethodKind, ell: usize) -> Result<Self> {
        let k = elem.k();
        let ell = if method == MethodKind::StandardVem { 0 } else { ell };
        let top = k + ell;
        let gram = monomial_gram(&elem.vertices, &elem.geometry, top)?;
        let pi_nabla = build_pi_nabla(elem, &gram)?;
        let moments = recover_moments(elem, top, &pi_nabla, &gram);
        let grad_degree = top - 1;
        let pi0_grad = build_pi0_grad(elem, grad_degree, &moments, &gram)?;
        let pi0_val = build_pi0_val(k - 1, &moments, &gram)?;
        Ok(Self { method, ell, grad_degree, pi_nabla, gram, moments, pi0_grad, pi0_val })
    }

    pub fn pi_star(&self) -> &DMatrix<f64> {
        &self.pi_nabla.pi_star
    }
}
