use crate::polybasis::dim_poly;

/// Number of local degrees of freedom: `k N_E + k(k-1)/2`.
pub fn dof_count(k: usize, n_vertices: usize) -> usize {
    k * n_vertices + k * (k - 1) / 2
}

/// Smallest `ell >= 0` with `(k + ell)(k + ell + 1) >= k N_E + k(k + 1) - 3`.
pub fn min_ell(k: usize, n_vertices: usize) -> usize {
    let rhs = (k * n_vertices + k * (k + 1)).saturating_sub(3);
    let mut ell = 0;
    while (k + ell) * (k + ell + 1) < rhs {
        ell += 1;
    }
    ell
}

/// Ordering of the local degrees of freedom of a degree-`k` element.
///
/// Vertex values come first (counter-clockwise), then the `k - 1` interior Gauss–Lobatto
/// values of each edge (edges counter-clockwise, nodes in the edge's local direction),
/// then the scaled moments `|E|^{-1} \int_E v m_a` for `|a| <= k - 2` in graded-lex order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofLayout {
    pub k: usize,
    pub n_vertices: usize,
}

impl DofLayout {
    pub fn new(k: usize, n_vertices: usize) -> Self {
        assert!(k >= 1, "order must be at least 1");
        Self { k, n_vertices }
    }

    pub fn vertex(&self, i: usize) -> usize {
        i
    }

    /// Interior node `j` (0-based, `j < k - 1`) of local edge `e`.
    pub fn edge(&self, e: usize, j: usize) -> usize {
        self.n_vertices + e * (self.k - 1) + j
    }

    pub fn moment(&self, a: usize) -> usize {
        self.n_boundary() + a
    }

    /// Node `j` in `0..=k` along local edge `e`, endpoints included.
    pub fn edge_node(&self, e: usize, j: usize) -> usize {
        if j == 0 {
            self.vertex(e)
        } else if j == self.k {
            self.vertex((e + 1) % self.n_vertices)
        } else {
            self.edge(e, j - 1)
        }
    }

    pub fn n_boundary(&self) -> usize {
        self.k * self.n_vertices
    }

    pub fn n_moments(&self) -> usize {
        dim_poly(self.k as i32 - 2)
    }

    pub fn total(&self) -> usize {
        self.n_boundary() + self.n_moments()
    }
}
