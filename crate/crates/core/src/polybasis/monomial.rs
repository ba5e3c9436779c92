use crate::mesh::Vertex2;

/// Exponents of a monomial `x^ax y^ay`.
///
/// Monomials are enumerated in graded-lexicographic order: by total degree, then by
/// decreasing power of `x`, i.e. `1, x, y, x^2, xy, y^2, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MonomialIndex {
    pub ax: usize,
    pub ay: usize,
}

impl MonomialIndex {
    pub const fn new(ax: usize, ay: usize) -> Self {
        Self { ax, ay }
    }

    pub const fn degree(self) -> usize {
        self.ax + self.ay
    }

    /// Position in the graded-lexicographic enumeration.
    pub const fn position(self) -> usize {
        let d = self.degree();
        d * (d + 1) / 2 + self.ay
    }

    pub fn from_position(pos: usize) -> Self {
        let mut d = 0;
        while (d + 1) * (d + 2) / 2 <= pos {
            d += 1;
        }
        let ay = pos - d * (d + 1) / 2;
        Self { ax: d - ay, ay }
    }

    /// All monomials of degree at most `degree`, in enumeration order.
    pub fn up_to(degree: usize) -> impl Iterator<Item = MonomialIndex> {
        (0..=degree).flat_map(|d| (0..=d).map(move |ay| MonomialIndex { ax: d - ay, ay }))
    }
}

/// `((p - x_E) / h_E)^alpha`.
pub fn scaled_monomial_eval(alpha: MonomialIndex, center: Vertex2, h: f64, p: Vertex2) -> f64 {
    let xi = (p.x - center.x) / h;
    let eta = (p.y - center.y) / h;
    xi.powi(alpha.ax as i32) * eta.powi(alpha.ay as i32)
}

pub fn scaled_monomial_grad(alpha: MonomialIndex, center: Vertex2, h: f64, p: Vertex2) -> [f64; 2] {
    let xi = (p.x - center.x) / h;
    let eta = (p.y - center.y) / h;
    let (ax, ay) = (alpha.ax as i32, alpha.ay as i32);
    let dx = if ax == 0 { 0.0 } else { ax as f64 / h * xi.powi(ax - 1) * eta.powi(ay) };
    let dy = if ay == 0 { 0.0 } else { ay as f64 / h * xi.powi(ax) * eta.powi(ay - 1) };
    [dx, dy]
}

pub fn scaled_monomial_laplacian(alpha: MonomialIndex, center: Vertex2, h: f64, p: Vertex2) -> f64 {
    let xi = (p.x - center.x) / h;
    let eta = (p.y - center.y) / h;
    let (ax, ay) = (alpha.ax as i32, alpha.ay as i32);
    let mut lap = 0.0;
    if ax >= 2 {
        lap += (ax * (ax - 1)) as f64 * xi.powi(ax - 2) * eta.powi(ay);
    }
    if ay >= 2 {
        lap += (ay * (ay - 1)) as f64 * xi.powi(ax) * eta.powi(ay - 2);
    }
    lap / (h * h)
}

/// All scaled monomials of degree at most `degree` on one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMonomials {
    pub center: Vertex2,
    pub h: f64,
    pub degree: usize,
}

impl ScaledMonomials {
    pub fn new(center: Vertex2, h: f64, degree: usize) -> Self {
        Self { center, h, degree }
    }

    pub fn len(&self) -> usize {
        (self.degree + 1) * (self.degree + 2) / 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn powers(&self, p: Vertex2) -> ([f64; 16], [f64; 16]) {
        assert!(self.degree < 16, "monomial degree {} too large", self.degree);
        let xi = (p.x - self.center.x) / self.h;
        let eta = (p.y - self.center.y) / self.h;
        let mut px = [1.0; 16];
        let mut py = [1.0; 16];
        for i in 1..=self.degree {
            px[i] = px[i - 1] * xi;
            py[i] = py[i - 1] * eta;
        }
        (px, py)
    }

    pub fn eval_into(&self, p: Vertex2, out: &mut [f64]) {
        let (px, py) = self.powers(p);
        let mut i = 0;
        for d in 0..=self.degree {
            for ay in 0..=d {
                out[i] = px[d - ay] * py[ay];
                i += 1;
            }
        }
    }

    pub fn eval(&self, p: Vertex2) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(p, &mut out);
        out
    }

    /// Gradients of every monomial, x- and y-components in separate slices.
    pub fn grad_into(&self, p: Vertex2, gx: &mut [f64], gy: &mut [f64]) {
        let (px, py) = self.powers(p);
        let inv_h = 1.0 / self.h;
        let mut i = 0;
        for d in 0..=self.degree {
            for ay in 0..=d {
                let ax = d - ay;
                gx[i] = if ax == 0 { 0.0 } else { ax as f64 * inv_h * px[ax - 1] * py[ay] };
                gy[i] = if ay == 0 { 0.0 } else { ay as f64 * inv_h * px[ax] * py[ay - 1] };
                i += 1;
            }
        }
    }

    /// Value of the polynomial with coefficients `coeffs` (in this basis) at `p`.
    pub fn combine(&self, coeffs: &[f64], p: Vertex2) -> f64 {
        let m = self.eval(p);
        coeffs.iter().zip(&m).map(|(c, v)| c * v).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const C: Vertex2 = Vertex2::new(0.3, -0.2);
    const H: f64 = 0.7;

    #[test]
    fn enumeration_is_graded_lex() {
        let all: Vec<_> = MonomialIndex::up_to(2).map(|m| (m.ax, m.ay)).collect();
        assert_eq!(all, vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
        for (i, m) in MonomialIndex::up_to(6).enumerate() {
            assert_eq!(m.position(), i);
            assert_eq!(MonomialIndex::from_position(i), m);
        }
    }

    #[test]
    fn named_values() {
        let p = Vertex2::new(0.9, 0.4);
        assert_eq!(scaled_monomial_eval(MonomialIndex::new(0, 0), C, H, p), 1.0);
        assert_eq!(scaled_monomial_eval(MonomialIndex::new(1, 0), C, H, C), 0.0);
        let q = Vertex2::new(C.x + H, C.y);
        assert!((scaled_monomial_eval(MonomialIndex::new(1, 0), C, H, q) - 1.0).abs() < 1e-15);
        assert_eq!(scaled_monomial_grad(MonomialIndex::new(0, 0), C, H, p), [0.0, 0.0]);
        let g = scaled_monomial_grad(MonomialIndex::new(1, 0), C, H, p);
        assert!((g[0] - 1.0 / H).abs() < 1e-15 && g[1] == 0.0);
        assert!((scaled_monomial_laplacian(MonomialIndex::new(2, 0), C, H, p) - 2.0 / (H * H)).abs() < 1e-13);
    }

    #[test]
    fn batch_matches_single() {
        let b = ScaledMonomials::new(C, H, 4);
        let p = Vertex2::new(-0.1, 0.55);
        let vals = b.eval(p);
        let mut gx = vec![0.0; b.len()];
        let mut gy = vec![0.0; b.len()];
        b.grad_into(p, &mut gx, &mut gy);
        for (i, m) in MonomialIndex::up_to(4).enumerate() {
            assert!((vals[i] - scaled_monomial_eval(m, C, H, p)).abs() < 1e-15);
            let g = scaled_monomial_grad(m, C, H, p);
            assert!((gx[i] - g[0]).abs() < 1e-14 && (gy[i] - g[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = Vertex2::new(0.41, 0.13);
        let step = 1e-6;
        for m in MonomialIndex::up_to(4) {
            let g = scaled_monomial_grad(m, C, H, p);
            let fx = (scaled_monomial_eval(m, C, H, Vertex2::new(p.x + step, p.y))
                - scaled_monomial_eval(m, C, H, Vertex2::new(p.x - step, p.y)))
                / (2.0 * step);
            let fy = (scaled_monomial_eval(m, C, H, Vertex2::new(p.x, p.y + step))
                - scaled_monomial_eval(m, C, H, Vertex2::new(p.x, p.y - step)))
                / (2.0 * step);
            assert!((g[0] - fx).abs() < 1e-8 && (g[1] - fy).abs() < 1e-8, "{m:?}");
        }
    }

    proptest! {
        #[test]
        fn scale_invariance(s in 0.01f64..100.0, px in -1.0f64..1.0, py in -1.0f64..1.0, pos in 0usize..21) {
            let m = MonomialIndex::from_position(pos);
            let p = Vertex2::new(px, py);
            let a = scaled_monomial_eval(m, C, H, p);
            let b = scaled_monomial_eval(m, C * s, H * s, p * s);
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}
