//! Gauss rules on intervals, triangles and star-shaped polygons.
//!
//! Triangles use a collapsed (Duffy) tensor product of Gauss–Legendre rules, which is
//! exact for every polynomial of the requested total degree. Polygons are fanned into
//! triangles from their centroid.

use std::sync::OnceLock;

use crate::error::{Result, VemError};
use crate::mesh::Vertex2;

const MAX_POINTS: usize = 64;
const MAX_DEGREE: usize = 2 * MAX_POINTS - 3;

/// Quadrature points and weights on some domain.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuadRule {
    pub points: Vec<Vertex2>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Vertex2) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    // Returns (P_n(x), P_{n-1}(x)).
    let (mut p_prev, mut p) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n {
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, pm1) = legendre(n, x);
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (p, pm1) = legendre(n, x);
        dp = if x * x != 1.0 { nf * (x * p - pm1) / (x * x - 1.0) } else { dp };
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn compute_gauss_lobatto(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "Gauss-Lobatto needs at least two points");
    let m = n - 1; // interior nodes are the roots of P'_m
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mf = m as f64;
    let wscale = 2.0 / (n as f64 * mf);
    nodes[0] = -1.0;
    nodes[m] = 1.0;
    weights[0] = wscale;
    weights[m] = wscale;
    for i in 1..m {
        let mut x = -(std::f64::consts::PI * i as f64 / mf).cos();
        for _ in 0..100 {
            let (p, pm1) = legendre(m, x);
            let dp = mf * (x * p - pm1) / (x * x - 1.0);
            let d2p = (2.0 * x * dp - mf * (mf + 1.0) * p) / (1.0 - x * x);
            let dx = dp / d2p;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (p, _) = legendre(m, x);
        nodes[i] = x;
        weights[i] = wscale / (p * p);
    }
    (nodes, weights)
}

macro_rules! cached {
    ($name:ident, $compute:ident) => {
        fn $name(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
            static CACHE: [OnceLock<(Vec<f64>, Vec<f64>)>; MAX_POINTS + 1] = [const { OnceLock::new() }; MAX_POINTS + 1];
            assert!(n <= MAX_POINTS, "at most {MAX_POINTS} points supported, asked for {n}");
            CACHE[n].get_or_init(|| $compute(n))
        }
    };
}

cached!(cached_legendre, compute_gauss_legendre);
cached!(cached_lobatto, compute_gauss_lobatto);

/// `n`-point Gauss–Legendre rule on `[-1, 1]`, exact to degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (&'static [f64], &'static [f64]) {
    let (x, w) = cached_legendre(n);
    (x, w)
}

/// `n`-point Gauss–Lobatto rule on `[-1, 1]` (endpoints included), exact to degree `2n - 3`.
pub fn gauss_lobatto(n: usize) -> (&'static [f64], &'static [f64]) {
    let (x, w) = cached_lobatto(n);
    (x, w)
}

/// Gauss–Legendre rule on `[0, 1]` exact to `degree`: (parameters, weights summing to 1).
pub fn unit_interval_rule(degree: usize) -> (Vec<f64>, Vec<f64>) {
    let n = degree / 2 + 1;
    let (x, w) = gauss_legendre(n);
    (x.iter().map(|t| 0.5 * (t + 1.0)).collect(), w.iter().map(|w| 0.5 * w).collect())
}

/// Degree-`k` edge data: the `k + 1` Gauss–Lobatto parameters on `[0, 1]` (the edge nodes)
/// and a Gauss–Legendre rule on `[0, 1]` exact to `d_max`.
pub fn edge_rules(k: usize, d_max: usize) -> (Vec<f64>, (Vec<f64>, Vec<f64>)) {
    assert!(k >= 1);
    let (x, _) = gauss_lobatto(k + 1);
    let mut nodes: Vec<f64> = x.iter().map(|t| 0.5 * (t + 1.0)).collect();
    nodes[0] = 0.0;
    nodes[k] = 1.0;
    if k.is_multiple_of(2) {
        nodes[k / 2] = 0.5;
    }
    (nodes, unit_interval_rule(d_max))
}

/// Values at `t` of the Lagrange polynomials through `nodes`.
pub fn lagrange_basis(nodes: &[f64], t: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|j| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != j)
                .map(|(_, &tm)| (t - tm) / (nodes[j] - tm))
                .product()
        })
        .collect()
}

/// Collapsed rule on the reference triangle (0,0), (1,0), (0,1): (r, s, weight).
fn reference_triangle(degree: usize) -> &'static [(f64, f64, f64)] {
    static CACHE: [OnceLock<Vec<(f64, f64, f64)>>; MAX_DEGREE + 1] = [const { OnceLock::new() }; MAX_DEGREE + 1];
    assert!(degree <= MAX_DEGREE, "triangle rule of degree {degree} not supported");
    CACHE[degree].get_or_init(|| {
        // r^a s^b dr ds = u^a (1-u)^(b+1) v^b du dv with r = u, s = (1-u) v.
        let nu = degree / 2 + 1 + usize::from(degree % 2 == 1);
        let nv = degree / 2 + 1;
        let (xu, wu) = gauss_legendre(nu);
        let (xv, wv) = gauss_legendre(nv);
        let mut pts = Vec::with_capacity(nu * nv);
        for (&a, &wa) in xu.iter().zip(wu) {
            let u = 0.5 * (a + 1.0);
            for (&b, &wb) in xv.iter().zip(wv) {
                let v = 0.5 * (b + 1.0);
                pts.push((u, (1.0 - u) * v, 0.25 * wa * wb * (1.0 - u)));
            }
        }
        pts
    })
}

fn push_triangle(rule: &mut QuadRule, a: Vertex2, b: Vertex2, c: Vertex2, degree: usize) {
    let twice_area = (b - a).cross(c - a);
    for &(r, s, w) in reference_triangle(degree) {
        rule.points.push(Vertex2::new(
            a.x + r * (b.x - a.x) + s * (c.x - a.x),
            a.y + r * (b.y - a.y) + s * (c.y - a.y),
        ));
        rule.weights.push(w * twice_area);
    }
}

fn push_subdivided(rule: &mut QuadRule, a: Vertex2, b: Vertex2, c: Vertex2, degree: usize, level: usize) {
    if level == 0 {
        push_triangle(rule, a, b, c, degree);
        return;
    }
    let ab = a.lerp(b, 0.5);
    let bc = b.lerp(c, 0.5);
    let ca = c.lerp(a, 0.5);
    push_subdivided(rule, a, ab, ca, degree, level - 1);
    push_subdivided(rule, ab, b, bc, degree, level - 1);
    push_subdivided(rule, ca, bc, c, degree, level - 1);
    push_subdivided(rule, ab, bc, ca, degree, level - 1);
}

/// Rule on the triangle `(a, b, c)` exact for polynomials of total degree `degree`.
pub fn triangle_quadrature(a: Vertex2, b: Vertex2, c: Vertex2, degree: usize) -> QuadRule {
    let mut rule = QuadRule { exactness_degree: degree, ..Default::default() };
    push_triangle(&mut rule, a, b, c, degree);
    rule
}

/// Fan the polygon from `center` and apply a degree-`degree` rule on every sub-triangle.
pub fn polygon_quadrature(vertices: &[Vertex2], center: Vertex2, degree: usize) -> Result<QuadRule> {
    polygon_quadrature_resolving(vertices, center, degree, None, 0)
}

/// Like [`polygon_quadrature`], but each fan triangle is split uniformly until its x- and
/// y-extents are at most half of the given wavelengths, or `max_level` splits were made.
pub fn polygon_quadrature_resolving(
    vertices: &[Vertex2],
    center: Vertex2,
    degree: usize,
    wavelength: Option<[f64; 2]>,
    max_level: usize,
) -> Result<QuadRule> {
    let n = vertices.len();
    let mut rule = QuadRule { exactness_degree: degree, ..Default::default() };
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        if (a - center).cross(b - center) <= 0.0 {
            return Err(VemError::NotStarShaped { cell: 0, triangle: i });
        }
        let level = match wavelength {
            None => 0,
            Some([wx, wy]) => {
                let ext = |f: fn(Vertex2) -> f64| {
                    let v = [f(a), f(b), f(center)];
                    v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min)
                };
                let mut level = 0;
                let (mut ex, mut ey) = (ext(|p| p.x), ext(|p| p.y));
                while level < max_level && (ex > 0.5 * wx || ey > 0.5 * wy) {
                    ex *= 0.5;
                    ey *= 0.5;
                    level += 1;
                }
                level
            }
        };
        push_subdivided(&mut rule, center, a, b, degree, level);
    }
    Ok(rule)
}
