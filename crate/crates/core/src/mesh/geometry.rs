use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

use crate::error::{Result, VemError};

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vertex2 {
    pub x: f64,
    pub y: f64,
}

impl Vertex2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }

    pub fn lerp(self, other: Self, t: f64) -> Self {
        Self::new(self.x + t * (other.x - self.x), self.y + t * (other.y - self.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vertex2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vertex2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vertex2 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}

/// Area, centroid and diameter of a polygon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellGeometry {
    pub area: f64,
    pub centroid: Vertex2,
    pub diameter: f64,
}

/// Signed shoelace area; positive for counter-clockwise vertex order.
pub fn signed_area(vertices: &[Vertex2]) -> f64 {
    let n = vertices.len();
    let mut twice = 0.0;
    for i in 0..n {
        twice += vertices[i].cross(vertices[(i + 1) % n]);
    }
    0.5 * twice
}

/// Shoelace area, area-weighted centroid and maximum vertex-to-vertex distance.
pub fn cell_geometry(vertices: &[Vertex2]) -> Result<CellGeometry> {
    let n = vertices.len();
    if n < 3 {
        return Err(VemError::InvalidInput(format!("polygon needs at least 3 vertices, got {n}")));
    }
    if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
        return Err(VemError::InvalidInput(format!("non-finite vertex ({}, {})", p.x, p.y)));
    }
    let g = raw_geometry(vertices);
    if g.area <= 0.0 {
        return Err(VemError::Orientation { area: g.area });
    }
    Ok(g)
}

/// Geometry without orientation checks; the area keeps its sign. Degenerate polygons get
/// the vertex mean as centroid.
pub(crate) fn raw_geometry(vertices: &[Vertex2]) -> CellGeometry {
    let n = vertices.len();
    // Shift to the first vertex so the centroid formula does not lose digits far from the origin.
    let origin = vertices[0];
    let mut twice_area = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let a = vertices[i] - origin;
        let b = vertices[(i + 1) % n] - origin;
        let c = a.cross(b);
        twice_area += c;
        cx += (a.x + b.x) * c;
        cy += (a.y + b.y) * c;
    }
    let area = 0.5 * twice_area;
    let centroid = if area != 0.0 {
        Vertex2::new(origin.x + cx / (6.0 * area), origin.y + cy / (6.0 * area))
    } else {
        let s = vertices.iter().fold(Vertex2::default(), |acc, &p| acc + p);
        s * (1.0 / n as f64)
    };
    let mut diameter: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            diameter = diameter.max(vertices[i].dist(vertices[j]));
        }
    }
    CellGeometry { area, centroid, diameter }
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: Vertex2, a: Vertex2, b: Vertex2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.lerp(b, t))
}
