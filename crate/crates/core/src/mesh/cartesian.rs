use super::{PolyMesh, Vertex2};
use crate::error::{Result, VemError};

/// Uniform `n x n` grid of squares on the unit square.
///
/// Vertices are numbered row by row from the bottom-left corner.
pub fn generate_cartesian(n: usize) -> Result<PolyMesh> {
    if n == 0 {
        return Err(VemError::InvalidInput("cartesian mesh needs n >= 1".into()));
    }
    let h = 1.0 / n as f64;
    let coord = |i: usize| if i == n { 1.0 } else { i as f64 * h };
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Vertex2::new(coord(i), coord(j)));
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    PolyMesh::new(vertices, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell() {
        let m = generate_cartesian(1).unwrap();
        assert_eq!(m.num_cells(), 1);
        assert_eq!(m.num_vertices(), 4);
        assert!((m.h_max() - 2f64.sqrt()).abs() < 1e-15);
        assert!(m.boundary_flags().iter().all(|&b| b));
    }

    #[test]
    fn two_by_two() {
        let m = generate_cartesian(2).unwrap();
        assert_eq!(m.num_cells(), 4);
        assert_eq!(m.num_vertices(), 9);
        assert_eq!(m.num_edges(), 12);
        assert!((m.h_max() - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(m.boundary_flags().iter().filter(|&&b| b).count(), 8);
    }

    #[test]
    fn four_by_four_partitions_the_square() {
        let m = generate_cartesian(4).unwrap();
        assert_eq!(m.num_cells(), 16);
        assert!((m.total_area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_is_rejected() {
        assert!(generate_cartesian(0).is_err());
    }
}
