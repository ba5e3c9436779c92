//! Plain-text mesh format.
//!
//! ```text
//! polymesh 1
//! <nv> <nc>
//! x y                 (nv lines)
//! m i_0 ... i_{m-1}   (nc lines, counter-clockwise, 0-based)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Coordinates are written with 17
//! significant digits so a write/read cycle reproduces the mesh exactly.

use std::io::{BufRead, Write};

use super::{validate_mesh, PolyMesh, Vertex2, Violation};
use crate::error::{Result, VemError};

pub const HEADER: &str = "polymesh 1";

pub fn write_mesh<W: Write>(mesh: &PolyMesh, mut out: W) -> Result<()> {
    writeln!(out, "{HEADER}")?;
    writeln!(out, "{} {}", mesh.num_vertices(), mesh.num_cells())?;
    for p in mesh.vertices() {
        writeln!(out, "{:.16e} {:.16e}", p.x, p.y)?;
    }
    for cell in mesh.cells() {
        write!(out, "{}", cell.vertex_ids.len())?;
        for v in &cell.vertex_ids {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_mesh_string(mesh: &PolyMesh) -> String {
    let mut buf = Vec::new();
    write_mesh(mesh, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Parse and validate a mesh. Errors name the offending line (1-based).
pub fn read_mesh<R: BufRead>(input: R) -> Result<PolyMesh> {
    let mut lines = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        lines.push((i + 1, t.to_string()));
    }
    let mut it = lines.into_iter();
    let eof = |what: &str| VemError::Parse { line: 0, message: format!("unexpected end of file, expected {what}") };

    let (ln, header) = it.next().ok_or_else(|| eof("header"))?;
    if header.split_whitespace().collect::<Vec<_>>() != ["polymesh", "1"] {
        return Err(VemError::Parse { line: ln, message: format!("expected '{HEADER}', found '{header}'") });
    }

    let (ln, counts) = it.next().ok_or_else(|| eof("vertex and cell counts"))?;
    let counts: Vec<usize> = parse_fields(ln, &counts)?;
    let [nv, nc] = counts[..] else {
        return Err(VemError::Parse { line: ln, message: "expected '<nv> <nc>'".into() });
    };

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = it.next().ok_or_else(|| eof("vertex coordinates"))?;
        let xy: Vec<f64> = parse_fields(ln, &l)?;
        match xy[..] {
            [x, y] if x.is_finite() && y.is_finite() => vertices.push(Vertex2::new(x, y)),
            _ => return Err(VemError::Parse { line: ln, message: "expected two finite coordinates".into() }),
        }
    }

    let mut cells = Vec::with_capacity(nc);
    let mut cell_lines = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (ln, l) = it.next().ok_or_else(|| eof("cell connectivity"))?;
        let ids: Vec<usize> = parse_fields(ln, &l)?;
        let Some((&m, rest)) = ids.split_first() else {
            return Err(VemError::Parse { line: ln, message: "empty cell line".into() });
        };
        if m < 3 || rest.len() != m {
            return Err(VemError::Parse {
                line: ln,
                message: format!("cell declares {m} vertices but lists {} (need >= 3)", rest.len()),
            });
        }
        if let Some(&bad) = rest.iter().find(|&&v| v >= nv) {
            return Err(VemError::Parse { line: ln, message: format!("vertex index {bad} out of range (nv = {nv})") });
        }
        cells.push(rest.to_vec());
        cell_lines.push(ln);
    }
    if let Some((ln, _)) = it.next() {
        return Err(VemError::Parse { line: ln, message: "trailing data after the last cell".into() });
    }

    let mesh = PolyMesh::new(vertices, cells)?;
    let report = validate_mesh(&mesh);
    for v in &report.violations {
        let line = match v {
            Violation::Orientation { cell, .. } | Violation::RepeatedVertex { cell, .. } => cell_lines[*cell],
            Violation::Hanging { cell, .. } => cell_lines[*cell],
            Violation::SameOrientation { cells, .. } => cell_lines[cells[1]],
            Violation::OverusedEdge { cells, .. } => cell_lines[cells[2]],
            _ => continue,
        };
        let message = match v {
            Violation::Orientation { .. } => format!("cell is not counter-clockwise ({v})"),
            _ => v.to_string(),
        };
        return Err(VemError::Parse { line, message });
    }
    if let Some(v) = report.violations.first() {
        return Err(VemError::InvalidInput(v.to_string()));
    }
    Ok(mesh)
}

fn parse_fields<T: std::str::FromStr>(line: usize, text: &str) -> Result<Vec<T>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<T>()
                .map_err(|_| VemError::Parse { line, message: format!("cannot parse '{tok}'") })
        })
        .collect()
}
