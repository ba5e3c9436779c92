//! Lloyd-relaxed centroidal Voronoi tessellations of the unit square.
//!
//! Each Voronoi region is computed independently by clipping the unit square against
//! the perpendicular bisectors of nearby seeds. Seeds are bucketed on a uniform grid and
//! visited ring by ring, stopping once the next ring is farther than twice the current
//! cell radius. Initial seeds are drawn from `ChaCha8Rng::seed_from_u64(rng_seed)`, two
//! uniform `f64` per seed (x then y), so meshes are reproducible across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;

use super::{signed_area, validate_mesh, PolyMesh, Vertex2};
use crate::error::{Result, VemError};

/// Vertices closer than this are considered the same when stitching cells together.
pub const DEDUP_TOL: f64 = 1e-12;

/// Seeds closer than this make the bisector ill-defined and are pulled apart.
const COINCIDENT_TOL: f64 = 1e-10;

const MAX_REGENERATIONS: usize = 8;

/// Diagnostics collected while generating a Voronoi mesh.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VoronoiLog {
    pub regenerations: usize,
    pub messages: Vec<String>,
}

pub fn generate_voronoi(n_cells: usize, rng_seed: u64, lloyd_iters: usize) -> Result<PolyMesh> {
    generate_voronoi_with_log(n_cells, rng_seed, lloyd_iters).map(|(mesh, _)| mesh)
}

pub fn generate_voronoi_with_log(
    n_cells: usize,
    rng_seed: u64,
    lloyd_iters: usize,
) -> Result<(PolyMesh, VoronoiLog)> {
    if n_cells == 0 {
        return Err(VemError::InvalidInput("voronoi mesh needs n_cells >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut seeds: Vec<Vertex2> =
        (0..n_cells).map(|_| Vertex2::new(rng.random::<f64>(), rng.random::<f64>())).collect();
    let mut log = VoronoiLog::default();

    separate_coincident(&mut seeds, &mut rng, &mut log);
    let mut cells = voronoi_cells(&seeds);
    for _ in 0..lloyd_iters {
        for (s, cell) in seeds.iter_mut().zip(&cells) {
            *s = polygon_centroid(cell);
        }
        separate_coincident(&mut seeds, &mut rng, &mut log);
        cells = voronoi_cells(&seeds);
    }

    let spacing = 1.0 / (n_cells as f64).sqrt();
    for attempt in 0..=MAX_REGENERATIONS {
        match stitch(&cells) {
            Ok(mesh) => return Ok((mesh, log)),
            Err(reason) if attempt < MAX_REGENERATIONS => {
                log.regenerations += 1;
                log.messages.push(format!("degenerate diagram ({reason}); perturbing seeds"));
                let amp = 1e-7 * spacing;
                for s in seeds.iter_mut() {
                    let dx = amp * (2.0 * rng.random::<f64>() - 1.0);
                    let dy = amp * (2.0 * rng.random::<f64>() - 1.0);
                    s.x = (s.x + dx).clamp(0.0, 1.0);
                    s.y = (s.y + dy).clamp(0.0, 1.0);
                }
                separate_coincident(&mut seeds, &mut rng, &mut log);
                cells = voronoi_cells(&seeds);
            }
            Err(reason) => {
                return Err(VemError::InvalidInput(format!(
                    "voronoi mesh still degenerate after {MAX_REGENERATIONS} regenerations: {reason}"
                )))
            }
        }
    }
    unreachable!()
}

fn polygon_centroid(poly: &[Vertex2]) -> Vertex2 {
    let o = poly[0];
    let (mut a2, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..poly.len() {
        let p = poly[i] - o;
        let q = poly[(i + 1) % poly.len()] - o;
        let c = p.cross(q);
        a2 += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    Vertex2::new(o.x + cx / (3.0 * a2), o.y + cy / (3.0 * a2))
}

fn separate_coincident(seeds: &mut [Vertex2], rng: &mut ChaCha8Rng, log: &mut VoronoiLog) {
    let mut order: Vec<usize> = (0..seeds.len()).collect();
    order.sort_by(|&a, &b| seeds[a].x.total_cmp(&seeds[b].x).then(seeds[a].y.total_cmp(&seeds[b].y)));
    let mut moved = 0;
    for w in 0..order.len() {
        let i = order[w];
        for &j in &order[w + 1..] {
            if seeds[j].x - seeds[i].x > COINCIDENT_TOL {
                break;
            }
            if seeds[i].dist(seeds[j]) <= COINCIDENT_TOL {
                let amp = 1e-3 / (seeds.len() as f64).sqrt();
                let p = &mut seeds[j];
                p.x = (p.x + amp * (2.0 * rng.random::<f64>() - 1.0)).clamp(0.0, 1.0);
                p.y = (p.y + amp * (2.0 * rng.random::<f64>() - 1.0)).clamp(0.0, 1.0);
                moved += 1;
            }
        }
    }
    if moved > 0 {
        log.regenerations += 1;
        log.messages.push(format!("{moved} coincident seed(s) perturbed"));
    }
}

struct SeedGrid {
    side: usize,
    buckets: Vec<Vec<usize>>,
}

impl SeedGrid {
    fn new(seeds: &[Vertex2]) -> Self {
        let side = ((seeds.len() as f64).sqrt().ceil() as usize).max(1);
        let mut buckets = vec![Vec::new(); side * side];
        for (i, &s) in seeds.iter().enumerate() {
            let (bx, by) = Self::locate(side, s);
            buckets[by * side + bx].push(i);
        }
        Self { side, buckets }
    }

    fn locate(side: usize, p: Vertex2) -> (usize, usize) {
        let f = |t: f64| ((t * side as f64) as usize).min(side - 1);
        (f(p.x), f(p.y))
    }

    fn cell_size(&self) -> f64 {
        1.0 / self.side as f64
    }
}

fn voronoi_cells(seeds: &[Vertex2]) -> Vec<Vec<Vertex2>> {
    let grid = SeedGrid::new(seeds);
    (0..seeds.len()).into_par_iter().map(|i| voronoi_cell(i, seeds, &grid)).collect()
}

fn voronoi_cell(i: usize, seeds: &[Vertex2], grid: &SeedGrid) -> Vec<Vertex2> {
    let s = seeds[i];
    let mut poly = vec![
        Vertex2::new(0.0, 0.0),
        Vertex2::new(1.0, 0.0),
        Vertex2::new(1.0, 1.0),
        Vertex2::new(0.0, 1.0),
    ];
    let side = grid.side as isize;
    let (bx, by) = SeedGrid::locate(grid.side, s);
    let (bx, by) = (bx as isize, by as isize);
    for r in 0..=side {
        for jy in (by - r)..=(by + r) {
            for jx in (bx - r)..=(bx + r) {
                if (jx - bx).abs().max((jy - by).abs()) != r {
                    continue;
                }
                if jx < 0 || jy < 0 || jx >= side || jy >= side {
                    continue;
                }
                for &j in &grid.buckets[(jy * side + jx) as usize] {
                    if j != i {
                        poly = clip_by_bisector(&poly, s, seeds[j]);
                    }
                }
            }
        }
        let radius = poly.iter().map(|p| p.dist(s)).fold(0.0, f64::max);
        if r as f64 * grid.cell_size() >= 2.0 * radius {
            break;
        }
    }
    poly
}

/// Keep the part of `poly` closer to `s` than to `t`.
fn clip_by_bisector(poly: &[Vertex2], s: Vertex2, t: Vertex2) -> Vec<Vertex2> {
    let normal = t - s;
    let mid = (s + t) * 0.5;
    let eps = 1e-14 * normal.norm();
    let d: Vec<f64> = poly.iter().map(|&p| (p - mid).dot(normal)).collect();
    if d.iter().all(|&v| v <= eps) {
        return poly.to_vec();
    }
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for a in 0..n {
        let b = (a + 1) % n;
        if d[a] <= eps {
            out.push(poly[a]);
        }
        if (d[a] < -eps && d[b] > eps) || (d[a] > eps && d[b] < -eps) {
            out.push(poly[a].lerp(poly[b], d[a] / (d[a] - d[b])));
        }
    }
    out
}

/// Merge per-cell polygons into one conforming mesh.
fn stitch(cells: &[Vec<Vertex2>]) -> std::result::Result<PolyMesh, String> {
    const BUCKET: f64 = 1e-9;
    let key = |p: Vertex2| ((p.x / BUCKET).floor() as i64, (p.y / BUCKET).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut vertices: Vec<Vertex2> = Vec::new();
    let mut out_cells = Vec::with_capacity(cells.len());
    for (c, poly) in cells.iter().enumerate() {
        if poly.len() < 3 || signed_area(poly) <= 0.0 {
            return Err(format!("cell {c} collapsed"));
        }
        let mut ids: Vec<usize> = Vec::with_capacity(poly.len());
        for &p in poly {
            let (kx, ky) = key(p);
            let mut found = None;
            'search: for dy in -1..=1 {
                for dx in -1..=1 {
                    if let Some(list) = buckets.get(&(kx + dx, ky + dy)) {
                        if let Some(&v) = list.iter().find(|&&v| vertices[v].dist(p) <= DEDUP_TOL) {
                            found = Some(v);
                            break 'search;
                        }
                    }
                }
            }
            let id = found.unwrap_or_else(|| {
                vertices.push(p);
                buckets.entry((kx, ky)).or_default().push(vertices.len() - 1);
                vertices.len() - 1
            });
            if ids.last() != Some(&id) {
                ids.push(id);
            }
        }
        while ids.len() > 1 && ids.first() == ids.last() {
            ids.pop();
        }
        if ids.len() < 3 {
            return Err(format!("cell {c} lost vertices while stitching"));
        }
        out_cells.push(ids);
    }
    let mesh = PolyMesh::new(vertices, out_cells).map_err(|e| e.to_string())?;
    let report = validate_mesh(&mesh);
    match report.violations.first() {
        None => Ok(mesh),
        Some(v) => Err(v.to_string()),
    }
}
