//! Mesh validation: closure, signed volume, components, Euler
//! characteristic, degeneracy, self-intersection and slicing.

mod intersect;
mod slice;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};
use std::fmt;

pub use intersect::{self_intersect_bruteforce, triangles_intersect};
pub use slice::{slice_mesh, SliceAxisMap};

use crate::cycle::{Census, SurfaceCycle};
use crate::error::{Error, Result};
use crate::extract::is_degenerate;
use crate::mesh::{point_ids, Mesh, PointKey};
use crate::tessellate::{cycle_normal, CycleNormal, Positioner};
use crate::mesh::Resolution;

pub use crate::cycle::cycle_census;

/// Directed edge between two point keys.
pub type KeyEdge = (PointKey, PointKey);

/// Closure fragment of a [`ValidationReport`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureReport {
    /// Directed edges that occur more than once or lack exactly one
    /// antiparallel partner, sorted.
    pub unmatched: Vec<KeyEdge>,
}

impl ClosureReport {
    pub fn is_closed(&self) -> bool {
        self.unmatched.is_empty()
    }
}

/// Every directed edge must occur exactly once and so must its reverse.
/// Edges are identified by point keys, so positions cannot fake closure.
pub fn check_closed(mesh: &Mesh) -> ClosureReport {
    let (ids, _) = point_ids(mesh);
    let edge = |a: u32, b: u32| (ids[a as usize] as u64) << 32 | ids[b as usize] as u64;
    let mut counts: HashMap<u64, u32> = HashMap::with_capacity_and_hasher(mesh.triangle_count() * 3, Default::default());
    for t in &mesh.triangles {
        for i in 0..3 {
            *counts.entry(edge(t[i], t[(i + 1) % 3])).or_default() += 1;
        }
    }
    let mut bad: Vec<(u32, u32)> = counts
        .iter()
        .filter(|(&e, &n)| n != 1 || counts.get(&e.rotate_right(32)).copied() != Some(1))
        .map(|(&e, _)| ((e >> 32) as u32, e as u32))
        .collect();
    if bad.is_empty() {
        return ClosureReport { unmatched: Vec::new() };
    }
    bad.sort_unstable();
    let mut key_of = vec![None; ids.len()];
    for (p, &id) in mesh.points.iter().zip(&ids) {
        key_of[id as usize].get_or_insert(p.key);
    }
    let mut unmatched: Vec<KeyEdge> = bad
        .into_iter()
        .map(|(a, b)| (key_of[a as usize].unwrap(), key_of[b as usize].unwrap()))
        .collect();
    unmatched.sort();
    ClosureReport { unmatched }
}

fn triple_product(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) + a[1] * (b[2] * c[0] - b[0] * c[2]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn volume_of(mesh: &Mesh, triangles: impl Iterator<Item = usize>) -> f64 {
    let origin = mesh.points.first().map_or([0.0; 3], |p| p.position);
    let rel = |p: [f64; 3]| [p[0] - origin[0], p[1] - origin[1], p[2] - origin[2]];
    let s: f64 = triangles
        .map(|t| {
            let [a, b, c] = mesh.triangle_positions(t);
            triple_product(rel(a), rel(b), rel(c))
        })
        .sum();
    let [sx, sy, sz] = mesh.spacing;
    s / 6.0 / (sx * sy * sz)
}

/// Enclosed volume in voxel units, positive for outward orientation.
pub fn signed_volume(mesh: &Mesh) -> Result<f64> {
    let closure = check_closed(mesh);
    if !closure.is_closed() {
        return Err(Error::OpenMesh(closure.unmatched.len()));
    }
    Ok(volume_of(mesh, 0..mesh.triangle_count()))
}

/// Per-component statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentStats {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler: i64,
    pub signed_volume: f64,
}

/// Statistics for every component label of `mesh`.
pub fn component_stats(mesh: &Mesh) -> Vec<ComponentStats> {
    let n = mesh.component_count();
    let mut vertices: Vec<HashSet<PointKey>> = vec![HashSet::default(); n];
    let mut edges: Vec<HashSet<KeyEdge>> = vec![HashSet::default(); n];
    let mut faces: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in 0..mesh.triangle_count() {
        let c = mesh.components[t] as usize;
        let k = mesh.triangle_keys(t);
        for i in 0..3 {
            vertices[c].insert(k[i]);
            let (a, b) = (k[i], k[(i + 1) % 3]);
            edges[c].insert(if a < b { (a, b) } else { (b, a) });
        }
        faces[c].push(t);
    }
    (0..n)
        .map(|c| {
            let (v, e, f) = (vertices[c].len(), edges[c].len(), faces[c].len());
            ComponentStats {
                vertices: v,
                edges: e,
                faces: f,
                euler: v as i64 - e as i64 + f as i64,
                signed_volume: volume_of(mesh, faces[c].iter().copied()),
            }
        })
        .collect()
}

/// Number of zero-area triangles.
pub fn degenerate_count(mesh: &Mesh) -> usize {
    (0..mesh.triangle_count()).filter(|&t| is_degenerate(mesh, t)).count()
}

/// Summed area vector of every cycle; for each closed component the sum
/// over its cycles vanishes.
pub fn cycle_normals(cycles: &[SurfaceCycle], resolution: Resolution, positioner: &Positioner) -> Vec<CycleNormal> {
    cycles.iter().map(|c| cycle_normal(c, resolution, positioner)).collect()
}

/// Full validation result.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub points: usize,
    pub triangles: usize,
    pub closure: ClosureReport,
    pub components: Vec<ComponentStats>,
    pub degenerate: usize,
    pub census: Option<Census>,
    /// Intersecting non-adjacent triangle pairs, when checked.
    pub self_intersections: Option<usize>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.closure.is_closed() && self.self_intersections.unwrap_or(0) == 0
    }

    pub fn signed_volume(&self) -> f64 {
        self.components.iter().map(|c| c.signed_volume).sum()
    }
}

/// Runs every check except self-intersection, which is opt-in.
pub fn validate(mesh: &Mesh, census: Option<Census>, self_intersection: bool) -> ValidationReport {
    ValidationReport {
        points: mesh.point_count(),
        triangles: mesh.triangle_count(),
        closure: check_closed(mesh),
        components: component_stats(mesh),
        degenerate: degenerate_count(mesh),
        census,
        self_intersections: self_intersection.then(|| self_intersect_bruteforce(mesh).len()),
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "points: {}", self.points)?;
        writeln!(f, "triangles: {}", self.triangles)?;
        writeln!(f, "closed: {}", self.closure.is_closed())?;
        writeln!(f, "unmatched_edges: {}", self.closure.unmatched.len())?;
        writeln!(f, "degenerate_triangles: {}", self.degenerate)?;
        writeln!(f, "components: {}", self.components.len())?;
        for (i, c) in self.components.iter().enumerate() {
            writeln!(
                f,
                "component.{i}: V={} E={} F={} euler={} volume={}",
                c.vertices, c.edges, c.faces, c.euler, c.signed_volume
            )?;
        }
        writeln!(f, "signed_volume: {}", self.signed_volume())?;
        if let Some(census) = &self.census {
            for (n, count) in census.iter() {
                writeln!(f, "cycles.{n}: {count}")?;
            }
            writeln!(f, "cycle_sum: {}", census.total())?;
        }
        if let Some(n) = self.self_intersections {
            writeln!(f, "self_intersections: {n}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::Mode;
    use crate::extract::{extract, ExtractOptions};
    use crate::mesh::Engine;
    use crate::volume::{IsoConfig, ScalarGrid};

    fn octahedron() -> Mesh {
        let g = ScalarGrid::from_u8([1, 1, 1], &[1]).unwrap();
        let iso = IsoConfig::new(0.5).unwrap();
        extract(&g, &iso, &ExtractOptions::new(Engine::VestaCore, Mode::Disconnect, Resolution::L))
            .unwrap()
            .mesh
    }

    #[test]
    fn octahedron_is_closed_with_volume_one_sixth() {
        let m = octahedron();
        assert!(check_closed(&m).is_closed());
        assert!((signed_volume(&m).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        assert!((signed_volume(&m.reversed()).unwrap() + 1.0 / 6.0).abs() < 1e-12);
        let s = component_stats(&m);
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].vertices, s[0].edges, s[0].faces, s[0].euler), (6, 12, 8, 2));
    }

    #[test]
    fn removing_a_triangle_opens_three_edges() {
        let mut m = octahedron();
        m.triangles.pop();
        m.components.pop();
        assert_eq!(check_closed(&m).unmatched.len(), 3);
        assert!(matches!(signed_volume(&m), Err(Error::OpenMesh(3))));
    }

    #[test]
    fn vertex_pair_volume_is_additive() {
        let g = ScalarGrid::from_u8([2, 2, 2], &[1, 0, 0, 0, 0, 0, 0, 1]).unwrap();
        let iso = IsoConfig::new(0.5).unwrap();
        for mode in Mode::ALL {
            let m = extract(&g, &iso, &ExtractOptions::new(Engine::VestaCore, mode, Resolution::L)).unwrap().mesh;
            assert!((signed_volume(&m).unwrap() - 1.0 / 3.0).abs() < 1e-12);
            assert_eq!(m.component_count(), 2);
        }
    }

    #[test]
    fn spacing_does_not_change_voxel_volume() {
        let g = ScalarGrid::from_u8([1, 1, 1], &[1]).unwrap().with_spacing([0.5, 2.0, 3.0]).unwrap();
        let iso = IsoConfig::new(0.5).unwrap();
        let m = extract(&g, &iso, &ExtractOptions::new(Engine::VestaCore, Mode::Disconnect, Resolution::H)).unwrap().mesh;
        assert!((signed_volume(&m).unwrap() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn report_lines() {
        let r = validate(&octahedron(), Some(Census::from_lengths([3; 8])), true);
        let text = r.to_string();
        assert!(text.contains("closed: true\n"));
        assert!(text.contains("cycles.3: 8\n"));
        assert!(text.contains("self_intersections: 0\n"));
        assert!(r.is_valid());
    }
}
