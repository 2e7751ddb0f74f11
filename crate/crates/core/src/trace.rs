//! Whole-volume cycle tracing.
//!
//! Every boundary face is split into four quadrant paths
//! `juncture -> face center -> juncture`. Paths are linked at junctures
//! (voxel-edge midpoints); a juncture shared by four boundary faces is a
//! point of ambiguity and its successors follow the [`PoaResolver`].
//! Dropping the junctures from each closed chain leaves a surface cycle.

use rustc_hash::FxHashMap as HashMap;

use petgraph::unionfind::UnionFind;

use crate::cycle::{PoaDecision, PoaResolver, SurfaceCycle};
use crate::error::{Error, Result};
use crate::lattice::{add3, Direction, LatticeKey};
use crate::volume::{is_active, IsoConfig, RangeVector, ScalarGrid, VoxelEdge, VoxelIndex};

/// Face between an active voxel and an inactive 6-neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryFace {
    pub range: RangeVector,
    pub support: LatticeKey,
    /// Edge midpoints numbered 1..4 counterclockwise about the range vector.
    pub junctures: [LatticeKey; 4],
}

impl BoundaryFace {
    pub fn new(range: RangeVector) -> Self {
        let center = add3(range.active.doubled(), range.direction.vector());
        let junctures = in_plane_ccw(range.direction).map(|d| LatticeKey::from_doubled(add3(center, d)));
        BoundaryFace {
            range,
            support: range.support_key(),
            junctures,
        }
    }

    /// The internal paths `2->1`, `3->2`, `4->3`, `1->4` through the center.
    pub fn quadrant_paths(&self) -> [FaceQuadrantPath; 4] {
        std::array::from_fn(|k| FaceQuadrantPath {
            entry: self.junctures[(k + 1) % 4],
            support: self.support,
            exit: self.junctures[k],
        })
    }
}

/// Unit in-plane directions numbered counterclockwise about `n`.
pub(crate) fn in_plane_ccw(n: Direction) -> [[i64; 3]; 4] {
    let (u, v) = n.axis.others();
    let (u, v) = (u.unit(), v.unit());
    let neg = |a: [i64; 3]| [-a[0], -a[1], -a[2]];
    if n.positive {
        [u, v, neg(u), neg(v)]
    } else {
        [u, neg(v), neg(u), v]
    }
}

/// Directed path `entry -> support -> exit` across one face quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FaceQuadrantPath {
    pub entry: LatticeKey,
    pub support: LatticeKey,
    pub exit: LatticeKey,
}

/// Side of `other` relative to juncture `j`, along the axis of the voxel
/// edge `j` sits on. Quadrant paths linked at `j` must stay on one side.
#[inline]
fn side(j: LatticeKey, other: LatticeKey) -> i64 {
    let jd = j.doubled();
    let axis = if jd[0] & 1 == 0 {
        0
    } else if jd[1] & 1 == 0 {
        1
    } else {
        2
    };
    (other.doubled()[axis] - jd[axis]).signum()
}

/// One face per active -> inactive 6-neighbor transition, including
/// transitions into the inactive outside, in voxel scan order.
pub fn collect_boundary_faces(grid: &ScalarGrid, iso: &IsoConfig) -> Vec<BoundaryFace> {
    let [nx, ny, nz] = grid.dims();
    let mut faces = Vec::new();
    for k in 0..nz as i64 {
        for j in 0..ny as i64 {
            for i in 0..nx as i64 {
                let v = VoxelIndex::new(i, j, k);
                if !is_active(grid, iso, v) {
                    continue;
                }
                for d in Direction::ALL {
                    if !is_active(grid, iso, v.step(d)) {
                        faces.push(BoundaryFace::new(RangeVector::new(v, d)));
                    }
                }
            }
        }
    }
    faces
}

/// Links all quadrant paths of `faces` into closed cycles, in order of
/// their first path. Every quadrant path is consumed exactly once.
pub fn trace_cycles(
    faces: &[BoundaryFace],
    grid: &ScalarGrid,
    resolver: &PoaResolver,
) -> Result<Vec<SurfaceCycle>> {
    let paths: Vec<(FaceQuadrantPath, u32)> = faces
        .iter()
        .enumerate()
        .flat_map(|(fi, f)| f.quadrant_paths().into_iter().map(move |p| (p, fi as u32)))
        .collect();

    // outgoing paths per entry juncture; a juncture has two or four
    let mut outgoing: HashMap<LatticeKey, ([u32; 4], u8)> =
        HashMap::with_capacity_and_hasher(paths.len() / 2, Default::default());
    for (pi, (p, _)) in paths.iter().enumerate() {
        let slot = outgoing.entry(p.entry).or_default();
        if (slot.1 as usize) < slot.0.len() {
            slot.0[slot.1 as usize] = pi as u32;
        }
        slot.1 += 1;
    }

    let mut successor = vec![u32::MAX; paths.len()];
    let mut predecessor_seen = vec![false; paths.len()];
    let mut decisions: HashMap<LatticeKey, PoaDecision> = HashMap::default();
    for (pi, (p, face)) in paths.iter().enumerate() {
        let j = p.exit;
        let wanted = side(j, p.entry);
        let (out, len) = outgoing.get(&j).copied().unwrap_or_default();
        if len as usize > out.len() {
            return Err(Error::Invariant(format!("juncture {j:?} has {len} outgoing paths")));
        }
        let mut found = [0u32; 4];
        let mut count = 0;
        for &q in &out[..len as usize] {
            let (qp, qf) = &paths[q as usize];
            if qf != face && side(j, qp.exit) == wanted {
                if count < found.len() {
                    found[count] = q;
                }
                count += 1;
            }
        }
        let candidates = &found[..count.min(found.len())];
        let next = match candidates {
            [only] => *only,
            [a, b] => {
                let decision = match decisions.get(&j) {
                    Some(d) => *d,
                    None => {
                        let edge = VoxelEdge::from_juncture(j)
                            .ok_or_else(|| Error::Invariant(format!("{j:?} is not a juncture")))?;
                        let d = resolver.decide(grid, &edge)?;
                        decisions.insert(j, d);
                        d
                    }
                };
                let own = faces[*face as usize].range.active;
                let same = |q: u32| faces[paths[q as usize].1 as usize].range.active == own;
                let (same_voxel, other_voxel) = match (same(*a), same(*b)) {
                    (true, false) => (*a, *b),
                    (false, true) => (*b, *a),
                    _ => {
                        return Err(Error::Invariant(format!(
                            "ambiguous juncture {j:?} without a same/other voxel split"
                        )))
                    }
                };
                match decision {
                    PoaDecision::Disconnect => same_voxel,
                    PoaDecision::Connect => other_voxel,
                }
            }
            other => {
                return Err(Error::Invariant(format!(
                    "juncture {j:?} offers {} successors for {p:?}",
                    other.len().max(count)
                )))
            }
        };
        if std::mem::replace(&mut predecessor_seen[next as usize], true) {
            return Err(Error::Invariant(format!("path {next} reached twice at {j:?}")));
        }
        successor[pi] = next;
    }

    let mut visited = vec![false; paths.len()];
    let mut cycles = Vec::new();
    for start in 0..paths.len() {
        if visited[start] {
            continue;
        }
        let mut points = Vec::with_capacity(8);
        let mut cur = start;
        while !visited[cur] {
            visited[cur] = true;
            points.push(paths[cur].0.support);
            cur = successor[cur] as usize;
        }
        if cur != start {
            return Err(Error::Invariant("tracing did not return to its start".into()));
        }
        cycles.push(SurfaceCycle::new(points));
    }
    Ok(cycles)
}

/// Collects boundary faces and traces them in one call. Output is sorted.
pub fn extract_cycles(grid: &ScalarGrid, iso: &IsoConfig, resolver: &PoaResolver) -> Result<Vec<SurfaceCycle>> {
    let mut cycles = trace_cycles(&collect_boundary_faces(grid, iso), grid, resolver)?;
    cycles.sort_unstable();
    Ok(cycles)
}

/// Connected-component label per cycle; cycles sharing a support point share
/// a label. Labels are dense and ordered by first appearance.
pub fn cycle_components(cycles: &[SurfaceCycle]) -> Vec<u32> {
    let mut index: HashMap<LatticeKey, usize> = HashMap::default();
    for c in cycles {
        for &p in c.points() {
            let n = index.len();
            index.entry(p).or_insert(n);
        }
    }
    let mut uf = UnionFind::<usize>::new(index.len());
    for c in cycles {
        let first = index[&c.points()[0]];
        for p in &c.points()[1..] {
            uf.union(first, index[p]);
        }
    }
    let mut dense: HashMap<usize, u32> = HashMap::default();
    cycles
        .iter()
        .map(|c| {
            let root = uf.find(index[&c.points()[0]]);
            let n = dense.len() as u32;
            *dense.entry(root).or_insert(n)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::{cycle_census, Mode};
    use crate::lattice::{cross3, sub3};

    fn grid_with(dims: [usize; 3], active: &[[usize; 3]]) -> ScalarGrid {
        let mut v = vec![0u8; dims.iter().product()];
        for a in active {
            v[(a[2] * dims[1] + a[1]) * dims[0] + a[0]] = 1;
        }
        ScalarGrid::from_u8(dims, &v).unwrap()
    }

    fn iso() -> IsoConfig {
        IsoConfig::new(0.5).unwrap()
    }

    fn cycles(g: &ScalarGrid, mode: Mode) -> Vec<SurfaceCycle> {
        extract_cycles(g, &iso(), &PoaResolver::new(mode, &iso())).unwrap()
    }

    #[test]
    fn junctures_are_counterclockwise() {
        for d in Direction::ALL {
            let dirs = in_plane_ccw(d);
            for k in 0..4 {
                assert_eq!(cross3(dirs[k], dirs[(k + 1) % 4]), d.vector(), "{d:?}");
            }
        }
    }

    #[test]
    fn face_counts() {
        let g = grid_with([1, 1, 1], &[[0, 0, 0]]);
        assert_eq!(collect_boundary_faces(&g, &iso()).len(), 6);
        let g = grid_with([1, 1, 2], &[[0, 0, 0], [0, 0, 1]]);
        assert_eq!(collect_boundary_faces(&g, &iso()).len(), 10);
        let g = grid_with([2, 2, 2], &[[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1]]);
        assert_eq!(collect_boundary_faces(&g, &iso()).len(), 24);
        let g = grid_with([3, 3, 3], &[]);
        assert!(collect_boundary_faces(&g, &iso()).is_empty());
    }

    #[test]
    fn single_voxel_is_octahedron() {
        let g = grid_with([1, 1, 1], &[[0, 0, 0]]);
        let c = cycles(&g, Mode::Disconnect);
        assert_eq!(c.len(), 8);
        assert!(c.iter().all(|c| c.len() == 3));
        // 24 cycle vectors over 12 undirected edges, each used both ways
        let mut directed: Vec<_> = c.iter().flat_map(|c| c.directed_edges().collect::<Vec<_>>()).collect();
        assert_eq!(directed.len(), 24);
        directed.sort();
        directed.dedup();
        assert_eq!(directed.len(), 24);
        for &(a, b) in &directed {
            assert!(directed.binary_search(&(b, a)).is_ok());
        }
    }

    #[test]
    fn single_voxel_orientation_is_outward() {
        let g = grid_with([1, 1, 1], &[[0, 0, 0]]);
        for c in cycles(&g, Mode::Connect) {
            let p: Vec<[i64; 3]> = c.points().iter().map(|k| k.doubled()).collect();
            let n = cross3(sub3(p[1], p[0]), sub3(p[2], p[0]));
            let centroid = add3(add3(p[0], p[1]), p[2]);
            let dot: i64 = (0..3).map(|a| n[a] * centroid[a]).sum();
            assert!(dot > 0, "inward triangle {c:?}");
        }
    }

    #[test]
    fn domino_census() {
        let g = grid_with([1, 1, 2], &[[0, 0, 0], [0, 0, 1]]);
        let census = cycle_census(&cycles(&g, Mode::Disconnect)).unwrap();
        assert_eq!(census.get(3), 8);
        assert_eq!(census.get(4), 4);
        assert_eq!(census.total(), 12);
    }

    #[test]
    fn edge_pair_modes() {
        let g = grid_with([2, 2, 1], &[[0, 0, 0], [1, 1, 0]]);
        let d = cycles(&g, Mode::Disconnect);
        assert_eq!(cycle_census(&d).unwrap().get(3), 16);
        let comps = cycle_components(&d);
        assert_eq!(comps.iter().max(), Some(&1));

        let c = cycles(&g, Mode::Connect);
        let census = cycle_census(&c).unwrap();
        assert_eq!((census.get(3), census.get(6), census.total()), (12, 2, 14));
        assert!(cycle_components(&c).iter().all(|&l| l == 0));
    }

    #[test]
    fn vertex_pair_stays_apart_in_both_modes() {
        let g = grid_with([2, 2, 2], &[[0, 0, 0], [1, 1, 1]]);
        for mode in [Mode::Disconnect, Mode::Connect] {
            let c = cycles(&g, mode);
            assert_eq!(c.len(), 16);
            assert!(c.iter().all(|c| c.len() == 3));
            assert_eq!(cycle_components(&c).iter().max(), Some(&1));
        }
    }

    #[test]
    fn block_census() {
        let all: Vec<[usize; 3]> = (0..8).map(|b| [b & 1, (b >> 1) & 1, b >> 2]).collect();
        let g = grid_with([2, 2, 2], &all);
        let census = cycle_census(&cycles(&g, Mode::Disconnect)).unwrap();
        assert_eq!((census.get(3), census.get(4), census.total()), (8, 18, 26));
    }
}
