//! Marching 3-cell engine.
//!
//! The volume is scanned with a `2x2x2` voxel window. Inside a window every
//! boundary-face quadrant is a directed path `juncture -> center ->
//! juncture` taken from [`QUADRANT_PATHS`]; linking the paths at the six
//! window-face centers yields the cycles of that window directly. Because
//! every cycle is confined to one window, the union over all windows equals
//! the whole-volume trace.
//!
//! Local numbering, with the window at base `(i, j, k)`:
//!
//! * voxels `0..8` at offsets `(0,0,0) (1,0,0) (1,1,0) (0,1,0) (0,0,1)
//!   (1,0,1) (1,1,1) (0,1,1)`;
//! * centers `0..12` are the window-edge midpoints (support points);
//! * junctures `12..18` are the window-face centers:
//!   `12: z=0, 13: y=0, 14: x=0, 15: x=1, 16: y=1, 17: z=1`.
//!
//! `⊕` paths belong to quadrants whose range vector points along the
//! positive axis (lower voxel active), `⊖` to the negative one.

use std::ops::Range;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::cycle::{Census, Mode, SurfaceCycle};
use crate::error::{Error, Result};
use crate::lattice::{add3, Axis, LatticeKey};
use crate::mesh::{MeshBuilder, PointKey, Resolution};
use crate::tessellate::{decompose_l, mean, Positioner};
use crate::volume::{ActivityMask, IsoConfig, ScalarGrid, VoxelIndex};

/// Orientation of a face quadrant relative to its axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Plus,
    Minus,
}

/// Directed quadrant paths `(entry, center, exit)` per center id, `[⊕, ⊖]`.
pub const QUADRANT_PATHS: [[(u8, u8, u8); 2]; 12] = [
    [(13, 0, 12), (12, 0, 13)],
    [(12, 1, 14), (14, 1, 12)],
    [(15, 2, 12), (12, 2, 15)],
    [(12, 3, 16), (16, 3, 12)],
    [(14, 4, 13), (13, 4, 14)],
    [(13, 5, 15), (15, 5, 13)],
    [(16, 6, 14), (14, 6, 16)],
    [(15, 7, 16), (16, 7, 15)],
    [(17, 8, 13), (13, 8, 17)],
    [(14, 9, 17), (17, 9, 14)],
    [(17, 10, 15), (15, 10, 17)],
    [(16, 11, 17), (17, 11, 16)],
];

/// Local voxel offsets by voxel number.
pub const VOXEL_OFFSETS: [[i64; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
    [0, 1, 1],
];

/// Doubled offset of each center within the window, and the axis of its
/// range vector.
pub const CENTER_GEOMETRY: [([i64; 3], Axis); 12] = [
    ([1, 0, 0], Axis::X),
    ([0, 1, 0], Axis::Y),
    ([2, 1, 0], Axis::Y),
    ([1, 2, 0], Axis::X),
    ([0, 0, 1], Axis::Z),
    ([2, 0, 1], Axis::Z),
    ([0, 2, 1], Axis::Z),
    ([2, 2, 1], Axis::Z),
    ([1, 0, 2], Axis::X),
    ([0, 1, 2], Axis::Y),
    ([2, 1, 2], Axis::Y),
    ([1, 2, 2], Axis::X),
];

/// Doubled offset of each juncture (ids 12..18) within the window.
pub const JUNCTURE_GEOMETRY: [[i64; 3]; 6] = [
    [1, 1, 0],
    [1, 0, 1],
    [0, 1, 1],
    [2, 1, 1],
    [1, 2, 1],
    [1, 1, 2],
];

/// Lowest valid juncture id.
pub const FIRST_JUNCTURE: u8 = 12;

fn voxel_number(offset: [i64; 3]) -> u8 {
    VOXEL_OFFSETS.iter().position(|o| *o == offset).expect("offset in {0,1}^3") as u8
}

/// `(lower, upper)` voxel numbers joined by each center's window edge.
pub fn center_voxels(center: usize) -> (u8, u8) {
    let (off, axis) = CENTER_GEOMETRY[center];
    let mut lo = off;
    lo[axis.index()] -= 1;
    let lo = [lo[0] / 2, lo[1] / 2, lo[2] / 2];
    let mut hi = lo;
    hi[axis.index()] += 1;
    (voxel_number(lo), voxel_number(hi))
}

/// Voxel numbers on a window face, in cyclic order.
pub fn juncture_voxels(juncture: u8) -> [u8; 4] {
    static TABLE: OnceLock<[[u8; 4]; 6]> = OnceLock::new();
    TABLE.get_or_init(|| std::array::from_fn(|f| compute_juncture_voxels(f as u8 + FIRST_JUNCTURE)))
        [(juncture - FIRST_JUNCTURE) as usize]
}

fn compute_juncture_voxels(juncture: u8) -> [u8; 4] {
    let j = JUNCTURE_GEOMETRY[(juncture - FIRST_JUNCTURE) as usize];
    let axis = (0..3).find(|&a| j[a] % 2 == 0).unwrap();
    let (u, v) = Axis::from_index(axis).others();
    let mut base = [0; 3];
    base[axis] = j[axis] / 2;
    let at = |du: i64, dv: i64| {
        let mut o = base;
        o[u.index()] += du;
        o[v.index()] += dv;
        voxel_number(o)
    };
    [at(0, 0), at(1, 0), at(1, 1), at(0, 1)]
}

/// Table lookup for one directed quadrant path.
pub fn quadrant_path(center: u8, orientation: Orientation) -> Result<(u8, u8, u8)> {
    let row = QUADRANT_PATHS
        .get(center as usize)
        .ok_or_else(|| Error::InvalidArgument(format!("center id {center} outside 0..12")))?;
    Ok(match orientation {
        Orientation::Plus => row[0],
        Orientation::Minus => row[1],
    })
}

/// One `2x2x2` window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell3 {
    pub base: VoxelIndex,
    /// Bit `v` set iff voxel `v` is active.
    pub occupancy: u8,
    /// Field values by voxel number; NaN outside the domain.
    pub values: [f32; 8],
}

impl Cell3 {
    pub fn from_grid(grid: &ScalarGrid, iso: &IsoConfig, base: VoxelIndex) -> Self {
        let mut occupancy = 0u8;
        let mut values = [f32::NAN; 8];
        for (v, off) in VOXEL_OFFSETS.iter().enumerate() {
            if let Some(f) = grid.value(base.offset(*off)) {
                values[v] = f as f32;
                if f >= iso.isovalue {
                    occupancy |= 1 << v;
                }
            }
        }
        Cell3 {
            base,
            occupancy,
            values,
        }
    }

    /// Window faces that are points of ambiguity, as a bit mask over
    /// `juncture - 12`.
    pub fn ambiguous_faces(&self) -> u8 {
        ambiguous_faces(self.occupancy)
    }

    /// Per-face decisions for `mode`; mixed mode compares the average of the
    /// face's four values with `threshold`. Bit set = connect.
    pub fn decisions(&self, mode: Mode, threshold: f64) -> u8 {
        match mode {
            Mode::Disconnect => 0,
            Mode::Connect => 0x3f,
            Mode::Mixed => {
                let mut mask = 0;
                let amb = self.ambiguous_faces();
                for f in 0..6u8 {
                    if amb & (1 << f) != 0 {
                        let sum: f64 = juncture_voxels(f + FIRST_JUNCTURE)
                            .iter()
                            .map(|&v| self.values[v as usize] as f64)
                            .sum();
                        if sum / 4.0 >= threshold {
                            mask |= 1 << f;
                        }
                    }
                }
                mask
            }
        }
    }
}

/// Window faces of `occupancy` holding exactly two diagonal active voxels.
pub fn ambiguous_faces(occupancy: u8) -> u8 {
    let mut mask = 0;
    for f in 0..6u8 {
        let a = juncture_voxels(f + FIRST_JUNCTURE).map(|v| occupancy & (1 << v) != 0);
        if (a[0] && a[2] && !a[1] && !a[3]) || (a[1] && a[3] && !a[0] && !a[2]) {
            mask |= 1 << f;
        }
    }
    mask
}

/// Cycles of one window in local center ids, junctures removed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CellCycles {
    pub cycles: Vec<Vec<u8>>,
}

/// Builds the cycles of a window with the given occupancy. `decisions` has
/// bit `f` set when the ambiguous face with juncture `12 + f` connects.
pub fn cell_cycles(occupancy: u8, decisions: u8) -> CellCycles {
    let active = |v: u8| occupancy & (1 << v) != 0;
    // (entry, exit, owning active voxel) per center
    let mut paths: [Option<(u8, u8, u8)>; 12] = [None; 12];
    for (c, path) in paths.iter_mut().enumerate() {
        let (lo, hi) = center_voxels(c);
        let (orientation, owner) = match (active(lo), active(hi)) {
            (true, false) => (Orientation::Plus, lo),
            (false, true) => (Orientation::Minus, hi),
            _ => continue,
        };
        let (entry, _, exit) = quadrant_path(c as u8, orientation).expect("valid center");
        *path = Some((entry, exit, owner));
    }

    let mut next = [u8::MAX; 12];
    for j in FIRST_JUNCTURE..FIRST_JUNCTURE + 6 {
        let ins: Vec<usize> = (0..12).filter(|&c| matches!(paths[c], Some((_, x, _)) if x == j)).collect();
        let outs: Vec<usize> = (0..12).filter(|&c| matches!(paths[c], Some((e, _, _)) if e == j)).collect();
        match (ins.as_slice(), outs.as_slice()) {
            ([], []) => {}
            ([i], [o]) => next[*i] = *o as u8,
            ([_, _], [o1, o2]) => {
                let connect = decisions & (1 << (j - FIRST_JUNCTURE)) != 0;
                let owner = |c: usize| paths[c].unwrap().2;
                for &i in &ins {
                    let same = if owner(*o1) == owner(i) { *o1 } else { *o2 };
                    let other = if same == *o1 { *o2 } else { *o1 };
                    next[i] = if connect { other } else { same } as u8;
                }
            }
            _ => unreachable!("window face with {} in / {} out paths", ins.len(), outs.len()),
        }
    }

    let mut visited = [false; 12];
    let mut cycles = Vec::new();
    for start in 0..12 {
        if paths[start].is_none() || visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut c = start;
        while !visited[c] {
            visited[c] = true;
            cycle.push(c as u8);
            c = next[c] as usize;
        }
        assert_eq!(c, start, "window paths must close");
        // canonical rotation: local key order equals global key order
        let local_key = |&id: &u8| LatticeKey::from_doubled(CENTER_GEOMETRY[id as usize].0);
        if let Some(pos) = cycle.iter().enumerate().min_by_key(|(_, id)| local_key(id)).map(|(i, _)| i) {
            cycle.rotate_left(pos);
        }
        cycles.push(cycle);
    }
    CellCycles { cycles }
}

/// Precomputed [`cell_cycles`] for every occupancy and decision pattern.
struct PatternTable {
    ambiguous: [u8; 256],
    patterns: Vec<CellCycles>,
}

fn patterns() -> &'static PatternTable {
    static TABLE: OnceLock<PatternTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let ambiguous: [u8; 256] = std::array::from_fn(|occ| ambiguous_faces(occ as u8));
        let mut patterns = Vec::with_capacity(256 * 64);
        for (occ, &mask) in ambiguous.iter().enumerate() {
            for dec in 0..64u8 {
                patterns.push(cell_cycles(occ as u8, dec & mask));
            }
        }
        PatternTable { ambiguous, patterns }
    })
}

fn pattern_index(occupancy: u8, decisions: u8) -> u16 {
    occupancy as u16 * 64 + (decisions & patterns().ambiguous[occupancy as usize]) as u16
}

/// Cached [`cell_cycles`].
pub fn cell_pattern(occupancy: u8, decisions: u8) -> &'static CellCycles {
    &patterns().patterns[pattern_index(occupancy, decisions) as usize]
}

/// Low-resolution triangles of every cycle of [`cell_pattern`], in local
/// center ids.
pub fn cell_l_triangles(occupancy: u8, decisions: u8) -> &'static [Vec<[u8; 3]>] {
    l_triangles(pattern_index(occupancy, decisions))
}

fn l_triangles(pattern: u16) -> &'static [Vec<[u8; 3]>] {
    static TABLE: OnceLock<Vec<Vec<Vec<[u8; 3]>>>> = OnceLock::new();
    &TABLE.get_or_init(|| {
        let origin = VoxelIndex::new(0, 0, 0);
        patterns()
            .patterns
            .iter()
            .map(|cell| {
                cell.cycles
                    .iter()
                    .map(|ids| {
                        let keys: Vec<LatticeKey> = ids.iter().map(|&id| center_key(origin, id)).collect();
                        let local = |k: LatticeKey| ids[keys.iter().position(|&x| x == k).expect("cycle point")];
                        decompose_l(&SurfaceCycle::new(keys.clone())).into_iter().map(|t| t.map(local)).collect()
                    })
                    .collect()
            })
            .collect()
    })[pattern as usize]
}

/// Global key of a local center in the window at `base`.
#[inline]
pub fn center_key(base: VoxelIndex, center: u8) -> LatticeKey {
    LatticeKey::from_doubled(add3(base.doubled(), CENTER_GEOMETRY[center as usize].0))
}

/// A window that produced at least one cycle.
#[derive(Debug, Clone, Copy)]
pub struct PlacedCell {
    pub base: VoxelIndex,
    pub cycles: &'static CellCycles,
    pattern: u16,
}

impl PlacedCell {
    pub fn new(base: VoxelIndex, occupancy: u8, decisions: u8) -> Self {
        let pattern = pattern_index(occupancy, decisions);
        PlacedCell {
            base,
            cycles: &patterns().patterns[pattern as usize],
            pattern,
        }
    }

    /// Emits the window's triangles, sharing points within the window only.
    /// Produces the same triangles as [`crate::tessellate::emit_cycle`] on [`Self::global_cycles`].
    pub fn emit(&self, builder: &mut MeshBuilder, resolution: Resolution, positioner: &Positioner, census: &mut Census) {
        let mut local = [(u32::MAX, [0.0; 3]); 12];
        let mut point = |builder: &mut MeshBuilder, id: u8| {
            let slot = &mut local[id as usize];
            if slot.0 == u32::MAX {
                let k = center_key(self.base, id);
                let x = positioner.position(k);
                *slot = (builder.push_point(PointKey::Support(k), x), x);
            }
            *slot
        };
        match resolution {
            Resolution::L => {
                for (ids, tris) in self.cycles.cycles.iter().zip(l_triangles(self.pattern)) {
                    census.add(ids.len(), 1);
                    for t in tris {
                        let tri = t.map(|id| point(builder, id).0);
                        builder.triangle(tri);
                    }
                }
            }
            Resolution::H => {
                let mut idx = [0u32; 12];
                let mut pos = [[0.0; 3]; 12];
                for ids in &self.cycles.cycles {
                    let n = ids.len();
                    census.add(n, 1);
                    for (i, &id) in ids.iter().enumerate() {
                        (idx[i], pos[i]) = point(builder, id);
                    }
                    if n == 3 {
                        builder.triangle([idx[0], idx[1], idx[2]]);
                        continue;
                    }
                    let centroid = mean(&pos[..n]);
                    let key = PointKey::Centroid(center_key(self.base, ids[0]), center_key(self.base, ids[1]));
                    let c = builder.push_point(key, centroid);
                    for i in 0..n {
                        builder.triangle([c, idx[i], idx[(i + 1) % n]]);
                    }
                }
            }
        }
    }

    /// The window's cycles with global support keys.
    pub fn global_cycles(&self) -> impl Iterator<Item = SurfaceCycle> + '_ {
        self.cycles
            .cycles
            .iter()
            .map(|c| SurfaceCycle::new(c.iter().map(|&id| center_key(self.base, id)).collect()))
    }
}

/// Scanner over all `(nx+1)(ny+1)(nz+1)` windows, including the one-voxel
/// inactive halo.
pub struct MarchingScan<'g> {
    grid: &'g ScalarGrid,
    iso: IsoConfig,
    mode: Mode,
    mask: ActivityMask,
}

impl<'g> MarchingScan<'g> {
    pub fn new(grid: &'g ScalarGrid, iso: &IsoConfig, mode: Mode) -> Self {
        MarchingScan {
            grid,
            iso: *iso,
            mode,
            mask: ActivityMask::new(grid, iso),
        }
    }

    /// Window base `k` values, `-1..nz`.
    pub fn layers(&self) -> Range<i64> {
        -1..self.grid.dims()[2] as i64
    }

    /// Visits windows with base `k` in `layers`, in `(k, j, i)` order.
    pub fn scan_layers(&self, layers: Range<i64>, mut sink: impl FnMut(PlacedCell)) {
        let [nx, ny, _] = self.grid.dims();
        let pd = self.mask.padded_dims();
        let bits = self.mask.raw();
        let threshold = self.iso.threshold();
        let table = patterns();
        // padded index of voxel-offset v relative to the window's padded base
        let step = VOXEL_OFFSETS.map(|o| (o[2] as usize * pd[1] + o[1] as usize) * pd[0] + o[0] as usize);
        for k in layers {
            let pk = (k + 1) as usize;
            for pj in 0..=ny {
                let row = self.mask.padded_index(0, pj, pk);
                for pi in 0..=nx {
                    let at = row + pi;
                    let mut occ = 0u8;
                    for (v, s) in step.iter().enumerate() {
                        occ |= (bits[at + s] as u8) << v;
                    }
                    if occ == 0 || occ == 0xff {
                        continue;
                    }
                    let base = VoxelIndex::new(pi as i64 - 1, pj as i64 - 1, k);
                    let dec = match self.mode {
                        Mode::Disconnect => 0,
                        Mode::Connect => 0x3f,
                        Mode::Mixed if table.ambiguous[occ as usize] == 0 => 0,
                        Mode::Mixed => Cell3::from_grid(self.grid, &self.iso, base).decisions(Mode::Mixed, threshold),
                    };
                    sink(PlacedCell::new(base, occ, dec));
                }
            }
        }
    }

    /// Visits every window sequentially.
    pub fn scan(&self, sink: impl FnMut(PlacedCell)) {
        self.scan_layers(self.layers(), sink)
    }

    /// Scans slabs of layers on `threads` workers and returns the windows in
    /// the same order as [`MarchingScan::scan`].
    pub fn scan_parallel(&self, threads: usize) -> Vec<PlacedCell> {
        let layers = self.layers();
        let n = (layers.end - layers.start) as usize;
        let chunk = n.div_ceil(threads.max(1)).max(1);
        let slabs: Vec<Range<i64>> = (0..n)
            .step_by(chunk)
            .map(|s| layers.start + s as i64..(layers.start + (s + chunk) as i64).min(layers.end))
            .collect();
        let run = || {
            slabs
                .par_iter()
                .map(|r| {
                    let mut out = Vec::new();
                    self.scan_layers(r.clone(), |c| out.push(c));
                    out
                })
                .collect::<Vec<_>>()
        };
        let parts = match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        };
        parts.into_iter().flatten().collect()
    }
}

/// Runs the scan and returns every cycle with global keys, sorted.
pub fn scan_volume(grid: &ScalarGrid, iso: &IsoConfig, mode: Mode) -> Vec<SurfaceCycle> {
    let mut cycles = Vec::new();
    MarchingScan::new(grid, iso, mode).scan(|cell| cycles.extend(cell.global_cycles()));
    cycles.sort_unstable();
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{collect_boundary_faces, BoundaryFace};
    use crate::volume::RangeVector;
    use crate::lattice::Direction;

    fn occ(voxels: &[u8]) -> u8 {
        voxels.iter().fold(0, |m, v| m | 1 << v)
    }

    #[test]
    fn table_rows() {
        assert_eq!(quadrant_path(0, Orientation::Plus).unwrap(), (13, 0, 12));
        assert_eq!(quadrant_path(7, Orientation::Minus).unwrap(), (16, 7, 15));
        assert_eq!(quadrant_path(11, Orientation::Plus).unwrap(), (16, 11, 17));
        assert!(quadrant_path(12, Orientation::Plus).is_err());
    }

    #[test]
    fn table_adjacency() {
        let expected: [(u8, [u8; 4]); 6] = [
            (12, [0, 1, 2, 3]),
            (13, [0, 4, 5, 8]),
            (14, [1, 4, 6, 9]),
            (15, [2, 5, 7, 10]),
            (16, [3, 6, 7, 11]),
            (17, [8, 9, 10, 11]),
        ];
        for (j, centers) in expected {
            let mut found: Vec<u8> = (0..12u8)
                .filter(|&c| {
                    let (e, _, x) = QUADRANT_PATHS[c as usize][0];
                    e == j || x == j
                })
                .collect();
            found.sort();
            assert_eq!(found, centers, "juncture {j}");
        }
        for row in QUADRANT_PATHS {
            // the two orientations are reverses of each other
            assert_eq!((row[0].2, row[0].1, row[0].0), row[1]);
        }
    }

    #[test]
    fn geometry_matches_table_adjacency() {
        // every center sits between the two window faces its paths connect
        for c in 0..12 {
            let (e, _, x) = QUADRANT_PATHS[c][0];
            let (off, _) = CENTER_GEOMETRY[c];
            for j in [e, x] {
                let jo = JUNCTURE_GEOMETRY[(j - FIRST_JUNCTURE) as usize];
                let dist: i64 = (0..3).map(|a| (jo[a] - off[a]).abs()).sum();
                assert_eq!(dist, 1, "center {c} juncture {j}");
            }
        }
    }

    #[test]
    fn single_site_example() {
        // voxel 7 alone: paths 9⊖, 6⊖, 11⊕ close into the 3-cycle 9 -> 6 -> 11
        let cells = cell_cycles(occ(&[7]), 0);
        assert_eq!(cells.cycles.len(), 1);
        let c = &cells.cycles[0];
        let start = c.iter().position(|&x| x == 9).unwrap();
        let rotated: Vec<u8> = (0..3).map(|i| c[(start + i) % 3]).collect();
        assert_eq!(rotated, vec![9, 6, 11]);
    }

    #[test]
    fn three_site_example() {
        // sites 0, 1 (edge pair) and 7 (face-diagonal to 0): one ambiguous face
        let o = occ(&[0, 1, 7]);
        assert_eq!(ambiguous_faces(o).count_ones(), 1);
        let mut d: Vec<usize> = cell_cycles(o, 0).cycles.iter().map(Vec::len).collect();
        d.sort();
        assert_eq!(d, vec![3, 4]);
        let c: Vec<usize> = cell_cycles(o, 0x3f).cycles.iter().map(Vec::len).collect();
        assert_eq!(c, vec![7]);
    }

    #[test]
    fn empty_and_full_windows() {
        assert!(cell_cycles(0, 0).cycles.is_empty());
        assert!(cell_cycles(0xff, 0x3f).cycles.is_empty());
    }

    #[test]
    fn window_faces_carry_zero_two_or_four_paths() {
        for o in 0..=255u8 {
            for j in FIRST_JUNCTURE..FIRST_JUNCTURE + 6 {
                let n = (0..12)
                    .filter(|&c| {
                        let (lo, hi) = center_voxels(c);
                        let a = |v: u8| o & (1 << v) != 0;
                        a(lo) != a(hi)
                    })
                    .filter(|&c| {
                        let (e, _, x) = QUADRANT_PATHS[c][0];
                        e == j || x == j
                    })
                    .count();
                assert!(matches!(n, 0 | 2 | 4), "occupancy {o:#x} face {j}: {n}");
            }
        }
    }

    /// Each of a boundary face's four quadrants lies in a different window;
    /// mapped back to global keys the table rows must reproduce the face's
    /// own internal paths.
    #[test]
    fn table_reproduces_face_paths() {
        let base_voxel = VoxelIndex::new(5, 5, 5);
        for d in Direction::ALL {
            let face = BoundaryFace::new(RangeVector::new(base_voxel, d));
            let mut expected: Vec<_> = face
                .quadrant_paths()
                .iter()
                .map(|p| (p.entry, p.support, p.exit))
                .collect();
            expected.sort();
            let mut got = Vec::new();
            // windows containing the face's range edge
            for w in 0..8 {
                let base = base_voxel.offset([-(w & 1), -((w >> 1) & 1), -((w >> 2) & 1)]);
                for c in 0..12u8 {
                    let (lo, hi) = center_voxels(c as usize);
                    let lo_v = base.offset(VOXEL_OFFSETS[lo as usize]);
                    let hi_v = base.offset(VOXEL_OFFSETS[hi as usize]);
                    let orientation = if lo_v == base_voxel && hi_v == base_voxel.step(d) {
                        Orientation::Plus
                    } else if hi_v == base_voxel && lo_v == base_voxel.step(d) {
                        Orientation::Minus
                    } else {
                        continue;
                    };
                    let (e, cc, x) = quadrant_path(c, orientation).unwrap();
                    let jk = |j: u8| {
                        LatticeKey::from_doubled(add3(base.doubled(), JUNCTURE_GEOMETRY[(j - FIRST_JUNCTURE) as usize]))
                    };
                    got.push((jk(e), center_key(base, cc), jk(x)));
                }
            }
            got.sort();
            assert_eq!(got, expected, "direction {d:?}");
        }
    }

    #[test]
    fn single_voxel_scan() {
        let g = ScalarGrid::from_u8([1, 1, 1], &[1]).unwrap();
        let iso = IsoConfig::new(0.5).unwrap();
        let c = scan_volume(&g, &iso, Mode::Disconnect);
        assert_eq!(c.len(), 8);
        assert_eq!(collect_boundary_faces(&g, &iso).len(), 6);
    }

    #[test]
    fn parallel_scan_matches_sequential() {
        let vals: Vec<u8> = (0..6 * 5 * 7).map(|i: u32| (i.wrapping_mul(2654435761) >> 7) as u8).collect();
        let g = ScalarGrid::from_u8([6, 5, 7], &vals).unwrap();
        let iso = IsoConfig::new(128.0).unwrap();
        for mode in Mode::ALL {
            let scan = MarchingScan::new(&g, &iso, mode);
            let mut seq = Vec::new();
            scan.scan(|c| seq.push((c.base, c.cycles.clone())));
            for threads in [1, 2, 3, 8] {
                let par: Vec<_> = scan.scan_parallel(threads).into_iter().map(|c| (c.base, c.cycles.clone())).collect();
                assert_eq!(par, seq);
            }
        }
    }

    #[test]
    fn matches_global_trace_on_random_volumes() {
        use crate::cycle::PoaResolver;
        use crate::trace::extract_cycles;
        for seed in 0..20u32 {
            let dims = [5 + (seed as usize % 3), 4, 6];
            let n = dims[0] * dims[1] * dims[2];
            let vals: Vec<u8> = (0..n as u32)
                .map(|i| ((i.wrapping_add(seed * 977)).wrapping_mul(2654435761) >> 13) as u8)
                .collect();
            let g = ScalarGrid::from_u8(dims, &vals).unwrap();
            let iso = IsoConfig::new(120.0).unwrap();
            for mode in Mode::ALL {
                let global = extract_cycles(&g, &iso, &PoaResolver::new(mode, &iso)).unwrap();
                assert_eq!(scan_volume(&g, &iso, mode), global, "seed {seed} mode {mode}");
            }
        }
    }
}
