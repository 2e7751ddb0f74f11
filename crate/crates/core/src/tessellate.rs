//! Cycle triangulation, support-point displacement and cycle normals.

use rustc_hash::FxHashMap as HashMap;
use std::sync::OnceLock;

use crate::cycle::SurfaceCycle;
use crate::error::{Error, Result};
use crate::lattice::LatticeKey;
use crate::marching::{cell_pattern, CENTER_GEOMETRY};
use crate::mesh::{MeshBuilder, PointKey, Resolution};
use crate::volume::{interpolation_parameter, IsoConfig, RangeVector, ScalarGrid, VoxelIndex};

/// A boundary-face center that slides along its range vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportPoint {
    pub id: LatticeKey,
    /// World coordinates.
    pub position: [f64; 3],
    pub range: RangeVector,
    pub t: f64,
}

impl SupportPoint {
    /// Undisplaced support point (`t = 0.5`) of `range`.
    pub fn new(range: RangeVector, grid: &ScalarGrid) -> Self {
        SupportPoint {
            id: range.support_key(),
            position: grid.world_position(range.lattice_point(0.5)),
            range,
            t: 0.5,
        }
    }

    /// Undisplaced support point at `key`.
    pub fn from_key(key: LatticeKey, grid: &ScalarGrid, iso: &IsoConfig) -> Result<Self> {
        RangeVector::from_support_key(key, grid, iso)
            .map(|r| SupportPoint::new(r, grid))
            .ok_or_else(|| Error::Precondition(format!("{key:?} is not a boundary-face center")))
    }
}

/// Moves every point along its range vector to the interpolated isovalue
/// crossing. Idempotent.
pub fn displace_support_points(points: &mut [SupportPoint], grid: &ScalarGrid, iso: &IsoConfig) {
    for p in points {
        p.t = p.range.parameter(grid, iso);
        p.position = grid.world_position(p.range.lattice_point(p.t));
    }
}

/// Maps support keys to world positions, displaced or at face centers.
#[derive(Debug, Clone, Copy)]
pub struct Positioner<'g> {
    grid: &'g ScalarGrid,
    iso: IsoConfig,
    displace: bool,
}

impl<'g> Positioner<'g> {
    pub fn new(grid: &'g ScalarGrid, iso: &IsoConfig, displace: bool) -> Self {
        Positioner {
            grid,
            iso: *iso,
            displace,
        }
    }

    /// Position of the support point `key`. Keys that are not boundary
    /// faces fall back to their lattice location.
    pub fn position(&self, key: LatticeKey) -> [f64; 3] {
        let d = key.doubled();
        let axis = match d.map(|x| x & 1) {
            [1, 0, 0] => 0,
            [0, 1, 0] => 1,
            [0, 0, 1] => 2,
            _ => return self.grid.world_position(key.lattice_position()),
        };
        let mut lo = d.map(|x| x >> 1);
        let mut hi = lo;
        hi[axis] += 1;
        let value = |v: [i64; 3]| self.grid.value(VoxelIndex::new(v[0], v[1], v[2]));
        let (a, b) = (value(lo), value(hi));
        let iso = self.iso.isovalue;
        let (active, inactive, step) = match (a.is_some_and(|f| f >= iso), b.is_some_and(|f| f >= iso)) {
            (true, false) => (a, b, 1.0),
            (false, true) => {
                std::mem::swap(&mut lo, &mut hi);
                (b, a, -1.0)
            }
            _ => return self.grid.world_position(key.lattice_position()),
        };
        let t = match (self.displace, active, inactive) {
            (true, Some(fa), Some(fi)) => interpolation_parameter(fa, fi, iso),
            _ => 0.5,
        };
        let mut lattice = lo.map(|x| x as f64);
        lattice[axis] += t * step;
        self.grid.world_position(lattice)
    }

    /// Reference implementation of [`Positioner::position`] through
    /// [`RangeVector`].
    #[cfg(test)]
    fn position_via_range(&self, key: LatticeKey) -> [f64; 3] {
        match RangeVector::from_support_key(key, self.grid, &self.iso) {
            Some(r) => {
                let t = if self.displace { r.parameter(self.grid, &self.iso) } else { 0.5 };
                self.grid.world_position(r.lattice_point(t))
            }
            None => self.grid.world_position(key.lattice_position()),
        }
    }
}

/// Window base of a cycle: the `2x2x2` neighborhood holding all its
/// points.
pub fn cycle_window(cycle: &SurfaceCycle) -> [i64; 3] {
    let mut lo = [i64::MAX; 3];
    for k in cycle.points() {
        let d = k.doubled();
        for a in 0..3 {
            lo[a] = lo[a].min(d[a]);
        }
    }
    lo.map(|x| x.div_euclid(2))
}

/// Whether the segment between two window-edge midpoints (doubled local
/// offsets) may be used as a low-resolution diagonal.
///
/// A diagonal through the window interior is private to the window. A
/// diagonal lying in a window face is also visible to the neighbor across
/// that face, so each kind of in-face diagonal is reserved for one side:
/// corner-cutting diagonals for the window above the face, diagonals
/// crossing the face center along its first in-plane axis for the window
/// below, and those along the second axis for neither.
pub fn diagonal_allowed(a: [i64; 3], b: [i64; 3]) -> bool {
    let Some(axis) = (0..3).find(|&x| a[x] == b[x] && a[x] % 2 == 0) else {
        return true;
    };
    let low = a[axis] == 0;
    let (u, v) = crate::lattice::Axis::from_index(axis).others();
    let (u, v) = (u.index(), v.index());
    if a[u] == b[u] {
        false
    } else if a[v] == b[v] {
        DIAGONAL_RULE.straight_u == Some(low)
    } else {
        DIAGONAL_RULE.corner == Some(low)
    }
}

struct DiagonalRule {
    corner: Option<bool>,
    straight_u: Option<bool>,
}

const DIAGONAL_RULE: DiagonalRule = DiagonalRule {
    corner: Some(false),
    straight_u: Some(true),
};

/// Low-resolution triangulation of a closed polygon over window-local
/// offsets, as index triples in polygon order.
///
/// Only allowed diagonals are used and no two triangles without a common
/// corner may intersect. Among such triangulations the fan from the first
/// point is preferred; otherwise the one with the smallest total squared
/// diagonal length is taken.
pub fn l_triangulation(offsets: &[[i64; 3]]) -> Vec<[usize; 3]> {
    let n = offsets.len();
    if n < 3 {
        return Vec::new();
    }
    let fan: Vec<[usize; 3]> = (1..n - 1).map(|i| [0, i, i + 1]).collect();
    let is_edge = |i: usize, j: usize| j - i == 1 || (i == 0 && j == n - 1);
    let allowed = |i: usize, j: usize| is_edge(i, j) || diagonal_allowed(offsets[i], offsets[j]);
    if (2..n - 1).all(|j| allowed(0, j)) && separated(offsets, &fan) {
        return fan;
    }
    let weight = |i: usize, j: usize| -> i64 {
        if is_edge(i, j) {
            0
        } else {
            (0..3).map(|a| (offsets[i][a] - offsets[j][a]).pow(2)).sum()
        }
    };
    let mut search = TriangulationSearch {
        offsets,
        allowed: &allowed,
        weight: &weight,
        best: None,
        chosen: Vec::new(),
    };
    search.run(vec![(0, n - 1)], 0);
    let mut best = search
        .best
        .unwrap_or_else(|| panic!("no admissible triangulation for {offsets:?}"))
        .1;
    best.sort_unstable();
    best
}

fn separated(offsets: &[[i64; 3]], tris: &[[usize; 3]]) -> bool {
    tris.iter().enumerate().all(|(i, a)| tris[i + 1..].iter().all(|b| !crosses(offsets, a, b)))
}

fn crosses(offsets: &[[i64; 3]], a: &[usize; 3], b: &[usize; 3]) -> bool {
    !a.iter().any(|x| b.contains(x))
        && crate::meshcheck::triangles_intersect(&a.map(|i| offsets[i]), &b.map(|i| offsets[i]))
}

struct TriangulationSearch<'a> {
    offsets: &'a [[i64; 3]],
    allowed: &'a dyn Fn(usize, usize) -> bool,
    weight: &'a dyn Fn(usize, usize) -> i64,
    best: Option<(i64, Vec<[usize; 3]>)>,
    chosen: Vec<[usize; 3]>,
}

impl TriangulationSearch<'_> {
    /// Depth-first over the apex of each pending sub-polygon `(i, j)`,
    /// pruned by intersection and by the best weight found so far.
    fn run(&mut self, mut pending: Vec<(usize, usize)>, cost: i64) {
        if self.best.as_ref().is_some_and(|(b, _)| cost >= *b) {
            return;
        }
        let Some((i, j)) = pending.pop() else {
            self.best = Some((cost, self.chosen.clone()));
            return;
        };
        if j - i < 2 {
            return self.run(pending, cost);
        }
        for k in i + 1..j {
            if !(self.allowed)(i, k) || !(self.allowed)(k, j) {
                continue;
            }
            let t = [i, k, j];
            if self.chosen.iter().any(|c| crosses(self.offsets, c, &t)) {
                continue;
            }
            let mut extra = 0;
            if k - i >= 2 {
                extra += (self.weight)(i, k);
            }
            if j - k >= 2 {
                extra += (self.weight)(k, j);
            }
            self.chosen.push(t);
            let mut next = pending.clone();
            next.push((k, j));
            next.push((i, k));
            self.run(next, cost + extra);
            self.chosen.pop();
        }
    }
}

/// Low-resolution triangles of a cycle (`N - 2`, no new points,
/// orientation kept). The triangulation is computed for the direction in
/// which the second point has the smaller key, so a cycle and its reverse
/// get the same triangles with opposite winding and the same first corner.
pub fn decompose_l(cycle: &SurfaceCycle) -> Vec<[LatticeKey; 3]> {
    let p = cycle.points();
    let mut out = Vec::with_capacity(p.len().saturating_sub(2));
    for_each_l_triangle(cycle, |t| out.push(t.map(|i| p[i])));
    out
}

/// Calls `f` with each triangle of [`decompose_l`] as indices into
/// `cycle.points()`.
pub fn for_each_l_triangle(cycle: &SurfaceCycle, mut f: impl FnMut([usize; 3])) {
    let p = cycle.points();
    let n = p.len();
    if n < 3 {
        return;
    }
    let flip = p[n - 1] < p[1];
    // position in the canonical direction -> index into `p`
    let at = |i: usize| if flip { (n - i) % n } else { i };
    let base = cycle_window(cycle).map(|x| 2 * x);
    let offset = |i: usize| crate::lattice::sub3(p[at(i)].doubled(), base);
    let mut emit = |t: [usize; 3]| {
        let [a, b, c] = t.map(at);
        f(if flip { [a, c, b] } else { [a, b, c] })
    };
    let key = (0..n).try_fold(0u64, |key, i| pack_offset(key, offset(i)));
    match key.filter(|_| n <= 12).and_then(|k| triangulation_table().get(&k)) {
        Some(tris) => tris.iter().for_each(|t| emit(t.map(usize::from))),
        None => {
            let offsets: Vec<[i64; 3]> = (0..n).map(offset).collect();
            l_triangulation(&offsets).into_iter().for_each(emit)
        }
    }
}

fn pack_offset(key: u64, o: [i64; 3]) -> Option<u64> {
    o.iter()
        .all(|x| (0..=2).contains(x))
        .then(|| key * 28 + 1 + (o[0] * 9 + o[1] * 3 + o[2]) as u64)
}

/// Base-28 packing of window-local offsets in `0..=2`; `None` if any
/// offset leaves the window or the cycle is too long.
fn pack_offsets(offsets: &[[i64; 3]]) -> Option<u64> {
    if offsets.len() > 12 {
        return None;
    }
    offsets.iter().try_fold(0u64, |key, &o| pack_offset(key, o))
}

/// L triangulations of every cycle any window can produce, in both
/// directions, keyed by packed offsets.
fn triangulation_table() -> &'static HashMap<u64, Vec<[u8; 3]>> {
    static TABLE: OnceLock<HashMap<u64, Vec<[u8; 3]>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = HashMap::default();
        for occupancy in 0..=255u8 {
            for decisions in 0..64u8 {
                for cycle in &cell_pattern(occupancy, decisions).cycles {
                    let offsets: Vec<[i64; 3]> = cycle.iter().map(|&c| CENTER_GEOMETRY[c as usize].0).collect();
                    let min = (0..offsets.len()).min_by_key(|&i| LatticeKey::from_doubled(offsets[i])).unwrap();
                    let mut forward = offsets.clone();
                    forward.rotate_left(min);
                    let mut backward = forward.clone();
                    backward[1..].reverse();
                    for o in [forward, backward] {
                        let key = pack_offsets(&o).expect("cell cycle outside its window");
                        table
                            .entry(key)
                            .or_insert_with(|| l_triangulation(&o).into_iter().map(|t| t.map(|i| i as u8)).collect());
                    }
                }
            }
        }
        table
    })
}

/// Result of a centroid triangulation.
#[derive(Debug, Clone, PartialEq)]
pub struct HDecomposition {
    pub triangles: Vec<[PointKey; 3]>,
    pub centroid: Option<(PointKey, [f64; 3])>,
}

/// Key of the centroid point of a cycle.
pub fn centroid_key(cycle: &SurfaceCycle) -> PointKey {
    let p = cycle.points();
    PointKey::Centroid(p[0], p[1])
}

/// Centroid triangulation. `positions` are the (already displaced)
/// positions of `cycle.points()`. A 3-cycle stays a single triangle;
/// longer cycles become `N` triangles around their mean point.
pub fn decompose_h(cycle: &SurfaceCycle, positions: &[[f64; 3]]) -> HDecomposition {
    let p = cycle.points();
    if p.len() <= 3 {
        return HDecomposition {
            triangles: vec![p.iter().map(|&k| PointKey::Support(k)).collect::<Vec<_>>().try_into().unwrap()],
            centroid: None,
        };
    }
    let c = centroid_key(cycle);
    let n = p.len();
    let triangles = (0..n)
        .map(|i| [c, PointKey::Support(p[i]), PointKey::Support(p[(i + 1) % n])])
        .collect();
    HDecomposition {
        triangles,
        centroid: Some((c, mean(positions))),
    }
}

/// Correctly rounded mean, independent of point order.
pub(crate) fn mean(points: &[[f64; 3]]) -> [f64; 3] {
    let n = points.len() as f64;
    [0, 1, 2].map(|a| fsum(points.iter().map(|p| p[a])) / n)
}

/// Correctly rounded sum (Shewchuk's exact partials with a final
/// half-way correction), so the result does not depend on term order and
/// negating every term negates the sum exactly.
pub fn fsum(terms: impl IntoIterator<Item = f64>) -> f64 {
    // non-overlapping partials of distinct magnitude; a double's exponent
    // range bounds their number well below the buffer size
    let mut buf = [0.0f64; 64];
    let mut len = 0;
    for mut x in terms {
        let partials = &mut buf[..len];
        let mut i = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        buf[i] = x;
        len = i + 1;
    }
    let partials = &buf[..len];
    let Some(mut n) = partials.len().checked_sub(1) else {
        return 0.0;
    };
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        lo = y - (hi - x);
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

/// Area vector `(b - a) x (c - a) / 2`.
pub fn triangle_normal(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> [f64; 3] {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    [
        0.5 * (u[1] * v[2] - u[2] * v[1]),
        0.5 * (u[2] * v[0] - u[0] * v[2]),
        0.5 * (u[0] * v[1] - u[1] * v[0]),
    ]
}

/// Summed area vector of a cycle's triangles, anchored at the mean of its
/// support points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleNormal {
    pub d_sigma: [f64; 3],
    pub anchor: [f64; 3],
}

/// Sums the triangle normals of a cycle's decomposition, exactly rounded.
pub fn cycle_total_normal(support_positions: &[[f64; 3]], triangles: &[[[f64; 3]; 3]]) -> CycleNormal {
    let normals: Vec<[f64; 3]> = triangles.iter().map(|t| triangle_normal(t[0], t[1], t[2])).collect();
    CycleNormal {
        d_sigma: [0, 1, 2].map(|a| fsum(normals.iter().map(|n| n[a]))),
        anchor: mean(support_positions),
    }
}

/// Decomposes one cycle at `resolution` and returns its triangles as
/// positions, together with its [`CycleNormal`].
pub fn cycle_normal(cycle: &SurfaceCycle, resolution: Resolution, positioner: &Positioner) -> CycleNormal {
    let pos: Vec<[f64; 3]> = cycle.points().iter().map(|&k| positioner.position(k)).collect();
    let at = |k: LatticeKey| pos[cycle.points().iter().position(|&x| x == k).unwrap()];
    let tris: Vec<[[f64; 3]; 3]> = match resolution {
        Resolution::L => decompose_l(cycle).into_iter().map(|t| t.map(at)).collect(),
        Resolution::H => {
            let h = decompose_h(cycle, &pos);
            h.triangles
                .iter()
                .map(|t| {
                    t.map(|k| match k {
                        PointKey::Support(s) => at(s),
                        PointKey::Centroid(..) => h.centroid.unwrap().1,
                    })
                })
                .collect()
        }
    };
    cycle_total_normal(&pos, &tris)
}

/// Emits the triangles of `cycle` into `builder`.
pub fn emit_cycle(builder: &mut MeshBuilder, cycle: &SurfaceCycle, resolution: Resolution, positioner: &Positioner) {
    let p = cycle.points();
    match resolution {
        Resolution::L if p.len() <= 12 => emit_l(builder, cycle, positioner, &mut [0; 12]),
        Resolution::L => emit_l(builder, cycle, positioner, &mut vec![0; p.len()]),
        Resolution::H if p.len() <= 12 => emit_h(builder, cycle, positioner, &mut [0; 12], &mut [[0.0; 3]; 12]),
        Resolution::H => emit_h(builder, cycle, positioner, &mut vec![0; p.len()], &mut vec![[0.0; 3]; p.len()]),
    }
}

/// Low-resolution triangles of `cycle`, using `idx` as scratch space of at
/// least the cycle's length.
fn emit_l(builder: &mut MeshBuilder, cycle: &SurfaceCycle, positioner: &Positioner, idx: &mut [u32]) {
    for (i, &k) in cycle.points().iter().enumerate() {
        idx[i] = builder.point(PointKey::Support(k), || positioner.position(k));
    }
    for_each_l_triangle(cycle, |t| builder.triangle(t.map(|i| idx[i])));
}

/// Centroid fan of `cycle`, using `idx` and `pos` as scratch space of at
/// least the cycle's length.
fn emit_h(builder: &mut MeshBuilder, cycle: &SurfaceCycle, positioner: &Positioner, idx: &mut [u32], pos: &mut [[f64; 3]]) {
    let p = cycle.points();
    let n = p.len();
    for (i, &k) in p.iter().enumerate() {
        (idx[i], pos[i]) = builder.point_with_position(PointKey::Support(k), || positioner.position(k));
    }
    if n == 3 {
        builder.triangle([idx[0], idx[1], idx[2]]);
    } else {
        let c = builder.point(centroid_key(cycle), || mean(&pos[..n]));
        for i in 0..n {
            builder.triangle([c, idx[i], idx[(i + 1) % n]]);
        }
    }
}
