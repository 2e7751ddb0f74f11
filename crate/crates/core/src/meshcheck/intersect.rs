//! Exact triangle-triangle intersection.
//!
//! Undisplaced vertices are half-integers and centroids are their means
//! over at most twelve points, so scaling by 5040 (divisible by `2N` for
//! every cycle length `N`) puts every vertex on an integer grid. All
//! predicates then run in exact `i128` arithmetic.

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use crate::mesh::Mesh;

const SCALE: f64 = 5040.0;

type P3 = [i64; 3];
type P2 = [i64; 2];

fn sub(a: P3, b: P3) -> [i128; 3] {
    [(a[0] - b[0]) as i128, (a[1] - b[1]) as i128, (a[2] - b[2]) as i128]
}

fn orient3d(a: P3, b: P3, c: P3, d: P3) -> i32 {
    let (u, v, w) = (sub(b, a), sub(c, a), sub(d, a));
    let det = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) + u[2] * (v[0] * w[1] - v[1] * w[0]);
    det.signum() as i32
}

fn orient2d(a: P2, b: P2, c: P2) -> i32 {
    let det = (b[0] - a[0]) as i128 * (c[1] - a[1]) as i128 - (b[1] - a[1]) as i128 * (c[0] - a[0]) as i128;
    det.signum() as i32
}

fn on_segment(a: P2, b: P2, p: P2) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_intersect_2d(a: P2, b: P2, c: P2, d: P2) -> bool {
    let (o1, o2, o3, o4) = (orient2d(a, b, c), orient2d(a, b, d), orient2d(c, d, a), orient2d(c, d, b));
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_segment(a, b, c))
        || (o2 == 0 && on_segment(a, b, d))
        || (o3 == 0 && on_segment(c, d, a))
        || (o4 == 0 && on_segment(c, d, b))
}

fn point_in_triangle_2d(t: [P2; 3], p: P2) -> bool {
    let s = [orient2d(t[0], t[1], p), orient2d(t[1], t[2], p), orient2d(t[2], t[0], p)];
    !(s.iter().any(|&x| x > 0) && s.iter().any(|&x| x < 0))
}

/// Drops the coordinate along which the plane normal is largest.
fn projector(t: &[P3; 3]) -> impl Fn(P3) -> P2 {
    let (u, v) = (sub(t[1], t[0]), sub(t[2], t[0]));
    let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let drop = (0..3).max_by_key(|&a| n[a].abs()).unwrap();
    move |p: P3| match drop {
        0 => [p[1], p[2]],
        1 => [p[2], p[0]],
        _ => [p[0], p[1]],
    }
}

fn coplanar_intersect(t1: &[P3; 3], t2: &[P3; 3]) -> bool {
    let proj = projector(t1);
    let a = t1.map(&proj);
    let b = t2.map(&proj);
    for i in 0..3 {
        for j in 0..3 {
            if segments_intersect_2d(a[i], a[(i + 1) % 3], b[j], b[(j + 1) % 3]) {
                return true;
            }
        }
    }
    point_in_triangle_2d(a, b[0]) || point_in_triangle_2d(b, a[0])
}

fn segment_hits_triangle(p: P3, q: P3, t: &[P3; 3]) -> bool {
    let op = orient3d(t[0], t[1], t[2], p);
    let oq = orient3d(t[0], t[1], t[2], q);
    if op * oq > 0 {
        return false;
    }
    if op == 0 && oq == 0 {
        let proj = projector(t);
        let tt = t.map(&proj);
        let (a, b) = (proj(p), proj(q));
        return (0..3).any(|i| segments_intersect_2d(a, b, tt[i], tt[(i + 1) % 3])) || point_in_triangle_2d(tt, a);
    }
    let s = [orient3d(p, q, t[0], t[1]), orient3d(p, q, t[1], t[2]), orient3d(p, q, t[2], t[0])];
    !(s.iter().any(|&x| x > 0) && s.iter().any(|&x| x < 0))
}

/// Exact test whether two closed triangles share at least one point.
pub fn triangles_intersect(t1: &[P3; 3], t2: &[P3; 3]) -> bool {
    let o1 = t1.map(|p| orient3d(t2[0], t2[1], t2[2], p));
    if o1.iter().all(|&o| o > 0) || o1.iter().all(|&o| o < 0) {
        return false;
    }
    let o2 = t2.map(|p| orient3d(t1[0], t1[1], t1[2], p));
    if o2.iter().all(|&o| o > 0) || o2.iter().all(|&o| o < 0) {
        return false;
    }
    if o1.iter().all(|&o| o == 0) {
        return coplanar_intersect(t1, t2);
    }
    (0..3).any(|i| segment_hits_triangle(t1[i], t1[(i + 1) % 3], t2))
        || (0..3).any(|i| segment_hits_triangle(t2[i], t2[(i + 1) % 3], t1))
}

fn to_grid(p: [f64; 3], spacing: [f64; 3]) -> P3 {
    [0, 1, 2].map(|a| (p[a] / spacing[a] * SCALE).round() as i64)
}

/// All pairs of triangles that intersect without sharing a vertex, found
/// with a uniform spatial hash of one voxel per cell. Pairs are `(i, j)`
/// with `i < j`, sorted.
pub fn self_intersect_bruteforce(mesh: &Mesh) -> Vec<(usize, usize)> {
    let tris: Vec<[P3; 3]> = (0..mesh.triangle_count())
        .map(|t| mesh.triangle_positions(t).map(|p| to_grid(p, mesh.spacing)))
        .collect();
    let cell = SCALE as i64;
    let bounds: Vec<(P3, P3)> = tris
        .iter()
        .map(|t| {
            let lo = [0, 1, 2].map(|a| t.iter().map(|p| p[a]).min().unwrap());
            let hi = [0, 1, 2].map(|a| t.iter().map(|p| p[a]).max().unwrap());
            (lo, hi)
        })
        .collect();
    let mut buckets: HashMap<P3, Vec<usize>> = HashMap::default();
    for (i, (lo, hi)) in bounds.iter().enumerate() {
        let lo = lo.map(|x| x.div_euclid(cell));
        let hi = hi.map(|x| x.div_euclid(cell));
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    buckets.entry([x, y, z]).or_default().push(i);
                }
            }
        }
    }
    let mut found = HashSet::default();
    for members in buckets.values() {
        for (n, &i) in members.iter().enumerate() {
            for &j in &members[n + 1..] {
                let (i, j) = (i.min(j), i.max(j));
                let (a, b) = (&bounds[i], &bounds[j]);
                if (0..3).any(|k| a.1[k] < b.0[k] || b.1[k] < a.0[k]) || found.contains(&(i, j)) {
                    continue;
                }
                let ki = mesh.triangle_keys(i);
                let kj = mesh.triangle_keys(j);
                if ki.iter().any(|k| kj.contains(k)) {
                    continue;
                }
                if triangles_intersect(&tris[i], &tris[j]) {
                    found.insert((i, j));
                }
            }
        }
    }
    let mut out: Vec<_> = found.into_iter().collect();
    out.sort_unstable();
    out
}
