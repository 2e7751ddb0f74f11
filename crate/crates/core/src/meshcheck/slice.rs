//! Intersection of a mesh with a principal plane through voxel centers.

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use crate::diconex::Contour2D;
use crate::error::{Error, Result};
use crate::lattice::Axis;
use crate::mesh::{Mesh, PointKey};

/// In-plane coordinates for a slicing axis, cyclic: `z -> (x, y)`,
/// `x -> (y, z)`, `y -> (z, x)`.
pub struct SliceAxisMap;

impl SliceAxisMap {
    pub fn plane_axes(axis: Axis) -> (Axis, Axis) {
        axis.others()
    }

    pub fn project<T: Copy>(axis: Axis, p: [T; 3]) -> [T; 2] {
        let (u, v) = axis.others();
        [p[u.index()], p[v.index()]]
    }
}

/// Contours where the plane through the centers of voxel layer `layer`
/// meets the mesh.
///
/// The plane runs through mesh vertices, so instead of cutting triangles
/// the surface is split: the contours are the boundary of the triangles on
/// the positive side, which keeps their orientation (shapes
/// counterclockwise, holes clockwise, seen from the positive axis). Fails
/// if a triangle lies in the plane or crosses it strictly, or if a contour
/// vertex is not a support point.
pub fn slice_mesh(mesh: &Mesh, axis: Axis, layer: i64) -> Result<Vec<Contour2D>> {
    let a = axis.index();
    let plane = layer as f64 * mesh.spacing[a];
    let eps = 1e-9 * mesh.spacing[a];
    let mut upper: HashSet<(PointKey, PointKey)> = HashSet::default();
    for t in 0..mesh.triangle_count() {
        let side = mesh.triangle_positions(t).map(|p| {
            let d = p[a] - plane;
            if d > eps {
                1
            } else if d < -eps {
                -1
            } else {
                0
            }
        });
        if side.iter().all(|&s| s == 0) {
            return Err(Error::Precondition(format!("triangle {t} lies in the slicing plane")));
        }
        if side.contains(&1) && side.contains(&-1) {
            return Err(Error::Precondition(format!("triangle {t} crosses the slicing plane")));
        }
        if side.contains(&1) {
            let k = mesh.triangle_keys(t);
            for i in 0..3 {
                upper.insert((k[i], k[(i + 1) % 3]));
            }
        }
    }
    let mut next: HashMap<PointKey, PointKey> = HashMap::default();
    for &(p, q) in &upper {
        if !upper.contains(&(q, p)) && next.insert(p, q).is_some() {
            return Err(Error::Precondition(format!("slice contour branches at {p:?}")));
        }
    }
    let mut starts: Vec<PointKey> = next.keys().copied().collect();
    starts.sort();
    let mut seen = HashSet::default();
    let mut contours = Vec::new();
    for s in starts {
        if seen.contains(&s) {
            continue;
        }
        let mut support = Vec::new();
        let mut p = s;
        while seen.insert(p) {
            let PointKey::Support(key) = p else {
                return Err(Error::Precondition("slice contour passes through a centroid".into()));
            };
            support.push(SliceAxisMap::project(axis, key.doubled()));
            p = *next
                .get(&p)
                .ok_or_else(|| Error::Precondition(format!("slice contour is open at {p:?}")))?;
        }
        contours.push(Contour2D::from_support(support));
    }
    contours.sort_by(|a, b| {
        let key = |c: &Contour2D| c.support.iter().map(|p| (p[1], p[0])).collect::<Vec<_>>();
        key(a).cmp(&key(b))
    });
    Ok(contours)
}
