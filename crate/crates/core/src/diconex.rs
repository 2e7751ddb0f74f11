//! Two-dimensional contour extraction on pixel grids.
//!
//! Coordinates are doubled like the 3D lattice: pixel `(x, y)` has its
//! center at `(2x, 2y)`, pixel corners have two odd coordinates and edge
//! midpoints (the support points) exactly one.

use rustc_hash::FxHashMap as HashMap;

use crate::cycle::{Mode, PoaDecision};
use crate::error::{Error, Result};
use crate::volume::{interpolation_parameter, IsoConfig};

/// Scalar image, x fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelGrid {
    dims: [usize; 2],
    values: Vec<f32>,
}

impl PixelGrid {
    pub fn new(dims: [usize; 2], values: Vec<f32>) -> Result<Self> {
        if dims[0] == 0 || dims[1] == 0 {
            return Err(Error::InvalidGrid(format!("pixel grid dims must be positive, got {dims:?}")));
        }
        if values.len() != dims[0] * dims[1] {
            return Err(Error::InvalidGrid(format!(
                "expected {} values for dims {dims:?}, got {}",
                dims[0] * dims[1],
                values.len()
            )));
        }
        Ok(PixelGrid { dims, values })
    }

    pub fn from_u8(dims: [usize; 2], values: &[u8]) -> Result<Self> {
        PixelGrid::new(dims, values.iter().map(|&v| v as f32).collect())
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    /// Value at `p`, `None` outside.
    pub fn value(&self, p: [i64; 2]) -> Option<f64> {
        let inside = p[0] >= 0 && p[1] >= 0 && (p[0] as usize) < self.dims[0] && (p[1] as usize) < self.dims[1];
        inside.then(|| self.values[p[1] as usize * self.dims[0] + p[0] as usize] as f64)
    }

    pub fn is_active(&self, iso: &IsoConfig, p: [i64; 2]) -> bool {
        self.value(p).is_some_and(|v| v >= iso.isovalue)
    }
}

/// Oriented pixel edge separating an active pixel (on the left) from an
/// inactive 4-neighbor. Endpoints are doubled corner coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InitialContourVector {
    pub start: [i64; 2],
    pub end: [i64; 2],
    pub owner: [i64; 2],
}

impl InitialContourVector {
    /// Doubled midpoint of the edge.
    pub fn support(&self) -> [i64; 2] {
        [(self.start[0] + self.end[0]) / 2, (self.start[1] + self.end[1]) / 2]
    }
}

const NEIGHBORS: [[i64; 2]; 4] = [[1, 0], [0, 1], [-1, 0], [0, -1]];

/// One vector per (active pixel, inactive 4-neighbor) pair.
pub fn collect_icvs(grid: &PixelGrid, iso: &IsoConfig) -> Vec<InitialContourVector> {
    let mut out = Vec::new();
    for y in 0..grid.dims[1] as i64 {
        for x in 0..grid.dims[0] as i64 {
            let p = [x, y];
            if !grid.is_active(iso, p) {
                continue;
            }
            for d in NEIGHBORS {
                if grid.is_active(iso, [x + d[0], y + d[1]]) {
                    continue;
                }
                let mid = [2 * x + d[0], 2 * y + d[1]];
                let dir = [-d[1], d[0]];
                out.push(InitialContourVector {
                    start: [mid[0] - dir[0], mid[1] - dir[1]],
                    end: [mid[0] + dir[0], mid[1] + dir[1]],
                    owner: p,
                });
            }
        }
    }
    out
}

/// Closed contour through support points.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour2D {
    /// Doubled edge-midpoint coordinates, starting at the lowest `(y, x)`.
    pub support: Vec<[i64; 2]>,
    /// Point positions in pixel units.
    pub points: Vec<[f64; 2]>,
}

impl Contour2D {
    /// Contour through undisplaced support points, rotated to canonical
    /// start.
    pub fn from_support(mut support: Vec<[i64; 2]>) -> Self {
        if let Some(i) = (0..support.len()).min_by_key(|&i| (support[i][1], support[i][0])) {
            support.rotate_left(i);
        }
        let points = support.iter().map(|s| [s[0] as f64 / 2.0, s[1] as f64 / 2.0]).collect();
        Contour2D { support, points }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Shoelace area of the point polygon; positive for shapes, negative
    /// for holes.
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let a = self.points[i];
                let b = self.points[(i + 1) % n];
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
            / 2.0
    }

    pub fn is_counterclockwise(&self) -> bool {
        self.signed_area() > 0.0
    }
}

fn decide(grid: &PixelGrid, iso: &IsoConfig, mode: Mode, corner: [i64; 2]) -> PoaDecision {
    match mode {
        Mode::Disconnect => PoaDecision::Disconnect,
        Mode::Connect => PoaDecision::Connect,
        Mode::Mixed => {
            let (cx, cy) = ((corner[0] - 1) / 2, (corner[1] - 1) / 2);
            let sum: f64 = [[0, 0], [1, 0], [0, 1], [1, 1]]
                .iter()
                .map(|o| grid.value([cx + o[0], cy + o[1]]).unwrap_or(f64::NAN))
                .sum();
            if sum / 4.0 >= iso.threshold() {
                PoaDecision::Connect
            } else {
                PoaDecision::Disconnect
            }
        }
    }
}

/// Links vectors head to tail into closed contours. At a corner with two
/// outgoing vectors the successor keeps the same pixel (disconnect) or
/// switches to the other one (connect).
pub fn link_contours(
    icvs: &[InitialContourVector],
    mode: Mode,
    grid: &PixelGrid,
    iso: &IsoConfig,
) -> Result<Vec<Contour2D>> {
    let mut outgoing: HashMap<[i64; 2], Vec<usize>> = HashMap::default();
    for (i, v) in icvs.iter().enumerate() {
        outgoing.entry(v.start).or_default().push(i);
    }
    let mut next = vec![usize::MAX; icvs.len()];
    for (i, v) in icvs.iter().enumerate() {
        let outs = outgoing.get(&v.end).map(Vec::as_slice).unwrap_or(&[]);
        next[i] = match outs {
            [o] => *o,
            [a, b] => {
                let same = if icvs[*a].owner == v.owner { *a } else { *b };
                let other = if same == *a { *b } else { *a };
                match decide(grid, iso, mode, v.end) {
                    PoaDecision::Disconnect => same,
                    PoaDecision::Connect => other,
                }
            }
            _ => return Err(Error::Invariant(format!("corner {:?} has {} outgoing vectors", v.end, outs.len()))),
        };
    }
    let mut seen = vec![false; icvs.len()];
    let mut contours = Vec::new();
    for s in 0..icvs.len() {
        if seen[s] {
            continue;
        }
        let mut support = Vec::new();
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            support.push(icvs[i].support());
            i = next[i];
        }
        if i != s {
            return Err(Error::Invariant("contour successor map is not a permutation".into()));
        }
        contours.push(Contour2D::from_support(support));
    }
    contours.sort_by(|a, b| {
        let key = |c: &Contour2D| c.support.iter().map(|p| (p[1], p[0])).collect::<Vec<_>>();
        key(a).cmp(&key(b))
    });
    Ok(contours)
}

/// Collects and links in one step.
pub fn extract_contours(grid: &PixelGrid, iso: &IsoConfig, mode: Mode) -> Result<Vec<Contour2D>> {
    link_contours(&collect_icvs(grid, iso), mode, grid, iso)
}

/// Moves each support point along its range vector to the interpolated
/// crossing. Points on the image border stay at the edge midpoint.
pub fn displace_contour(contour: &Contour2D, grid: &PixelGrid, iso: &IsoConfig) -> Contour2D {
    let points = contour
        .support
        .iter()
        .map(|s| {
            let axis = if s[0].rem_euclid(2) == 1 { 0 } else { 1 };
            let mut lo = *s;
            lo[axis] -= 1;
            let lo = [lo[0] / 2, lo[1] / 2];
            let mut hi = lo;
            hi[axis] += 1;
            let (active, inactive) = if grid.is_active(iso, lo) { (lo, hi) } else { (hi, lo) };
            let t = match (grid.value(active), grid.value(inactive)) {
                (Some(a), Some(b)) => interpolation_parameter(a, b, iso.isovalue),
                _ => 0.5,
            };
            [
                active[0] as f64 + t * (inactive[0] - active[0]) as f64,
                active[1] as f64 + t * (inactive[1] - active[1]) as f64,
            ]
        })
        .collect();
    Contour2D {
        support: contour.support.clone(),
        points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(dims: [usize; 2], on: &[[usize; 2]]) -> PixelGrid {
        let mut v = vec![0u8; dims[0] * dims[1]];
        for p in on {
            v[p[1] * dims[0] + p[0]] = 1;
        }
        PixelGrid::from_u8(dims, &v).unwrap()
    }

    fn iso() -> IsoConfig {
        IsoConfig::new(0.5).unwrap()
    }

    #[test]
    fn icv_counts() {
        assert_eq!(collect_icvs(&binary([3, 3], &[[1, 1]]), &iso()).len(), 4);
        assert_eq!(collect_icvs(&binary([3, 3], &[]), &iso()).len(), 0);
        assert_eq!(collect_icvs(&binary([3, 3], &[[0, 0], [1, 0]]), &iso()).len(), 6);
    }

    #[test]
    fn active_pixel_is_on_the_left() {
        for v in collect_icvs(&binary([3, 3], &[[1, 1], [2, 1]]), &iso()) {
            let dir = [v.end[0] - v.start[0], v.end[1] - v.start[1]];
            let left = [-dir[1], dir[0]];
            let m = v.support();
            assert_eq!([m[0] + left[0] / 2, m[1] + left[1] / 2], [2 * v.owner[0], 2 * v.owner[1]]);
        }
    }

    #[test]
    fn single_pixel() {
        for mode in Mode::ALL {
            let c = extract_contours(&binary([3, 3], &[[1, 1]]), &iso(), mode).unwrap();
            assert_eq!(c.len(), 1);
            assert_eq!(c[0].support, vec![[2, 1], [3, 2], [2, 3], [1, 2]]);
            assert!(c[0].is_counterclockwise());
        }
    }

    #[test]
    fn diagonal_pair() {
        let g = binary([3, 3], &[[0, 0], [1, 1]]);
        let d = extract_contours(&g, &iso(), Mode::Disconnect).unwrap();
        assert_eq!(d.iter().map(Contour2D::len).collect::<Vec<_>>(), vec![4, 4]);
        let c = extract_contours(&g, &iso(), Mode::Connect).unwrap();
        assert_eq!(c.iter().map(Contour2D::len).collect::<Vec<_>>(), vec![8]);
        // average 0.5 meets the threshold
        let m = extract_contours(&g, &iso(), Mode::Mixed).unwrap();
        assert_eq!(m, c);
    }

    #[test]
    fn ring_has_clockwise_hole() {
        let on: Vec<[usize; 2]> = (0..3).flat_map(|y| (0..3).map(move |x| [x, y])).filter(|p| *p != [1, 1]).collect();
        let c = extract_contours(&binary([3, 3], &on), &iso(), Mode::Disconnect).unwrap();
        assert_eq!(c.len(), 2);
        let areas: Vec<f64> = c.iter().map(Contour2D::signed_area).collect();
        assert!(areas.iter().any(|&a| a > 0.0) && areas.iter().any(|&a| a < 0.0));
    }

    #[test]
    fn displacement() {
        let g = PixelGrid::from_u8([2, 1], &[133, 0]).unwrap();
        let iso = IsoConfig::new(100.0).unwrap();
        let c = extract_contours(&g, &iso, Mode::Disconnect).unwrap();
        let d = displace_contour(&c[0], &g, &iso);
        let i = c[0].support.iter().position(|s| *s == [1, 0]).unwrap();
        assert!((d.points[i][0] - 33.0 / 133.0).abs() < 1e-12);
        let g = PixelGrid::from_u8([2, 1], &[100, 0]).unwrap();
        let d = displace_contour(&c[0], &g, &iso);
        assert_eq!(d.points[i], [0.0, 0.0]);
    }
}
