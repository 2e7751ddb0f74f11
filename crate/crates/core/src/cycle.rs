//! Surface cycles and the connectivity policy at points of ambiguity.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::LatticeKey;
use crate::volume::{edge_average, IsoConfig, ScalarGrid, VoxelEdge};

/// Successor policy at points of ambiguity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Always continue on the same voxel: touching shapes stay separate.
    Disconnect,
    /// Always continue on the other voxel: touching shapes are joined.
    Connect,
    /// Decide per edge from the four-voxel field average.
    Mixed,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Disconnect, Mode::Connect, Mode::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Disconnect => "disconnect",
            Mode::Connect => "connect",
            Mode::Mixed => "mixed",
        }
    }

    pub fn is_pure(self) -> bool {
        self != Mode::Mixed
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "disconnect" => Ok(Mode::Disconnect),
            "connect" => Ok(Mode::Connect),
            "mixed" => Ok(Mode::Mixed),
            _ => Err(Error::InvalidArgument(format!("unknown mode '{s}'"))),
        }
    }
}

/// Outcome at a single point of ambiguity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoaDecision {
    Connect,
    Disconnect,
}

/// Resolves points of ambiguity for one extraction. Decisions depend only on
/// the global voxel edge, so every consumer of the same edge agrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoaResolver {
    pub mode: Mode,
    pub threshold: f64,
}

impl PoaResolver {
    pub fn new(mode: Mode, iso: &IsoConfig) -> Self {
        PoaResolver {
            mode,
            threshold: iso.threshold(),
        }
    }

    /// Decision for `edge`, which must be a genuine point of ambiguity.
    pub fn resolve(&self, grid: &ScalarGrid, iso: &IsoConfig, edge: &VoxelEdge) -> Result<PoaDecision> {
        if !edge.is_ambiguous(grid, iso) {
            return Err(Error::Precondition(format!("edge {edge:?} is not a point of ambiguity")));
        }
        self.decide(grid, edge)
    }

    /// Decision without re-checking ambiguity.
    #[inline]
    pub(crate) fn decide(&self, grid: &ScalarGrid, edge: &VoxelEdge) -> Result<PoaDecision> {
        Ok(match self.mode {
            Mode::Disconnect => PoaDecision::Disconnect,
            Mode::Connect => PoaDecision::Connect,
            Mode::Mixed => {
                if edge_average(grid, edge)? >= self.threshold {
                    PoaDecision::Connect
                } else {
                    PoaDecision::Disconnect
                }
            }
        })
    }
}

/// Closed, oriented loop of support points.
///
/// Stored canonically: rotated so the smallest key comes first, traversal
/// direction preserved. Two cycles are equal iff they are the same oriented
/// loop.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SurfaceCycle {
    points: Vec<LatticeKey>,
}

impl SurfaceCycle {
    pub fn new(mut points: Vec<LatticeKey>) -> Self {
        if let Some((pos, _)) = points.iter().enumerate().min_by_key(|(_, k)| **k) {
            points.rotate_left(pos);
        }
        SurfaceCycle { points }
    }

    pub fn points(&self) -> &[LatticeKey] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn reversed(&self) -> Self {
        let mut p = self.points.clone();
        p.reverse();
        SurfaceCycle::new(p)
    }

    /// Consecutive pairs `(a, b)` including the closing pair.
    pub fn directed_edges(&self) -> impl Iterator<Item = (LatticeKey, LatticeKey)> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }
}

impl fmt::Debug for SurfaceCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.points.iter()).finish()
    }
}

/// Cycle lengths that can occur in any mode.
pub const VALID_LENGTHS: [usize; 8] = [3, 4, 5, 6, 7, 8, 9, 12];

/// Histogram of cycle lengths.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Census(BTreeMap<usize, usize>);

impl Census {
    pub fn new() -> Self {
        Census::default()
    }

    pub fn from_lengths(lengths: impl IntoIterator<Item = usize>) -> Self {
        let mut c = Census::new();
        for n in lengths {
            c.add(n, 1);
        }
        c
    }

    pub fn add(&mut self, length: usize, count: usize) {
        if count > 0 {
            *self.0.entry(length).or_default() += count;
        }
    }

    pub fn get(&self, length: usize) -> usize {
        self.0.get(&length).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    /// Triangles produced by a fan decomposition without extra points.
    pub fn low_resolution_triangles(&self) -> usize {
        self.iter().map(|(n, c)| (n - 2) * c).sum()
    }

    /// Triangles produced when every cycle longer than three gets a centroid.
    pub fn high_resolution_triangles(&self) -> usize {
        self.iter().map(|(n, c)| if n > 3 { n * c } else { c }).sum()
    }

    /// Cycles that receive a centroid in high resolution.
    pub fn centroid_count(&self) -> usize {
        self.iter().filter(|(n, _)| *n > 3).map(|(_, c)| c).sum()
    }

    /// Fails if a length outside {3..9, 12} is present.
    pub fn validate(&self) -> Result<()> {
        match self.0.keys().find(|n| !VALID_LENGTHS.contains(n)) {
            Some(n) => Err(Error::Invariant(format!("cycle of impossible length {n}"))),
            None => Ok(()),
        }
    }
}

/// Histogram of cycle lengths; rejects lengths that cannot occur.
pub fn cycle_census<'a>(cycles: impl IntoIterator<Item = &'a SurfaceCycle>) -> Result<Census> {
    let c = Census::from_lengths(cycles.into_iter().map(SurfaceCycle::len));
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::VoxelIndex;
    use crate::lattice::Axis;

    fn k(x: i64) -> LatticeKey {
        LatticeKey::from_doubled([x, 0, 1])
    }

    #[test]
    fn canonical_rotation_keeps_direction() {
        let c = SurfaceCycle::new(vec![k(5), k(1), k(3)]);
        assert_eq!(c.points(), &[k(1), k(3), k(5)]);
        let r = c.reversed();
        assert_eq!(r.points(), &[k(1), k(5), k(3)]);
        assert_ne!(c, r);
    }

    #[test]
    fn census_rejects_impossible_lengths() {
        let c = SurfaceCycle::new((0..10).map(k).collect());
        assert!(cycle_census([&c]).is_err());
        let ok = SurfaceCycle::new((0..12).map(k).collect());
        assert_eq!(cycle_census([&ok]).unwrap().get(12), 1);
    }

    #[test]
    fn census_triangle_counts() {
        let c = Census::from_lengths([3, 4, 7, 12]);
        assert_eq!(c.low_resolution_triangles(), 1 + 2 + 5 + 10);
        assert_eq!(c.high_resolution_triangles(), 1 + 4 + 7 + 12);
        assert_eq!(c.centroid_count(), 3);
    }

    #[test]
    fn resolver_modes() {
        let base = VoxelIndex::new(0, 0, 0);
        let e = VoxelEdge::new(base, Axis::Z);
        // voxels in cyclic order (0,0) (1,0) (1,1) (0,1)
        let g = ScalarGrid::from_u8([2, 2, 1], &[180, 100, 100, 180]).unwrap();
        let iso = IsoConfig::new(150.0).unwrap();
        // (0,0)=180 (1,0)=100 (0,1)=100 (1,1)=180 -> diagonal pair
        let mixed = PoaResolver::new(Mode::Mixed, &iso);
        assert_eq!(mixed.resolve(&g, &iso, &e).unwrap(), PoaDecision::Disconnect);
        let g = ScalarGrid::from_u8([2, 2, 1], &[200, 120, 120, 200]).unwrap();
        assert_eq!(mixed.resolve(&g, &iso, &e).unwrap(), PoaDecision::Connect);
        let d = PoaResolver::new(Mode::Disconnect, &iso);
        assert_eq!(d.resolve(&g, &iso, &e).unwrap(), PoaDecision::Disconnect);
        let c = PoaResolver::new(Mode::Connect, &iso);
        assert_eq!(c.resolve(&g, &iso, &e).unwrap(), PoaDecision::Connect);
    }

    #[test]
    fn resolver_rejects_non_ambiguous_edges() {
        let g = ScalarGrid::from_u8([2, 2, 1], &[200, 200, 0, 0]).unwrap();
        let iso = IsoConfig::new(150.0).unwrap();
        let e = VoxelEdge::new(VoxelIndex::new(0, 0, 0), Axis::Z);
        let r = PoaResolver::new(Mode::Disconnect, &iso);
        assert!(matches!(r.resolve(&g, &iso, &e), Err(Error::Precondition(_))));
    }
}
