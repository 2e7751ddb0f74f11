//! The scalar lattice, the activity predicate, range vectors and linear
//! field interpolation shared by every engine.

use crate::error::{Error, Result};
use crate::lattice::{add3, Axis, Direction, LatticeKey};

/// Storage type of the field values as they were loaded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueKind {
    U8,
    U16,
    F32,
}

impl ValueKind {
    pub fn bytes_per_value(self) -> usize {
        match self {
            ValueKind::U8 => 1,
            ValueKind::U16 => 2,
            ValueKind::F32 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ValueKind::U8 => "u8",
            ValueKind::U16 => "u16",
            ValueKind::F32 => "f32",
        }
    }

    pub fn parse(s: &str) -> Option<ValueKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "u8" | "uint8" => Some(ValueKind::U8),
            "u16" | "uint16" => Some(ValueKind::U16),
            "f32" | "float32" | "float" => Some(ValueKind::F32),
            _ => None,
        }
    }
}

/// Integer voxel address. May point one (or more) steps outside the domain;
/// such voxels are always inactive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VoxelIndex {
    pub i: i64,
    pub j: i64,
    pub k: i64,
}

impl VoxelIndex {
    pub const fn new(i: i64, j: i64, k: i64) -> Self {
        VoxelIndex { i, j, k }
    }

    #[inline]
    pub fn to_array(self) -> [i64; 3] {
        [self.i, self.j, self.k]
    }

    #[inline]
    pub fn from_array(a: [i64; 3]) -> Self {
        VoxelIndex::new(a[0], a[1], a[2])
    }

    #[inline]
    pub fn step(self, d: Direction) -> Self {
        VoxelIndex::from_array(add3(self.to_array(), d.vector()))
    }

    #[inline]
    pub fn offset(self, o: [i64; 3]) -> Self {
        VoxelIndex::from_array(add3(self.to_array(), o))
    }

    /// Center on the doubled lattice.
    #[inline]
    pub fn doubled(self) -> [i64; 3] {
        [2 * self.i, 2 * self.j, 2 * self.k]
    }
}

/// Isovalue plus the optional mixed-mode threshold override.
///
/// A voxel is active iff its value is `>= isovalue`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoConfig {
    pub isovalue: f64,
    pub poa_threshold: Option<f64>,
}

impl IsoConfig {
    pub fn new(isovalue: f64) -> Result<Self> {
        if !isovalue.is_finite() {
            return Err(Error::InvalidArgument(format!("isovalue {isovalue} is not finite")));
        }
        Ok(IsoConfig {
            isovalue,
            poa_threshold: None,
        })
    }

    pub fn with_poa_threshold(mut self, threshold: f64) -> Result<Self> {
        if !threshold.is_finite() {
            return Err(Error::InvalidArgument(format!("threshold {threshold} is not finite")));
        }
        self.poa_threshold = Some(threshold);
        Ok(self)
    }

    /// Threshold used by mixed mode; defaults to the isovalue.
    pub fn threshold(&self) -> f64 {
        self.poa_threshold.unwrap_or(self.isovalue)
    }
}

/// A regular 3D lattice of field values, x-fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    dims: [usize; 3],
    values: Vec<f32>,
    kind: ValueKind,
    spacing: [f64; 3],
}

impl ScalarGrid {
    pub fn new(dims: [usize; 3], values: Vec<f32>, kind: ValueKind, spacing: [f64; 3]) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidGrid(format!("dimensions {dims:?} must be positive")));
        }
        let n = dims[0]
            .checked_mul(dims[1])
            .and_then(|v| v.checked_mul(dims[2]))
            .ok_or_else(|| Error::InvalidGrid("dimension product overflows".into()))?;
        if values.len() != n {
            return Err(Error::InvalidGrid(format!(
                "expected {n} values for {dims:?}, got {}",
                values.len()
            )));
        }
        if spacing.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidGrid(format!("spacing {spacing:?} must be positive")));
        }
        if dims.iter().any(|&d| d >= (1 << 19)) {
            return Err(Error::InvalidGrid(format!("dimensions {dims:?} exceed the lattice key range")));
        }
        Ok(ScalarGrid {
            dims,
            values,
            kind,
            spacing,
        })
    }

    pub fn from_u8(dims: [usize; 3], values: &[u8]) -> Result<Self> {
        Self::new(dims, values.iter().map(|&v| v as f32).collect(), ValueKind::U8, [1.0; 3])
    }

    pub fn from_u16(dims: [usize; 3], values: &[u16]) -> Result<Self> {
        Self::new(dims, values.iter().map(|&v| v as f32).collect(), ValueKind::U16, [1.0; 3])
    }

    pub fn from_f32(dims: [usize; 3], values: Vec<f32>) -> Result<Self> {
        Self::new(dims, values, ValueKind::F32, [1.0; 3])
    }

    /// Builds a grid by evaluating `f` at every voxel.
    pub fn from_fn(dims: [usize; 3], kind: ValueKind, mut f: impl FnMut(usize, usize, usize) -> f32) -> Result<Self> {
        let mut values = Vec::with_capacity(dims.iter().product());
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    values.push(f(i, j, k));
                }
            }
        }
        Self::new(dims, values, kind, [1.0; 3])
    }

    pub fn with_spacing(mut self, spacing: [f64; 3]) -> Result<Self> {
        if spacing.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidGrid(format!("spacing {spacing:?} must be positive")));
        }
        self.spacing = spacing;
        Ok(self)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }

    pub fn value_kind(&self) -> ValueKind {
        self.kind
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn contains(&self, v: VoxelIndex) -> bool {
        v.i >= 0
            && v.j >= 0
            && v.k >= 0
            && (v.i as usize) < self.dims[0]
            && (v.j as usize) < self.dims[1]
            && (v.k as usize) < self.dims[2]
    }

    #[inline]
    fn linear(&self, v: VoxelIndex) -> usize {
        (v.k as usize * self.dims[1] + v.j as usize) * self.dims[0] + v.i as usize
    }

    /// Field value, or `None` outside the domain.
    #[inline]
    pub fn value(&self, v: VoxelIndex) -> Option<f64> {
        self.contains(v).then(|| self.values[self.linear(v)] as f64)
    }

    /// World position of a voxel center.
    pub fn world_position(&self, lattice: [f64; 3]) -> [f64; 3] {
        [
            lattice[0] * self.spacing[0],
            lattice[1] * self.spacing[1],
            lattice[2] * self.spacing[2],
        ]
    }

    /// Number of active voxels under `iso`.
    pub fn active_count(&self, iso: &IsoConfig) -> usize {
        self.values.iter().filter(|&&v| v as f64 >= iso.isovalue).count()
    }
}

/// True iff `v` lies inside the domain and its value is `>= isovalue`.
#[inline]
pub fn is_active(grid: &ScalarGrid, iso: &IsoConfig, v: VoxelIndex) -> bool {
    grid.value(v).is_some_and(|f| f >= iso.isovalue)
}

/// A lattice edge shared by four voxels: the line along `axis` through the
/// common corner of `base`, `base+u`, `base+v` and `base+u+v`, where
/// `(u, v) = axis.others()`. Its midpoint is a juncture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VoxelEdge {
    pub base: VoxelIndex,
    pub axis: Axis,
}

impl VoxelEdge {
    pub fn new(base: VoxelIndex, axis: Axis) -> Self {
        VoxelEdge { base, axis }
    }

    /// The four voxels sharing the edge, in cyclic order about `axis`.
    pub fn voxels(&self) -> [VoxelIndex; 4] {
        let (u, v) = self.axis.others();
        let (u, v) = (u.unit(), v.unit());
        [
            self.base,
            self.base.offset(u),
            self.base.offset(add3(u, v)),
            self.base.offset(v),
        ]
    }

    pub fn juncture_key(&self) -> LatticeKey {
        let (u, v) = self.axis.others();
        LatticeKey::from_doubled(add3(self.base.doubled(), add3(u.unit(), v.unit())))
    }

    /// Inverse of [`VoxelEdge::juncture_key`]; `None` unless the key has
    /// exactly two odd doubled coordinates.
    pub fn from_juncture(key: LatticeKey) -> Option<Self> {
        let d = key.doubled();
        let even: Vec<usize> = (0..3).filter(|&a| d[a].rem_euclid(2) == 0).collect();
        if even.len() != 1 {
            return None;
        }
        let axis = Axis::from_index(even[0]);
        let (u, v) = axis.others();
        let mut base = d;
        base[u.index()] -= 1;
        base[v.index()] -= 1;
        Some(VoxelEdge::new(
            VoxelIndex::new(base[0] / 2, base[1] / 2, base[2] / 2),
            axis,
        ))
    }

    /// True iff exactly two diagonally opposite voxels of the four are active.
    pub fn is_ambiguous(&self, grid: &ScalarGrid, iso: &IsoConfig) -> bool {
        let a = self.voxels().map(|v| is_active(grid, iso, v));
        (a[0] && a[2] && !a[1] && !a[3]) || (a[1] && a[3] && !a[0] && !a[2])
    }
}

/// Mean of the four field values around a voxel edge.
pub fn edge_average(grid: &ScalarGrid, edge: &VoxelEdge) -> Result<f64> {
    let mut sum = 0.0;
    for v in edge.voxels() {
        sum += grid.value(v).ok_or_else(|| {
            Error::Precondition(format!("voxel {v:?} around edge {edge:?} lies outside the domain"))
        })?;
    }
    Ok(sum / 4.0)
}

/// Displacement parameter `t` of a support point along its range vector,
/// measured from the active center (`t = 0`) toward the inactive center
/// (`t = 1`) under a linear field model. A flat pair keeps `t = 0.5`.
#[inline]
pub fn interpolation_parameter(f_active: f64, f_inactive: f64, iso: f64) -> f64 {
    if f_active == f_inactive {
        return 0.5;
    }
    ((f_active - iso) / (f_active - f_inactive)).clamp(0.0, 1.0)
}

/// Segment from an active voxel center to the center of an inactive
/// 6-neighbor. Its midpoint is the center of the boundary face between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RangeVector {
    pub active: VoxelIndex,
    pub direction: Direction,
}

impl RangeVector {
    pub fn new(active: VoxelIndex, direction: Direction) -> Self {
        RangeVector { active, direction }
    }

    #[inline]
    pub fn inactive(&self) -> VoxelIndex {
        self.active.step(self.direction)
    }

    /// Key of the boundary-face center.
    #[inline]
    pub fn support_key(&self) -> LatticeKey {
        LatticeKey::from_doubled(add3(self.active.doubled(), self.direction.vector()))
    }

    /// Recovers the range vector of a support point: the face center between
    /// two 6-neighbors, oriented from the active one. `None` if neither or
    /// both sides are active, or the key is not a face center.
    pub fn from_support_key(key: LatticeKey, grid: &ScalarGrid, iso: &IsoConfig) -> Option<Self> {
        let d = key.doubled();
        let odd = d.map(|x| x.rem_euclid(2) == 1);
        let axis = match odd {
            [true, false, false] => Axis::X,
            [false, true, false] => Axis::Y,
            [false, false, true] => Axis::Z,
            _ => return None,
        };
        let mut lo = d;
        lo[axis.index()] -= 1;
        let lo = VoxelIndex::new(lo[0] / 2, lo[1] / 2, lo[2] / 2);
        let hi = lo.step(Direction::new(axis, true));
        match (is_active(grid, iso, lo), is_active(grid, iso, hi)) {
            (true, false) => Some(RangeVector::new(lo, Direction::new(axis, true))),
            (false, true) => Some(RangeVector::new(hi, Direction::new(axis, false))),
            _ => None,
        }
    }

    /// Displacement parameter for this range vector. Border faces (inactive
    /// side outside the domain) stay at the face center.
    pub fn parameter(&self, grid: &ScalarGrid, iso: &IsoConfig) -> f64 {
        match (grid.value(self.active), grid.value(self.inactive())) {
            (Some(a), Some(b)) => interpolation_parameter(a, b, iso.isovalue),
            _ => 0.5,
        }
    }

    /// Point at parameter `t`, in lattice units.
    pub fn lattice_point(&self, t: f64) -> [f64; 3] {
        let a = self.active.to_array();
        let d = self.direction.vector();
        [
            a[0] as f64 + t * d[0] as f64,
            a[1] as f64 + t * d[1] as f64,
            a[2] as f64 + t * d[2] as f64,
        ]
    }
}

/// Activity of every voxel with a one-voxel inactive halo, for fast
/// repeated lookups by the scanning engines.
#[derive(Debug, Clone)]
pub struct ActivityMask {
    dims: [usize; 3],
    padded: [usize; 3],
    bits: Vec<bool>,
}

impl ActivityMask {
    pub fn new(grid: &ScalarGrid, iso: &IsoConfig) -> Self {
        let dims = grid.dims();
        let padded = [dims[0] + 2, dims[1] + 2, dims[2] + 2];
        let mut bits = vec![false; padded[0] * padded[1] * padded[2]];
        let values = grid.values();
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                let src = (k * dims[1] + j) * dims[0];
                let dst = ((k + 1) * padded[1] + j + 1) * padded[0] + 1;
                for i in 0..dims[0] {
                    bits[dst + i] = values[src + i] as f64 >= iso.isovalue;
                }
            }
        }
        ActivityMask { dims, padded, bits }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    #[inline]
    pub fn get(&self, v: VoxelIndex) -> bool {
        let (i, j, k) = (v.i + 1, v.j + 1, v.k + 1);
        if i < 0 || j < 0 || k < 0 {
            return false;
        }
        let (i, j, k) = (i as usize, j as usize, k as usize);
        if i >= self.padded[0] || j >= self.padded[1] || k >= self.padded[2] {
            return false;
        }
        self.bits[(k * self.padded[1] + j) * self.padded[0] + i]
    }

    /// Row access into the padded array: voxel `(i, j, k)` of the domain
    /// with `i, j, k` in `-1..=n` maps to `(i+1, j+1, k+1)`.
    #[inline]
    pub(crate) fn padded_index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.padded[1] + j) * self.padded[0] + i
    }

    #[inline]
    pub(crate) fn padded_dims(&self) -> [usize; 3] {
        self.padded
    }

    #[inline]
    pub(crate) fn raw(&self) -> &[bool] {
        &self.bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn single(value: u8) -> ScalarGrid {
        ScalarGrid::from_u8([1, 1, 1], &[value]).unwrap()
    }

    #[test]
    fn activity_uses_greater_or_equal() {
        let iso = IsoConfig::new(180.0).unwrap();
        assert!(is_active(&single(180), &iso, VoxelIndex::new(0, 0, 0)));
        assert!(!is_active(&single(179), &iso, VoxelIndex::new(0, 0, 0)));
        assert!(!is_active(&single(255), &iso, VoxelIndex::new(-1, 0, 0)));
    }

    #[test]
    fn edge_average_values() {
        let g = ScalarGrid::from_u8([2, 2, 1], &[133, 0, 0, 0]).unwrap();
        let e = VoxelEdge::new(VoxelIndex::new(0, 0, 0), Axis::Z);
        assert_eq!(edge_average(&g, &e).unwrap(), 33.25);

        let g = ScalarGrid::from_u8([2, 2, 1], &[180, 100, 100, 180]).unwrap();
        assert_eq!(edge_average(&g, &e).unwrap(), 140.0);

        let g = ScalarGrid::from_u8([2, 2, 1], &[7; 4]).unwrap();
        assert_eq!(edge_average(&g, &e).unwrap(), 7.0);
    }

    #[test]
    fn edge_average_rejects_border_edges() {
        let g = ScalarGrid::from_u8([2, 2, 1], &[1; 4]).unwrap();
        let e = VoxelEdge::new(VoxelIndex::new(1, 0, 0), Axis::Z);
        assert!(matches!(edge_average(&g, &e), Err(Error::Precondition(_))));
    }

    #[test]
    fn interpolation_examples() {
        assert_relative_eq!(interpolation_parameter(133.0, 0.0, 100.0), 33.0 / 133.0);
        assert_relative_eq!(interpolation_parameter(133.0, 0.0, 100.0), 0.248_120_300_751_879_7, epsilon = 1e-15);
        assert_eq!(interpolation_parameter(100.0, 3.0, 100.0), 0.0);
        assert_eq!(interpolation_parameter(200.0, 100.0, 150.0), 0.5);
        assert_eq!(interpolation_parameter(5.0, 5.0, 5.0), 0.5);
        // The midpoint of the (133, 0) pair carries 66.5 under the linear model.
        assert_eq!(interpolation_parameter(133.0, 0.0, 66.5), 0.5);
    }

    #[test]
    fn juncture_roundtrip() {
        for axis in Axis::ALL {
            let e = VoxelEdge::new(VoxelIndex::new(3, -1, 7), axis);
            assert_eq!(VoxelEdge::from_juncture(e.juncture_key()), Some(e));
        }
    }

    #[test]
    fn range_vector_support_roundtrip() {
        let g = ScalarGrid::from_u8([2, 1, 1], &[200, 10]).unwrap();
        let iso = IsoConfig::new(100.0).unwrap();
        let r = RangeVector::new(VoxelIndex::new(0, 0, 0), Direction::new(Axis::X, true));
        assert_eq!(RangeVector::from_support_key(r.support_key(), &g, &iso), Some(r));
        let border = RangeVector::new(VoxelIndex::new(0, 0, 0), Direction::new(Axis::X, false));
        assert_eq!(RangeVector::from_support_key(border.support_key(), &g, &iso), Some(border));
        assert_eq!(border.parameter(&g, &iso), 0.5);
    }

    #[test]
    fn mask_matches_predicate() {
        let g = ScalarGrid::from_u8([3, 2, 2], &[0, 9, 3, 9, 9, 0, 1, 2, 9, 9, 0, 0]).unwrap();
        let iso = IsoConfig::new(5.0).unwrap();
        let m = ActivityMask::new(&g, &iso);
        for k in -2..4 {
            for j in -2..4 {
                for i in -2..5 {
                    let v = VoxelIndex::new(i, j, k);
                    assert_eq!(m.get(v), is_active(&g, &iso, v), "{v:?}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn parameter_in_unit_range_and_monotone(
            a in -1000.0f64..1000.0, b in -1000.0f64..1000.0,
            iso1 in -1000.0f64..1000.0, iso2 in -1000.0f64..1000.0,
        ) {
            let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
            let (i1, i2) = if iso1 <= iso2 { (iso1, iso2) } else { (iso2, iso1) };
            let t1 = interpolation_parameter(hi, lo, i1);
            let t2 = interpolation_parameter(hi, lo, i2);
            prop_assert!((0.0..=1.0).contains(&t1));
            prop_assert!(t2 <= t1);
        }
    }
}
