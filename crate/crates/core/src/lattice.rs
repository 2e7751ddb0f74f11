//! Integer lattice bookkeeping shared by every engine.
//!
//! All combinatorial objects live on the *doubled* lattice: a voxel center
//! `(i, j, k)` sits at `(2i, 2j, 2k)`, so boundary-face centers (support
//! points) have exactly one odd coordinate and voxel-edge midpoints
//! (junctures) have exactly two. Keys built from doubled coordinates let
//! paths meet exactly without any floating-point comparison.

use std::fmt;

/// A lattice axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X = 0,
    Y = 1,
    Z = 2,
}

impl std::str::FromStr for Axis {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            _ => Err(crate::error::Error::InvalidArgument(format!("unknown axis '{s}'"))),
        }
    }
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Axis {
        match i {
            0 => Axis::X,
            1 => Axis::Y,
            2 => Axis::Z,
            _ => panic!("axis index {i} out of range"),
        }
    }

    /// The two remaining axes `(u, v)` with `u x v = self`.
    #[inline]
    pub fn others(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::Z, Axis::X),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }

    #[inline]
    pub fn unit(self) -> [i64; 3] {
        let mut u = [0; 3];
        u[self.index()] = 1;
        u
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// A signed axis direction, one of `±x, ±y, ±z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    pub axis: Axis,
    pub positive: bool,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::new(Axis::X, true),
        Direction::new(Axis::X, false),
        Direction::new(Axis::Y, true),
        Direction::new(Axis::Y, false),
        Direction::new(Axis::Z, true),
        Direction::new(Axis::Z, false),
    ];

    pub const fn new(axis: Axis, positive: bool) -> Self {
        Direction { axis, positive }
    }

    #[inline]
    pub fn sign(self) -> i64 {
        if self.positive {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn vector(self) -> [i64; 3] {
        let mut v = [0; 3];
        v[self.axis.index()] = self.sign();
        v
    }

    pub fn reversed(self) -> Self {
        Direction::new(self.axis, !self.positive)
    }
}

#[inline]
pub(crate) fn add3(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub(crate) fn sub3(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[cfg(test)]
pub(crate) fn cross3(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

const BITS: u32 = 21;
const MASK: u64 = (1 << BITS) - 1;
const OFFSET: i64 = 8;

/// Exact identity of a point on the doubled lattice, packed into 64 bits.
///
/// Ordering is z-major, then y, then x, which makes sorted output follow
/// the natural slice order of a volume.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeKey(u64);

impl LatticeKey {
    /// Packs doubled coordinates. Each component must lie in
    /// `[-8, 2^21 - 9]`, i.e. volumes up to about a million voxels per axis.
    #[inline]
    pub fn from_doubled(d: [i64; 3]) -> Self {
        let pack = |c: i64| {
            let s = c + OFFSET;
            assert!((0..=MASK as i64).contains(&s), "coordinate {c} out of key range");
            s as u64 & MASK
        };
        LatticeKey(pack(d[2]) << (2 * BITS) | pack(d[1]) << BITS | pack(d[0]))
    }

    #[inline]
    pub fn doubled(self) -> [i64; 3] {
        let unpack = |s: u64| (s & MASK) as i64 - OFFSET;
        [unpack(self.0), unpack(self.0 >> BITS), unpack(self.0 >> (2 * BITS))]
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    /// Number of odd doubled coordinates: 0 for voxel centers, 1 for face
    /// centers, 2 for voxel-edge midpoints.
    pub fn odd_count(self) -> usize {
        self.doubled().iter().filter(|c| c.rem_euclid(2) == 1).count()
    }

    /// Position in lattice units (voxel centers at integers).
    pub fn lattice_position(self) -> [f64; 3] {
        let d = self.doubled();
        [d[0] as f64 * 0.5, d[1] as f64 * 0.5, d[2] as f64 * 0.5]
    }
}

impl fmt::Debug for LatticeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.doubled();
        write!(f, "<{x},{y},{z}>/2")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn others_are_right_handed() {
        for a in Axis::ALL {
            let (u, v) = a.others();
            assert_eq!(cross3(u.unit(), v.unit()), a.unit());
        }
    }

    #[test]
    fn key_order_is_z_major() {
        let a = LatticeKey::from_doubled([100, 0, 0]);
        let b = LatticeKey::from_doubled([0, 0, 1]);
        assert!(a < b);
        let c = LatticeKey::from_doubled([0, 1, 0]);
        assert!(a < c && c < b);
    }

    proptest! {
        #[test]
        fn key_roundtrip(x in -8i64..100_000, y in -8i64..100_000, z in -8i64..100_000) {
            let k = LatticeKey::from_doubled([x, y, z]);
            prop_assert_eq!(k.doubled(), [x, y, z]);
        }
    }
}
