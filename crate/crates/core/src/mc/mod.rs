//! Reference Marching Cubes.
//!
//! `Extended` uses a 256-entry table whose ambiguous faces are always
//! split between the two diagonal active corners, so neighboring cells
//! always agree. `Classic15` reproduces the original 15-template scheme:
//! configurations with more active than inactive corners (and half of the
//! four-corner ones) reuse the template of their complement with reversed
//! orientation, which flips the face decision and can tear holes.

mod tables;

use std::collections::BTreeSet;

use rustc_hash::FxHashMap as HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

pub use tables::{EDGE_TABLE, TRI_TABLE};

use crate::cycle::{Census, Mode};
use crate::error::{Error, Result};
use crate::lattice::{add3, LatticeKey};
use crate::marching::{cell_cycles, CENTER_GEOMETRY, VOXEL_OFFSETS};
use crate::mesh::{Engine, Mesh, MeshBuilder, PointKey, PointSharing, Provenance, Resolution};
use crate::tessellate::Positioner;
use crate::volume::{ActivityMask, IsoConfig, ScalarGrid, VoxelIndex};

/// Cube edges as corner pairs.
pub const MC_EDGES: [(u8, u8); 12] = [
    (0, 1),
    (1, 2),
    (2, 3),
    (3, 0),
    (4, 5),
    (5, 6),
    (6, 7),
    (7, 4),
    (0, 4),
    (1, 5),
    (2, 6),
    (3, 7),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum McVariant {
    Classic15,
    Extended,
}

impl McVariant {
    pub fn engine(self) -> Engine {
        match self {
            McVariant::Classic15 => Engine::McClassic,
            McVariant::Extended => Engine::McExtended,
        }
    }
}

impl fmt::Display for McVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.engine().name())
    }
}

impl FromStr for McVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mc-classic" | "classic" => Ok(McVariant::Classic15),
            "mc-extended" | "extended" => Ok(McVariant::Extended),
            _ => Err(Error::InvalidArgument(format!("unknown marching cubes variant `{s}`"))),
        }
    }
}

/// Doubled offset of a cube-edge midpoint within the cell.
pub fn edge_offset(edge: u8) -> [i64; 3] {
    let (a, b) = MC_EDGES[edge as usize];
    add3(VOXEL_OFFSETS[a as usize], VOXEL_OFFSETS[b as usize])
}

/// True if the original scheme handles `config` through its complement.
pub fn is_inverted(config: u8) -> bool {
    let n = config.count_ones();
    n > 4 || (n == 4 && config & 1 == 0)
}

/// Triangles for `config` as edge triples.
pub fn cell_triangles(config: u8, variant: McVariant) -> Vec<[u8; 3]> {
    match variant {
        McVariant::Classic15 if is_inverted(config) => {
            TRI_TABLE[!config as usize].iter().map(|t| [t[0], t[2], t[1]]).collect()
        }
        _ => TRI_TABLE[config as usize].to_vec(),
    }
}

/// Directed boundary edges of a set of triangles over doubled offsets:
/// every directed edge whose reverse is not also present.
pub fn triangle_boundary(triangles: &[[u8; 3]]) -> BTreeSet<([i64; 3], [i64; 3])> {
    let mut edges: HashMap<([i64; 3], [i64; 3]), i32> = HashMap::default();
    for t in triangles {
        for i in 0..3 {
            let a = edge_offset(t[i]);
            let b = edge_offset(t[(i + 1) % 3]);
            *edges.entry((a, b)).or_default() += 1;
            *edges.entry((b, a)).or_default() -= 1;
        }
    }
    edges.into_iter().filter(|&(_, n)| n > 0).map(|(e, _)| e).collect()
}

/// Directed edges of the disconnect-mode cycles of a window.
pub fn vesta_perimeter(config: u8) -> BTreeSet<([i64; 3], [i64; 3])> {
    let mut out = BTreeSet::new();
    for c in cell_cycles(config, 0).cycles {
        for i in 0..c.len() {
            let a = CENTER_GEOMETRY[c[i] as usize].0;
            let b = CENTER_GEOMETRY[c[(i + 1) % c.len()] as usize].0;
            out.insert((a, b));
        }
    }
    out
}

/// Checks the extended table against the disconnect-mode cycle
/// perimeters of every configuration.
pub fn validate_extended_table() -> Result<()> {
    for config in 0..=255u8 {
        let cut = (0..12u8)
            .filter(|&e| TRI_TABLE[config as usize].iter().any(|t| t.contains(&e)))
            .fold(0u16, |m, e| m | 1 << e);
        if cut != EDGE_TABLE[config as usize] {
            return Err(Error::Invariant(format!("configuration {config}: edge table mismatch")));
        }
        if triangle_boundary(TRI_TABLE[config as usize]) != vesta_perimeter(config) {
            return Err(Error::Invariant(format!("configuration {config}: boundary differs from cycle perimeter")));
        }
    }
    Ok(())
}

fn ensure_valid_table() {
    static CHECK: OnceLock<()> = OnceLock::new();
    CHECK.get_or_init(|| validate_extended_table().expect("extended marching cubes table is corrupt"));
}

/// Closed boundary polygons of one cell's triangles, by length.
pub fn cell_polygon_lengths(config: u8, variant: McVariant) -> Vec<usize> {
    let boundary = triangle_boundary(&cell_triangles(config, variant));
    let succ: HashMap<[i64; 3], [i64; 3]> = boundary.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut lengths = Vec::new();
    for &(start, _) in &boundary {
        if seen.contains(&start) {
            continue;
        }
        let mut n = 0;
        let mut p = start;
        while seen.insert(p) {
            n += 1;
            p = succ[&p];
        }
        lengths.push(n);
    }
    lengths
}

/// Census of the per-cell boundary polygons of a Marching Cubes run.
pub fn mc_census(grid: &ScalarGrid, iso: &IsoConfig, variant: McVariant) -> Census {
    static TABLE: OnceLock<[Vec<Vec<usize>>; 2]> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        [McVariant::Classic15, McVariant::Extended].map(|v| (0..=255u8).map(|c| cell_polygon_lengths(c, v)).collect())
    });
    let lengths = &table[(variant == McVariant::Extended) as usize];
    let mut census = Census::new();
    for_each_config(grid, iso, |_, config| {
        for &n in &lengths[config as usize] {
            census.add(n, 1);
        }
    });
    census
}

fn for_each_config(grid: &ScalarGrid, iso: &IsoConfig, mut f: impl FnMut(VoxelIndex, u8)) {
    let mask = ActivityMask::new(grid, iso);
    let [nx, ny, nz] = grid.dims();
    for k in -1..nz as i64 {
        for j in -1..ny as i64 {
            for i in -1..nx as i64 {
                let base = VoxelIndex::new(i, j, k);
                let config = VOXEL_OFFSETS
                    .iter()
                    .enumerate()
                    .fold(0u8, |m, (v, o)| m | (mask.get(base.offset(*o)) as u8) << v);
                if config != 0 && config != 0xff {
                    f(base, config);
                }
            }
        }
    }
}

/// Marching Cubes over all windows including the inactive halo. Vertices
/// sit on the same interpolated support points as the surface cycles but
/// are never shared: every triangle carries its own three points.
pub fn mc_extract(grid: &ScalarGrid, iso: &IsoConfig, variant: McVariant, displace: bool) -> Mesh {
    ensure_valid_table();
    let positioner = Positioner::new(grid, iso, displace);
    let mut builder = MeshBuilder::new(PointSharing::None);
    for_each_config(grid, iso, |base, config| {
        for t in cell_triangles(config, variant) {
            let tri = t.map(|e| {
                let key = LatticeKey::from_doubled(add3(base.doubled(), edge_offset(e)));
                builder.point(PointKey::Support(key), || positioner.position(key))
            });
            builder.triangle(tri);
        }
    });
    builder.finish(Provenance {
        engine: variant.engine(),
        mode: Mode::Disconnect,
        resolution: Resolution::L,
    }, grid.spacing())
}
