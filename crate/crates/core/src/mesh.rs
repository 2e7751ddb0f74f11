//! Triangle meshes keyed by lattice identity.

use rustc_hash::FxHashMap as HashMap;
use std::fmt;
use std::str::FromStr;

use petgraph::unionfind::UnionFind;

use crate::cycle::Mode;
use crate::error::Error;
use crate::lattice::LatticeKey;

/// Identity of a mesh point. Support points are keyed by their face
/// center; high-resolution centroids by the first directed edge of their
/// canonical cycle, which no other cycle shares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointKey {
    Support(LatticeKey),
    Centroid(LatticeKey, LatticeKey),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshPoint {
    pub key: PointKey,
    pub position: [f64; 3],
}

/// Extraction engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    VestaCore,
    VestaMarching,
    McClassic,
    McExtended,
}

impl Engine {
    pub const ALL: [Engine; 4] = [Engine::VestaCore, Engine::VestaMarching, Engine::McClassic, Engine::McExtended];

    pub fn name(self) -> &'static str {
        match self {
            Engine::VestaCore => "vesta-core",
            Engine::VestaMarching => "vesta-marching",
            Engine::McClassic => "mc-classic",
            Engine::McExtended => "mc-extended",
        }
    }

    pub fn is_marching_cubes(self) -> bool {
        matches!(self, Engine::McClassic | Engine::McExtended)
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown engine `{s}`")))
    }
}

/// Cycle triangulation: fan without new points (`L`) or centroid star (`H`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Resolution {
    L,
    H,
}

impl Resolution {
    pub const ALL: [Resolution; 2] = [Resolution::L, Resolution::H];

    pub fn name(self) -> &'static str {
        match self {
            Resolution::L => "L",
            Resolution::H => "H",
        }
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Resolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "L" | "l" => Ok(Resolution::L),
            "H" | "h" => Ok(Resolution::H),
            _ => Err(Error::InvalidArgument(format!("unknown resolution `{s}`"))),
        }
    }
}

/// How a mesh was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub engine: Engine,
    pub mode: Mode,
    pub resolution: Resolution,
}

/// Oriented triangle mesh. Triangles are counterclockwise seen from
/// outside.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub points: Vec<MeshPoint>,
    pub triangles: Vec<[u32; 3]>,
    /// Component label per triangle, numbered in order of first appearance.
    pub components: Vec<u32>,
    pub provenance: Provenance,
    /// Voxel spacing of the source grid.
    pub spacing: [f64; 3],
}

impl Mesh {
    pub fn empty(provenance: Provenance, spacing: [f64; 3]) -> Self {
        Mesh {
            points: Vec::new(),
            triangles: Vec::new(),
            components: Vec::new(),
            provenance,
            spacing,
        }
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn component_count(&self) -> usize {
        self.components.iter().max().map_or(0, |&m| m as usize + 1)
    }

    /// Triangle corners as point keys.
    pub fn triangle_keys(&self, t: usize) -> [PointKey; 3] {
        self.triangles[t].map(|i| self.points[i as usize].key)
    }

    /// Triangle corners as positions.
    pub fn triangle_positions(&self, t: usize) -> [[f64; 3]; 3] {
        self.triangles[t].map(|i| self.points[i as usize].position)
    }

    /// Merges points with equal keys, keeping first-occurrence order.
    pub fn dedup_points(&self) -> Mesh {
        let mut m = self.merged_points();
        m.components = self.components.clone();
        m
    }

    /// Points merged by key; component labels are left empty.
    fn merged_points(&self) -> Mesh {
        let (ids, n) = point_ids(self);
        let mut points = Vec::with_capacity(n);
        for (p, &id) in self.points.iter().zip(&ids) {
            if id as usize == points.len() {
                points.push(*p);
            }
        }
        Mesh {
            points,
            triangles: self.triangles.iter().map(|t| t.map(|i| ids[i as usize])).collect(),
            components: Vec::new(),
            provenance: self.provenance,
            spacing: self.spacing,
        }
    }

    /// Same surface with every triangle reversed.
    pub fn reversed(&self) -> Mesh {
        let mut m = self.clone();
        for t in &mut m.triangles {
            t.swap(1, 2);
        }
        m
    }

    /// Recomputes component labels by connectivity through shared keys.
    pub fn label_components(&mut self) {
        self.components = triangle_components(self);
    }
}

/// Connected components of triangles sharing a point key.
pub fn triangle_components(mesh: &Mesh) -> Vec<u32> {
    let (ids, n) = point_ids(mesh);
    label_by_ids(&mesh.triangles, |i| ids[i as usize], n)
}

/// Dense id per point; points with equal keys share an id.
pub(crate) fn point_ids(mesh: &Mesh) -> (Vec<u32>, usize) {
    let mut index: HashMap<PointKey, u32> = HashMap::with_capacity_and_hasher(mesh.points.len(), Default::default());
    let ids = mesh
        .points
        .iter()
        .map(|p| {
            let n = index.len() as u32;
            *index.entry(p.key).or_insert(n)
        })
        .collect();
    (ids, index.len())
}

/// Component label per triangle, dense in order of first appearance.
fn label_by_ids(triangles: &[[u32; 3]], id: impl Fn(u32) -> u32, n: usize) -> Vec<u32> {
    let mut uf = UnionFind::<u32>::new(n);
    for t in triangles {
        uf.union(id(t[0]), id(t[1]));
        uf.union(id(t[0]), id(t[2]));
    }
    let mut dense = vec![u32::MAX; n];
    let mut next = 0;
    triangles
        .iter()
        .map(|t| {
            let root = uf.find(id(t[0])) as usize;
            if dense[root] == u32::MAX {
                dense[root] = next;
                next += 1;
            }
            dense[root]
        })
        .collect()
}

/// How aggressively [`MeshBuilder`] shares points with equal keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointSharing {
    /// One point per key over the whole mesh.
    Global,
    /// Shared only within a scope (one marching window).
    PerScope,
    /// Every triangle corner is its own point.
    None,
}

/// Incremental mesh construction.
#[derive(Debug)]
pub struct MeshBuilder {
    sharing: PointSharing,
    index: HashMap<PointKey, u32>,
    points: Vec<MeshPoint>,
    triangles: Vec<[u32; 3]>,
}

impl MeshBuilder {
    pub fn new(sharing: PointSharing) -> Self {
        MeshBuilder {
            sharing,
            index: HashMap::default(),
            points: Vec::new(),
            triangles: Vec::new(),
        }
    }

    /// Builder with room for `points` points and `triangles` triangles.
    pub fn with_capacity(sharing: PointSharing, points: usize, triangles: usize) -> Self {
        let index = if sharing == PointSharing::Global {
            HashMap::with_capacity_and_hasher(points, Default::default())
        } else {
            HashMap::default()
        };
        MeshBuilder {
            sharing,
            index,
            points: Vec::with_capacity(points),
            triangles: Vec::with_capacity(triangles),
        }
    }

    /// Starts a new sharing scope.
    pub fn new_scope(&mut self) {
        if self.sharing == PointSharing::PerScope {
            self.index.clear();
        }
    }

    /// Index of the point with `key`, creating it at `position()` if needed.
    pub fn point(&mut self, key: PointKey, position: impl FnOnce() -> [f64; 3]) -> u32 {
        if self.sharing != PointSharing::None {
            if let Some(&i) = self.index.get(&key) {
                return i;
            }
        }
        let i = self.points.len() as u32;
        self.points.push(MeshPoint {
            key,
            position: position(),
        });
        if self.sharing != PointSharing::None {
            self.index.insert(key, i);
        }
        i
    }

    /// Like [`MeshBuilder::point`], also returning the stored position.
    pub fn point_with_position(&mut self, key: PointKey, position: impl FnOnce() -> [f64; 3]) -> (u32, [f64; 3]) {
        let i = self.point(key, position);
        (i, self.points[i as usize].position)
    }

    /// Appends a point without consulting or updating the sharing index.
    pub fn push_point(&mut self, key: PointKey, position: [f64; 3]) -> u32 {
        let i = self.points.len() as u32;
        self.points.push(MeshPoint { key, position });
        i
    }

    pub fn triangle(&mut self, t: [u32; 3]) {
        self.triangles.push(t);
    }

    /// Like [`MeshBuilder::finish`] followed by [`Mesh::dedup_points`].
    pub fn finish_deduplicated(self, provenance: Provenance, spacing: [f64; 3]) -> Mesh {
        if self.sharing == PointSharing::Global {
            return self.finish(provenance, spacing);
        }
        let raw = Mesh {
            points: self.points,
            triangles: self.triangles,
            components: Vec::new(),
            provenance,
            spacing,
        };
        let mut m = raw.merged_points();
        m.components = label_by_ids(&m.triangles, |i| i, m.points.len());
        m
    }

    pub fn finish(self, provenance: Provenance, spacing: [f64; 3]) -> Mesh {
        let mut m = Mesh {
            points: self.points,
            triangles: self.triangles,
            components: Vec::new(),
            provenance,
            spacing,
        };
        if self.sharing == PointSharing::Global {
            // keys are unique, so point indices are already dense ids
            m.components = label_by_ids(&m.triangles, |i| i, m.points.len());
        } else {
            m.label_components();
        }
        m
    }
}
