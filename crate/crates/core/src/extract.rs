//! End-to-end surface extraction.

use crate::cycle::{cycle_census, Census, Mode, PoaResolver, SurfaceCycle};
use crate::error::{Error, Result};
use crate::marching::MarchingScan;
use crate::mc::{mc_census, mc_extract, McVariant};
use crate::mesh::{Engine, Mesh, MeshBuilder, PointSharing, Provenance, Resolution};
use crate::tessellate::{emit_cycle, triangle_normal, Positioner};
use crate::trace::{collect_boundary_faces, extract_cycles, trace_cycles};
use crate::volume::{IsoConfig, ScalarGrid};

/// Extraction settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    pub engine: Engine,
    pub mode: Mode,
    pub resolution: Resolution,
    /// Move support points to the interpolated crossing.
    pub displace: bool,
    /// Merge points with equal keys.
    pub dedup: bool,
    /// Remove zero-area triangles after displacement.
    pub drop_degenerate: bool,
    /// Worker threads for the marching engine; 1 scans sequentially.
    pub threads: usize,
}

impl ExtractOptions {
    pub fn new(engine: Engine, mode: Mode, resolution: Resolution) -> Self {
        ExtractOptions {
            engine,
            mode,
            resolution,
            displace: true,
            dedup: false,
            drop_degenerate: false,
            threads: 1,
        }
    }

    pub fn undisplaced(mut self) -> Self {
        self.displace = false;
        self
    }

    pub fn deduplicated(mut self) -> Self {
        self.dedup = true;
        self
    }

    /// Rejects combinations an engine cannot produce.
    pub fn check(&self) -> Result<()> {
        if self.engine.is_marching_cubes() && (self.mode != Mode::Disconnect || self.resolution != Resolution::L) {
            return Err(Error::Unsupported(format!(
                "{} only supports L resolution in disconnect mode (got {} / {})",
                self.engine, self.resolution, self.mode
            )));
        }
        if self.threads == 0 {
            return Err(Error::InvalidArgument("thread count must be at least 1".into()));
        }
        Ok(())
    }
}

/// A mesh with the cycle census it was built from.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub mesh: Mesh,
    pub census: Census,
}

/// Surface cycles of `grid` with either VESTA engine, sorted.
pub fn surface_cycles(grid: &ScalarGrid, iso: &IsoConfig, engine: Engine, mode: Mode) -> Result<Vec<SurfaceCycle>> {
    match engine {
        Engine::VestaCore => extract_cycles(grid, iso, &PoaResolver::new(mode, iso)),
        Engine::VestaMarching => Ok(crate::marching::scan_volume(grid, iso, mode)),
        _ => Err(Error::Unsupported(format!("{engine} does not produce surface cycles"))),
    }
}

/// Runs one extraction.
pub fn extract(grid: &ScalarGrid, iso: &IsoConfig, opts: &ExtractOptions) -> Result<Extraction> {
    opts.check()?;
    let provenance = Provenance {
        engine: opts.engine,
        mode: opts.mode,
        resolution: opts.resolution,
    };
    let positioner = Positioner::new(grid, iso, opts.displace);
    let (mut mesh, census) = match opts.engine {
        Engine::VestaCore => {
            let faces = collect_boundary_faces(grid, iso);
            let cycles = trace_cycles(&faces, grid, &PoaResolver::new(opts.mode, iso))?;
            let census = cycle_census(&cycles)?;
            let triangles = match opts.resolution {
                Resolution::L => census.low_resolution_triangles(),
                Resolution::H => census.high_resolution_triangles(),
            };
            let points = faces.len() + if opts.resolution == Resolution::H { census.centroid_count() } else { 0 };
            let mut b = MeshBuilder::with_capacity(PointSharing::Global, points, triangles);
            for c in &cycles {
                emit_cycle(&mut b, c, opts.resolution, &positioner);
            }
            (b.finish(provenance, grid.spacing()), census)
        }
        Engine::VestaMarching => {
            let scan = MarchingScan::new(grid, iso, opts.mode);
            let mut b = MeshBuilder::new(PointSharing::PerScope);
            let mut census = Census::new();
            let mut emit = |cell: crate::marching::PlacedCell| cell.emit(&mut b, opts.resolution, &positioner, &mut census);
            if opts.threads > 1 {
                scan.scan_parallel(opts.threads).into_iter().for_each(&mut emit);
            } else {
                scan.scan(&mut emit);
            }
            census.validate()?;
            // merging here saves a second pass over the point keys
            let mesh = if opts.dedup && !opts.drop_degenerate {
                b.finish_deduplicated(provenance, grid.spacing())
            } else {
                b.finish(provenance, grid.spacing())
            };
            (mesh, census)
        }
        Engine::McClassic | Engine::McExtended => {
            let variant = if opts.engine == Engine::McClassic {
                McVariant::Classic15
            } else {
                McVariant::Extended
            };
            (mc_extract(grid, iso, variant, opts.displace), mc_census(grid, iso, variant))
        }
    };
    if opts.drop_degenerate {
        mesh = drop_degenerate(&mesh);
    }
    if opts.dedup && !(opts.engine == Engine::VestaMarching && !opts.drop_degenerate) {
        mesh = mesh.dedup_points();
    }
    Ok(Extraction { mesh, census })
}

/// True if the triangle has zero area.
pub fn is_degenerate(mesh: &Mesh, t: usize) -> bool {
    let [a, b, c] = mesh.triangle_positions(t);
    triangle_normal(a, b, c) == [0.0; 3]
}

/// The mesh without zero-area triangles; unused points are kept.
pub fn drop_degenerate(mesh: &Mesh) -> Mesh {
    let keep: Vec<usize> = (0..mesh.triangle_count()).filter(|&t| !is_degenerate(mesh, t)).collect();
    let mut m = mesh.clone();
    m.triangles = keep.iter().map(|&t| mesh.triangles[t]).collect();
    m.label_components();
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_marching_cubes_outside_l_disconnect() {
        let g = ScalarGrid::from_u8([1, 1, 1], &[1]).unwrap();
        let iso = IsoConfig::new(0.5).unwrap();
        for e in [Engine::McClassic, Engine::McExtended] {
            assert!(extract(&g, &iso, &ExtractOptions::new(e, Mode::Connect, Resolution::L)).is_err());
            assert!(extract(&g, &iso, &ExtractOptions::new(e, Mode::Disconnect, Resolution::H)).is_err());
            assert!(extract(&g, &iso, &ExtractOptions::new(e, Mode::Disconnect, Resolution::L)).is_ok());
        }
    }

    #[test]
    fn octahedron_counts_per_engine() {
        let g = ScalarGrid::from_u8([1, 1, 1], &[1]).unwrap();
        let iso = IsoConfig::new(0.5).unwrap();
        for (e, raw_points) in [
            (Engine::VestaCore, 6),
            (Engine::VestaMarching, 24),
            (Engine::McExtended, 24),
            (Engine::McClassic, 24),
        ] {
            let x = extract(&g, &iso, &ExtractOptions::new(e, Mode::Disconnect, Resolution::L)).unwrap();
            assert_eq!(x.mesh.triangle_count(), 8, "{e}");
            assert_eq!(x.mesh.point_count(), raw_points, "{e}");
            assert_eq!(x.census, Census::from_lengths([3; 8]), "{e}");
            assert_eq!(x.mesh.dedup_points().point_count(), 6);
        }
    }

    #[test]
    fn degenerate_triangles_are_dropped_on_request() {
        // a center value equal to the isovalue collapses all six support
        // points onto the voxel center
        let mut v = [0u8; 27];
        v[13] = 100;
        let g = ScalarGrid::from_u8([3, 3, 3], &v).unwrap();
        let iso = IsoConfig::new(100.0).unwrap();
        let mut o = ExtractOptions::new(Engine::VestaCore, Mode::Disconnect, Resolution::L);
        let all = extract(&g, &iso, &o).unwrap().mesh;
        o.drop_degenerate = true;
        let kept = extract(&g, &iso, &o).unwrap().mesh;
        assert_eq!(all.triangle_count(), 8);
        assert!((0..8).all(|t| is_degenerate(&all, t)));
        assert_eq!(kept.triangle_count(), 0);
    }
}
