//! Closed isosurface extraction from voxel volumes.
//!
//! Every boundary face between an active and an inactive voxel contributes
//! a support point at its center. Oriented paths over the faces link these
//! points into small closed cycles, each confined to a `2x2x2` voxel
//! neighborhood, and the cycles are triangulated. Because every cycle edge
//! is shared by exactly two cycles in opposite directions, the surface is
//! closed by construction, for every choice of how diagonal-only contacts
//! are resolved.
//!
//! Two engines produce identical cycles: [`trace`] follows paths over the
//! whole volume, [`marching`] scans `2x2x2` windows with a fixed table.
//! [`mc`] is a reference Marching Cubes implementation, [`diconex`] the
//! two-dimensional contour analog, and [`meshcheck`] validates results.

pub mod bench;
pub mod cycle;
pub mod diconex;
pub mod error;
pub mod extract;
pub mod io;
pub mod lattice;
pub mod marching;
pub mod mc;
pub mod mesh;
pub mod meshcheck;
pub mod synth;
pub mod tessellate;
pub mod trace;
pub mod volume;

pub use cycle::{cycle_census, Census, Mode, PoaDecision, PoaResolver, SurfaceCycle};
pub use diconex::{Contour2D, PixelGrid};
pub use error::{Error, Result};
pub use extract::{extract, ExtractOptions, Extraction};
pub use lattice::{Axis, Direction, LatticeKey};
pub use mc::McVariant;
pub use mesh::{Engine, Mesh, MeshPoint, PointKey, Provenance, Resolution};
pub use meshcheck::ValidationReport;
pub use volume::{IsoConfig, ScalarGrid, ValueKind, VoxelIndex};
