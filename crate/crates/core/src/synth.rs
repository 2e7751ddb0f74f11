//! Deterministic synthetic volumes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::volume::{ScalarGrid, ValueKind};

/// Synthetic volume recipe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthKind {
    /// Radial ramp `1 - |p - c| / R` with `R` half the smallest extent;
    /// isovalue 0.5 gives a sphere of radius `R / 2`.
    Sphere,
    /// Binary `u8` volume (0 or 1), each voxel active with probability `p`.
    Random { p: f64, seed: u64 },
    /// Uniform `u8` noise.
    Noise { seed: u64 },
    /// Small gray-level blob with a tunnel, in the spirit of a stack of
    /// 14 images of 9x9 pixels.
    Figure27,
}

/// Builds the volume for `kind`. `Figure27` has fixed dims and ignores
/// `dims`.
pub fn generate(kind: SynthKind, dims: [usize; 3]) -> Result<ScalarGrid> {
    match kind {
        SynthKind::Sphere => sphere(dims),
        SynthKind::Random { p, seed } => random(dims, p, seed),
        SynthKind::Noise { seed } => noise(dims, seed),
        SynthKind::Figure27 => figure27(),
    }
}

pub fn sphere(dims: [usize; 3]) -> Result<ScalarGrid> {
    let c = dims.map(|n| (n as f64 - 1.0) / 2.0);
    let r = *dims.iter().min().unwrap_or(&0) as f64 / 2.0;
    ScalarGrid::from_fn(dims, ValueKind::F32, |i, j, k| {
        let d = ((i as f64 - c[0]).powi(2) + (j as f64 - c[1]).powi(2) + (k as f64 - c[2]).powi(2)).sqrt();
        (1.0 - d / r) as f32
    })
}

pub fn random(dims: [usize; 3], p: f64, seed: u64) -> Result<ScalarGrid> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ScalarGrid::from_fn(dims, ValueKind::U8, |_, _, _| rng.gen_bool(p) as u8 as f32)
}

pub fn noise(dims: [usize; 3], seed: u64) -> Result<ScalarGrid> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ScalarGrid::from_fn(dims, ValueKind::U8, |_, _, _| rng.gen::<u8>() as f32)
}

/// A `9 x 9 x 14` gray-level torus-like blob; isovalue 128 encloses it.
pub fn figure27() -> Result<ScalarGrid> {
    ScalarGrid::from_fn([9, 9, 14], ValueKind::U8, |i, j, k| {
        let (x, y, z) = (i as f64 - 4.0, j as f64 - 4.0, k as f64 - 6.5);
        // ring around the z axis, squeezed along z
        let ring = ((x * x + y * y).sqrt() - 2.6).powi(2) + (z / 2.8).powi(2);
        let v = 255.0 * (1.0 - ring / 3.0).clamp(0.0, 1.0);
        v.round() as f32
    })
}
