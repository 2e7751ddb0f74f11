//! `vesta` command-line interface.
//!
//! Exit codes: 0 success, 1 validation failure, 2 input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vesta::bench::{format_table, run_bench};
use vesta::io::{self, MeshFormat};
use vesta::lattice::Axis;
use vesta::meshcheck::{slice_mesh, validate};
use vesta::synth::{self, SynthKind};
use vesta::{diconex, extract, Census, Contour2D, Engine, Error, ExtractOptions, IsoConfig, Mode, PixelGrid, Resolution, ScalarGrid};

#[derive(Parser)]
#[command(name = "vesta", version, about = "Closed isosurfaces from voxel volumes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract a surface and optionally write it as OBJ or PLY.
    Extract(ExtractCmd),
    /// Extract a surface and check closure, components and degeneracy.
    Validate(ValidateCmd),
    /// Print the surface cycle census.
    Census(CensusCmd),
    /// Intersect the undisplaced high-resolution surface with a voxel layer plane.
    Slice(SliceCmd),
    /// Two-dimensional contours of one z-layer.
    Contour(ContourCmd),
    /// Time extraction and print a benchmark table.
    Bench(BenchCmd),
    /// Write a synthetic volume.
    Synth(SynthCmd),
}

#[derive(Args)]
struct VolumeArgs {
    /// Raw payload, PGM slice directory, or header file when --header is absent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Volume header (`dims`, `kind`, `spacing`, `data` lines).
    #[arg(long)]
    header: Option<PathBuf>,
    /// Isovalue; voxels with value >= iso are active.
    #[arg(long)]
    iso: f64,
    /// Mixed-mode threshold for the four-voxel average (defaults to iso).
    #[arg(long)]
    poa_threshold: Option<f64>,
}

impl VolumeArgs {
    fn load(&self) -> vesta::Result<(ScalarGrid, IsoConfig)> {
        let grid = match (&self.header, &self.input) {
            (Some(h), input) => io::load_volume(h, input.as_deref())?,
            (None, Some(p)) if p.is_dir() => io::load_pgm_stack(p)?,
            (None, Some(p)) => io::load_volume(p, None)?,
            (None, None) => return Err(Error::InvalidArgument("--input or --header is required".into())),
        };
        let mut iso = IsoConfig::new(self.iso)?;
        if let Some(t) = self.poa_threshold {
            iso = iso.with_poa_threshold(t)?;
        }
        Ok((grid, iso))
    }
}

#[derive(Args)]
struct SurfaceArgs {
    #[command(flatten)]
    volume: VolumeArgs,
    /// vesta-core, vesta-marching, mc-classic or mc-extended.
    #[arg(long, default_value = "vesta-core")]
    engine: Engine,
    /// disconnect, connect or mixed.
    #[arg(long, default_value = "disconnect")]
    mode: Mode,
    /// L (no extra points) or H (centroid per cycle).
    #[arg(long, default_value = "L")]
    resolution: Resolution,
    /// Merge points with equal lattice keys.
    #[arg(long)]
    dedup: bool,
    /// Remove zero-area triangles.
    #[arg(long)]
    drop_degenerate: bool,
    /// Keep support points at face centers.
    #[arg(long)]
    undisplaced: bool,
    /// Worker threads for the marching engine.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

impl SurfaceArgs {
    fn options(&self) -> ExtractOptions {
        let mut o = ExtractOptions::new(self.engine, self.mode, self.resolution);
        o.dedup = self.dedup;
        o.drop_degenerate = self.drop_degenerate;
        o.displace = !self.undisplaced;
        o.threads = self.threads;
        o
    }
}

#[derive(Args)]
struct ExtractCmd {
    #[command(flatten)]
    surface: SurfaceArgs,
    /// Mesh output path.
    #[arg(long)]
    output: Option<PathBuf>,
    /// obj or ply (binary); inferred from the output extension if absent.
    #[arg(long)]
    format: Option<MeshFormat>,
}

#[derive(Args)]
struct ValidateCmd {
    #[command(flatten)]
    surface: SurfaceArgs,
    /// Also run the brute-force self-intersection check.
    #[arg(long)]
    self_intersection: bool,
}

#[derive(Args)]
struct CensusCmd {
    #[command(flatten)]
    volume: VolumeArgs,
    #[arg(long, default_value = "vesta-core")]
    engine: Engine,
    #[arg(long, default_value = "disconnect")]
    mode: Mode,
}

#[derive(Args)]
struct SliceCmd {
    #[command(flatten)]
    volume: VolumeArgs,
    #[arg(long, default_value = "disconnect")]
    mode: Mode,
    /// x, y or z.
    #[arg(long, default_value = "z")]
    axis: Axis,
    /// Voxel layer index along the axis.
    #[arg(long)]
    layer: i64,
}

#[derive(Args)]
struct ContourCmd {
    #[command(flatten)]
    volume: VolumeArgs,
    #[arg(long, default_value = "disconnect")]
    mode: Mode,
    /// z-layer index.
    #[arg(long)]
    layer: usize,
    /// Slide contour points to the interpolated isovalue crossing.
    #[arg(long)]
    displace: bool,
}

#[derive(Args)]
struct BenchCmd {
    #[command(flatten)]
    volume: VolumeArgs,
    /// Runs per configuration.
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, value_delimiter = ',', default_values = ["vesta-core", "vesta-marching", "mc-extended"])]
    engines: Vec<Engine>,
    #[arg(long, value_delimiter = ',', default_values = ["disconnect", "connect", "mixed"])]
    modes: Vec<Mode>,
    #[arg(long, value_delimiter = ',', default_values = ["L", "H"])]
    resolutions: Vec<Resolution>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct SynthCmd {
    /// sphere, random, noise or figure27.
    #[arg(long)]
    kind: String,
    /// `N` for a cube or `NX,NY,NZ`.
    #[arg(long, default_value = "32")]
    dims: String,
    /// Activation probability for `random`.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Header path; the payload is written next to it with extension `.raw`.
    #[arg(long)]
    output: PathBuf,
}

/// Failure of a command, mapped to an exit code.
enum Failure {
    Validation(String),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OpenMesh(_) | Error::Invariant(_) => Failure::Validation(e.to_string()),
            e => Failure::Input(e),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn print_census(census: &Census) {
    for (n, count) in census.iter() {
        println!("cycles.{n}: {count}");
    }
    println!("cycle_sum: {}", census.total());
}

fn print_contours(contours: &[Contour2D]) {
    println!("contours: {}", contours.len());
    for (i, c) in contours.iter().enumerate() {
        let pts: Vec<String> = c.points.iter().map(|p| format!("{} {}", p[0], p[1])).collect();
        println!("contour.{i}: area={} points={}", c.signed_area(), pts.join(", "));
    }
}

fn run_extract(cmd: &ExtractCmd) -> CmdResult {
    let (grid, iso) = cmd.surface.volume.load()?;
    let x = extract(&grid, &iso, &cmd.surface.options())?;
    print_census(&x.census);
    println!("points: {}", x.mesh.point_count());
    println!("triangles: {}", x.mesh.triangle_count());
    if let Some(path) = &cmd.output {
        let format = cmd
            .format
            .or_else(|| MeshFormat::from_path(path))
            .ok_or_else(|| Error::InvalidArgument(format!("cannot infer mesh format of {}", path.display())))?;
        io::save_mesh(&x.mesh, path, format)?;
        println!("written: {}", path.display());
    }
    Ok(())
}

fn run_validate(cmd: &ValidateCmd) -> CmdResult {
    let (grid, iso) = cmd.surface.volume.load()?;
    let x = extract(&grid, &iso, &cmd.surface.options())?;
    let report = validate(&x.mesh, Some(x.census), cmd.self_intersection);
    print!("{report}");
    if report.is_valid() {
        Ok(())
    } else {
        Err(Failure::Validation("mesh failed validation".into()))
    }
}

fn run_census(cmd: &CensusCmd) -> CmdResult {
    let (grid, iso) = cmd.volume.load()?;
    let cycles = vesta::extract::surface_cycles(&grid, &iso, cmd.engine, cmd.mode)?;
    print_census(&vesta::cycle_census(&cycles)?);
    Ok(())
}

fn run_slice(cmd: &SliceCmd) -> CmdResult {
    let (grid, iso) = cmd.volume.load()?;
    let opts = ExtractOptions::new(Engine::VestaCore, cmd.mode, Resolution::H).undisplaced();
    let mesh = extract(&grid, &iso, &opts)?.mesh;
    print_contours(&slice_mesh(&mesh, cmd.axis, cmd.layer)?);
    Ok(())
}

fn run_contour(cmd: &ContourCmd) -> CmdResult {
    let (grid, iso) = cmd.volume.load()?;
    let [nx, ny, nz] = grid.dims();
    if cmd.layer >= nz {
        return Err(Error::InvalidArgument(format!("layer {} outside 0..{nz}", cmd.layer)).into());
    }
    let layer = grid.values()[cmd.layer * nx * ny..(cmd.layer + 1) * nx * ny].to_vec();
    let pixels = PixelGrid::new([nx, ny], layer)?;
    let mut contours = diconex::extract_contours(&pixels, &iso, cmd.mode)?;
    if cmd.displace {
        contours = contours.iter().map(|c| diconex::displace_contour(c, &pixels, &iso)).collect();
    }
    print_contours(&contours);
    Ok(())
}

fn run_bench_cmd(cmd: &BenchCmd) -> CmdResult {
    let (grid, iso) = cmd.volume.load()?;
    let records = run_bench(&grid, &iso, &cmd.engines, &cmd.modes, &cmd.resolutions, cmd.repeats, cmd.threads)?;
    println!("dims: {:?}  repeats: {}  threads: {}", grid.dims(), cmd.repeats, cmd.threads);
    print!("{}", format_table(&records));
    Ok(())
}

fn parse_dims(s: &str) -> vesta::Result<[usize; 3]> {
    let parts: Vec<usize> = s
        .split([',', 'x'])
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::InvalidArgument(format!("bad dims `{s}`")))?;
    match parts[..] {
        [n] => Ok([n; 3]),
        [a, b, c] => Ok([a, b, c]),
        _ => Err(Error::InvalidArgument(format!("dims `{s}` need one or three values"))),
    }
}

fn run_synth(cmd: &SynthCmd) -> CmdResult {
    let kind = match cmd.kind.as_str() {
        "sphere" => SynthKind::Sphere,
        "random" => SynthKind::Random { p: cmd.p, seed: cmd.seed },
        "noise" => SynthKind::Noise { seed: cmd.seed },
        "figure27" => SynthKind::Figure27,
        other => return Err(Error::InvalidArgument(format!("unknown synthetic kind `{other}`")).into()),
    };
    let grid = synth::generate(kind, parse_dims(&cmd.dims)?)?;
    io::save_volume(&grid, &cmd.output)?;
    println!("dims: {:?}", grid.dims());
    println!("written: {}", cmd.output.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Extract(c) => run_extract(c),
        Command::Validate(c) => run_validate(c),
        Command::Census(c) => run_census(c),
        Command::Slice(c) => run_slice(c),
        Command::Contour(c) => run_contour(c),
        Command::Bench(c) => run_bench_cmd(c),
        Command::Synth(c) => run_synth(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("vesta: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("vesta: {e}");
            ExitCode::from(2)
        }
    }
}
