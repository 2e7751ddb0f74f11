//! Volume loading and mesh export.
//!
//! A volume header is a small `key: value` text file:
//!
//! ```text
//! dims: 64 64 32
//! kind: u8
//! spacing: 1 1 2.5
//! data: volume.raw
//! ```
//!
//! The payload is little-endian, x fastest, then y, then z. `spacing`
//! defaults to `1 1 1`; `data` defaults to the header path with a `.raw`
//! extension.

use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::volume::{ScalarGrid, ValueKind};

/// Parsed volume header.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeHeader {
    pub dims: [usize; 3],
    pub kind: ValueKind,
    pub spacing: [f64; 3],
    pub data: Option<PathBuf>,
}

impl VolumeHeader {
    pub fn new(dims: [usize; 3], kind: ValueKind) -> Self {
        VolumeHeader {
            dims,
            kind,
            spacing: [1.0; 3],
            data: None,
        }
    }

    /// Expected payload size in bytes.
    pub fn payload_len(&self) -> usize {
        self.dims.iter().product::<usize>() * self.kind.bytes_per_value()
    }
}

fn parse_triple<T: FromStr>(key: &str, value: &str) -> std::result::Result<[T; 3], String> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(format!("`{key}` needs three values, got `{value}`"));
    }
    let mut out = Vec::with_capacity(3);
    for p in parts {
        out.push(p.parse::<T>().map_err(|_| format!("bad `{key}` value `{p}`"))?);
    }
    out.try_into().map_err(|_| unreachable!())
}

impl FromStr for VolumeHeader {
    type Err = String;

    fn from_str(text: &str) -> std::result::Result<Self, String> {
        let mut dims = None;
        let mut kind = None;
        let mut spacing = [1.0; 3];
        let mut data = None;
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once(':').ok_or_else(|| format!("expected `key: value`, got `{line}`"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "dims" => dims = Some(parse_triple::<usize>(key, value)?),
                "kind" => kind = Some(ValueKind::parse(value).ok_or_else(|| format!("unknown value kind `{value}`"))?),
                "spacing" => spacing = parse_triple::<f64>(key, value)?,
                "data" => data = Some(PathBuf::from(value)),
                _ => return Err(format!("unknown header key `{key}`")),
            }
        }
        let dims = dims.ok_or("missing `dims`")?;
        if dims.contains(&0) {
            return Err(format!("dims must be positive, got {dims:?}"));
        }
        if spacing.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(format!("spacing must be positive, got {spacing:?}"));
        }
        Ok(VolumeHeader {
            dims,
            kind: kind.ok_or("missing `kind`")?,
            spacing,
            data,
        })
    }
}

impl fmt::Display for VolumeHeader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.dims;
        writeln!(f, "dims: {x} {y} {z}")?;
        writeln!(f, "kind: {}", self.kind.name())?;
        let [a, b, c] = self.spacing;
        writeln!(f, "spacing: {a} {b} {c}")?;
        if let Some(d) = &self.data {
            writeln!(f, "data: {}", d.display())?;
        }
        Ok(())
    }
}

pub fn read_header(path: &Path) -> Result<VolumeHeader> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.parse().map_err(|reason: String| Error::load(path, reason))
}

/// Decodes a little-endian payload.
pub fn grid_from_bytes(header: &VolumeHeader, bytes: &[u8]) -> Result<ScalarGrid> {
    if bytes.len() != header.payload_len() {
        return Err(Error::InvalidGrid(format!(
            "payload has {} bytes, header {:?} x {} needs {}",
            bytes.len(),
            header.dims,
            header.kind.name(),
            header.payload_len()
        )));
    }
    let values: Vec<f32> = match header.kind {
        ValueKind::U8 => bytes.iter().map(|&b| b as f32).collect(),
        ValueKind::U16 => bytes.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]]) as f32).collect(),
        ValueKind::F32 => bytes.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect(),
    };
    ScalarGrid::new(header.dims, values, header.kind, header.spacing)
}

/// Loads a volume from a header and its raw payload. Without an explicit
/// payload path the header's `data` entry (relative to the header) or the
/// header path with extension `.raw` is used.
pub fn load_volume(header_path: &Path, payload: Option<&Path>) -> Result<ScalarGrid> {
    let header = read_header(header_path)?;
    let payload: PathBuf = match (payload, &header.data) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(d)) => header_path.parent().unwrap_or(Path::new("")).join(d),
        (None, None) => header_path.with_extension("raw"),
    };
    let bytes = fs::read(&payload).map_err(|e| Error::io(&payload, e))?;
    grid_from_bytes(&header, &bytes).map_err(|e| match e {
        Error::InvalidGrid(reason) => Error::load(&payload, reason),
        other => other,
    })
}

/// Loads a stack of binary PGM images (one per z-slice, lexicographic
/// file-name order) from a directory.
pub fn load_pgm_stack(dir: &Path) -> Result<ScalarGrid> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("pgm")))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::load(dir, "no .pgm files found"));
    }
    let mut dims2 = None;
    let mut kind = ValueKind::U8;
    let mut values = Vec::new();
    for f in &files {
        let bytes = fs::read(f).map_err(|e| Error::io(f, e))?;
        let img = image::load_from_memory_with_format(&bytes, image::ImageFormat::Pnm)
            .map_err(|e| Error::load(f, e.to_string()))?;
        let (w, h) = (img.width() as usize, img.height() as usize);
        match dims2 {
            None => dims2 = Some((w, h)),
            Some(d) if d != (w, h) => {
                return Err(Error::load(f, format!("slice is {w}x{h}, expected {}x{}", d.0, d.1)))
            }
            _ => {}
        }
        match img {
            image::DynamicImage::ImageLuma8(g) => values.extend(g.into_raw().into_iter().map(|v| v as f32)),
            image::DynamicImage::ImageLuma16(g) => {
                kind = ValueKind::U16;
                values.extend(g.into_raw().into_iter().map(|v| v as f32));
            }
            _ => return Err(Error::load(f, "not a grayscale PGM image")),
        }
    }
    let (w, h) = dims2.unwrap();
    ScalarGrid::new([w, h, files.len()], values, kind, [1.0; 3])
}

/// Writes `grid` as header plus raw payload; the header's `data` entry
/// names the payload file.
pub fn save_volume(grid: &ScalarGrid, header_path: &Path) -> Result<()> {
    let payload = header_path.with_extension("raw");
    let mut header = VolumeHeader::new(grid.dims(), grid.value_kind());
    header.spacing = grid.spacing();
    header.data = payload.file_name().map(PathBuf::from);
    let mut bytes = Vec::with_capacity(header.payload_len());
    for &v in grid.values() {
        match grid.value_kind() {
            ValueKind::U8 => bytes.push(v as u8),
            ValueKind::U16 => bytes.extend((v as u16).to_le_bytes()),
            ValueKind::F32 => bytes.extend(v.to_le_bytes()),
        }
    }
    fs::write(header_path, header.to_string()).map_err(|e| Error::io(header_path, e))?;
    fs::write(&payload, bytes).map_err(|e| Error::io(&payload, e))
}

/// Merges points with equal keys.
pub fn dedup_points(mesh: &Mesh) -> Mesh {
    mesh.dedup_points()
}

/// Mesh file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl MeshFormat {
    /// Format implied by a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "obj" => Some(MeshFormat::Obj),
            "ply" => Some(MeshFormat::Ply),
            _ => None,
        }
    }
}

impl FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "obj" => Ok(MeshFormat::Obj),
            "ply" | "ply-binary" => Ok(MeshFormat::Ply),
            _ => Err(Error::InvalidArgument(format!("unknown mesh format `{s}`"))),
        }
    }
}

/// ASCII OBJ: `v x y z` lines then 1-based `f a b c` lines.
pub fn write_obj(mesh: &Mesh, out: &mut impl Write) -> std::io::Result<()> {
    for p in &mesh.points {
        writeln!(out, "v {} {} {}", p.position[0], p.position[1], p.position[2])?;
    }
    for t in &mesh.triangles {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}

/// Binary little-endian PLY with float32 vertices and int32 index lists.
pub fn write_ply(mesh: &Mesh, out: &mut impl Write) -> std::io::Result<()> {
    write!(
        out,
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\n\
         element face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.point_count(),
        mesh.triangle_count()
    )?;
    for p in &mesh.points {
        for c in p.position {
            out.write_all(&(c as f32).to_le_bytes())?;
        }
    }
    for t in &mesh.triangles {
        out.write_all(&[3])?;
        for &i in t {
            out.write_all(&(i as i32).to_le_bytes())?;
        }
    }
    Ok(())
}

/// Plain point and triangle arrays read back from a mesh file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeshArrays {
    pub points: Vec<[f32; 3]>,
    pub triangles: Vec<[u32; 3]>,
}

impl MeshArrays {
    pub fn of(mesh: &Mesh) -> Self {
        MeshArrays {
            points: mesh.points.iter().map(|p| p.position.map(|c| c as f32)).collect(),
            triangles: mesh.triangles.clone(),
        }
    }
}

/// Reads a PLY file written by [`write_ply`].
pub fn read_ply(input: &mut impl Read) -> Result<MeshArrays> {
    let mut r = BufReader::new(input);
    let bad = |m: &str| Error::InvalidArgument(format!("malformed PLY: {m}"));
    let (mut nv, mut nf) = (None, None);
    let mut line = String::new();
    loop {
        line.clear();
        if r.read_line(&mut line).map_err(|e| Error::io("<ply>", e))? == 0 {
            return Err(bad("missing end_header"));
        }
        let l = line.trim();
        if l == "end_header" {
            break;
        }
        if let Some(n) = l.strip_prefix("element vertex ") {
            nv = n.trim().parse::<usize>().ok();
        } else if let Some(n) = l.strip_prefix("element face ") {
            nf = n.trim().parse::<usize>().ok();
        } else if l.starts_with("format") && l != "format binary_little_endian 1.0" {
            return Err(bad("only binary_little_endian 1.0 is supported"));
        }
    }
    let (nv, nf) = (nv.ok_or_else(|| bad("no vertex count"))?, nf.ok_or_else(|| bad("no face count"))?);
    let mut buf4 = [0u8; 4];
    let mut read4 = |r: &mut BufReader<_>| -> Result<[u8; 4]> {
        r.read_exact(&mut buf4).map_err(|e| Error::io("<ply>", e))?;
        Ok(buf4)
    };
    let mut arrays = MeshArrays::default();
    for _ in 0..nv {
        let mut p = [0f32; 3];
        for c in &mut p {
            *c = f32::from_le_bytes(read4(&mut r)?);
        }
        arrays.points.push(p);
    }
    for _ in 0..nf {
        let mut n = [0u8; 1];
        r.read_exact(&mut n).map_err(|e| Error::io("<ply>", e))?;
        if n[0] != 3 {
            return Err(bad("non-triangular face"));
        }
        let mut t = [0u32; 3];
        for c in &mut t {
            *c = i32::from_le_bytes(read4(&mut r)?) as u32;
        }
        arrays.triangles.push(t);
    }
    Ok(arrays)
}

/// Writes `mesh` to `path` in `format`.
pub fn save_mesh(mesh: &Mesh, path: &Path, format: MeshFormat) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    match format {
        MeshFormat::Obj => write_obj(mesh, &mut w),
        MeshFormat::Ply => write_ply(mesh, &mut w),
    }
    .and_then(|_| w.flush())
    .map_err(|e| Error::io(path, e))
}
