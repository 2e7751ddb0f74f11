use std::fs;
use std::path::Path;

use vesta::io::{self, read_ply, write_obj, write_ply, MeshArrays, MeshFormat};
use vesta::{extract, Engine, ExtractOptions, IsoConfig, Mode, Resolution, ScalarGrid, ValueKind};

fn octahedron() -> vesta::Mesh {
    let grid = ScalarGrid::from_u8([1, 1, 1], &[1]).unwrap();
    let iso = IsoConfig::new(0.5).unwrap();
    extract(&grid, &iso, &ExtractOptions::new(Engine::VestaCore, Mode::Disconnect, Resolution::L))
        .unwrap()
        .mesh
}

fn write_pgm(path: &Path, w: usize, h: usize, fill: u8) {
    let mut bytes = format!("P5\n{w} {h}\n255\n").into_bytes();
    bytes.extend(std::iter::repeat_n(fill, w * h));
    fs::write(path, bytes).unwrap();
}

#[test]
fn header_and_payload_load() {
    let dir = tempfile::tempdir().unwrap();
    let header = dir.path().join("vol.txt");
    fs::write(&header, "dims: 2 2 2\nkind: u8\ndata: vol.raw\n").unwrap();
    fs::write(dir.path().join("vol.raw"), [0u8, 1, 2, 3, 4, 5, 6, 7]).unwrap();
    let grid = io::load_volume(&header, None).unwrap();
    assert_eq!(grid.dims(), [2, 2, 2]);
    assert_eq!(grid.value_kind(), ValueKind::U8);
    assert_eq!(grid.values()[7], 7.0);
}

#[test]
fn short_payload_is_a_size_error() {
    let dir = tempfile::tempdir().unwrap();
    let header = dir.path().join("vol.txt");
    fs::write(&header, "dims: 2 2 2\nkind: u8\ndata: vol.raw\n").unwrap();
    fs::write(dir.path().join("vol.raw"), [0u8; 7]).unwrap();
    let err = io::load_volume(&header, None).unwrap_err().to_string();
    assert!(err.contains('7') && err.contains('8'), "{err}");
}

#[test]
fn unknown_value_kind_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let header = dir.path().join("vol.txt");
    fs::write(&header, "dims: 1 1 1\nkind: f64\n").unwrap();
    assert!(io::read_header(&header).is_err());
}

#[test]
fn pgm_stack_is_stacked_along_z() {
    let dir = tempfile::tempdir().unwrap();
    for (i, fill) in [10u8, 20, 30].iter().enumerate() {
        write_pgm(&dir.path().join(format!("slice{i:03}.pgm")), 4, 4, *fill);
    }
    let grid = io::load_pgm_stack(dir.path()).unwrap();
    assert_eq!(grid.dims(), [4, 4, 3]);
    assert_eq!(grid.values()[0], 10.0);
    assert_eq!(grid.values()[2 * 16], 30.0);
}

#[test]
fn pgm_stack_rejects_mismatched_slices() {
    let dir = tempfile::tempdir().unwrap();
    write_pgm(&dir.path().join("a.pgm"), 4, 4, 0);
    write_pgm(&dir.path().join("b.pgm"), 3, 4, 0);
    assert!(io::load_pgm_stack(dir.path()).is_err());
}

#[test]
fn volume_save_load_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let header = dir.path().join("noise.txt");
    let grid = vesta::synth::noise([5, 4, 3], 3).unwrap();
    io::save_volume(&grid, &header).unwrap();
    let back = io::load_volume(&header, None).unwrap();
    assert_eq!(back.dims(), grid.dims());
    assert_eq!(back.values(), grid.values());
}

#[test]
fn octahedron_obj_has_six_vertices_and_eight_faces() {
    let mut out = Vec::new();
    write_obj(&octahedron(), &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 6);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 8);
    // 1-based indices
    assert!(text.lines().filter(|l| l.starts_with("f ")).all(|l| !l.split(' ').any(|t| t == "0")));
}

#[test]
fn empty_mesh_writes_valid_files() {
    let grid = ScalarGrid::from_u8([2, 2, 2], &[0; 8]).unwrap();
    let iso = IsoConfig::new(0.5).unwrap();
    let mesh = extract(&grid, &iso, &ExtractOptions::new(Engine::VestaCore, Mode::Disconnect, Resolution::L))
        .unwrap()
        .mesh;
    assert_eq!(mesh.triangle_count(), 0);
    let mut obj = Vec::new();
    write_obj(&mesh, &mut obj).unwrap();
    assert!(obj.is_empty());
    let mut ply = Vec::new();
    write_ply(&mesh, &mut ply).unwrap();
    assert_eq!(read_ply(&mut ply.as_slice()).unwrap(), MeshArrays::default());
}

#[test]
fn ply_roundtrip_preserves_arrays() {
    let grid = vesta::synth::noise([6, 6, 6], 11).unwrap();
    let iso = IsoConfig::new(128.0).unwrap();
    let mesh = extract(&grid, &iso, &ExtractOptions::new(Engine::VestaCore, Mode::Mixed, Resolution::H))
        .unwrap()
        .mesh;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.ply");
    io::save_mesh(&mesh, &path, MeshFormat::from_path(&path).unwrap()).unwrap();
    let back = read_ply(&mut fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back, MeshArrays::of(&mesh));
}

#[test]
fn mesh_format_parsing() {
    assert_eq!("obj".parse::<MeshFormat>().unwrap(), MeshFormat::Obj);
    assert_eq!("ply-binary".parse::<MeshFormat>().unwrap(), MeshFormat::Ply);
    assert!("stl".parse::<MeshFormat>().is_err());
    assert_eq!(MeshFormat::from_path(Path::new("x.OBJ")), Some(MeshFormat::Obj));
}
