use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn vesta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vesta")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn single_voxel(dir: &Path) -> String {
    let header = dir.join("voxel.txt");
    fs::write(&header, "dims: 1 1 1\nkind: u8\ndata: voxel.raw\n").unwrap();
    fs::write(dir.join("voxel.raw"), [1u8]).unwrap();
    header.to_str().unwrap().to_owned()
}

#[test]
fn extract_octahedron_to_obj() {
    let dir = tempfile::tempdir().unwrap();
    let header = single_voxel(dir.path());
    let obj = dir.path().join("oct.obj");
    let o = vesta(&[
        "extract", "--input", &header, "--iso", "0.5", "--engine", "vesta-marching", "--dedup", "--output",
        obj.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("cycles.3: 8"));
    let text = fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 6);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 8);
}

#[test]
fn synth_then_validate_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let header = dir.path().join("sphere.txt");
    let h = header.to_str().unwrap();
    let o = vesta(&["synth", "--kind", "sphere", "--dims", "12", "--output", h]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("sphere.raw").exists());
    let o = vesta(&["validate", "--input", h, "--iso", "0.5", "--mode", "mixed", "--resolution", "H", "--self-intersection"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("closed: true"));
    assert!(out.contains("components: 1"));
    assert!(out.contains("self_intersections: 0"), "{out}");
}

#[test]
fn classic_marching_cubes_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let header = dir.path().join("hole.txt");
    fs::write(&header, "dims: 3 2 2\nkind: u8\n").unwrap();
    let mut v = [0u8; 12];
    for (i, j, k) in [(1, 0, 0), (1, 1, 1), (2, 0, 0), (2, 1, 0), (2, 0, 1), (2, 1, 1)] {
        v[i + 3 * (j + 2 * k)] = 1;
    }
    fs::write(dir.path().join("hole.raw"), v).unwrap();
    let h = header.to_str().unwrap();
    let o = vesta(&["validate", "--input", h, "--iso", "0.5", "--engine", "mc-classic"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("closed: false"));
    let o = vesta(&["validate", "--input", h, "--iso", "0.5", "--engine", "mc-extended"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    let o = vesta(&["extract", "--input", missing.to_str().unwrap(), "--iso", "0.5"]);
    assert_eq!(o.status.code(), Some(2));

    let header = dir.path().join("short.txt");
    fs::write(&header, "dims: 2 2 2\nkind: u8\n").unwrap();
    fs::write(dir.path().join("short.raw"), [0u8; 7]).unwrap();
    let o = vesta(&["census", "--input", header.to_str().unwrap(), "--iso", "0.5"]);
    assert_eq!(o.status.code(), Some(2));

    let voxel = single_voxel(dir.path());
    let o = vesta(&["extract", "--input", &voxel, "--iso", "0.5", "--engine", "mc-extended", "--mode", "connect"]);
    assert_eq!(o.status.code(), Some(2));
    let o = vesta(&["extract", "--input", &voxel, "--iso", "0.5", "--mode", "sideways"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn census_slice_and_contour_agree_on_a_layer() {
    let dir = tempfile::tempdir().unwrap();
    let header = dir.path().join("layer.txt");
    fs::write(&header, "dims: 3 3 1\nkind: u8\n").unwrap();
    fs::write(dir.path().join("layer.raw"), [1u8, 0, 1, 0, 1, 0, 1, 0, 1]).unwrap();
    let h = header.to_str().unwrap();
    let census = stdout(&vesta(&["census", "--input", h, "--iso", "0.5", "--mode", "connect"]));
    assert!(census.contains("cycle_sum:"));
    for mode in ["disconnect", "connect", "mixed"] {
        let slice = vesta(&["slice", "--input", h, "--iso", "0.5", "--mode", mode, "--layer", "0"]);
        let contour = vesta(&["contour", "--input", h, "--iso", "0.5", "--mode", mode, "--layer", "0"]);
        assert!(slice.status.success() && contour.status.success());
        let count = |o: &Output| stdout(o).lines().next().unwrap().to_owned();
        assert_eq!(count(&slice), count(&contour), "{mode}");
    }
}

#[test]
fn bench_prints_table_rows() {
    let dir = tempfile::tempdir().unwrap();
    let header = single_voxel(dir.path());
    let o = vesta(&["bench", "--input", &header, "--iso", "0.5", "--repeats", "3", "--engines", "vesta-core,mc-extended"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let sum = out.lines().find(|l| l.starts_with("Cycle Sum")).unwrap();
    // three vesta-core modes and one marching cubes column
    assert_eq!(sum.matches(" 8").count(), 4, "{out}");
    assert!(out.contains("threads: 1"));
    assert!(out.lines().any(|l| l.starts_with("12-Cycles") && l.contains("N/A")));
}
