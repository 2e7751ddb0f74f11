use vesta::bench::{format_table, run_bench};
use vesta::mc::{mc_census, mc_extract};
use vesta::meshcheck::{check_closed, component_stats, signed_volume};
use vesta::synth;
use vesta::{extract, Engine, ExtractOptions, IsoConfig, McVariant, Mesh, Mode, Resolution, ScalarGrid};

fn iso(v: f64) -> IsoConfig {
    IsoConfig::new(v).unwrap()
}

fn run(grid: &ScalarGrid, iso: &IsoConfig, opts: ExtractOptions) -> vesta::Extraction {
    extract(grid, iso, &opts).unwrap()
}

/// Triangles as key triples rotated to start at their smallest key.
fn sorted_triangles(mesh: &Mesh) -> Vec<[vesta::PointKey; 3]> {
    let mut t: Vec<_> = (0..mesh.triangle_count())
        .map(|i| {
            let mut k = mesh.triangle_keys(i);
            let m = (0..3).min_by_key(|&j| k[j]).unwrap();
            k.rotate_left(m);
            k
        })
        .collect();
    t.sort();
    t
}

fn sorted_keys(mesh: &Mesh) -> Vec<vesta::PointKey> {
    let mut k: Vec<_> = mesh.points.iter().map(|p| p.key).collect();
    k.sort();
    k
}

#[test]
fn marching_single_voxel_dedups_to_six_points() {
    let grid = ScalarGrid::from_u8([1, 1, 1], &[1]).unwrap();
    let raw = run(&grid, &iso(0.5), ExtractOptions::new(Engine::VestaMarching, Mode::Disconnect, Resolution::L));
    assert!(raw.mesh.point_count() > 6, "marching shares points only within a window");
    assert_eq!(raw.mesh.dedup_points().point_count(), 6);
}

#[test]
fn dedup_preserves_triangles_census_closure_and_volume() {
    let grid = synth::noise([10, 9, 8], 5).unwrap();
    let iso = iso(128.0);
    for engine in [Engine::VestaMarching, Engine::McExtended] {
        let raw = run(&grid, &iso, ExtractOptions::new(engine, Mode::Disconnect, Resolution::L));
        let d = raw.mesh.dedup_points();
        assert_eq!(d.triangle_count(), raw.mesh.triangle_count());
        assert_eq!(check_closed(&d).is_closed(), check_closed(&raw.mesh).is_closed());
        assert!(check_closed(&d).is_closed());
        let (a, b) = (signed_volume(&raw.mesh).unwrap(), signed_volume(&d).unwrap());
        assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{a} vs {b}");
        assert_eq!(d.dedup_points(), d, "idempotent");
        let via_option = run(&grid, &iso, ExtractOptions::new(engine, Mode::Disconnect, Resolution::L).deduplicated());
        assert_eq!(via_option.census, raw.census);
        assert_eq!(via_option.mesh, d);
    }
}

#[test]
fn extended_mc_matches_vesta_l_disconnect_counts() {
    for seed in 0..5 {
        let grid = synth::random([9, 8, 7], 0.5, seed).unwrap();
        let iso = iso(0.5);
        let core = run(&grid, &iso, ExtractOptions::new(Engine::VestaCore, Mode::Disconnect, Resolution::L));
        let mc = mc_extract(&grid, &iso, McVariant::Extended, true);
        assert_eq!(mc.triangle_count(), core.mesh.triangle_count());
        assert_eq!(mc.point_count(), 3 * mc.triangle_count());
        assert_eq!(mc_census(&grid, &iso, McVariant::Extended), core.census);
        assert_eq!(sorted_keys(&mc.dedup_points()), sorted_keys(&core.mesh));
        assert_eq!(sorted_triangles(&mc), sorted_triangles(&core.mesh));
        assert!(check_closed(&mc).is_closed());
    }
}

#[test]
fn marching_cubes_rejects_unsupported_combinations() {
    let grid = ScalarGrid::from_u8([1, 1, 1], &[1]).unwrap();
    for engine in [Engine::McClassic, Engine::McExtended] {
        for (mode, res) in [(Mode::Connect, Resolution::L), (Mode::Mixed, Resolution::L), (Mode::Disconnect, Resolution::H)] {
            assert!(extract(&grid, &iso(0.5), &ExtractOptions::new(engine, mode, res)).is_err());
        }
    }
}

#[test]
fn sphere_is_one_closed_sphere() {
    let grid = synth::sphere([32; 3]).unwrap();
    for engine in [Engine::VestaCore, Engine::VestaMarching] {
        for res in [Resolution::L, Resolution::H] {
            let x = run(&grid, &iso(0.5), ExtractOptions::new(engine, Mode::Mixed, res).deduplicated());
            assert!(check_closed(&x.mesh).is_closed());
            let stats = component_stats(&x.mesh);
            assert_eq!(stats.len(), 1);
            assert_eq!(stats[0].euler, 2);
            assert!(stats[0].signed_volume > 0.0, "outward orientation");
        }
    }
}

#[test]
fn synthetic_volumes_are_deterministic() {
    assert_eq!(synth::random([8; 3], 0.5, 42).unwrap(), synth::random([8; 3], 0.5, 42).unwrap());
    assert_ne!(synth::random([8; 3], 0.5, 42).unwrap(), synth::random([8; 3], 0.5, 43).unwrap());
    let fig = synth::figure27().unwrap();
    assert_eq!(fig.dims(), [9, 9, 14]);
    let x = run(&fig, &iso(128.0), ExtractOptions::new(Engine::VestaCore, Mode::Mixed, Resolution::H));
    assert!(x.mesh.triangle_count() > 0);
    assert!(check_closed(&x.mesh).is_closed());
}

#[test]
fn parallel_marching_matches_sequential() {
    let grid = synth::noise([12, 11, 10], 8).unwrap();
    let base = ExtractOptions::new(Engine::VestaMarching, Mode::Mixed, Resolution::H);
    let seq = run(&grid, &iso(128.0), base);
    let mut par = base;
    par.threads = 3;
    assert_eq!(run(&grid, &iso(128.0), par).mesh, seq.mesh);
}

#[test]
fn bench_census_columns_agree_across_engines() {
    let grid = synth::random([8; 3], 0.5, 4).unwrap();
    let engines = [Engine::VestaCore, Engine::VestaMarching, Engine::McExtended];
    let records = run_bench(&grid, &iso(0.5), &engines, &Mode::ALL, &[Resolution::L, Resolution::H], 2, 1).unwrap();
    for mode in Mode::ALL {
        let censuses: Vec<_> = records.iter().filter(|r| r.mode == mode).map(|r| &r.census).collect();
        assert!(censuses.windows(2).all(|w| w[0] == w[1]), "{mode:?}");
    }
    assert!(records.iter().all(|r| r.repeats == 2 && r.threads == 1));
    let table = format_table(&records);
    assert!(table.lines().any(|l| l.starts_with("Cycle Sum")));
}

#[test]
fn bench_reports_sigma_in_parentheses() {
    let grid = ScalarGrid::from_u8([1, 1, 1], &[1]).unwrap();
    let records = run_bench(&grid, &iso(0.5), &[Engine::VestaCore], &[Mode::Disconnect], &[Resolution::L], 100, 1).unwrap();
    assert_eq!(records.len(), 1);
    let table = format_table(&records);
    let time_row = table.lines().find(|l| l.starts_with("L: Time")).unwrap();
    assert!(time_row.contains('(') && time_row.contains(')'), "{time_row}");
    assert!(run_bench(&grid, &iso(0.5), &[Engine::VestaCore], &[Mode::Disconnect], &[Resolution::L], 0, 1).is_err());
}
