use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use vesta::{extract, Engine, ExtractOptions, Mode, Resolution};
use vesta_bench::fixtures;

fn engines(c: &mut Criterion) {
    let mut group = c.benchmark_group("extract");
    group.sample_size(10);
    for f in fixtures() {
        for engine in [Engine::VestaCore, Engine::VestaMarching] {
            for mode in Mode::ALL {
                for res in [Resolution::L, Resolution::H] {
                    let opts = ExtractOptions::new(engine, mode, res);
                    let id = BenchmarkId::new(format!("{engine}/{mode:?}/{res:?}"), f.name);
                    group.bench_with_input(id, &opts, |b, opts| b.iter(|| extract(&f.grid, &f.iso, opts).unwrap()));
                }
            }
        }
        for engine in [Engine::McClassic, Engine::McExtended] {
            let opts = ExtractOptions::new(engine, Mode::Disconnect, Resolution::L);
            group.bench_with_input(BenchmarkId::new(engine.to_string(), f.name), &opts, |b, opts| {
                b.iter(|| extract(&f.grid, &f.iso, opts).unwrap())
            });
        }
    }
    group.finish();
}

fn dedup(c: &mut Criterion) {
    let f = &fixtures()[0];
    let raw = extract(&f.grid, &f.iso, &ExtractOptions::new(Engine::VestaMarching, Mode::Mixed, Resolution::L)).unwrap();
    c.bench_function("dedup/sphere64", |b| b.iter(|| raw.mesh.dedup_points()));
}

criterion_group!(benches, engines, dedup);
criterion_main!(benches);
