//! Timing harness with table output in the layout of the classic
//! extraction benchmarks.

use std::time::Instant;

use crate::cycle::{Census, Mode};
use crate::error::{Error, Result};
use crate::extract::{extract, ExtractOptions};
use crate::mesh::{Engine, Resolution};
use crate::volume::{IsoConfig, ScalarGrid, ValueKind};

/// One timed configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub engine: Engine,
    pub mode: Mode,
    pub resolution: Resolution,
    pub census: Census,
    pub points: usize,
    pub triangles: usize,
    /// Seconds.
    pub time_mean: f64,
    pub time_std: f64,
    pub repeats: usize,
    pub threads: usize,
}

/// Times every supported (engine, mode, resolution) combination `repeats`
/// times. Timing covers extraction and list construction only; a tiny
/// untimed extraction first initializes the lookup tables.
/// Combinations an engine does not support are skipped.
pub fn run_bench(
    grid: &ScalarGrid,
    iso: &IsoConfig,
    engines: &[Engine],
    modes: &[Mode],
    resolutions: &[Resolution],
    repeats: usize,
    threads: usize,
) -> Result<Vec<BenchRecord>> {
    if repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be at least 1".into()));
    }
    let warm_up = ScalarGrid::from_fn([2, 2, 2], ValueKind::U8, |i, j, k| ((i + j + k) % 2) as f32)?;
    let warm_iso = IsoConfig::new(0.5)?;
    let mut out = Vec::new();
    for &engine in engines {
        for &mode in modes {
            for &resolution in resolutions {
                let mut opts = ExtractOptions::new(engine, mode, resolution);
                opts.threads = threads;
                if opts.check().is_err() {
                    continue;
                }
                // builds the lazily initialized lookup tables outside the timed runs
                extract(&warm_up, &warm_iso, &opts)?;
                let mut times = Vec::with_capacity(repeats);
                let mut last = None;
                for _ in 0..repeats {
                    let start = Instant::now();
                    let x = extract(grid, iso, &opts)?;
                    times.push(start.elapsed().as_secs_f64());
                    last = Some(x);
                }
                let x = last.unwrap();
                let (mean, std) = mean_std(&times);
                out.push(BenchRecord {
                    engine,
                    mode,
                    resolution,
                    census: x.census,
                    points: x.mesh.point_count(),
                    triangles: x.mesh.triangle_count(),
                    time_mean: mean,
                    time_std: std,
                    repeats,
                    threads,
                });
            }
        }
    }
    Ok(out)
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// `mean(σ)` with σ given in units of the last shown digit, using at
/// least two decimals and as many more as needed for σ to show.
pub fn format_time(mean: f64, std: f64) -> String {
    let mut d = 2;
    while d < 9 && std > 0.0 && (std * 10f64.powi(d)).round() < 1.0 {
        d += 1;
    }
    let sigma = (std * 10f64.powi(d)).round() as u64;
    format!("{mean:.prec$}({sigma})", prec = d as usize)
}

/// Integer with thousands separators.
pub fn format_count(n: usize) -> String {
    let s = n.to_string();
    let mut out = String::new();
    for (i, c) in s.chars().enumerate() {
        if i > 0 && (s.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}

const CYCLE_ROWS: [usize; 8] = [3, 4, 5, 6, 7, 8, 9, 12];

/// Renders records as a table with one column per (engine, mode) and rows
/// for the cycle census, cycle sum, and points, triangles and time per
/// resolution. Inapplicable cells read `N/A`.
pub fn format_table(records: &[BenchRecord]) -> String {
    let mut columns: Vec<(Engine, Mode)> = Vec::new();
    for r in records {
        if !columns.contains(&(r.engine, r.mode)) {
            columns.push((r.engine, r.mode));
        }
    }
    let find = |c: &(Engine, Mode), res: Resolution| {
        records
            .iter()
            .find(|r| r.engine == c.0 && r.mode == c.1 && r.resolution == res)
    };
    let any = |c: &(Engine, Mode)| records.iter().find(|r| r.engine == c.0 && r.mode == c.1).unwrap();
    let na = || "N/A".to_string();

    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    rows.push(("Technique".into(), columns.iter().map(|c| c.0.name().to_string()).collect()));
    rows.push(("Connectivity".into(), columns.iter().map(|c| c.1.name().to_string()).collect()));
    for n in CYCLE_ROWS {
        let cells = columns
            .iter()
            .map(|c| {
                let r = any(c);
                let impossible = n > 7 && (r.mode.is_pure() || r.engine.is_marching_cubes());
                if impossible {
                    na()
                } else {
                    format_count(r.census.get(n))
                }
            })
            .collect();
        rows.push((format!("{n}-Cycles"), cells));
    }
    rows.push(("Cycle Sum".into(), columns.iter().map(|c| format_count(any(c).census.total())).collect()));
    for res in Resolution::ALL {
        let get = |f: &dyn Fn(&BenchRecord) -> String| -> Vec<String> {
            columns.iter().map(|c| find(c, res).map_or_else(na, f)).collect()
        };
        rows.push((format!("{res}: Points"), get(&|r| format_count(r.points))));
        rows.push((format!("{res}: Triangles"), get(&|r| format_count(r.triangles))));
        rows.push((format!("{res}: Time [s]"), get(&|r| format_time(r.time_mean, r.time_std))));
    }

    let label_w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let col_w: Vec<usize> = (0..columns.len())
        .map(|i| rows.iter().map(|r| r.1[i].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (label, cells) in &rows {
        out.push_str(&format!("{label:<label_w$}"));
        for (cell, w) in cells.iter().zip(&col_w) {
            out.push_str(&format!(" | {cell:>w$}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_format() {
        assert_eq!(format_time(20.44, 0.07), "20.44(7)");
        assert_eq!(format_time(4.62, 0.26), "4.62(26)");
        assert_eq!(format_time(0.124, 0.002), "0.124(2)");
        assert_eq!(format_time(1.0, 0.0), "1.00(0)");
    }

    #[test]
    fn count_format() {
        assert_eq!(format_count(0), "0");
        assert_eq!(format_count(999), "999");
        assert_eq!(format_count(1021460), "1,021,460");
    }

    #[test]
    fn single_voxel_table() {
        let g = ScalarGrid::from_u8([1, 1, 1], &[1]).unwrap();
        let iso = IsoConfig::new(0.5).unwrap();
        let recs = run_bench(&g, &iso, &Engine::ALL, &Mode::ALL, &Resolution::ALL, 2, 1).unwrap();
        // 2 VESTA engines x 3 modes x 2 resolutions + 2 MC variants
        assert_eq!(recs.len(), 14);
        assert!(recs.iter().all(|r| r.census.total() == 8));
        let t = format_table(&recs);
        let row = |name: &str| t.lines().find(|l| l.starts_with(name)).unwrap().to_string();
        assert_eq!(row("Cycle Sum").matches(" 8").count(), 8);
        // pure modes and MC show N/A for 8-cycles; mixed shows 0
        assert_eq!(row("8-Cycles").matches("N/A").count(), 6);
        assert_eq!(row("H: Points").matches("N/A").count(), 2);
        assert!(run_bench(&g, &iso, &Engine::ALL, &Mode::ALL, &Resolution::ALL, 0, 1).is_err());
    }
}
