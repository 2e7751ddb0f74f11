//! Benchmark fixtures shared by the criterion benches.

use vesta::{synth, IsoConfig, ScalarGrid};

/// A named volume with its isovalue.
pub struct Fixture {
    pub name: &'static str,
    pub grid: ScalarGrid,
    pub iso: IsoConfig,
}

/// Smooth, noisy and small demo volumes.
pub fn fixtures() -> Vec<Fixture> {
    let fixture = |name, grid: vesta::Result<ScalarGrid>, iso| Fixture {
        name,
        grid: grid.expect("valid fixture dims"),
        iso: IsoConfig::new(iso).expect("finite isovalue"),
    };
    vec![
        fixture("sphere64", synth::sphere([64; 3]), 0.5),
        fixture("noise32", synth::noise([32; 3], 1), 128.0),
        fixture("figure27", synth::figure27(), 128.0),
    ]
}
