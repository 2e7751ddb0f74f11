//! Prints the extended Marching Cubes tables.
//!
//! Cut edges follow from the corner activities. Triangles are the
//! low-resolution disconnect triangulation of each configuration's cell
//! cycles, so the table agrees with that surface triangle for triangle.
//!
//! Usage: cargo run -p vesta --example gen_mc_table > crates/core/src/mc/tables.rs

use vesta::marching::{cell_l_triangles, CENTER_GEOMETRY};
use vesta::mc::{edge_offset, MC_EDGES};

fn main() {
    let center_to_edge: Vec<u8> = (0..12)
        .map(|c| (0..12u8).find(|&e| edge_offset(e) == CENTER_GEOMETRY[c].0).expect("every center is a cube edge"))
        .collect();
    println!("// Generated by `cargo run -p vesta --example gen_mc_table`. Do not edit.");
    println!();
    println!("/// Cut edges per configuration, bit `e` for edge `e`.");
    println!("pub static EDGE_TABLE: [u16; 256] = [");
    for row in 0..32 {
        let cells: Vec<String> = (0..8)
            .map(|i| {
                let config = row * 8 + i;
                let bits = MC_EDGES
                    .iter()
                    .enumerate()
                    .filter(|(_, &(a, b))| (config >> a) & 1 != (config >> b) & 1)
                    .fold(0u16, |m, (e, _)| m | 1 << e);
                format!("{bits:#05x}")
            })
            .collect();
        println!("    {},", cells.join(", "));
    }
    println!("];");
    println!();
    println!("/// Triangles as edge-index triples, counterclockwise seen from the");
    println!("/// inactive side.");
    println!("pub static TRI_TABLE: [&[[u8; 3]]; 256] = [");
    for config in 0..=255u8 {
        let tris: Vec<String> = cell_l_triangles(config, 0)
            .iter()
            .flatten()
            .map(|t| {
                let [a, b, c] = t.map(|id| center_to_edge[id as usize]);
                format!("[{a}, {b}, {c}]")
            })
            .collect();
        println!("    &[{}],", tris.join(", "));
    }
    println!("];");
}
