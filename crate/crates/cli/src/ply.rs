//! ASCII PLY export of a per-vertex scalar field as vertex colors.

use meship_core::Mesh;
use std::fmt::Write;

/// Linear blue to red ramp over `[0, 1]`.
pub fn ramp(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    let red = (255.0 * t).round() as u8;
    [red, 0, 255 - red]
}

/// Min-max normalizes `values`; a constant field maps to 0 everywhere.
pub fn normalize(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if !(range > 0.0) {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - lo) / range).collect()
}

pub fn write_colored_ply(mesh: &Mesh, values: &[f64]) -> String {
    let colors: Vec<[u8; 3]> = normalize(values).into_iter().map(ramp).collect();
    let mut out = String::new();
    out.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(out, "element vertex {}", mesh.vertex_count());
    for prop in ["float x", "float y", "float z", "uchar red", "uchar green", "uchar blue"] {
        let _ = writeln!(out, "property {prop}");
    }
    let _ = writeln!(out, "element face {}", mesh.face_count());
    out.push_str("property list uchar int vertex_indices\nend_header\n");
    for (p, [r, g, b]) in mesh.vertices().iter().zip(&colors) {
        let _ = writeln!(out, "{} {} {} {r} {g} {b}", p.x, p.y, p.z);
    }
    for [a, b, c] in mesh.faces() {
        let _ = writeln!(out, "3 {a} {b} {c}");
    }
    out
}
