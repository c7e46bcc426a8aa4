use fl_ist::grid::{ComplexSamples, SpectralGrid, SpectralGridParams};
use fl_ist::plemelj::{plemelj_minus, plemelj_plus};
use num_complex::Complex64 as C64;
use std::sync::Arc;

#[test]
fn probe_rational_identity() {
    let g = Arc::new(SpectralGrid::new(SpectralGridParams::default()).unwrap());
    let q = g.params.z_cut / 8.0;
    let h = ComplexSamples::from_fn(g.clone(), |z| {
        let d = z * z + q * q;
        C64::new(2.0 * z / d + 0.4 * 2.0 * q / d, 0.2 * 4.0 * q * q * z / (d * d))
    });
    let p = plemelj_plus(&h);
    let m = plemelj_minus(&h);
    let mut rows: Vec<(f64, f64)> = vec![];
    for i in 0..h.len() {
        rows.push((g.nodes[i], (p.values[i] - m.values[i] - h.values[i]).norm()));
    }
    rows.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    for r in rows.iter().take(8) {
        println!("z = {:9.4}  defect = {:.3e}", r.0, r.1);
    }
    // where is the function itself large?
    let i0 = g.nodes.iter().position(|&z| (z - q).abs() < 0.1).unwrap();
    println!("h({}) = {}", g.nodes[i0], h.values[i0]);
    println!("P+ - P- at that node = {}", p.values[i0] - m.values[i0]);
    panic!("probe");
}
