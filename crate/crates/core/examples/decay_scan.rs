//! Scratch check of the dispersive-decay slopes on enlarged boxes.

use dnls_core::field::{gaussian_packet, FrequencyGrid, SignSignature};
use dnls_core::propagator::{decay_probe, log_log_slope, Propagator};
use std::f64::consts::PI;

fn main() {
    let times: Vec<f64> = (0..9).map(|i| 4.0 * 2.0f64.powf(i as f64 * 3.0 / 8.0)).collect();

    // 1D elliptic, box enlarged 4x from the 16 pi default
    let grid = FrequencyGrid::new(1, 1024, 64.0 * PI).unwrap();
    let prop = Propagator::new(&grid, &SignSignature::elliptic(1)).unwrap();
    let u0 = gaussian_packet(&grid, &[0.0], 2.0, &[0.0]).unwrap();
    let samples = decay_probe(&u0, &times, &prop).unwrap();
    let sups: Vec<f64> = samples.iter().map(|s| s.sup_norm).collect();
    let wrapped = samples.iter().any(|s| s.wrap_detected);
    println!(
        "1d elliptic: slope {:.4} (target -0.5), wrapped {wrapped}",
        log_log_slope(&times, &sups)
    );

    // 2D, box enlarged 8x from the 8 pi default
    for signs in [vec![1, 1], vec![1, -1]] {
        let grid = FrequencyGrid::new(2, 640, 64.0 * PI).unwrap();
        let prop = Propagator::new(&grid, &SignSignature::new(signs.clone()).unwrap()).unwrap();
        let u0 = gaussian_packet(&grid, &[0.0, 0.0], 2.0, &[0.0, 0.0]).unwrap();
        let samples = decay_probe(&u0, &times, &prop).unwrap();
        let sups: Vec<f64> = samples.iter().map(|s| s.sup_norm).collect();
        let wrapped = samples.iter().any(|s| s.wrap_detected);
        println!(
            "2d {signs:?}: slope {:.4} (target -1), wrapped {wrapped}",
            log_log_slope(&times, &sups)
        );
    }
}
