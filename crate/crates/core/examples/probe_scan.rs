//! Scratch scan of the stock probe specs; prints drift tables.

use dnls_core::prober::{presets, run_probe, DyadicEstimateId};
use std::time::Instant;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    let workers: usize = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    let decay: Option<f64> = std::env::args().nth(3).and_then(|s| s.parse().ok());
    let mut specs = Vec::new();
    match which.as_str() {
        "strichartz" | "all" => specs.push(presets::strichartz_1d(0xA11CE)),
        _ => {}
    }
    if which == "local" || which == "all" {
        specs.push(presets::local_smoothing_2d(0xA11CE));
    }
    if which == "inhom" || which == "all" {
        specs.push(presets::inhomogeneous_smoothing_2d(0xA11CE));
    }
    if which == "maxglobal" || which == "all" {
        specs.push(presets::maximal_global_2d(0xA11CE));
    }
    if which == "maxuniform" || which == "all" {
        specs.push(presets::maximal_uniform_2d(0xA11CE));
    }
    if which == "maxmixed" || which == "all" {
        specs.push(presets::maximal_mixed_2d(0xA11CE));
    }
    if which == "product" || which == "all" {
        specs.push(presets::product_estimate_1d(0xA11CE, 3));
    }
    for spec in &mut specs {
        if let Some(d) = decay {
            spec.decay = d;
        }
        let spec = &*spec;
        let start = Instant::now();
        match run_probe(spec, workers) {
            Ok(report) => {
                println!(
                    "{:?}: pass={} max_base={:.4} elapsed={:.1}s",
                    report.id,
                    report.pass,
                    report.max_ratio_base,
                    start.elapsed().as_secs_f64()
                );
                for d in &report.drifts {
                    println!(
                        "    {:<12} max {:.4} -> {:.4}  drift {:+.3}",
                        d.axis, d.base_max, d.doubled_max, d.drift
                    );
                }
            }
            Err(e) => println!("{:?}: ERROR {e}", spec.id),
        }
    }
    if which == "dyadic" || which == "all" {
        for est in [
            DyadicEstimateId::Cor1,
            DyadicEstimateId::Cor4,
            DyadicEstimateId::Cor7,
            DyadicEstimateId::Cor3,
            DyadicEstimateId::Cor9,
        ] {
            let spec = presets::dyadic_linear_1d(0xA11CE, est);
            let start = Instant::now();
            match run_probe(&spec, workers) {
                Ok(report) => println!(
                    "{est:?}: pass={} slope={:.3} claimed={:.3} elapsed={:.1}s",
                    report.pass,
                    report.dyadic_slope.unwrap(),
                    report.claimed_exponent.unwrap(),
                    start.elapsed().as_secs_f64()
                ),
                Err(e) => println!("{est:?}: ERROR {e}"),
            }
        }
    }
}
