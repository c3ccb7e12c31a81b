//! Shared FFT plans for the unnormalized multi-dimensional DFT.

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

static PLANS: Lazy<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut plans = PLANS.lock().unwrap();
    plans
        .entry((n, inverse))
        .or_insert_with(|| {
            FftPlanner::new().plan_fft(
                n,
                if inverse {
                    FftDirection::Inverse
                } else {
                    FftDirection::Forward
                },
            )
        })
        .clone()
}

/// In-place unnormalized DFT over a row-major array of the given shape.
/// Supports one and two dimensions.
pub(crate) fn dft_nd(values: &mut [Complex64], shape: &[usize], inverse: bool) {
    match *shape {
        [n] => {
            debug_assert_eq!(values.len(), n);
            plan(n, inverse).process(values);
        }
        [n0, n1] => {
            debug_assert_eq!(values.len(), n0 * n1);
            // rows are contiguous; `process` splits the buffer into chunks of n1
            plan(n1, inverse).process(values);
            let col_plan = plan(n0, inverse);
            let mut col = vec![Complex64::new(0.0, 0.0); n0];
            for c in 0..n1 {
                for r in 0..n0 {
                    col[r] = values[r * n1 + c];
                }
                col_plan.process(&mut col);
                for r in 0..n0 {
                    values[r * n1 + c] = col[r];
                }
            }
        }
        _ => panic!("only 1- and 2-dimensional grids are supported"),
    }
}
