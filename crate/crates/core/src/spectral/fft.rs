//! Cached 2D FFT plans. rustfft plans are shared per grid size; the
//! transforms themselves are unnormalised (normalisation lives in the
//! field layer so that the k = 0 coefficient equals the grid mean).

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

static PLAN_CACHE: Lazy<Mutex<HashMap<usize, Arc<Plans>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn plans(m: usize) -> Arc<Plans> {
    let mut cache = PLAN_CACHE.lock().unwrap();
    cache
        .entry(m)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft(m, FftDirection::Forward),
                inverse: planner.plan_fft(m, FftDirection::Inverse),
            })
        })
        .clone()
}

fn transpose(data: &mut [Complex64], m: usize) {
    for iy in 0..m {
        for ix in (iy + 1)..m {
            data.swap(iy * m + ix, ix * m + iy);
        }
    }
}

fn fft2(data: &mut [Complex64], m: usize, inverse: bool) {
    debug_assert_eq!(data.len(), m * m);
    let p = plans(m);
    let fft = if inverse { &p.inverse } else { &p.forward };
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for row in data.chunks_exact_mut(m) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose(data, m);
    for row in data.chunks_exact_mut(m) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose(data, m);
}

/// Unnormalised forward DFT, X_k = sum_j x_j exp(-2 pi i j.k / M).
pub(crate) fn fft2_forward(data: &mut [Complex64], m: usize) {
    fft2(data, m, false);
}

/// Unnormalised inverse DFT, x_j = sum_k X_k exp(+2 pi i j.k / M).
pub(crate) fn fft2_inverse(data: &mut [Complex64], m: usize) {
    fft2(data, m, true);
}
