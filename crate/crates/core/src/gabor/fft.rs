use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Unnormalized in-place DFT over every axis of a row-major array.
///
/// Forward uses the kernel `e^{-2πi x·ξ/N}`, inverse `e^{+2πi x·ξ/N}`.
pub(crate) fn fft_nd(data: &mut [Complex64], shape: &[usize], inverse: bool) {
    debug_assert_eq!(data.len(), shape.iter().product::<usize>());
    for ax in 0..shape.len() {
        let n = shape[ax];
        if n == 1 {
            continue;
        }
        let f = plan(n, inverse);
        let inner: usize = shape[ax + 1..].iter().product();
        if inner == 1 {
            f.process(data);
            continue;
        }
        let outer: usize = shape[..ax].iter().product();
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for o in 0..outer {
            for i in 0..inner {
                let base = o * n * inner + i;
                for k in 0..n {
                    line[k] = data[base + k * inner];
                }
                f.process(&mut line);
                for k in 0..n {
                    data[base + k * inner] = line[k];
                }
            }
        }
    }
}

/// Unitary DFT, normalized by `(∏N)^{-1/2}`.
pub(crate) fn dft_unitary(data: &mut [Complex64], shape: &[usize], inverse: bool) {
    fft_nd(data, shape, inverse);
    let s = 1.0 / (data.len() as f64).sqrt();
    data.iter_mut().for_each(|v| *v *= s);
}
