//! Multi-dimensional complex FFTs over row-major buffers (last index fastest).

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use std::cell::RefCell;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    static BUFFERS: RefCell<(Vec<Complex64>, Vec<Complex64>)> = const { RefCell::new((Vec::new(), Vec::new())) };
}

const BLOCK: usize = 16;

/// Writes the `rows × cols` matrix `src` transposed into `dst`, in cache-sized tiles.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r0 in (0..rows).step_by(BLOCK) {
        for c0 in (0..cols).step_by(BLOCK) {
            for r in r0..(r0 + BLOCK).min(rows) {
                for c in c0..(c0 + BLOCK).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

fn transform_axes(data: &mut [Complex64], shape: &[usize], direction: FftDirection) {
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total, "buffer length does not match shape");
    BUFFERS.with(|cell| {
        let (lines, scratch) = &mut *cell.borrow_mut();
        let mut stride = 1;
        for &len in shape.iter().rev() {
            let plan = PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction));
            scratch.resize(plan.get_inplace_scratch_len(), Complex64::default());
            if stride == 1 {
                plan.process_with_scratch(data, scratch);
            } else {
                // Each outer block is a `len × stride` matrix whose columns are the lines.
                lines.resize(total, Complex64::default());
                let block = len * stride;
                for (src, dst) in data.chunks_exact(block).zip(lines.chunks_exact_mut(block)) {
                    transpose(src, dst, len, stride);
                }
                plan.process_with_scratch(lines, scratch);
                for (src, dst) in lines.chunks_exact(block).zip(data.chunks_exact_mut(block)) {
                    transpose(src, dst, stride, len);
                }
            }
            stride *= len;
        }
    });
}

/// Physical samples -> Fourier coefficients `c` such that `f = sum c e^{ik.x}`.
pub(crate) fn analysis(data: &mut [Complex64], shape: &[usize]) {
    transform_axes(data, shape, FftDirection::Forward);
    let scale = 1.0 / data.len() as f64;
    data.iter_mut().for_each(|c| *c *= scale);
}

/// Fourier coefficients -> physical samples.
pub(crate) fn synthesis(data: &mut [Complex64], shape: &[usize]) {
    transform_axes(data, shape, FftDirection::Inverse);
}

/// Signed wavenumber of FFT slot `i` on an `n`-point axis; the Nyquist slot maps to `-n/2`.
pub fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// FFT slot holding wavenumber `k`, if representable.
pub fn slot(k: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if k >= -half && k < half {
        Some(k.rem_euclid(n as i64) as usize)
    } else {
        None
    }
}
