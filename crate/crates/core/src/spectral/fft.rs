//! Separable 2D FFT on row-major `(ix, iy)` storage, `iy` contiguous.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, dir))
}

// Rows per rayon task. Each row transform is independent so the result does
// not depend on how rows are split between threads.
const ROWS_PER_TASK: usize = 16;

fn transform_rows(data: &mut [Complex64], row_len: usize, dir: FftDirection) {
    let fft = plan(row_len, dir);
    let scratch_len = fft.get_inplace_scratch_len();
    data.par_chunks_mut(row_len * ROWS_PER_TASK).for_each_init(
        || vec![Complex64::new(0.0, 0.0); scratch_len],
        |scratch, rows| fft.process_with_scratch(rows, scratch),
    );
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    dst.par_chunks_mut(rows).enumerate().for_each(|(c, out)| {
        for (r, o) in out.iter_mut().enumerate() {
            *o = src[r * cols + c];
        }
    });
}

/// Unnormalized transform of an `mx × my` array in place.
pub(crate) fn fft2(data: &mut [Complex64], mx: usize, my: usize, dir: FftDirection) {
    assert_eq!(data.len(), mx * my);
    transform_rows(data, my, dir);
    let mut t = vec![Complex64::new(0.0, 0.0); data.len()];
    transpose(data, &mut t, mx, my);
    transform_rows(&mut t, mx, dir);
    transpose(&t, data, my, mx);
}

/// Unnormalized 3D transform of an `n0 × n1 × n2` array (last index contiguous).
pub(crate) fn fft3(data: &mut [Complex64], dims: [usize; 3], dir: FftDirection) {
    let [n0, n1, n2] = dims;
    assert_eq!(data.len(), n0 * n1 * n2);
    transform_rows(data, n2, dir);
    // Bring axis 1 innermost: (i0, i1, i2) -> (i0, i2, i1).
    let mut t = vec![Complex64::new(0.0, 0.0); data.len()];
    for i0 in 0..n0 {
        let block = n1 * n2;
        transpose(&data[i0 * block..(i0 + 1) * block], &mut t[i0 * block..(i0 + 1) * block], n1, n2);
    }
    transform_rows(&mut t, n1, dir);
    for i0 in 0..n0 {
        let block = n1 * n2;
        transpose(&t[i0 * block..(i0 + 1) * block], &mut data[i0 * block..(i0 + 1) * block], n2, n1);
    }
    // Axis 0: treat (i0, rest) as a 2D array and transpose.
    let rest = n1 * n2;
    transpose(data, &mut t, n0, rest);
    transform_rows(&mut t, n0, dir);
    transpose(&t, data, rest, n0);
}
