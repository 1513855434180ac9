//! Iterative radix-2 FFT.
//!
//! Every grid in the simulator has a power-of-two sample count, so a plain
//! Cooley-Tukey transform with precomputed twiddles is all that is needed.
//! Twiddles are evaluated directly (not by recurrence) to keep round-trip
//! errors at the 1e-15 level.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct Radix2 {
    n: usize,
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    /// Panics if `n` is not a power of two.
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "radix-2 FFT needs a power of two, got {n}");
        let twiddles = (0..n / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
            .collect();
        Self { n, twiddles }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalised forward transform, kernel `exp(-2πi jk/n)`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, false);
    }

    /// Unnormalised inverse transform, kernel `exp(+2πi jk/n)`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, true);
    }

    /// Unitary transform with the zero coordinate at index `n/2` on both
    /// sides (fftshift convention).
    pub fn centered_forward(&self, data: &mut [Complex64]) {
        self.centered(data, false);
    }

    pub fn centered_inverse(&self, data: &mut [Complex64]) {
        self.centered(data, true);
    }

    fn centered(&self, data: &mut [Complex64], inverse: bool) {
        let half = self.n / 2;
        data.rotate_left(half);
        self.run(data, inverse);
        data.rotate_left(half);
        let scale = 1.0 / (self.n as f64).sqrt();
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        assert_eq!(data.len(), n, "FFT length mismatch");
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

/// Centered unitary 2D transform of a row-major `rows x cols` array.
pub fn centered_forward_2d(data: &mut [Complex64], rows: usize, cols: usize) {
    assert_eq!(data.len(), rows * cols);
    let row_plan = Radix2::new(cols);
    for row in data.chunks_exact_mut(cols) {
        row_plan.centered_forward(row);
    }
    let col_plan = Radix2::new(rows);
    let mut column = alloc::vec![Complex64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for (r, slot) in column.iter_mut().enumerate() {
            *slot = data[r * cols + c];
        }
        col_plan.centered_forward(&mut column);
        for (r, v) in column.iter().enumerate() {
            data[r * cols + c] = *v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, v)| {
                        v * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / n as f64)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        let x: Vec<Complex64> = (0..32)
            .map(|j| Complex64::new(libm::sin(j as f64 * 0.7), libm::cos(j as f64 * 1.3)))
            .collect();
        let mut y = x.clone();
        Radix2::new(32).forward(&mut y);
        for (a, b) in y.iter().zip(naive_dft(&x)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn centered_delta_is_flat() {
        let mut x = vec![Complex64::new(0.0, 0.0); 16];
        x[8] = Complex64::new(1.0, 0.0);
        Radix2::new(16).centered_forward(&mut x);
        for v in &x {
            assert!((v - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn centered_round_trip() {
        let plan = Radix2::new(64);
        let x: Vec<Complex64> = (0..64)
            .map(|j| Complex64::new(j as f64 * 0.1, -(j as f64) * 0.05))
            .collect();
        let mut y = x.clone();
        plan.centered_forward(&mut y);
        plan.centered_inverse(&mut y);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
