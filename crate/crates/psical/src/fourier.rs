//! Small FFT utilities shared by quantization and spectral z-differentiation.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized forward DFT: `X_k = sum_j x_j e^{-2 pi i jk/n}`.
pub fn fft_forward(buf: &mut [Complex64]) {
    PLANNER.with(|p| {
        let fft = p.borrow_mut().plan_fft_forward(buf.len());
        fft.process(buf);
    });
}

/// Index of the Fourier coefficient of `e^{i kappa z}` in the forward DFT of
/// samples on `z_j = 2 pi j / n`: the coefficient is `X[kappa mod n] / n`.
pub fn coeff_index(kappa: i64, n: usize) -> usize {
    let n = n as i64;
    (((kappa % n) + n) % n) as usize
}

/// Smallest power-of-two transform length that resolves bandwidth `k` without
/// aliasing.
pub fn transform_len(k: usize) -> usize {
    (2 * k + 2).next_power_of_two().max(8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn recovers_trig_coefficients() {
        // f(z) = 3 + 2 e^{iz} - 5 e^{-2iz}
        let n = 16;
        let mut buf: Vec<Complex64> = (0..n)
            .map(|j| {
                let z = 2.0 * PI * j as f64 / n as f64;
                Complex64::new(3.0, 0.0)
                    + 2.0 * Complex64::new(0.0, z).exp()
                    - 5.0 * Complex64::new(0.0, -2.0 * z).exp()
            })
            .collect();
        fft_forward(&mut buf);
        let c = |kappa: i64| buf[coeff_index(kappa, n)] / n as f64;
        assert_relative_eq!(c(0).re, 3.0, epsilon = 1e-12);
        assert_relative_eq!(c(1).re, 2.0, epsilon = 1e-12);
        assert_relative_eq!(c(-2).re, -5.0, epsilon = 1e-12);
        assert!(c(3).norm() < 1e-12);
    }
}
