//! Unnormalized discrete Fourier transform backed by `rustfft`.

use num_complex::Complex64;
use rustfft::FftPlanner;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// `X_j = Σ_k x_k e^{−2πi jk/N}`
    Forward,
    /// `x_k = Σ_j X_j e^{+2πi jk/N}`, unnormalized
    Inverse,
}

/// In-place unnormalized DFT.
pub(crate) fn dft(data: &mut [Complex64], dir: Direction) {
    if data.len() <= 1 {
        return;
    }
    let mut planner = FftPlanner::<f64>::new();
    let plan = match dir {
        Direction::Forward => planner.plan_fft_forward(data.len()),
        Direction::Inverse => planner.plan_fft_inverse(data.len()),
    };
    plan.process(data);
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive(x: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|j| {
                x.iter()
                    .enumerate()
                    .map(|(k, v)| v * Complex64::from_polar(1.0, sign * 2.0 * PI * (j * k) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_transform() {
        for n in [1usize, 2, 3, 8, 12, 64, 97] {
            let x: Vec<Complex64> = (0..n)
                .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 1.3).cos()))
                .collect();
            let mut y = x.clone();
            dft(&mut y, Direction::Forward);
            for (a, b) in y.iter().zip(naive(&x, -1.0)) {
                assert!((a - b).norm() < 1e-12, "n = {n}");
            }
            dft(&mut y, Direction::Inverse);
            for (a, b) in y.iter().zip(&x) {
                assert!((a / n as f64 - b).norm() < 1e-13, "n = {n}");
            }
        }
    }
}
