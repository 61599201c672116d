use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::{Error, Result, C64};

/// Linear (non-periodic) convolution of sampled densities with an even kernel,
/// `out_i = Σ_j K((i-j)·dx + shift) ρ_j dx`, evaluated by zero-padded FFT.
#[derive(Clone)]
pub struct KernelConvolver {
    n: usize,
    dx: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kernel_hat: Vec<C64>,
}

impl std::fmt::Debug for KernelConvolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelConvolver").field("n", &self.n).field("dx", &self.dx).finish()
    }
}

impl KernelConvolver {
    pub fn new(n: usize, dx: f64, shift: f64, kernel: impl Fn(f64) -> f64) -> Self {
        let m = 2 * n;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let mut kernel_hat: Vec<C64> = (0..m)
            .map(|r| {
                let offset = if r < n { r as f64 } else { r as f64 - m as f64 };
                C64::new(kernel(offset * dx + shift), 0.0)
            })
            .collect();
        forward.process(&mut kernel_hat);
        let s = dx / m as f64;
        kernel_hat.iter_mut().for_each(|v| *v *= s);
        Self { n, dx, forward, inverse, kernel_hat }
    }

    pub fn apply(&self, density: &[f64]) -> Result<Vec<f64>> {
        if density.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: density.len() });
        }
        let mut buf = vec![C64::new(0.0, 0.0); 2 * self.n];
        buf.iter_mut().zip(density).for_each(|(b, &r)| b.re = r);
        self.forward.process(&mut buf);
        buf.iter_mut().zip(&self.kernel_hat).for_each(|(b, k)| *b *= k);
        self.inverse.process(&mut buf);
        Ok(buf[..self.n].iter().map(|v| v.re).collect())
    }

    /// Convolution of a complex sample vector (the kernel is real).
    pub fn apply_complex(&self, f: &[C64]) -> Result<Vec<C64>> {
        if f.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: f.len() });
        }
        let mut buf = vec![C64::new(0.0, 0.0); 2 * self.n];
        buf[..self.n].copy_from_slice(f);
        self.forward.process(&mut buf);
        buf.iter_mut().zip(&self.kernel_hat).for_each(|(b, k)| *b *= k);
        self.inverse.process(&mut buf);
        buf.truncate(self.n);
        Ok(buf)
    }
}

/// O(n²) reference for [`KernelConvolver`].
pub fn direct_convolution(density: &[f64], dx: f64, shift: f64, kernel: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = density.len();
    (0..n).map(|i| (0..n).map(|j| kernel((i as f64 - j as f64) * dx + shift) * density[j]).sum::<f64>() * dx).collect()
}
