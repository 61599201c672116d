use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::field::ComplexField;
use super::grid::Grid1D;
use crate::C64;

/// Forward/inverse FFT pair for one grid, with the inverse normalized by `1/n`.
#[derive(Clone)]
pub struct Spectral1D {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
}

impl std::fmt::Debug for Spectral1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral1D").field("n", &self.n).finish()
    }
}

impl Spectral1D {
    pub fn new(grid: &Grid1D) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n: grid.len(),
            forward: planner.plan_fft_forward(grid.len()),
            inverse: planner.plan_fft_inverse(grid.len()),
            k: grid.wavenumbers(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    /// In-place transform of every contiguous length-`n` chunk of `buf`.
    pub fn forward(&self, buf: &mut [C64]) {
        self.forward.process(buf);
    }

    pub fn inverse(&self, buf: &mut [C64]) {
        self.inverse.process(buf);
        let s = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|v| *v *= s);
    }

    /// `∇²` of the samples.
    pub fn laplacian(&self, values: &[C64]) -> Vec<C64> {
        let mut buf = values.to_vec();
        self.forward(&mut buf);
        buf.iter_mut().zip(&self.k).for_each(|(v, k)| *v *= -k * k);
        self.inverse(&mut buf);
        buf
    }

    /// `∫|∇φ|²/2 dx` via Parseval.
    pub fn kinetic_energy(&self, values: &[C64], dx: f64) -> f64 {
        let mut buf = values.to_vec();
        self.forward(&mut buf);
        let s: f64 = buf.iter().zip(&self.k).map(|(v, k)| 0.5 * k * k * v.norm_sqr()).sum();
        s * dx / self.n as f64
    }
}

/// Spectral second derivative on the periodic grid.
pub fn laplacian(field: &ComplexField) -> ComplexField {
    let sp = Spectral1D::new(field.grid());
    ComplexField::new(*field.grid(), sp.laplacian(field.values())).expect("laplacian preserves length")
}
