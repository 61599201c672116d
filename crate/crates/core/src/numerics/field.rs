use super::grid::Grid1D;
use crate::{Error, Result, C64};

/// Complex wavefunction sampled on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid1D,
    values: Vec<C64>,
}

impl ComplexField {
    pub fn new(grid: Grid1D, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> C64) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.x(j))).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// `∫|φ|² dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// Rescale to unit norm.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / n.sqrt();
        self.values.iter_mut().for_each(|v| *v *= s);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// `⟨self|other⟩ = ∫ self* · other dx`.
    pub fn inner(&self, other: &ComplexField) -> C64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum::<C64>() * self.grid.dx()
    }

    pub fn mean_x(&self) -> f64 {
        let dx = self.grid.dx();
        self.values.iter().enumerate().map(|(j, v)| self.grid.x(j) * v.norm_sqr()).sum::<f64>() * dx
    }

    /// `φ(-x)` on a mirror-symmetric grid.
    pub fn mirrored(&self) -> Self {
        let values = (0..self.grid.len()).map(|j| self.values[self.grid.mirror_index(j)]).collect();
        Self { grid: self.grid, values }
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * s).collect() }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: C64, other: &ComplexField, b: C64) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Self { grid: self.grid, values }
    }

    pub fn max_abs_diff(&self, other: &ComplexField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Rectangle-rule quadrature `Σ f_j dx`.
pub fn integrate(samples: &[f64], grid: &Grid1D) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: samples.len() });
    }
    Ok(samples.iter().sum::<f64>() * grid.dx())
}
