use std::f64::consts::PI;

use crate::{Error, Result};

/// Uniform periodic grid `x_j = x_min + j·dx`, `j = 0..n_points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n_points: usize,
    x_min: f64,
    x_max: f64,
}

impl Grid1D {
    pub fn new(n_points: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n_points < 8 {
            return Err(Error::GridTooSmall(n_points));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidExtent { x_min, x_max });
        }
        Ok(Self { n_points, x_min, x_max })
    }

    /// Grid centred on the origin, `[-half_width, half_width)`.
    pub fn symmetric(n_points: usize, half_width: f64) -> Result<Self> {
        Self::new(n_points, -half_width, half_width)
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    /// Always true: spectral operators treat the domain as periodic.
    pub fn periodic(&self) -> bool {
        true
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = 2.0 * PI / self.length();
        (0..n)
            .map(|j| if j <= n / 2 - usize::from(n % 2 == 0) { j as f64 * dk } else { (j as f64 - n as f64) * dk })
            .collect()
    }

    /// Index of the point at `-x_j`, valid when the grid is symmetric about the origin.
    pub fn mirror_index(&self, j: usize) -> usize {
        (self.n_points - j) % self.n_points
    }

    /// Whether the sample set is closed under `x -> -x`.
    pub fn is_mirror_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= 1e-12 * self.length()
    }

    /// Quadrature weights for `∫_{x < x_split}`: points exactly on the split count half.
    pub fn left_weights(&self, x_split: f64) -> Vec<f64> {
        let tol = 1e-9 * self.dx();
        (0..self.n_points)
            .map(|j| {
                let x = self.x(j);
                if (x - x_split).abs() <= tol {
                    0.5
                } else if x < x_split {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    }
}
