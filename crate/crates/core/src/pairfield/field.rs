use crate::numerics::{ComplexField, Grid1D};
use crate::{Error, Result, C64};

/// Joint wavefunction `φ(xᵃ, xᵇ)` on a product grid, stored row-major
/// (`values[i·n_b + j] = φ(xᵃ_i, xᵇ_j)`), with 1 or 4 internal components.
#[derive(Debug, Clone, PartialEq)]
pub struct PairField {
    grid_a: Grid1D,
    grid_b: Grid1D,
    components: Vec<Vec<C64>>,
}

impl PairField {
    pub fn new(grid_a: Grid1D, grid_b: Grid1D, components: Vec<Vec<C64>>) -> Result<Self> {
        if components.len() != 1 && components.len() != 4 {
            return Err(Error::ComponentCount { expected: 4, got: components.len() });
        }
        let n = grid_a.len() * grid_b.len();
        for c in &components {
            if c.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: c.len() });
            }
        }
        Ok(Self { grid_a, grid_b, components })
    }

    pub fn scalar(grid_a: Grid1D, grid_b: Grid1D, values: Vec<C64>) -> Result<Self> {
        Self::new(grid_a, grid_b, vec![values])
    }

    /// `φ(xᵃ, xᵇ) = f(xᵃ) g(xᵇ)`.
    pub fn product(fa: &ComplexField, fb: &ComplexField) -> Self {
        let values = fa.values().iter().flat_map(|a| fb.values().iter().map(move |b| a * b)).collect();
        Self { grid_a: *fa.grid(), grid_b: *fb.grid(), components: vec![values] }
    }

    /// Four components `φ_{nm} = c_{nm}·f(xᵃ)g(xᵇ)`.
    pub fn spinor_product(fa: &ComplexField, fb: &ComplexField, c: [[C64; 2]; 2]) -> Self {
        let base = Self::product(fa, fb).components.remove(0);
        let components =
            [c[0][0], c[0][1], c[1][0], c[1][1]].iter().map(|k| base.iter().map(|v| v * k).collect()).collect();
        Self { grid_a: *fa.grid(), grid_b: *fb.grid(), components }
    }

    pub fn grid_a(&self) -> &Grid1D {
        &self.grid_a
    }

    pub fn grid_b(&self) -> &Grid1D {
        &self.grid_b
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, k: usize) -> &[C64] {
        &self.components[k]
    }

    pub fn components(&self) -> &[Vec<C64>] {
        &self.components
    }

    pub(crate) fn components_mut(&mut self) -> &mut [Vec<C64>] {
        &mut self.components
    }

    /// Scalar values; errors for spinor fields.
    pub fn values(&self) -> Result<&[C64]> {
        if self.components.len() != 1 {
            return Err(Error::ComponentCount { expected: 1, got: self.components.len() });
        }
        Ok(&self.components[0])
    }

    pub fn cell(&self) -> f64 {
        self.grid_a.dx() * self.grid_b.dx()
    }

    pub fn component_norm_sqr(&self, k: usize) -> f64 {
        self.components[k].iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell()
    }

    pub fn norm_sqr(&self) -> f64 {
        (0..self.components.len()).map(|k| self.component_norm_sqr(k)).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / n.sqrt();
        self.components.iter_mut().flatten().for_each(|v| *v *= s);
        Ok(())
    }

    /// `ρ_a(xᵃ) = ∫|φ_k|² dxᵇ` and `ρ_b(xᵇ) = ∫|φ_k|² dxᵃ` of one component.
    pub fn marginals(&self, k: usize) -> (Vec<f64>, Vec<f64>) {
        let (na, nb) = (self.grid_a.len(), self.grid_b.len());
        let mut ra = vec![0.0; na];
        let mut rb = vec![0.0; nb];
        for i in 0..na {
            for j in 0..nb {
                let r = self.components[k][i * nb + j].norm_sqr();
                ra[i] += r;
                rb[j] += r;
            }
        }
        ra.iter_mut().for_each(|r| *r *= self.grid_b.dx());
        rb.iter_mut().for_each(|r| *r *= self.grid_a.dx());
        (ra, rb)
    }

    /// Exchange the roles of the two axes: `φ'(xᵃ, xᵇ) = φ(xᵇ, xᵃ)` (component labels swapped too).
    pub fn exchanged(&self) -> Self {
        let (na, nb) = (self.grid_a.len(), self.grid_b.len());
        let swap = |c: &Vec<C64>| -> Vec<C64> {
            let mut out = vec![C64::new(0.0, 0.0); na * nb];
            for i in 0..na {
                for j in 0..nb {
                    out[j * na + i] = c[i * nb + j];
                }
            }
            out
        };
        let components = if self.components.len() == 4 {
            [0, 2, 1, 3].iter().map(|&k| swap(&self.components[k])).collect()
        } else {
            vec![swap(&self.components[0])]
        };
        Self { grid_a: self.grid_b, grid_b: self.grid_a, components }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .flatten()
            .zip(other.components.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().flatten().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}
