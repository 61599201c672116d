use nalgebra::DMatrix;

use super::field::PairField;
use crate::modes::ModePair;
use crate::numerics::Grid1D;
use crate::qubit_dynamics::{Mat2, TwoQubitState};
use crate::{Error, Result, C64};

/// Projection of a scalar pair field onto the two-mode product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// Renormalized coefficients.
    pub state: TwoQubitState,
    /// `1 − Σ|C_{nm}|²`, the population outside the two-mode manifold.
    pub residual: f64,
    /// `Σ|C_{nm}|²` before renormalization.
    pub raw_norm: f64,
}

/// Unnormalized overlaps `∬ φ*_n(xᵃ) φ*_m(xᵇ) f(xᵃ, xᵇ)` for arbitrary samples `f`.
pub fn mode_overlaps(
    values: &[C64],
    grid_a: &Grid1D,
    grid_b: &Grid1D,
    mp_a: &ModePair,
    mp_b: &ModePair,
) -> Result<Mat2> {
    let (na, nb) = (grid_a.len(), grid_b.len());
    if values.len() != na * nb {
        return Err(Error::LengthMismatch { expected: na * nb, got: values.len() });
    }
    if grid_a != mp_a.grid() || grid_b != mp_b.grid() {
        return Err(Error::GridMismatch("pair field and mode grids differ".into()));
    }
    let cell = grid_a.dx() * grid_b.dx();
    let mut c = [[C64::new(0.0, 0.0); 2]; 2];
    for (m, row) in (0..2).map(|m| (m, mp_b.mode(m).values())).collect::<Vec<_>>() {
        // Contract over xᵇ first.
        let mut partial = vec![C64::new(0.0, 0.0); na];
        for (i, p) in partial.iter_mut().enumerate() {
            *p = values[i * nb..(i + 1) * nb].iter().zip(row).map(|(v, b)| b.conj() * v).sum();
        }
        for n in 0..2 {
            let a = mp_a.mode(n).values();
            c[n][m] = a.iter().zip(&partial).map(|(a, p)| a.conj() * p).sum::<C64>() * cell;
        }
    }
    Ok(c)
}

pub fn project_to_modes(field: &PairField, mp_a: &ModePair, mp_b: &ModePair) -> Result<Projection> {
    let c = mode_overlaps(field.values()?, field.grid_a(), field.grid_b(), mp_a, mp_b)?;
    let raw_norm: f64 = c.iter().flatten().map(|z| z.norm_sqr()).sum();
    Ok(Projection { state: TwoQubitState::normalized(c)?, residual: 1.0 - raw_norm, raw_norm })
}

/// `φ(xᵃ, xᵇ) = Σ C_{nm} φ_n(xᵃ) φ_m(xᵇ)`.
pub fn reconstruct_from_modes(c: &TwoQubitState, mp_a: &ModePair, mp_b: &ModePair) -> PairField {
    let (ga, gb) = (*mp_a.grid(), *mp_b.grid());
    let nb = gb.len();
    let mut values = vec![C64::new(0.0, 0.0); ga.len() * nb];
    for n in 0..2 {
        for m in 0..2 {
            let k = c.get(n, m);
            if k == C64::new(0.0, 0.0) {
                continue;
            }
            for (i, a) in mp_a.mode(n).values().iter().enumerate() {
                let ka = k * a;
                for (j, b) in mp_b.mode(m).values().iter().enumerate() {
                    values[i * nb + j] += ka * b;
                }
            }
        }
    }
    PairField::scalar(ga, gb, values).expect("mode grids define the pair shape")
}

/// Schmidt analysis of a scalar pair field.
#[derive(Debug, Clone, PartialEq)]
pub struct Schmidt {
    /// `1 − w₀ / Σw`, zero iff the field is a product.
    pub defect: f64,
    /// Schmidt weights `σ²`, sorted descending.
    pub spectrum: Vec<f64>,
}

/// Singular values of `√(dxᵃdxᵇ)·φ(xᵃ_i, xᵇ_j)`. The defect is normalized by the
/// total weight so that residual norm error does not masquerade as entanglement.
pub fn schmidt_defect(field: &PairField) -> Result<Schmidt> {
    let values = field.values()?;
    let (na, nb) = (field.grid_a().len(), field.grid_b().len());
    let s = field.cell().sqrt();
    let m = DMatrix::from_fn(na, nb, |i, j| values[i * nb + j] * s);
    let svd = m.try_svd(false, false, f64::EPSILON, 0).ok_or(Error::SvdFailed)?;
    let mut spectrum: Vec<f64> = svd.singular_values.iter().map(|v| v * v).collect();
    spectrum.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = spectrum.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::ZeroNorm);
    }
    Ok(Schmidt { defect: 1.0 - spectrum[0] / total, spectrum })
}
