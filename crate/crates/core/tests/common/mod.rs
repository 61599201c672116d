//! Independent reference solvers shared by the integration tests.
#![allow(dead_code)]

use bec_qubit_core::numerics::Grid1D;
use bec_qubit_core::C64;
use nalgebra::{DMatrix, SymmetricEigen};

/// Sinc-DVR kinetic matrix `-½ d²/dx²` on the grid points (non-periodic).
pub fn sinc_kinetic(n: usize, dx: f64) -> DMatrix<f64> {
    let pi2 = std::f64::consts::PI.powi(2);
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            pi2 / (6.0 * dx * dx)
        } else {
            let d = i as f64 - j as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            sign / (dx * dx * d * d)
        }
    })
}

pub struct DenseGround {
    pub mu: f64,
    pub energy: f64,
    /// Unit-normalized samples (∑|ψ|²dx = 1), positive.
    pub psi: Vec<f64>,
}

/// Lowest eigenpair of `T + V + gN|ψ|²` iterated to self-consistency by damped
/// density mixing (strong damping: plain iteration locks into a two-cycle at gN = 10).
pub fn dense_ground_state(grid: &Grid1D, v: &[f64], gn: f64) -> DenseGround {
    let n = grid.len();
    let dx = grid.dx();
    let t = sinc_kinetic(n, dx);
    let mut rho = vec![0.0; n];
    for iter in 0..20_000 {
        let mut h = t.clone();
        for i in 0..n {
            h[(i, i)] += v[i] + gn * rho[i];
        }
        let eig = SymmetricEigen::new(h);
        let (k, mu) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &e)| if e < acc.1 { (i, e) } else { acc });
        let col = eig.eigenvectors.column(k);
        let s = if col.sum() < 0.0 { -1.0 } else { 1.0 };
        let psi: Vec<f64> = col.iter().map(|c| s * c / dx.sqrt()).collect();
        let new_rho: Vec<f64> = psi.iter().map(|p| p * p).collect();
        let change = rho.iter().zip(&new_rho).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if gn == 0.0 || (change < 1e-11 && iter > 0) {
            let kin: f64 = {
                let p = nalgebra::DVector::from_vec(psi.clone());
                p.dot(&(&t * &p)) * dx
            };
            let pot: f64 = psi.iter().zip(v).map(|(p, v)| v * p * p).sum::<f64>() * dx;
            let quart: f64 = new_rho.iter().map(|r| r * r).sum::<f64>() * dx;
            return DenseGround { mu, energy: kin + pot + 0.5 * gn * quart, psi };
        }
        let alpha = 0.1;
        rho.iter_mut().zip(&new_rho).for_each(|(r, nr)| *r = (1.0 - alpha) * *r + alpha * nr);
    }
    panic!("dense self-consistent oracle did not converge");
}

/// `exp(-iHt)` of a Hermitian matrix through its eigendecomposition.
pub fn expm_hermitian(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(h.clone());
    let u = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| C64::from_polar(1.0, -e * t)));
    u * d * u.adjoint()
}

/// Dense periodic spectral kinetic matrix `-½ d²/dx²` on an even grid.
pub fn spectral_kinetic(grid: &Grid1D) -> DMatrix<C64> {
    let n = grid.len();
    let k = grid.wavenumbers();
    DMatrix::from_fn(n, n, |i, j| {
        let mut s = C64::new(0.0, 0.0);
        for kk in &k {
            s += C64::from_polar(0.5 * kk * kk / n as f64, kk * (i as f64 - j as f64) * grid.dx());
        }
        s
    })
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
