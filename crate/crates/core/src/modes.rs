//! Localized two-mode basis of a symmetric double well and the scalar couplings
//! of the reduced models.

use std::fmt::Write as _;

use crate::gpe::{trial_state, CondensateParams, PotentialSpec};
use crate::numerics::{relax, ComplexField, Grid1D, KernelConvolver, RelaxOptions};
use crate::{Error, Result, C64};

/// Largest allowed `|⟨ψ_s,ψ_a⟩|` after deflation.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;
/// Agreement required between the FFT and direct quadrature paths, relative to the
/// larger of the two couplings being computed.
pub const QUADRATURE_AGREEMENT: f64 = 1e-8;

/// Orthonormal left/right modes of a double well.
#[derive(Debug, Clone)]
pub struct ModePair {
    /// Left mode `(ψ_s + ψ_a)/√2`.
    pub phi0: ComplexField,
    /// Right mode `(ψ_s - ψ_a)/√2`.
    pub phi1: ComplexField,
    pub psi_s: ComplexField,
    pub psi_a: ComplexField,
    pub e_s: f64,
    pub e_a: f64,
    /// `⟨φ₀|h|φ₀⟩ = (E_s + E_a)/2`.
    pub e_local: f64,
    /// `E_a - E_s`.
    pub e_split: f64,
    /// Ground state of the left half-well with the right side clamped at the barrier top.
    pub raw0: ComplexField,
    /// Mirror image of `raw0`.
    pub raw1: ComplexField,
    /// `|⟨raw0, raw1⟩|²`.
    pub epsilon_overlap: f64,
    /// Probability of `φ₀` right of the barrier.
    pub leakage: f64,
}

impl ModePair {
    pub fn grid(&self) -> &Grid1D {
        self.phi0.grid()
    }

    pub fn mode(&self, n: usize) -> &ComplexField {
        if n == 0 {
            &self.phi0
        } else {
            &self.phi1
        }
    }

    /// Spectral tunneling `Ω = -(E_a - E_s)/2`.
    pub fn omega(&self) -> f64 {
        -0.5 * self.e_split
    }
}

fn double_well_params(dw: &PotentialSpec) -> Result<(f64, f64)> {
    dw.validate()?;
    match *dw {
        PotentialSpec::DoubleWell { v0, d } => Ok((v0, d)),
        _ => Err(Error::InvalidParameter("localized modes need a double-well potential".into())),
    }
}

/// Left half of the double well, continued by the barrier top `V₀` for `x > 0`.
pub fn clamped_half_well(dw: &PotentialSpec, grid: &Grid1D) -> Result<Vec<f64>> {
    let (v0, _) = double_well_params(dw)?;
    Ok(grid.points().into_iter().map(|x| if x <= 0.0 { dw.value(x).unwrap() } else { v0 }).collect())
}

fn mode_options(deflate: Vec<ComplexField>) -> RelaxOptions {
    RelaxOptions { deflate, ..RelaxOptions::default() }
}

/// Lowest even and odd eigenstates of a symmetric double well, combined into the
/// localized basis.
pub fn localized_modes(dw: &PotentialSpec, grid: &Grid1D) -> Result<ModePair> {
    double_well_params(dw)?;
    if !grid.is_mirror_symmetric() {
        return Err(Error::InvalidParameter("localized modes need a grid symmetric about x = 0".into()));
    }
    let v = dw.sample(grid)?;
    let even = trial_state(grid, &v);
    let mut odd = even.clone();
    for j in 0..grid.len() {
        let x = grid.x(j);
        let s = if grid.mirror_index(j) == j { 0.0 } else { x.signum() };
        odd.values_mut()[j] *= s;
    }

    let s = relax(&even, &v, 0.0, &mode_options(Vec::new()))?;
    let mut psi_s = s.field;
    if psi_s.values().iter().map(|z| z.re).sum::<f64>() < 0.0 {
        psi_s = psi_s.scaled(C64::new(-1.0, 0.0));
    }
    let a = relax(&odd, &v, 0.0, &mode_options(vec![psi_s.clone()]))?;
    let mut psi_a = a.field;
    let overlap = psi_s.inner(&psi_a).norm();
    if overlap > ORTHOGONALITY_TOL {
        return Err(Error::DeflationFailed { overlap });
    }
    let left_sum: f64 = (0..grid.len()).filter(|&j| grid.x(j) < 0.0).map(|j| psi_a.values()[j].re).sum();
    if left_sum < 0.0 {
        psi_a = psi_a.scaled(C64::new(-1.0, 0.0));
    }
    let e_split = a.energy - s.energy;
    if !(e_split > 0.0) {
        return Err(Error::NonPositiveSplitting(e_split));
    }
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let phi0 = psi_s.combine(h, &psi_a, h);
    let phi1 = psi_s.combine(h, &psi_a, -h);

    let clamped = clamped_half_well(dw, grid)?;
    let raw = relax(&trial_state(grid, &clamped), &clamped, 0.0, &mode_options(Vec::new()))?;
    let raw0 = raw.field;
    let raw1 = raw0.mirrored();
    let epsilon_overlap = raw0.inner(&raw1).norm_sqr();
    let leakage = right_population(&phi0, 0.0);

    Ok(ModePair {
        phi0,
        phi1,
        psi_s,
        psi_a,
        e_s: s.energy,
        e_a: a.energy,
        e_local: 0.5 * (s.energy + a.energy),
        e_split,
        raw0,
        raw1,
        epsilon_overlap,
        leakage,
    })
}

/// `∫_{x>x_split}|φ|² dx` summed directly, so tiny tails are not lost to cancellation.
pub fn right_population(field: &ComplexField, x_split: f64) -> f64 {
    let w = field.grid().left_weights(x_split);
    field.values().iter().zip(&w).map(|(v, w)| (1.0 - w) * v.norm_sqr()).sum::<f64>() * field.grid().dx()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunnelingEstimate {
    /// Authoritative value `-(E_a - E_s)/2`.
    pub omega_spec: f64,
    /// `∫ raw0 (V - Ṽ₀) raw1 dx` with `Ṽ₀` the clamped left half-well.
    pub omega_overlap: f64,
    pub relative_deviation: f64,
}

impl TunnelingEstimate {
    pub fn value(&self) -> f64 {
        self.omega_spec
    }
}

pub fn tunneling_omega(mp: &ModePair, dw: &PotentialSpec) -> Result<TunnelingEstimate> {
    let grid = mp.grid();
    let v = dw.sample(grid)?;
    let clamped = clamped_half_well(dw, grid)?;
    let omega_overlap = mp
        .raw0
        .values()
        .iter()
        .zip(mp.raw1.values())
        .zip(v.iter().zip(&clamped))
        .map(|((a, b), (v, vc))| (a.conj() * b).re * (v - vc))
        .sum::<f64>()
        * grid.dx();
    let omega_spec = mp.omega();
    Ok(TunnelingEstimate {
        omega_spec,
        omega_overlap,
        relative_deviation: ((omega_overlap - omega_spec) / omega_spec).abs(),
    })
}

/// `χ = ∫|φ|⁴ dx`.
pub fn quartic_overlap(phi: &ComplexField) -> f64 {
    phi.values().iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>() * phi.grid().dx()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// `w0/(x² + a²)^{3/2}`.
    RegularizedDipole { w0: f64, a: f64 },
    /// `w0·exp(-x²/2s²)`.
    Gaussian { w0: f64, s: f64 },
}

/// Even long-range interaction `W`; cross-condensate terms see `W(√(Δx² + offset²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongRangeKernel {
    pub kind: KernelKind,
    pub offset: f64,
}

impl LongRangeKernel {
    pub fn regularized_dipole(w0: f64, a: f64, offset: f64) -> Self {
        Self { kind: KernelKind::RegularizedDipole { w0, a }, offset }
    }

    pub fn gaussian(w0: f64, s: f64, offset: f64) -> Self {
        Self { kind: KernelKind::Gaussian { w0, s }, offset }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            KernelKind::RegularizedDipole { w0, a } => a > 0.0 && a.is_finite() && w0.is_finite(),
            KernelKind::Gaussian { w0, s } => s > 0.0 && s.is_finite() && w0.is_finite(),
        };
        if !ok || !(self.offset >= 0.0 && self.offset.is_finite()) {
            return Err(Error::InvalidParameter(format!("invalid kernel {self:?}")));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            KernelKind::RegularizedDipole { w0, a } => w0 / (x * x + a * a).powf(1.5),
            KernelKind::Gaussian { w0, s } => w0 * (-x * x / (2.0 * s * s)).exp(),
        }
    }

    pub fn eval_cross(&self, dx: f64) -> f64 {
        self.eval((dx * dx + self.offset * self.offset).sqrt())
    }
}

/// Whether two grids share size and spacing, so that their coordinate differences
/// form a Toeplitz pattern.
pub(crate) fn grids_aligned(a: &Grid1D, b: &Grid1D) -> bool {
    a.len() == b.len() && (a.dx() - b.dx()).abs() <= 1e-12 * a.dx()
}

/// `∬ ρ_a(x) K(x - y) ρ_b(y) dx dy` by direct double quadrature.
pub fn pair_integral_direct(ga: &Grid1D, rho_a: &[f64], gb: &Grid1D, rho_b: &[f64], k: impl Fn(f64) -> f64) -> f64 {
    let mut total = 0.0;
    for (i, ra) in rho_a.iter().enumerate() {
        let x = ga.x(i);
        let row: f64 = rho_b.iter().enumerate().map(|(j, rb)| k(x - gb.x(j)) * rb).sum();
        total += ra * row;
    }
    total * ga.dx() * gb.dx()
}

/// `∬ ρ_a(x) K(x - y) ρ_b(y) dx dy` by zero-padded FFT convolution.
pub fn pair_integral_fft(
    ga: &Grid1D,
    rho_a: &[f64],
    gb: &Grid1D,
    rho_b: &[f64],
    k: impl Fn(f64) -> f64,
) -> Result<f64> {
    if !grids_aligned(ga, gb) {
        return Err(Error::GridMismatch("FFT quadrature needs equal size and spacing".into()));
    }
    let conv = KernelConvolver::new(ga.len(), ga.dx(), ga.x_min() - gb.x_min(), k).apply(rho_b)?;
    Ok(rho_a.iter().zip(&conv).map(|(a, c)| a * c).sum::<f64>() * ga.dx())
}

fn checked_pairs(
    ga: &Grid1D,
    gb: &Grid1D,
    pairs: [(&[f64], &[f64]); 2],
    k: impl Fn(f64) -> f64 + Copy,
) -> Result<(f64, f64)> {
    let direct = pairs.map(|(a, b)| pair_integral_direct(ga, a, gb, b, k));
    let fft =
        [pair_integral_fft(ga, pairs[0].0, gb, pairs[0].1, k)?, pair_integral_fft(ga, pairs[1].0, gb, pairs[1].1, k)?];
    let scale = direct[0].abs().max(direct[1].abs());
    for i in 0..2 {
        if (direct[i] - fft[i]).abs() > QUADRATURE_AGREEMENT * scale {
            return Err(Error::QuadratureMismatch { direct: direct[i], fft: fft[i] });
        }
    }
    Ok((direct[0], direct[1]))
}

/// Same-condensate couplings `(μ₁, μ₂)`.
pub fn same_condensate_couplings(mp: &ModePair, kernel: &LongRangeKernel) -> Result<(f64, f64)> {
    kernel.validate()?;
    let g = mp.grid();
    let (r0, r1) = (mp.phi0.density(), mp.phi1.density());
    checked_pairs(g, g, [(&r0, &r0), (&r0, &r1)], |x| kernel.eval(x))
}

/// Cross-condensate couplings `(ν₁, ν₂)` between same- and opposite-labeled wells.
pub fn cross_condensate_couplings(mp_a: &ModePair, mp_b: &ModePair, kernel: &LongRangeKernel) -> Result<(f64, f64)> {
    kernel.validate()?;
    if !(kernel.offset > 0.0) {
        return Err(Error::InvalidParameter("cross-condensate couplings need a positive offset".into()));
    }
    let (a0, b0, b1) = (mp_a.phi0.density(), mp_b.phi0.density(), mp_b.phi1.density());
    checked_pairs(mp_a.grid(), mp_b.grid(), [(&a0, &b0), (&a0, &b1)], |x| kernel.eval_cross(x))
}

/// Convolution `∫ K(x - y) f(y) dy` sampled on grid `a` for `f` sampled on grid `b`.
pub(crate) fn convolve_onto(ga: &Grid1D, gb: &Grid1D, f: &[C64], k: impl Fn(f64) -> f64) -> Result<Vec<C64>> {
    if grids_aligned(ga, gb) {
        return KernelConvolver::new(ga.len(), ga.dx(), ga.x_min() - gb.x_min(), k).apply_complex(f);
    }
    let re: Vec<f64> = f.iter().map(|z| z.re).collect();
    let im: Vec<f64> = f.iter().map(|z| z.im).collect();
    Ok((0..ga.len())
        .map(|i| {
            let x = ga.x(i);
            let (mut sr, mut si) = (0.0, 0.0);
            for j in 0..gb.len() {
                let w = k(x - gb.x(j));
                sr += w * re[j];
                si += w * im[j];
            }
            C64::new(sr, si) * gb.dx()
        })
        .collect())
}

/// Every scalar coefficient of the reduced models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSet {
    pub e_onsite: f64,
    pub omega: f64,
    pub chi: f64,
    pub kappa: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub n_particles: f64,
    pub g: f64,
}

const COUPLING_KEYS: [&str; 10] = ["e_onsite", "omega", "chi", "kappa", "mu1", "mu2", "nu1", "nu2", "n_particles", "g"];

impl CouplingSet {
    /// Couplings of condensate `a` (and of its partner `b` for `ν`) from their modes.
    pub fn derive(
        mp_a: &ModePair,
        mp_b: Option<&ModePair>,
        kernel: Option<&LongRangeKernel>,
        params: &CondensateParams,
    ) -> Result<Self> {
        params.validate()?;
        let chi = quartic_overlap(&mp_a.phi0);
        let (mu1, mu2) = match kernel {
            Some(k) => same_condensate_couplings(mp_a, k)?,
            None => (0.0, 0.0),
        };
        let (nu1, nu2) = match (kernel, mp_b) {
            (Some(k), Some(b)) => cross_condensate_couplings(mp_a, b, k)?,
            _ => (0.0, 0.0),
        };
        Ok(Self {
            e_onsite: mp_a.e_local,
            omega: mp_a.omega(),
            chi,
            kappa: params.g * chi,
            mu1,
            mu2,
            nu1,
            nu2,
            n_particles: params.n_particles,
            g: params.g,
        })
    }

    fn values(&self) -> [f64; 10] {
        [
            self.e_onsite,
            self.omega,
            self.chi,
            self.kappa,
            self.mu1,
            self.mu2,
            self.nu1,
            self.nu2,
            self.n_particles,
            self.g,
        ]
    }

    /// Flat `key = value` block, one coupling per line, round-trip exact.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in COUPLING_KEYS.iter().zip(self.values()) {
            writeln!(s, "{k} = {v:e}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut vals: [Option<f64>; 10] = [None; 10];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("line {}: expected key = value", lineno + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            let idx = COUPLING_KEYS
                .iter()
                .position(|c| *c == k)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown coupling '{k}'")))?;
            let x: f64 = v
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("line {}: malformed number '{v}'", lineno + 1)))?;
            vals[idx] = Some(x);
        }
        let get = |i: usize| {
            vals[i].ok_or_else(|| Error::InvalidParameter(format!("missing coupling '{}'", COUPLING_KEYS[i])))
        };
        Ok(Self {
            e_onsite: get(0)?,
            omega: get(1)?,
            chi: get(2)?,
            kappa: get(3)?,
            mu1: get(4)?,
            mu2: get(5)?,
            nu1: get(6)?,
            nu2: get(7)?,
            n_particles: get(8)?,
            g: get(9)?,
        })
    }
}
