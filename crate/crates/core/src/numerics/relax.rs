use super::field::ComplexField;
use super::spectral::Spectral1D;
use crate::{Error, Result, C64};

/// Options for [`relax`].
#[derive(Debug, Clone)]
pub struct RelaxOptions {
    /// Imaginary time step of the semi-implicit gradient flow.
    pub dt_imag: f64,
    /// Stop once the relative energy change per step stays below this.
    pub tol: f64,
    /// Number of consecutive steps that must satisfy `tol`.
    pub consecutive: usize,
    pub max_steps: usize,
    /// Orthonormal states projected out after every step.
    pub deflate: Vec<ComplexField>,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self { dt_imag: 1.0, tol: 1e-15, consecutive: 20, max_steps: 400_000, deflate: Vec::new() }
    }
}

#[derive(Debug, Clone)]
pub struct Relaxed {
    pub field: ComplexField,
    pub chemical_potential: f64,
    pub energy: f64,
    pub steps: usize,
    /// Energy after every step, starting with the (projected, normalized) initial state.
    pub energy_trace: Vec<f64>,
}

/// `∫ |∇φ|²/2 + V|φ|² + (gN/2)|φ|⁴ dx` and `∫|φ|⁴ dx`.
pub(crate) fn energy_parts(sp: &Spectral1D, values: &[C64], potential: &[f64], gn: f64, dx: f64) -> (f64, f64) {
    let kinetic = sp.kinetic_energy(values, dx);
    let mut pot = 0.0;
    let mut quartic = 0.0;
    for (v, p) in values.iter().zip(potential) {
        let r = v.norm_sqr();
        pot += p * r;
        quartic += r * r;
    }
    let quartic = quartic * dx;
    (kinetic + pot * dx + 0.5 * gn * quartic, quartic)
}

fn project_out(field: &mut ComplexField, deflate: &[ComplexField]) {
    for u in deflate {
        let c = u.inner(field);
        let grid_len = field.values().len();
        let uv = u.values();
        let fv = field.values_mut();
        for j in 0..grid_len {
            fv[j] -= c * uv[j];
        }
    }
}

/// Normalized gradient flow to the lowest stationary state of
/// `-∇²/2 + V + gN|φ|²` (orthogonal to `opts.deflate`).
///
/// Each step solves `(1/Δτ + α - ∇²/2) φ' = (1/Δτ + α + μ - V_eff) φ` in Fourier space,
/// with `α` the midpoint of `V_eff`, then renormalizes. The scheme is unconditionally
/// stable and its fixed point is the exact stationary state of the spectral Hamiltonian.
pub fn relax(initial: &ComplexField, potential: &[f64], gn: f64, opts: &RelaxOptions) -> Result<Relaxed> {
    let grid = *initial.grid();
    if potential.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: potential.len() });
    }
    if !(opts.dt_imag > 0.0) || !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter("dt_imag and tol must be positive".into()));
    }
    let dx = grid.dx();
    let sp = Spectral1D::new(&grid);
    let inv_dt = 1.0 / opts.dt_imag;

    let mut field = initial.clone();
    project_out(&mut field, &opts.deflate);
    field.normalize()?;
    let (mut energy, mut quartic) = energy_parts(&sp, field.values(), potential, gn, dx);
    let mut trace = vec![energy];
    let mut streak = 0;
    let mut last_change = f64::INFINITY;
    let mut veff = vec![0.0; grid.len()];

    for step in 1..=opts.max_steps {
        let mu = energy + 0.5 * gn * quartic;
        let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for (ve, (v, p)) in veff.iter_mut().zip(field.values().iter().zip(potential)) {
            *ve = p + gn * v.norm_sqr();
            vmin = vmin.min(*ve);
            vmax = vmax.max(*ve);
        }
        let alpha = (0.5 * (vmin + vmax)).max(0.0);
        let values = field.values_mut();
        values.iter_mut().zip(&veff).for_each(|(v, ve)| *v *= inv_dt + alpha + mu - ve);
        sp.forward(values);
        values.iter_mut().zip(sp.wavenumbers()).for_each(|(v, k)| *v /= inv_dt + alpha + 0.5 * k * k);
        sp.inverse(values);
        project_out(&mut field, &opts.deflate);
        field.normalize()?;
        if !field.is_finite() {
            return Err(Error::NonFinite { step });
        }
        let (e_new, q_new) = energy_parts(&sp, field.values(), potential, gn, dx);
        last_change = (e_new - energy).abs() / e_new.abs().max(f64::MIN_POSITIVE);
        energy = e_new;
        quartic = q_new;
        trace.push(energy);
        if last_change < opts.tol {
            streak += 1;
            if streak >= opts.consecutive {
                return Ok(Relaxed {
                    field,
                    chemical_potential: energy + 0.5 * gn * quartic,
                    energy,
                    steps: step,
                    energy_trace: trace,
                });
            }
        } else {
            streak = 0;
        }
    }
    Err(Error::NotConverged { steps: opts.max_steps, last_change })
}

/// Imaginary-time relaxation returning the field and its chemical potential.
pub fn imaginary_time_relax(
    initial: &ComplexField,
    potential: &[f64],
    nonlinear_coeff: f64,
    n_scale: f64,
    dt_imag: f64,
    tol: f64,
) -> Result<(ComplexField, f64)> {
    let opts = RelaxOptions { dt_imag, tol, ..RelaxOptions::default() };
    let r = relax(initial, potential, nonlinear_coeff * n_scale, &opts)?;
    Ok((r.field, r.chemical_potential))
}

/// `‖(-∇²/2 + V + gN|φ|² - μ)φ‖₂`.
pub fn stationary_residual(field: &ComplexField, potential: &[f64], gn: f64, mu: f64) -> f64 {
    let sp = Spectral1D::new(field.grid());
    let lap = sp.laplacian(field.values());
    let s: f64 = field
        .values()
        .iter()
        .zip(&lap)
        .zip(potential)
        .map(|((v, l), p)| (-0.5 * l + (p + gn * v.norm_sqr() - mu) * v).norm_sqr())
        .sum();
    (s * field.grid().dx()).sqrt()
}
