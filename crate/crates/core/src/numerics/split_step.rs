use super::field::ComplexField;
use super::grid::Grid1D;
use super::spectral::Spectral1D;
use crate::{Error, Result, C64};

/// Time integration scheme for field evolutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    SplitStep,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub max_steps: usize,
    pub record_stride: usize,
}

impl IntegratorConfig {
    pub fn new(dt: f64, record_stride: usize) -> Self {
        Self { dt, scheme: Scheme::SplitStep, max_steps: usize::MAX, record_stride }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParameter("record_stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps to reach `t_final`, which must be a whole multiple of `dt`
    /// to within rounding.
    pub fn steps_for(&self, t_final: f64) -> Result<usize> {
        self.validate()?;
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_final must be non-negative, got {t_final}")));
        }
        let steps = (t_final / self.dt).round() as usize;
        if steps > self.max_steps {
            return Err(Error::InvalidParameter(format!("{steps} steps requested, max_steps is {}", self.max_steps)));
        }
        Ok(steps)
    }
}

/// Strang split-step propagator for `i∂φ/∂t = (-∇²/2 + V + gN|φ|²)φ`.
#[derive(Debug, Clone)]
pub struct SplitStepper {
    spectral: Spectral1D,
    half_kinetic: Vec<C64>,
    full_kinetic: Vec<C64>,
    potential: Vec<f64>,
    gn: f64,
    dt: f64,
}

impl SplitStepper {
    pub fn new(grid: &Grid1D, potential: &[f64], gn: f64, dt: f64) -> Result<Self> {
        if potential.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: potential.len() });
        }
        let spectral = Spectral1D::new(grid);
        let phase = |k: &f64, h: f64| C64::from_polar(1.0, -0.5 * k * k * h);
        let half_kinetic = spectral.wavenumbers().iter().map(|k| phase(k, 0.5 * dt)).collect();
        let full_kinetic = spectral.wavenumbers().iter().map(|k| phase(k, dt)).collect();
        Ok(Self { spectral, half_kinetic, full_kinetic, potential: potential.to_vec(), gn, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn kinetic(&self, values: &mut [C64], phases: &[C64]) {
        self.spectral.forward(values);
        values.iter_mut().zip(phases).for_each(|(v, p)| *v *= p);
        self.spectral.inverse(values);
    }

    fn potential(&self, values: &mut [C64]) {
        for (v, &pot) in values.iter_mut().zip(&self.potential) {
            let phase = (pot + self.gn * v.norm_sqr()) * self.dt;
            *v *= C64::from_polar(1.0, -phase);
        }
    }

    /// One full Strang step.
    pub fn step(&self, values: &mut [C64]) {
        self.advance(values, 1);
    }

    /// `steps` Strang steps with adjacent kinetic half-steps fused.
    pub fn advance(&self, values: &mut [C64], steps: usize) {
        if steps == 0 {
            return;
        }
        self.kinetic(values, &self.half_kinetic);
        for s in 0..steps {
            self.potential(values);
            let last = s + 1 == steps;
            self.kinetic(values, if last { &self.half_kinetic } else { &self.full_kinetic });
        }
    }
}

/// A single Strang step; see [`SplitStepper`] for repeated use.
pub fn split_step(
    field: &ComplexField,
    potential: &[f64],
    nonlinear_coeff: f64,
    n_scale: f64,
    dt: f64,
) -> Result<ComplexField> {
    let stepper = SplitStepper::new(field.grid(), potential, nonlinear_coeff * n_scale, dt)?;
    let mut out = field.clone();
    stepper.step(out.values_mut());
    Ok(out)
}
