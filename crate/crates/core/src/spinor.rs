//! Two-component condensate with Josephson-coupled internal states.

use crate::gpe::{ground_state, CondensateParams, PotentialSpec};
use crate::numerics::{ComplexField, Grid1D, IntegratorConfig, Spectral1D};
use crate::qubit_dynamics::QubitState;
use crate::{Error, Result, C64};

/// Components `φ₀, φ₁` on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    comp0: ComplexField,
    comp1: ComplexField,
}

impl SpinorField {
    pub fn new(comp0: ComplexField, comp1: ComplexField) -> Result<Self> {
        if comp0.grid() != comp1.grid() {
            return Err(Error::GridMismatch("spinor components must share a grid".into()));
        }
        Ok(Self { comp0, comp1 })
    }

    /// `φ_n(x) = c_n χ(x)`.
    pub fn from_internal(spatial: &ComplexField, c: &QubitState) -> Self {
        Self { comp0: spatial.scaled(c.c0()), comp1: spatial.scaled(c.c1()) }
    }

    pub fn grid(&self) -> &Grid1D {
        self.comp0.grid()
    }

    pub fn component(&self, n: usize) -> &ComplexField {
        if n == 0 {
            &self.comp0
        } else {
            &self.comp1
        }
    }

    pub fn populations(&self) -> [f64; 2] {
        [self.comp0.norm_sqr(), self.comp1.norm_sqr()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.comp0.norm_sqr() + self.comp1.norm_sqr()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let s = C64::new(1.0 / n.sqrt(), 0.0);
        self.comp0 = self.comp0.scaled(s);
        self.comp1 = self.comp1.scaled(s);
        Ok(())
    }

    /// `⟨φ₀, φ₁⟩`.
    pub fn overlap(&self) -> C64 {
        self.comp0.inner(&self.comp1)
    }

    /// Components exchanged.
    pub fn swapped(&self) -> Self {
        Self { comp0: self.comp1.clone(), comp1: self.comp0.clone() }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.comp0.max_abs_diff(&other.comp0).max(self.comp1.max_abs_diff(&other.comp1))
    }

    pub fn is_finite(&self) -> bool {
        self.comp0.is_finite() && self.comp1.is_finite()
    }
}

/// Harmonic traps `ω_z(z − z_n)²/2` whose centre depends on the internal state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacedTrap {
    pub omega_z: f64,
    pub z0: f64,
    pub z1: f64,
}

impl DisplacedTrap {
    pub fn potential(&self, n: usize) -> PotentialSpec {
        PotentialSpec::DisplacedHarmonic { omega_z: self.omega_z, z_n: if n == 0 { self.z0 } else { self.z1 } }
    }

    /// Ground-state width `ω_z^{-1/4}`.
    pub fn width(&self) -> f64 {
        self.omega_z.powf(-0.25)
    }

    pub fn swapped(&self) -> Self {
        Self { omega_z: self.omega_z, z0: self.z1, z1: self.z0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorParams {
    pub rabi: f64,
    pub detuning: f64,
    pub g00: f64,
    pub g01: f64,
    pub g11: f64,
    pub trap: DisplacedTrap,
    pub n_particles: f64,
}

impl SpinorParams {
    pub fn linear(rabi: f64, detuning: f64, trap: DisplacedTrap) -> Self {
        Self { rabi, detuning, g00: 0.0, g01: 0.0, g11: 0.0, trap, n_particles: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.rabi, self.detuning, self.g00, self.g01, self.g11, self.trap.z0, self.trap.z1];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("spinor parameters must be finite".into()));
        }
        if !(self.trap.omega_z > 0.0 && self.trap.omega_z.is_finite()) {
            return Err(Error::InvalidParameter("omega_z must be positive".into()));
        }
        if !(self.n_particles > 0.0 && self.n_particles.is_finite()) {
            return Err(Error::InvalidParameter(format!("n_particles must be positive, got {}", self.n_particles)));
        }
        Ok(())
    }

    /// The same dynamics described with the internal labels exchanged.
    pub fn swapped(&self) -> Self {
        Self { detuning: -self.detuning, g00: self.g11, g11: self.g00, trap: self.trap.swapped(), ..*self }
    }
}

/// `exp(−iĤτ)` with `Ĥ = (ω/2)σ_x + (δ/2)σ_z`, `σ_z = diag(1, −1)`.
pub fn internal_rabi(c: &QubitState, rabi: f64, detuning: f64, tau: f64) -> QubitState {
    let u = two_level_propagator(0.5 * detuning, 0.5 * rabi, -0.5 * detuning, tau);
    let [c0, c1] = c.amplitudes();
    QubitState::normalized(u[0][0] * c0 + u[0][1] * c1, u[1][0] * c0 + u[1][1] * c1)
        .expect("unitary preserves a nonzero norm")
}

/// `exp(−i[[a, b], [b, c]]τ)` for real `a, b, c`.
fn two_level_propagator(a: f64, b: f64, c: f64, tau: f64) -> [[C64; 2]; 2] {
    let m = 0.5 * (a + c);
    let h = 0.5 * (a - c);
    let r = (h * h + b * b).sqrt();
    let global = C64::from_polar(1.0, -m * tau);
    let cos = (r * tau).cos();
    // sin(rτ)/r, finite as r → 0.
    let sinc = if r * tau.abs() < 1e-8 { tau } else { (r * tau).sin() / r };
    let i = C64::new(0.0, 1.0);
    [
        [global * (cos - i * sinc * h), global * (-i * sinc * b)],
        [global * (-i * sinc * b), global * (cos + i * sinc * h)],
    ]
}

/// The two trap potentials sampled on `grid`. Each minimum must lie at least three
/// trap widths inside the grid.
pub fn displaced_potentials(trap: &DisplacedTrap, grid: &Grid1D) -> Result<(Vec<f64>, Vec<f64>)> {
    let pad = 3.0 * trap.width();
    for z in [trap.z0, trap.z1] {
        if !(z - pad > grid.x_min() && z + pad < grid.x_max()) {
            return Err(Error::InvalidParameter(format!(
                "trap minimum {z} is not inside [{}, {}] with padding {pad}",
                grid.x_min(),
                grid.x_max()
            )));
        }
    }
    Ok((trap.potential(0).sample(grid)?, trap.potential(1).sample(grid)?))
}

/// Linear ground states `χ₀, χ₁` of the two traps.
pub fn trap_ground_states(trap: &DisplacedTrap, grid: &Grid1D) -> Result<(ComplexField, ComplexField)> {
    displaced_potentials(trap, grid)?;
    let lin = CondensateParams::linear();
    let (chi0, _) = ground_state(&trap.potential(0), &lin, grid)?;
    let (chi1, _) = ground_state(&trap.potential(1), &lin, grid)?;
    Ok((chi0, chi1))
}

/// `|⟨χ₀, χ₁⟩|²`, the factor by which trap displacement suppresses the
/// effective Rabi coupling.
pub fn mode_overlap_factor(trap: &DisplacedTrap, grid: &Grid1D) -> Result<f64> {
    let (a, b) = trap_ground_states(trap, grid)?;
    Ok(a.inner(&b).norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorObservables {
    pub norm: f64,
    pub populations: [f64; 2],
    pub overlap: C64,
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct SpinorTrajectory {
    pub times: Vec<f64>,
    pub fields: Vec<SpinorField>,
    pub observables: Vec<SpinorObservables>,
}

struct SpinorStepper {
    sp: Spectral1D,
    half: Vec<C64>,
    full: Vec<C64>,
    v: [Vec<f64>; 2],
    p: SpinorParams,
    dt: f64,
}

impl SpinorStepper {
    fn new(grid: &Grid1D, p: &SpinorParams, dt: f64) -> Result<Self> {
        p.validate()?;
        let (v0, v1) = displaced_potentials(&p.trap, grid)?;
        let sp = Spectral1D::new(grid);
        let phase = |k: &f64, h: f64| C64::from_polar(1.0, -0.5 * k * k * h);
        let half = sp.wavenumbers().iter().map(|k| phase(k, 0.5 * dt)).collect();
        let full = sp.wavenumbers().iter().map(|k| phase(k, dt)).collect();
        Ok(Self { sp, half, full, v: [v0, v1], p: *p, dt })
    }

    fn kinetic(&self, values: &mut [C64], phase: &[C64]) {
        self.sp.forward(values);
        values.iter_mut().zip(phase).for_each(|(v, p)| *v *= p);
        self.sp.inverse(values);
    }

    /// Diagonal entries of the pointwise 2×2 Hamiltonian.
    fn diagonal(&self, j: usize, r0: f64, r1: f64) -> (f64, f64) {
        let n = self.p.n_particles;
        let h0 = self.v[0][j] + n * (self.p.g00 * r0 + self.p.g01 * r1) + 0.5 * self.p.detuning;
        let h1 = self.v[1][j] + n * (self.p.g01 * r0 + self.p.g11 * r1) - 0.5 * self.p.detuning;
        (h0, h1)
    }

    fn mix(&self, f: &mut SpinorField) {
        let b = 0.5 * self.p.rabi;
        let (c0, c1) = (f.comp0.values_mut(), f.comp1.values_mut());
        for (j, (x0, x1)) in c0.iter_mut().zip(c1.iter_mut()).enumerate() {
            let (a0, a1) = (*x0, *x1);
            // Densities change under the mixing, so evaluate them at the predicted midpoint.
            let (h0, h1) = self.diagonal(j, a0.norm_sqr(), a1.norm_sqr());
            let u = two_level_propagator(h0, b, h1, 0.5 * self.dt);
            let (m0, m1) = (u[0][0] * a0 + u[0][1] * a1, u[1][0] * a0 + u[1][1] * a1);
            let (h0, h1) = self.diagonal(j, m0.norm_sqr(), m1.norm_sqr());
            let u = two_level_propagator(h0, b, h1, self.dt);
            *x0 = u[0][0] * a0 + u[0][1] * a1;
            *x1 = u[1][0] * a0 + u[1][1] * a1;
        }
    }

    fn advance(&self, f: &mut SpinorField, steps: usize) {
        if steps == 0 {
            return;
        }
        self.kinetic(f.comp0.values_mut(), &self.half);
        self.kinetic(f.comp1.values_mut(), &self.half);
        for s in 0..steps {
            self.mix(f);
            let phase = if s + 1 == steps { &self.half } else { &self.full };
            self.kinetic(f.comp0.values_mut(), phase);
            self.kinetic(f.comp1.values_mut(), phase);
        }
    }

    fn energy(&self, f: &SpinorField) -> f64 {
        let dx = f.grid().dx();
        let n = self.p.n_particles;
        let mut e = self.sp.kinetic_energy(f.comp0.values(), dx) + self.sp.kinetic_energy(f.comp1.values(), dx);
        let mut local = 0.0;
        for j in 0..f.grid().len() {
            let (a0, a1) = (f.comp0.values()[j], f.comp1.values()[j]);
            let (r0, r1) = (a0.norm_sqr(), a1.norm_sqr());
            local += self.v[0][j] * r0 + self.v[1][j] * r1;
            local += 0.5 * self.p.detuning * (r0 - r1);
            local += self.p.rabi * (a0.conj() * a1).re;
            local += 0.5 * n * (self.p.g00 * r0 * r0 + 2.0 * self.p.g01 * r0 * r1 + self.p.g11 * r1 * r1);
        }
        e += local * dx;
        e
    }

    fn observe(&self, f: &SpinorField) -> SpinorObservables {
        let populations = f.populations();
        SpinorObservables {
            norm: populations[0] + populations[1],
            populations,
            overlap: f.overlap(),
            energy: self.energy(f),
        }
    }
}

/// Conserved energy of a spinor field.
pub fn spinor_energy(field: &SpinorField, p: &SpinorParams) -> Result<f64> {
    Ok(SpinorStepper::new(field.grid(), p, 1.0)?.energy(field))
}

/// Split-step evolution of the coupled two-component equations. The position-space
/// step exponentiates the local 2×2 Hamiltonian exactly.
pub fn evolve_spinor(
    initial: &SpinorField,
    p: &SpinorParams,
    cfg: &IntegratorConfig,
    t_final: f64,
) -> Result<SpinorTrajectory> {
    let steps = cfg.steps_for(t_final)?;
    let stepper = SpinorStepper::new(initial.grid(), p, cfg.dt)?;
    let mut traj = SpinorTrajectory {
        times: vec![0.0],
        fields: vec![initial.clone()],
        observables: vec![stepper.observe(initial)],
    };
    let mut field = initial.clone();
    let mut done = 0;
    while done < steps {
        let chunk = cfg.record_stride.min(steps - done);
        stepper.advance(&mut field, chunk);
        done += chunk;
        if !field.is_finite() {
            return Err(Error::NonFinite { step: done });
        }
        traj.times.push(done as f64 * cfg.dt);
        traj.observables.push(stepper.observe(&field));
        traj.fields.push(field.clone());
    }
    Ok(traj)
}
