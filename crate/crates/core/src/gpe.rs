//! Single-condensate Gross–Pitaevskii solver.

use std::f64::consts::PI;

use crate::numerics::{
    energy_parts, relax, rk4_step, stationary_residual, ComplexField, Grid1D, IntegratorConfig, RelaxOptions, Relaxed,
    Scheme, Spectral1D, SplitStepper,
};
use crate::{Error, Result, C64};

/// Stationary residual accepted by [`ground_state`].
pub const GROUND_STATE_RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondensateParams {
    pub g: f64,
    pub n_particles: f64,
}

impl CondensateParams {
    pub fn new(g: f64, n_particles: f64) -> Result<Self> {
        let p = Self { g, n_particles };
        p.validate()?;
        Ok(p)
    }

    /// Non-interacting condensate.
    pub fn linear() -> Self {
        Self { g: 0.0, n_particles: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_particles > 0.0 && self.n_particles.is_finite()) {
            return Err(Error::InvalidParameter(format!("n_particles must be positive, got {}", self.n_particles)));
        }
        if !self.g.is_finite() {
            return Err(Error::InvalidParameter("g must be finite".into()));
        }
        Ok(())
    }

    /// The mean-field prefactor `g·N`.
    pub fn gn(&self) -> f64 {
        self.g * self.n_particles
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    /// `ω²x²/2`.
    Harmonic {
        omega: f64,
    },
    /// `V₀(x²-d²)²/d⁴`: minima at `±d`, barrier height `V₀`.
    DoubleWell {
        v0: f64,
        d: f64,
    },
    /// `ω_z(x - z_n)²/2` along the displacement axis (curvature `ω_z`).
    DisplacedHarmonic {
        omega_z: f64,
        z_n: f64,
    },
    Tabulated(Vec<f64>),
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        match *self {
            Self::Harmonic { omega } if !(omega.is_finite() && omega != 0.0) => {
                bad("harmonic omega must be finite and nonzero")
            }
            Self::DoubleWell { v0, d } if !(v0 > 0.0 && d > 0.0 && v0.is_finite() && d.is_finite()) => {
                bad("double well needs v0 > 0 and d > 0")
            }
            Self::DisplacedHarmonic { omega_z, z_n } if !(omega_z > 0.0 && z_n.is_finite()) => {
                bad("displaced harmonic needs omega_z > 0")
            }
            _ => Ok(()),
        }
    }

    pub fn value(&self, x: f64) -> Option<f64> {
        match *self {
            Self::Harmonic { omega } => Some(0.5 * omega * omega * x * x),
            Self::DoubleWell { v0, d } => {
                let s = x * x - d * d;
                Some(v0 * s * s / d.powi(4))
            }
            Self::DisplacedHarmonic { omega_z, z_n } => Some(0.5 * omega_z * (x - z_n).powi(2)),
            Self::Tabulated(_) => None,
        }
    }

    pub fn sample(&self, grid: &Grid1D) -> Result<Vec<f64>> {
        self.validate()?;
        match self {
            Self::Tabulated(v) => {
                if v.len() != grid.len() {
                    return Err(Error::LengthMismatch { expected: grid.len(), got: v.len() });
                }
                Ok(v.clone())
            }
            _ => Ok(grid.points().into_iter().map(|x| self.value(x).unwrap()).collect()),
        }
    }
}

/// `g = 4πħ²η/m` with ħ = 1.
pub fn scattering_to_coupling(eta: f64, mass: f64) -> f64 {
    4.0 * PI * eta / mass
}

/// Starting guess concentrated where the potential is low.
pub(crate) fn trial_state(grid: &Grid1D, potential: &[f64]) -> ComplexField {
    let vmin = potential.iter().cloned().fold(f64::INFINITY, f64::min);
    let values = potential.iter().map(|v| C64::new((-(v - vmin).min(600.0)).exp(), 0.0)).collect();
    ComplexField::new(*grid, values).expect("potential sampled on grid")
}

/// Ground state with explicit relaxation options.
pub fn ground_state_with(
    potential: &PotentialSpec,
    params: &CondensateParams,
    grid: &Grid1D,
    opts: &RelaxOptions,
) -> Result<Relaxed> {
    params.validate()?;
    let v = potential.sample(grid)?;
    let r = relax(&trial_state(grid, &v), &v, params.gn(), opts)?;
    let residual = stationary_residual(&r.field, &v, params.gn(), r.chemical_potential);
    if residual > GROUND_STATE_RESIDUAL_TOL {
        return Err(Error::ResidualTooLarge { residual, tolerance: GROUND_STATE_RESIDUAL_TOL });
    }
    Ok(r)
}

/// Lowest-energy normalized stationary state and its chemical potential.
pub fn ground_state(
    potential: &PotentialSpec,
    params: &CondensateParams,
    grid: &Grid1D,
) -> Result<(ComplexField, f64)> {
    let r = ground_state_with(potential, params, grid, &RelaxOptions::default())?;
    Ok((r.field, r.chemical_potential))
}

/// `∫ |∇φ|²/2 + V|φ|² + (gN/2)|φ|⁴ dx`.
pub fn energy_functional(field: &ComplexField, potential: &PotentialSpec, params: &CondensateParams) -> Result<f64> {
    let v = potential.sample(field.grid())?;
    let sp = Spectral1D::new(field.grid());
    Ok(energy_parts(&sp, field.values(), &v, params.gn(), field.grid().dx()).0)
}

/// Chemical potential `∫φ*(-∇²/2 + V + gN|φ|²)φ dx` of a normalized field.
pub fn chemical_potential(field: &ComplexField, potential: &PotentialSpec, params: &CondensateParams) -> Result<f64> {
    let v = potential.sample(field.grid())?;
    let sp = Spectral1D::new(field.grid());
    let (e, quartic) = energy_parts(&sp, field.values(), &v, params.gn(), field.grid().dx());
    Ok(e + 0.5 * params.gn() * quartic)
}

/// `(∫_{x<x_split}|φ|², 1 - p_left)`; a grid point exactly on the split counts half.
pub fn well_populations(field: &ComplexField, x_split: f64) -> (f64, f64) {
    let w = field.grid().left_weights(x_split);
    let left = field.values().iter().zip(&w).map(|(v, w)| w * v.norm_sqr()).sum::<f64>() * field.grid().dx();
    (left, 1.0 - left)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub norm: f64,
    pub energy: f64,
    pub mean_x: f64,
    pub p_left: f64,
    pub p_right: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fields: Vec<ComplexField>,
    pub observables: Vec<Observables>,
}

struct Observer {
    sp: Spectral1D,
    v: Vec<f64>,
    gn: f64,
}

impl Observer {
    fn observe(&self, f: &ComplexField) -> Observables {
        let dx = f.grid().dx();
        let (p_left, _) = well_populations(f, 0.0);
        let norm = f.norm_sqr();
        Observables {
            norm,
            energy: energy_parts(&self.sp, f.values(), &self.v, self.gn, dx).0,
            mean_x: f.mean_x(),
            p_left,
            p_right: norm - p_left,
        }
    }
}

impl Trajectory {
    /// Exact trajectory `φ e^{-iμt}` of a stationary state, sampled at `times`.
    pub fn stationary(
        field: &ComplexField,
        mu: f64,
        times: &[f64],
        potential: &PotentialSpec,
        params: &CondensateParams,
    ) -> Result<Self> {
        let obs = Observer { sp: Spectral1D::new(field.grid()), v: potential.sample(field.grid())?, gn: params.gn() };
        let fields: Vec<ComplexField> = times.iter().map(|&t| field.scaled(C64::from_polar(1.0, -mu * t))).collect();
        let observables = fields.iter().map(|f| obs.observe(f)).collect();
        Ok(Self { times: times.to_vec(), fields, observables })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Real-time evolution, recording every `cfg.record_stride` steps (and at `t = 0`).
///
/// Populations are split at `x = 0`.
pub fn evolve(
    initial: &ComplexField,
    potential: &PotentialSpec,
    params: &CondensateParams,
    cfg: &IntegratorConfig,
    t_final: f64,
) -> Result<Trajectory> {
    params.validate()?;
    let steps = cfg.steps_for(t_final)?;
    let grid = *initial.grid();
    let v = potential.sample(&grid)?;
    let obs = Observer { sp: Spectral1D::new(&grid), v: v.clone(), gn: params.gn() };
    let mut traj =
        Trajectory { times: vec![0.0], fields: vec![initial.clone()], observables: vec![obs.observe(initial)] };
    let mut field = initial.clone();
    let mut done = 0;
    let split = match cfg.scheme {
        Scheme::SplitStep => Some(SplitStepper::new(&grid, &v, params.gn(), cfg.dt)?),
        Scheme::Rk4 => None,
    };
    while done < steps {
        let chunk = cfg.record_stride.min(steps - done);
        match &split {
            Some(stepper) => stepper.advance(field.values_mut(), chunk),
            None => {
                for s in 0..chunk {
                    let t = (done + s) as f64 * cfg.dt;
                    let mut rhs = |_t: f64, y: &[C64]| gpe_rhs(&obs.sp, y, &v, params.gn());
                    let next = rk4_step(field.values(), t, cfg.dt, &mut rhs)
                        .map_err(|_| Error::NonFinite { step: done + s + 1 })?;
                    field.values_mut().copy_from_slice(&next);
                }
            }
        }
        done += chunk;
        if !field.is_finite() {
            return Err(Error::NonFinite { step: done });
        }
        traj.times.push(done as f64 * cfg.dt);
        traj.observables.push(obs.observe(&field));
        traj.fields.push(field.clone());
    }
    Ok(traj)
}

/// `-i(-∇²/2 + V + gN|φ|²)φ`.
fn gpe_rhs(sp: &Spectral1D, y: &[C64], v: &[f64], gn: f64) -> Vec<C64> {
    apply_hamiltonian(sp, y, v, gn).into_iter().map(|h| C64::new(h.im, -h.re)).collect()
}

fn apply_hamiltonian(sp: &Spectral1D, y: &[C64], v: &[f64], gn: f64) -> Vec<C64> {
    let lap = sp.laplacian(y);
    y.iter().zip(&lap).zip(v).map(|((p, l), vv)| -0.5 * l + (vv + gn * p.norm_sqr()) * p).collect()
}

/// Indices of the fixed 8-point sample used by [`odlro_residual`]: evenly spread
/// over the central half of the grid.
pub fn odlro_sample_indices(n: usize) -> [usize; 8] {
    let mut idx = [0; 8];
    for (k, slot) in idx.iter_mut().enumerate() {
        *slot = n / 4 + (2 * k + 1) * n / 32;
    }
    idx
}

/// Largest violation of the two-point relation
/// `i∂ₜ[φ(x')φ*(x)] = (Lφ)(x')φ*(x) - (Lφ)*(x)φ(x')`, `L = -∇²/2 + V + gN|φ|²`,
/// over an 8×8 sample of pairs and all interior snapshots, with the time derivative
/// taken as a centered difference of the product.
pub fn odlro_residual(traj: &Trajectory, potential: &PotentialSpec, params: &CondensateParams) -> Result<f64> {
    let m = traj.len();
    if m < 3 || traj.fields.len() != m {
        return Err(Error::TooFewSnapshots(m));
    }
    let h = traj.times[1] - traj.times[0];
    for w in traj.times.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0) || !(h > 0.0) {
            return Err(Error::NonUniformSnapshots);
        }
    }
    let grid = *traj.fields[0].grid();
    let v = potential.sample(&grid)?;
    let sp = Spectral1D::new(&grid);
    let idx = odlro_sample_indices(grid.len());
    let mut worst: f64 = 0.0;
    for s in 1..m - 1 {
        let prev = traj.fields[s - 1].values();
        let next = traj.fields[s + 1].values();
        let cur = traj.fields[s].values();
        let lphi = apply_hamiltonian(&sp, cur, &v, params.gn());
        for &x in &idx {
            for &xp in &idx {
                let dp = (next[xp] * next[x].conj() - prev[xp] * prev[x].conj()) / (2.0 * h);
                let lhs = C64::i() * dp;
                let rhs = lphi[xp] * cur[x].conj() - lphi[x].conj() * cur[xp];
                worst = worst.max((lhs - rhs).norm());
            }
        }
    }
    Ok(worst)
}
