use crate::numerics::{rk4_step, uniform_steps};
use crate::{Error, Result, C64};

/// Norm tolerance for constructing states.
pub const STATE_NORM_TOL: f64 = 1e-10;
/// Norm drift beyond which an ODE evolution is rejected.
pub const MAX_NORM_DRIFT: f64 = 1e-6;

/// Two-mode amplitudes `(c₀, c₁)` on the left/right modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    c0: C64,
    c1: C64,
}

impl QubitState {
    /// Requires `|c₀|² + |c₁|² = 1` within [`STATE_NORM_TOL`].
    pub fn new(c0: C64, c1: C64) -> Result<Self> {
        let n = c0.norm_sqr() + c1.norm_sqr();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        if (n - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { c0, c1 })
    }

    /// Rescales to unit norm; zero vectors are rejected.
    pub fn normalized(c0: C64, c1: C64) -> Result<Self> {
        let n = (c0.norm_sqr() + c1.norm_sqr()).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self { c0: c0 / n, c1: c1 / n })
    }

    pub fn from_real(c0: f64, c1: f64) -> Result<Self> {
        Self::normalized(C64::new(c0, 0.0), C64::new(c1, 0.0))
    }

    pub fn c0(&self) -> C64 {
        self.c0
    }

    pub fn c1(&self) -> C64 {
        self.c1
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        [self.c0, self.c1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c0.norm_sqr() + self.c1.norm_sqr()
    }

    /// `|c₀|² - |c₁|²`.
    pub fn imbalance(&self) -> f64 {
        self.c0.norm_sqr() - self.c1.norm_sqr()
    }

    /// `arg c₁ - arg c₀`.
    pub fn relative_phase(&self) -> f64 {
        (self.c1 * self.c0.conj()).arg()
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &Self) -> f64 {
        ((self.c0 - other.c0).norm_sqr() + (self.c1 - other.c1).norm_sqr()).sqrt()
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { c0: self.c0 * s, c1: self.c1 * s }
    }

    /// Amplitudes on the alternative basis `(φ₀ ± φ₁)/√2`. The map is its own inverse.
    pub fn to_parity_basis(&self) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { c0: (self.c0 + self.c1) * h, c1: (self.c0 - self.c1) * h }
    }
}

/// Result of an ODE evolution: the renormalized final state and the norm deviation
/// that was removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evolved<S> {
    pub state: S,
    pub norm_drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OneBitParams {
    pub e_onsite: f64,
    pub omega: f64,
    pub kappa_n: f64,
    pub mu1_n: f64,
    pub mu2_n: f64,
}

impl OneBitParams {
    pub fn linear(e_onsite: f64, omega: f64) -> Self {
        Self { e_onsite, omega, ..Self::default() }
    }

    /// Diagonal of the state-dependent Hamiltonian.
    fn diagonal(&self, p0: f64, p1: f64) -> [f64; 2] {
        [
            self.e_onsite + self.kappa_n * p0 + self.mu1_n * p0 + self.mu2_n * p1,
            self.e_onsite + self.kappa_n * p1 + self.mu1_n * p1 + self.mu2_n * p0,
        ]
    }
}

fn one_bit_derivative(c: &[C64], p: &OneBitParams) -> Vec<C64> {
    let [h0, h1] = p.diagonal(c[0].norm_sqr(), c[1].norm_sqr());
    let mi = C64::new(0.0, -1.0);
    vec![mi * (h0 * c[0] + p.omega * c[1]), mi * (p.omega * c[0] + h1 * c[1])]
}

/// `-i·H(c)·c` with `H = E + Ωσ_x + diag(κN|c₀|² + μ₁N|c₀|² + μ₂N|c₁|², 0 ↔ 1)`.
pub fn one_bit_rhs(state: &QubitState, p: &OneBitParams) -> [C64; 2] {
    let d = one_bit_derivative(&state.amplitudes(), p);
    [d[0], d[1]]
}

/// RK4 trajectory sampled every `stride` steps, including both end points.
pub fn one_bit_trajectory(
    state: &QubitState,
    p: &OneBitParams,
    tau: f64,
    dt: f64,
    stride: usize,
) -> Result<Vec<(f64, [C64; 2])>> {
    let (steps, h) = uniform_steps(tau, dt)?;
    let stride = stride.max(1);
    let mut y = state.amplitudes().to_vec();
    let mut out = vec![(0.0, [y[0], y[1]])];
    let mut rhs = |_t: f64, c: &[C64]| one_bit_derivative(c, p);
    for s in 0..steps {
        y = rk4_step(&y, s as f64 * h, h, &mut rhs).map_err(|_| Error::NonFinite { step: s + 1 })?;
        if (s + 1) % stride == 0 || s + 1 == steps {
            out.push(((s + 1) as f64 * h, [y[0], y[1]]));
        }
    }
    Ok(out)
}

fn finish(c: [C64; 2]) -> Result<Evolved<QubitState>> {
    let n = c[0].norm_sqr() + c[1].norm_sqr();
    let drift = n - 1.0;
    if drift.abs() > MAX_NORM_DRIFT {
        return Err(Error::NormDrift { drift, limit: MAX_NORM_DRIFT });
    }
    Ok(Evolved { state: QubitState::normalized(c[0], c[1])?, norm_drift: drift })
}

/// RK4 integration of [`one_bit_rhs`] over `tau` with steps no longer than `dt`.
pub fn evolve_one_bit(state: &QubitState, p: &OneBitParams, tau: f64, dt: f64) -> Result<Evolved<QubitState>> {
    let traj = one_bit_trajectory(state, p, tau, dt, usize::MAX)?;
    finish(traj.last().unwrap().1)
}

pub type Gate2 = [[C64; 2]; 2];

/// `exp[-i(E + Ωσ_x)τ]`.
pub fn linear_gate(omega: f64, e_onsite: f64, tau: f64) -> Gate2 {
    let g = C64::from_polar(1.0, -e_onsite * tau);
    let c = g * (omega * tau).cos();
    let s = g * C64::new(0.0, -(omega * tau).sin());
    [[c, s], [s, c]]
}

pub fn apply_gate(u: &Gate2, state: &QubitState) -> QubitState {
    let [c0, c1] = state.amplitudes();
    QubitState { c0: u[0][0] * c0 + u[0][1] * c1, c1: u[1][0] * c0 + u[1][1] * c1 }
}

pub fn gate_product(a: &Gate2, b: &Gate2) -> Gate2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// `c_n ↦ c_n·exp(-iκN|c_n|²τ)`.
pub fn nonlinear_twist(state: &QubitState, kappa_n: f64, tau: f64) -> QubitState {
    let twist = |c: C64| c * C64::from_polar(1.0, -kappa_n * c.norm_sqr() * tau);
    QubitState { c0: twist(state.c0), c1: twist(state.c1) }
}

/// `‖s₁(t) - s₂(t)‖` after every RK4 step, starting at `t = 0`.
pub fn state_divergence(
    s1: &QubitState,
    s2: &QubitState,
    p: &OneBitParams,
    tau: f64,
    dt: f64,
) -> Result<Vec<(f64, f64)>> {
    let (steps, h) = uniform_steps(tau, dt)?;
    let mut a = s1.amplitudes().to_vec();
    let mut b = s2.amplitudes().to_vec();
    let dist = |a: &[C64], b: &[C64]| ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt();
    let mut out = vec![(0.0, dist(&a, &b))];
    let mut rhs = |_t: f64, c: &[C64]| one_bit_derivative(c, p);
    for s in 0..steps {
        let t = s as f64 * h;
        a = rk4_step(&a, t, h, &mut rhs)?;
        b = rk4_step(&b, t, h, &mut rhs)?;
        out.push((t + h, dist(&a, &b)));
    }
    Ok(out)
}

/// `|⟨|c₀|² - |c₁|²⟩|` averaged (trapezoid rule) over `[0, t_window]`.
pub fn time_averaged_imbalance(state: &QubitState, p: &OneBitParams, t_window: f64, dt: f64) -> Result<f64> {
    let traj = one_bit_trajectory(state, p, t_window, dt, 1)?;
    let z: Vec<f64> = traj.iter().map(|(_, c)| c[0].norm_sqr() - c[1].norm_sqr()).collect();
    let h = traj[1].0 - traj[0].0;
    let integral = h * (z.iter().sum::<f64>() - 0.5 * (z[0] + z[z.len() - 1]));
    Ok((integral / t_window).abs())
}

/// Settings for locating the self-trapping threshold `Λ = κN/(2|Ω|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfTrappingScan {
    pub omega: f64,
    pub initial: QubitState,
    pub t_window: f64,
    pub dt: f64,
    /// Imbalance separating trapped from oscillating runs.
    pub threshold: f64,
}

impl SelfTrappingScan {
    /// `(√0.9, √0.1)` in phase, `Ω = 1`, averaging over 100 time units.
    pub fn standard(dt: f64) -> Self {
        Self {
            omega: 1.0,
            initial: QubitState::from_real(0.9f64.sqrt(), 0.1f64.sqrt()).unwrap(),
            t_window: 100.0,
            dt,
            threshold: 0.2,
        }
    }

    pub fn params(&self, lambda: f64) -> OneBitParams {
        OneBitParams { omega: self.omega, kappa_n: 2.0 * self.omega.abs() * lambda, ..OneBitParams::default() }
    }

    pub fn metric(&self, lambda: f64) -> Result<f64> {
        time_averaged_imbalance(&self.initial, &self.params(lambda), self.t_window, self.dt)
    }

    /// Bisection for the smallest trapped `Λ` in `[lo, hi]`, to absolute width `tol`.
    pub fn critical_lambda(&self, lo: f64, hi: f64, tol: f64) -> Result<f64> {
        let (mut lo, mut hi) = (lo, hi);
        if self.metric(lo)? > self.threshold || self.metric(hi)? <= self.threshold {
            return Err(Error::InvalidParameter(format!("[{lo}, {hi}] does not bracket the self-trapping transition")));
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.metric(mid)? > self.threshold {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
