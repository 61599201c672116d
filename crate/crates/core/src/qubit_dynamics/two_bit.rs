use super::one_bit::{Evolved, MAX_NORM_DRIFT, STATE_NORM_TOL};
use super::tensors::DerivedTensors;
use crate::numerics::{rk4_step, uniform_steps};
use crate::{Error, Result, C64};

pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Coefficient matrix `C_{nᵃnᵇ}` of the joint two-mode ansatz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    c: Mat2,
}

impl TwoQubitState {
    pub fn new(c: Mat2) -> Result<Self> {
        let n = mat_norm_sqr(&c);
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        if (n - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { c })
    }

    pub fn normalized(c: Mat2) -> Result<Self> {
        let n = mat_norm_sqr(&c).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self { c: c.map(|row| row.map(|z| z / n)) })
    }

    /// `C_{nm} = a_n b_m`.
    pub fn product(a: [C64; 2], b: [C64; 2]) -> Result<Self> {
        Self::normalized([[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]])
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.c
    }

    pub fn get(&self, n: usize, m: usize) -> C64 {
        self.c[n][m]
    }

    /// Row-major `[C₀₀, C₀₁, C₁₀, C₁₁]`.
    pub fn to_vec4(&self) -> [C64; 4] {
        [self.c[0][0], self.c[0][1], self.c[1][0], self.c[1][1]]
    }

    pub fn det(&self) -> C64 {
        self.c[0][0] * self.c[1][1] - self.c[0][1] * self.c[1][0]
    }

    pub fn norm_sqr(&self) -> f64 {
        mat_norm_sqr(&self.c)
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { c: self.c.map(|row| row.map(|z| z * s)) }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for n in 0..2 {
            for k in 0..2 {
                m = m.max((self.c[n][k] - other.c[n][k]).norm());
            }
        }
        m
    }
}

fn mat_norm_sqr(c: &Mat2) -> f64 {
    c.iter().flatten().map(|z| z.norm_sqr()).sum()
}

/// `2|det C|`: zero iff `C` factorizes, one for a maximally entangled pattern.
pub fn entanglement_measure(state: &TwoQubitState) -> f64 {
    2.0 * state.det().norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientMode {
    /// The printed matrix equation with `G` and `F` coefficients, `κ` read as the bare `χ`.
    AsPrinted,
    /// Projection of the pair equation onto the two-mode ansatz via overlap tensors.
    Derived,
}

/// Single-condensate data entering the two-bit model.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CondensateMode {
    pub e_onsite: f64,
    pub omega: f64,
    pub g: f64,
    pub chi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoBitParams {
    pub a: CondensateMode,
    pub b: CondensateMode,
    pub n_particles: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub mode: Option<CoefficientMode>,
    pub tensors: Option<DerivedTensors>,
}

impl TwoBitParams {
    /// Printed-form parameters.
    pub fn as_printed(a: CondensateMode, b: CondensateMode, n_particles: f64, mu: (f64, f64), nu: (f64, f64)) -> Self {
        Self {
            a,
            b,
            n_particles,
            mu1: mu.0,
            mu2: mu.1,
            nu1: nu.0,
            nu2: nu.1,
            mode: Some(CoefficientMode::AsPrinted),
            tensors: None,
        }
    }

    /// Derived-form parameters; the scalar couplings are read off the tensors.
    pub fn derived(a: CondensateMode, b: CondensateMode, n_particles: f64, tensors: DerivedTensors) -> Self {
        let (mu1, mu2, nu1, nu2) = tensors.scalar_couplings();
        Self { a, b, n_particles, mu1, mu2, nu1, nu2, mode: Some(CoefficientMode::Derived), tensors: Some(tensors) }
    }

    pub fn with_mode(&self, mode: CoefficientMode) -> Self {
        Self { mode: Some(mode), ..self.clone() }
    }
}

/// Effective Hamiltonian acting on `C`: `(HC)_{nm} = Σ A_{nn'}C_{n'm} + Σ B_{mm'}C_{nm'}`
/// plus, in the printed form, a diagonal that does not split this way.
struct Generator {
    a: [[C64; 2]; 2],
    b: [[C64; 2]; 2],
    /// Extra diagonal `H_{(nm),(nm)}` (printed form only).
    diag: [[f64; 2]; 2],
}

impl Generator {
    fn apply(&self, c: &Mat2) -> Mat2 {
        let mut out = [[ZERO; 2]; 2];
        for n in 0..2 {
            for m in 0..2 {
                let mut s = self.diag[n][m] * c[n][m];
                for k in 0..2 {
                    s += self.a[n][k] * c[k][m] + self.b[m][k] * c[n][k];
                }
                out[n][m] = s;
            }
        }
        out
    }

    /// Full diagonal `H_{(nm),(nm)}`.
    fn diagonal(&self) -> [[f64; 2]; 2] {
        let mut d = [[0.0; 2]; 2];
        for n in 0..2 {
            for m in 0..2 {
                d[n][m] = self.diag[n][m] + self.a[n][n].re + self.b[m][m].re;
            }
        }
        d
    }

    fn off_diagonal_weight(&self) -> f64 {
        self.a[0][1].norm().max(self.a[1][0].norm()).max(self.b[0][1].norm()).max(self.b[1][0].norm())
    }
}

fn hopping(e: f64, omega: f64) -> [[C64; 2]; 2] {
    [[C64::new(e, 0.0), C64::new(omega, 0.0)], [C64::new(omega, 0.0), C64::new(e, 0.0)]]
}

/// Printed `F_{nm}` coefficients (the third printed line is taken as `F₁₀`).
pub fn printed_f(p: &TwoBitParams, c: &Mat2) -> [[f64; 2]; 2] {
    let q = |n: usize, m: usize| c[n][m].norm_sqr();
    let (s1, s2) = (p.mu1 + p.nu1, p.mu2 + p.nu2);
    let (x1, x2) = (p.mu1 + p.nu2, p.mu2 + p.nu1);
    let f00 = s1 * (2.0 * q(0, 0) + q(0, 1) + q(1, 0)) + s2 * (q(0, 1) + q(1, 0) + 2.0 * q(1, 1));
    let f01 = x1 * (q(0, 0) + 2.0 * q(0, 1) + q(1, 1)) + x2 * (q(0, 0) + 2.0 * q(1, 0) + 2.0 * q(1, 1));
    let f10 = x1 * (q(0, 0) + 2.0 * q(1, 0) + q(1, 1)) + x2 * (q(0, 0) + 2.0 * q(0, 1) + 2.0 * q(1, 1));
    let f11 = s1 * (q(0, 1) + q(1, 0) + 2.0 * q(1, 1)) + s2 * (2.0 * q(0, 0) + q(0, 1) + q(1, 0));
    [[f00, f01], [f10, f11]]
}

/// Printed `G_{nm} - Eᵃ - Eᵇ = (gᵃ + gᵇ)Nχᵃχᵇ|C_{nm}|²`.
pub fn printed_g_interaction(p: &TwoBitParams, c: &Mat2) -> [[f64; 2]; 2] {
    let k = (p.a.g + p.b.g) * p.n_particles * p.a.chi * p.b.chi;
    c.map(|row| row.map(|z| k * z.norm_sqr()))
}

fn printed_generator(p: &TwoBitParams, c: &Mat2) -> Generator {
    let f = printed_f(p, c);
    let g = printed_g_interaction(p, c);
    let mut diag = [[0.0; 2]; 2];
    for n in 0..2 {
        for m in 0..2 {
            diag[n][m] = g[n][m] + p.n_particles * f[n][m];
        }
    }
    Generator { a: hopping(p.a.e_onsite, p.a.omega), b: hopping(p.b.e_onsite, p.b.omega), diag }
}

/// Reduced one-body matrices `Dᵃ_{n''n'} = Σ_m C_{n''m}C*_{n'm}` and `Dᵇ_{m''m'} = Σ_n C_{nm''}C*_{nm'}`.
fn reduced_matrices(c: &Mat2) -> (Mat2, Mat2) {
    let mut da = [[ZERO; 2]; 2];
    let mut db = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                da[i][j] += c[i][k] * c[j][k].conj();
                db[i][j] += c[k][i] * c[k][j].conj();
            }
        }
    }
    (da, db)
}

fn derived_generator(p: &TwoBitParams, t: &DerivedTensors, c: &Mat2) -> Generator {
    let (da, db) = reduced_matrices(c);
    let nn = p.n_particles;
    let mut a = hopping(p.a.e_onsite, p.a.omega);
    let mut b = hopping(p.b.e_onsite, p.b.omega);
    for n in 0..2 {
        for n1 in 0..2 {
            let (mut sa, mut sb) = (ZERO, ZERO);
            for i in 0..2 {
                for j in 0..2 {
                    // ρ_a = Σ Dᵃ_{ji} φ_i* φ_j, likewise for b
                    sa += da[j][i] * (p.a.g * t.t_a[n][n1][i][j] + t.k_a[n][n1][i][j]) + db[j][i] * t.x_ab[n][n1][i][j];
                    sb += db[j][i] * (p.b.g * t.t_b[n][n1][i][j] + t.k_b[n][n1][i][j]) + da[j][i] * t.x_ab[i][j][n][n1];
                }
            }
            a[n][n1] += nn * sa;
            b[n][n1] += nn * sb;
        }
    }
    Generator { a, b, diag: [[0.0; 2]; 2] }
}

fn generator(p: &TwoBitParams, c: &Mat2) -> Result<Generator> {
    match p.mode {
        None => Err(Error::CoefficientModeUnset),
        Some(CoefficientMode::AsPrinted) => Ok(printed_generator(p, c)),
        Some(CoefficientMode::Derived) => {
            let t = p.tensors.as_ref().ok_or(Error::MissingTensors)?;
            Ok(derived_generator(p, t, c))
        }
    }
}

/// `Ċ = -i·H(C)·C` in the selected coefficient mode.
pub fn two_bit_rhs(state: &TwoQubitState, p: &TwoBitParams) -> Result<Mat2> {
    let h = generator(p, state.matrix())?;
    Ok(h.apply(state.matrix()).map(|row| row.map(|z| C64::new(z.im, -z.re))))
}

fn unpack(y: &[C64]) -> Mat2 {
    [[y[0], y[1]], [y[2], y[3]]]
}

/// RK4 trajectory of the two-bit model sampled every `stride` steps plus the end point.
/// Recorded states are not renormalized.
pub fn two_bit_trajectory(
    state: &TwoQubitState,
    p: &TwoBitParams,
    tau: f64,
    dt: f64,
    stride: usize,
) -> Result<Vec<(f64, Mat2)>> {
    generator(p, state.matrix())?;
    let (steps, h) = uniform_steps(tau, dt)?;
    let stride = stride.max(1);
    let mut y = state.to_vec4().to_vec();
    let mut out = vec![(0.0, unpack(&y))];
    let mut rhs = |_t: f64, v: &[C64]| {
        let c = unpack(v);
        let g = generator(p, &c).expect("mode checked above");
        let d = g.apply(&c);
        [d[0][0], d[0][1], d[1][0], d[1][1]].iter().map(|z| C64::new(z.im, -z.re)).collect()
    };
    for s in 0..steps {
        y = rk4_step(&y, s as f64 * h, h, &mut rhs).map_err(|_| Error::NonFinite { step: s + 1 })?;
        if (s + 1) % stride == 0 || s + 1 == steps {
            out.push(((s + 1) as f64 * h, unpack(&y)));
        }
    }
    Ok(out)
}

pub fn evolve_two_bit(state: &TwoQubitState, p: &TwoBitParams, tau: f64, dt: f64) -> Result<Evolved<TwoQubitState>> {
    let traj = two_bit_trajectory(state, p, tau, dt, usize::MAX)?;
    let c = traj.last().unwrap().1;
    let drift = mat_norm_sqr(&c) - 1.0;
    if drift.abs() > MAX_NORM_DRIFT {
        return Err(Error::NormDrift { drift, limit: MAX_NORM_DRIFT });
    }
    Ok(Evolved { state: TwoQubitState::normalized(c)?, norm_drift: drift })
}

/// Relative tolerance on off-diagonal generator entries accepted by the closed form.
const DIAGONAL_TOL: f64 = 1e-12;

/// Phase rates `H_{(nm),(nm)}` of the `Ω = 0` flow at the moduli of `c0`.
pub fn diagonal_rates(p: &TwoBitParams, c0: &TwoQubitState) -> Result<[[f64; 2]; 2]> {
    if p.a.omega != 0.0 || p.b.omega != 0.0 {
        return Err(Error::NonzeroTunneling { omega_a: p.a.omega, omega_b: p.b.omega });
    }
    let h = generator(p, c0.matrix())?;
    let d = h.diagonal();
    let scale = 1.0 + d.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let off = h.off_diagonal_weight();
    if off > DIAGONAL_TOL * scale {
        return Err(Error::NonDiagonalGenerator(off));
    }
    Ok(d)
}

/// `C_{nm}(τ) = C_{nm}(0)·exp(-i r_{nm} τ)` with the rates of [`diagonal_rates`].
pub fn conditional_phase_closed_form(p: &TwoBitParams, c0: &TwoQubitState, tau: f64) -> Result<TwoQubitState> {
    let r = diagonal_rates(p, c0)?;
    let mut c = *c0.matrix();
    for n in 0..2 {
        for m in 0..2 {
            c[n][m] *= C64::from_polar(1.0, -r[n][m] * tau);
        }
    }
    Ok(TwoQubitState { c })
}

/// Rate of change of `arg(C₀₀C₁₁ / (C₀₁C₁₀))` under the `Ω = 0` flow.
pub fn entangling_phase_rate(p: &TwoBitParams, c0: &TwoQubitState) -> Result<f64> {
    let r = diagonal_rates(p, c0)?;
    Ok(-(r[0][0] + r[1][1] - r[0][1] - r[1][0]))
}

/// First time `2|det C|` reaches `level` under the `Ω = 0` flow from a product state
/// with conditional rate `rate`: `2|det C(t)| = 4|C₀₀C₁₁|·|sin(rate·t/2)|`.
pub fn predicted_entanglement_time(c0: &TwoQubitState, rate: f64, level: f64) -> Option<f64> {
    let amp = 4.0 * (c0.get(0, 0) * c0.get(1, 1)).norm();
    if rate == 0.0 || amp < level {
        return None;
    }
    Some(2.0 * (level / amp).asin() / rate.abs())
}

/// Side-by-side breakdown of the `Ω = 0` phase rates in the two coefficient modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeComparison {
    pub state: TwoQubitState,
    /// `(gᵃ + gᵇ)Nχᵃχᵇ|C_{nm}|²` as printed.
    pub g_printed: [[f64; 2]; 2],
    /// Contact part of the projected generator: `gᵃNχᵃPᵃ_n + gᵇNχᵇPᵇ_m` for localized modes.
    pub g_derived: [[f64; 2]; 2],
    /// `N·F_{nm}` as printed.
    pub f_printed: [[f64; 2]; 2],
    /// Long-range part of the projected generator.
    pub f_derived: [[f64; 2]; 2],
    pub rates_printed: [[f64; 2]; 2],
    pub rates_derived: [[f64; 2]; 2],
    pub entangling_printed: f64,
    pub entangling_derived: f64,
}

/// Compare printed and derived coefficients on one state. `p` must carry tensors and
/// zero tunneling.
pub fn compare_coefficient_modes(p: &TwoBitParams, state: &TwoQubitState) -> Result<ModeComparison> {
    let t = p.tensors.clone().ok_or(Error::MissingTensors)?;
    let printed = p.with_mode(CoefficientMode::AsPrinted);
    let derived = p.with_mode(CoefficientMode::Derived);
    let rates_printed = diagonal_rates(&printed, state)?;
    let rates_derived = diagonal_rates(&derived, state)?;

    let contact_only = TwoBitParams { tensors: Some(t.contact_only()), ..derived.clone() };
    let contact = diagonal_rates(&contact_only, state)?;
    let base = p.a.e_onsite + p.b.e_onsite;
    let g_derived = contact.map(|row| row.map(|x| x - base));
    let mut f_derived = [[0.0; 2]; 2];
    for n in 0..2 {
        for m in 0..2 {
            f_derived[n][m] = rates_derived[n][m] - contact[n][m];
        }
    }
    let f_printed = printed_f(p, state.matrix()).map(|row| row.map(|x| p.n_particles * x));
    let ent = |r: &[[f64; 2]; 2]| -(r[0][0] + r[1][1] - r[0][1] - r[1][0]);
    Ok(ModeComparison {
        state: *state,
        g_printed: printed_g_interaction(p, state.matrix()),
        g_derived,
        f_printed,
        f_derived,
        entangling_printed: ent(&rates_printed),
        entangling_derived: ent(&rates_derived),
        rates_printed,
        rates_derived,
    })
}
