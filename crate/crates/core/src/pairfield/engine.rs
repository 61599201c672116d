use super::field::PairField;
use crate::gpe::PotentialSpec;
use crate::modes::LongRangeKernel;
use crate::numerics::{Grid1D, IntegratorConfig, KernelConvolver, Spectral1D};
use crate::{Error, Result, C64};

/// Parameters of the scalar pair equation.
#[derive(Debug, Clone, PartialEq)]
pub struct PairParams {
    pub g_a: f64,
    pub g_b: f64,
    pub n_particles: f64,
    /// Long-range kernel; cross terms use its offset.
    pub kernel: Option<LongRangeKernel>,
    /// Include `W` between particles of the same condensate.
    pub self_interaction: bool,
    pub potential_a: PotentialSpec,
    pub potential_b: PotentialSpec,
}

impl PairParams {
    pub fn new(potential_a: PotentialSpec, potential_b: PotentialSpec, n_particles: f64) -> Self {
        Self { g_a: 0.0, g_b: 0.0, n_particles, kernel: None, self_interaction: true, potential_a, potential_b }
    }
}

/// Parameters of the four-component pair equation. Contact couplings `g_a[n][n']`
/// act between internal states of condensate `a` (likewise `b`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorPairParams {
    pub n_particles: f64,
    pub g_a: [[f64; 2]; 2],
    pub g_b: [[f64; 2]; 2],
    pub kernel: Option<LongRangeKernel>,
    /// Include `W` within a condensate; the four-component equation omits it.
    pub self_interaction: bool,
    pub potentials_a: [PotentialSpec; 2],
    pub potentials_b: [PotentialSpec; 2],
}

impl SpinorPairParams {
    pub fn new(potentials_a: [PotentialSpec; 2], potentials_b: [PotentialSpec; 2], n_particles: f64) -> Self {
        Self {
            n_particles,
            g_a: [[0.0; 2]; 2],
            g_b: [[0.0; 2]; 2],
            kernel: None,
            self_interaction: false,
            potentials_a,
            potentials_b,
        }
    }
}

/// Observables of one pair-field snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct PairObservables {
    pub norm: f64,
    pub energy: f64,
    pub component_norms: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PairTrajectory {
    pub times: Vec<f64>,
    pub fields: Vec<PairField>,
    pub observables: Vec<PairObservables>,
}

/// Split-step propagator shared by the scalar (one internal label per axis) and
/// four-component (two labels per axis) pair equations.
pub(crate) struct Engine {
    na: usize,
    nb: usize,
    la: usize,
    lb: usize,
    dxa: f64,
    dxb: f64,
    sa: Spectral1D,
    sb: Spectral1D,
    /// `(kᵃ² + kᵇ²)/2` in transposed layout `[j·n_a + i]`.
    kin: Vec<f64>,
    half_phase: Vec<C64>,
    full_phase: Vec<C64>,
    va: Vec<Vec<f64>>,
    vb: Vec<Vec<f64>>,
    ga: Vec<Vec<f64>>,
    gb: Vec<Vec<f64>>,
    n: f64,
    self_a: Option<KernelConvolver>,
    self_b: Option<KernelConvolver>,
    cross_ab: Option<KernelConvolver>,
    cross_ba: Option<KernelConvolver>,
    dt: f64,
}

struct MeanField {
    /// `f^a_n(i)` per internal label of `a`.
    fa: Vec<Vec<f64>>,
    fb: Vec<Vec<f64>>,
}

impl Engine {
    #[allow(clippy::too_many_arguments)]
    fn build(
        ga_grid: &Grid1D,
        gb_grid: &Grid1D,
        pots_a: &[PotentialSpec],
        pots_b: &[PotentialSpec],
        ga: Vec<Vec<f64>>,
        gb: Vec<Vec<f64>>,
        n: f64,
        kernel: Option<&LongRangeKernel>,
        self_interaction: bool,
        dt: f64,
    ) -> Result<Self> {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidParameter(format!("n_particles must be positive, got {n}")));
        }
        let (na, nb) = (ga_grid.len(), gb_grid.len());
        let sa = Spectral1D::new(ga_grid);
        let sb = Spectral1D::new(gb_grid);
        let mut kin = vec![0.0; na * nb];
        for j in 0..nb {
            for i in 0..na {
                let (ka, kb) = (sa.wavenumbers()[i], sb.wavenumbers()[j]);
                kin[j * na + i] = 0.5 * (ka * ka + kb * kb);
            }
        }
        let half_phase = kin.iter().map(|k| C64::from_polar(1.0, -k * 0.5 * dt)).collect();
        let full_phase = kin.iter().map(|k| C64::from_polar(1.0, -k * dt)).collect();
        let va = pots_a.iter().map(|p| p.sample(ga_grid)).collect::<Result<Vec<_>>>()?;
        let vb = pots_b.iter().map(|p| p.sample(gb_grid)).collect::<Result<Vec<_>>>()?;
        let (mut self_a, mut self_b, mut cross_ab, mut cross_ba) = (None, None, None, None);
        if let Some(k) = kernel {
            k.validate()?;
            if self_interaction {
                self_a = Some(KernelConvolver::new(na, ga_grid.dx(), 0.0, |x| k.eval(x)));
                self_b = Some(KernelConvolver::new(nb, gb_grid.dx(), 0.0, |x| k.eval(x)));
            }
            if na != nb || (ga_grid.dx() - gb_grid.dx()).abs() > 1e-12 * ga_grid.dx() {
                return Err(Error::GridMismatch(
                    "cross-condensate terms need equal size and spacing on both axes".into(),
                ));
            }
            let shift = ga_grid.x_min() - gb_grid.x_min();
            cross_ab = Some(KernelConvolver::new(na, ga_grid.dx(), shift, |x| k.eval_cross(x)));
            cross_ba = Some(KernelConvolver::new(nb, gb_grid.dx(), -shift, |x| k.eval_cross(x)));
        }
        Ok(Self {
            na,
            nb,
            la: pots_a.len(),
            lb: pots_b.len(),
            dxa: ga_grid.dx(),
            dxb: gb_grid.dx(),
            sa,
            sb,
            kin,
            half_phase,
            full_phase,
            va,
            vb,
            ga,
            gb,
            n,
            self_a,
            self_b,
            cross_ab,
            cross_ba,
            dt,
        })
    }

    pub(crate) fn scalar(field: &PairField, p: &PairParams, dt: f64) -> Result<Self> {
        Self::build(
            field.grid_a(),
            field.grid_b(),
            std::slice::from_ref(&p.potential_a),
            std::slice::from_ref(&p.potential_b),
            vec![vec![p.g_a]],
            vec![vec![p.g_b]],
            p.n_particles,
            p.kernel.as_ref(),
            p.self_interaction,
            dt,
        )
    }

    pub(crate) fn spinor(field: &PairField, p: &SpinorPairParams, dt: f64) -> Result<Self> {
        Self::build(
            field.grid_a(),
            field.grid_b(),
            &p.potentials_a,
            &p.potentials_b,
            p.g_a.iter().map(|r| r.to_vec()).collect(),
            p.g_b.iter().map(|r| r.to_vec()).collect(),
            p.n_particles,
            p.kernel.as_ref(),
            p.self_interaction,
            dt,
        )
    }

    fn check(&self, field: &PairField) -> Result<()> {
        let want = self.la * self.lb;
        if field.n_components() != want {
            return Err(Error::ComponentCount { expected: want, got: field.n_components() });
        }
        Ok(())
    }

    fn transpose(src: &[C64], dst: &mut [C64], rows: usize, cols: usize) {
        for r in 0..rows {
            for c in 0..cols {
                dst[c * rows + r] = src[r * cols + c];
            }
        }
    }

    /// Multiply by a diagonal Fourier-space phase.
    fn kinetic(&self, values: &mut [C64], phase: &[C64], scratch: &mut [C64]) {
        self.sb.forward(values);
        Self::transpose(values, scratch, self.na, self.nb);
        self.sa.forward(scratch);
        scratch.iter_mut().zip(phase).for_each(|(v, p)| *v *= p);
        self.sa.inverse(scratch);
        Self::transpose(scratch, values, self.nb, self.na);
        self.sb.inverse(values);
    }

    /// Per-label marginals `ρᵃ_n`, `ρᵇ_m`.
    fn label_marginals(&self, field: &PairField) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut ra = vec![vec![0.0; self.na]; self.la];
        let mut rb = vec![vec![0.0; self.nb]; self.lb];
        for n in 0..self.la {
            for m in 0..self.lb {
                let (a, b) = field.marginals(n * self.lb + m);
                ra[n].iter_mut().zip(&a).for_each(|(x, y)| *x += y);
                rb[m].iter_mut().zip(&b).for_each(|(x, y)| *x += y);
            }
        }
        (ra, rb)
    }

    fn total(parts: &[Vec<f64>]) -> Vec<f64> {
        let mut t = vec![0.0; parts[0].len()];
        for p in parts {
            t.iter_mut().zip(p).for_each(|(x, y)| *x += y);
        }
        t
    }

    fn conv(c: &Option<KernelConvolver>, rho: &[f64]) -> Option<Vec<f64>> {
        c.as_ref().map(|c| c.apply(rho).expect("marginal length matches convolver"))
    }

    /// Interaction-only potentials (no trap), plus the marginals they came from.
    fn interaction(&self, ra: &[Vec<f64>], rb: &[Vec<f64>]) -> MeanField {
        let (ta, tb) = (Self::total(ra), Self::total(rb));
        let extra = |own: &Option<KernelConvolver>,
                     cross: &Option<KernelConvolver>,
                     t_own: &[f64],
                     t_other: &[f64],
                     len: usize| {
            let mut e = vec![0.0; len];
            if let Some(w) = Self::conv(own, t_own) {
                e.iter_mut().zip(&w).for_each(|(x, y)| *x += self.n * y);
            }
            if let Some(w) = Self::conv(cross, t_other) {
                e.iter_mut().zip(&w).for_each(|(x, y)| *x += self.n * y);
            }
            e
        };
        let ea = extra(&self.self_a, &self.cross_ab, &ta, &tb, self.na);
        let eb = extra(&self.self_b, &self.cross_ba, &tb, &ta, self.nb);
        let contact = |g: &[Vec<f64>], rho: &[Vec<f64>], e: &[f64], len: usize| -> Vec<Vec<f64>> {
            (0..g.len())
                .map(|n| {
                    (0..len).map(|i| e[i] + self.n * (0..g.len()).map(|k| g[n][k] * rho[k][i]).sum::<f64>()).collect()
                })
                .collect()
        };
        MeanField { fa: contact(&self.ga, ra, &ea, self.na), fb: contact(&self.gb, rb, &eb, self.nb) }
    }

    fn potential_step(&self, field: &mut PairField) {
        let (ra, rb) = self.label_marginals(field);
        let mf = self.interaction(&ra, &rb);
        let phases = |f: &[Vec<f64>], v: &[Vec<f64>]| -> Vec<Vec<C64>> {
            f.iter()
                .zip(v)
                .map(|(f, v)| f.iter().zip(v).map(|(a, b)| C64::from_polar(1.0, -(a + b) * self.dt)).collect())
                .collect()
        };
        let pa = phases(&mf.fa, &self.va);
        let pb = phases(&mf.fb, &self.vb);
        let (na, nb, lb) = (self.na, self.nb, self.lb);
        for (k, comp) in field.components_mut().iter_mut().enumerate() {
            let (n, m) = (k / lb, k % lb);
            for i in 0..na {
                let row = &mut comp[i * nb..(i + 1) * nb];
                let ea = pa[n][i];
                row.iter_mut().zip(&pb[m]).for_each(|(v, eb)| *v *= ea * eb);
            }
        }
    }

    /// `steps` Strang steps with fused kinetic half-steps.
    pub(crate) fn advance(&self, field: &mut PairField, steps: usize) {
        if steps == 0 {
            return;
        }
        let mut scratch = vec![C64::new(0.0, 0.0); self.na * self.nb];
        for comp in field.components_mut() {
            self.kinetic(comp, &self.half_phase, &mut scratch);
        }
        for s in 0..steps {
            self.potential_step(field);
            let phase = if s + 1 == steps { &self.half_phase } else { &self.full_phase };
            for comp in field.components_mut() {
                self.kinetic(comp, phase, &mut scratch);
            }
        }
    }

    pub(crate) fn energy(&self, field: &PairField) -> f64 {
        let cell = self.dxa * self.dxb;
        let mut kinetic = 0.0;
        let mut scratch = vec![C64::new(0.0, 0.0); self.na * self.nb];
        for comp in field.components() {
            let mut buf = comp.clone();
            self.sb.forward(&mut buf);
            Self::transpose(&buf, &mut scratch, self.na, self.nb);
            self.sa.forward(&mut scratch);
            kinetic += scratch.iter().zip(&self.kin).map(|(v, k)| k * v.norm_sqr()).sum::<f64>();
        }
        kinetic *= cell / (self.na * self.nb) as f64;

        let (ra, rb) = self.label_marginals(field);
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let mut e = kinetic;
        for n in 0..self.la {
            e += dot(&self.va[n], &ra[n]) * self.dxa;
            for k in 0..self.la {
                e += 0.5 * self.n * self.ga[n][k] * dot(&ra[n], &ra[k]) * self.dxa;
            }
        }
        for m in 0..self.lb {
            e += dot(&self.vb[m], &rb[m]) * self.dxb;
            for k in 0..self.lb {
                e += 0.5 * self.n * self.gb[m][k] * dot(&rb[m], &rb[k]) * self.dxb;
            }
        }
        let (ta, tb) = (Self::total(&ra), Self::total(&rb));
        if let Some(w) = Self::conv(&self.self_a, &ta) {
            e += 0.5 * self.n * dot(&ta, &w) * self.dxa;
        }
        if let Some(w) = Self::conv(&self.self_b, &tb) {
            e += 0.5 * self.n * dot(&tb, &w) * self.dxb;
        }
        if let Some(w) = Self::conv(&self.cross_ab, &tb) {
            e += self.n * dot(&ta, &w) * self.dxa;
        }
        e
    }

    /// `H_eff φ` on every component (used to project the pair equation).
    pub(crate) fn apply_hamiltonian(&self, field: &PairField) -> PairField {
        let (ra, rb) = self.label_marginals(field);
        let mf = self.interaction(&ra, &rb);
        let mut out = field.clone();
        let mut scratch = vec![C64::new(0.0, 0.0); self.na * self.nb];
        let (na, nb, lb) = (self.na, self.nb, self.lb);
        for (k, comp) in out.components_mut().iter_mut().enumerate() {
            let orig = field.component(k);
            self.sb.forward(comp);
            Self::transpose(comp, &mut scratch, na, nb);
            self.sa.forward(&mut scratch);
            scratch.iter_mut().zip(&self.kin).for_each(|(v, kk)| *v *= kk);
            self.sa.inverse(&mut scratch);
            Self::transpose(&scratch, comp, nb, na);
            self.sb.inverse(comp);
            let (n, m) = (k / lb, k % lb);
            for i in 0..na {
                for j in 0..nb {
                    let f = mf.fa[n][i] + self.va[n][i] + mf.fb[m][j] + self.vb[m][j];
                    comp[i * nb + j] += f * orig[i * nb + j];
                }
            }
        }
        out
    }

    pub(crate) fn observe(&self, field: &PairField) -> PairObservables {
        let component_norms: Vec<f64> = (0..field.n_components()).map(|k| field.component_norm_sqr(k)).collect();
        PairObservables { norm: component_norms.iter().sum(), energy: self.energy(field), component_norms }
    }

    /// Evolve, calling `observer` at `t = 0` and every `record_stride` steps.
    pub(crate) fn run<F>(
        &self,
        initial: &PairField,
        cfg: &IntegratorConfig,
        t_final: f64,
        mut observer: F,
    ) -> Result<()>
    where
        F: FnMut(f64, &PairField) -> Result<()>,
    {
        self.check(initial)?;
        let steps = cfg.steps_for(t_final)?;
        let mut field = initial.clone();
        observer(0.0, &field)?;
        let mut done = 0;
        while done < steps {
            let chunk = cfg.record_stride.min(steps - done);
            self.advance(&mut field, chunk);
            done += chunk;
            if !field.is_finite() {
                return Err(Error::NonFinite { step: done });
            }
            observer(done as f64 * cfg.dt, &field)?;
        }
        Ok(())
    }
}

fn collect(engine: &Engine, field: &PairField, cfg: &IntegratorConfig, t_final: f64) -> Result<PairTrajectory> {
    let mut traj = PairTrajectory { times: Vec::new(), fields: Vec::new(), observables: Vec::new() };
    engine.run(field, cfg, t_final, |t, f| {
        traj.times.push(t);
        traj.observables.push(engine.observe(f));
        traj.fields.push(f.clone());
        Ok(())
    })?;
    Ok(traj)
}

/// Split-step evolution of the scalar pair equation, storing every recorded snapshot.
pub fn evolve_pair(field: &PairField, p: &PairParams, cfg: &IntegratorConfig, t_final: f64) -> Result<PairTrajectory> {
    collect(&Engine::scalar(field, p, cfg.dt)?, field, cfg, t_final)
}

/// Like [`evolve_pair`] but hands each recorded snapshot to `observer` instead of storing it.
pub fn evolve_pair_observed<F>(
    field: &PairField,
    p: &PairParams,
    cfg: &IntegratorConfig,
    t_final: f64,
    observer: F,
) -> Result<()>
where
    F: FnMut(f64, &PairField) -> Result<()>,
{
    Engine::scalar(field, p, cfg.dt)?.run(field, cfg, t_final, observer)
}

/// Split-step evolution of the four-component pair equation.
pub fn evolve_pair_spinor(
    field: &PairField,
    p: &SpinorPairParams,
    cfg: &IntegratorConfig,
    t_final: f64,
) -> Result<PairTrajectory> {
    collect(&Engine::spinor(field, p, cfg.dt)?, field, cfg, t_final)
}

/// Conserved energy of a scalar pair field.
pub fn pair_energy(field: &PairField, p: &PairParams) -> Result<f64> {
    let e = Engine::scalar(field, p, 1.0)?;
    e.check(field)?;
    Ok(e.energy(field))
}

/// Conserved energy of a four-component pair field.
pub fn pair_spinor_energy(field: &PairField, p: &SpinorPairParams) -> Result<f64> {
    let e = Engine::spinor(field, p, 1.0)?;
    e.check(field)?;
    Ok(e.energy(field))
}

/// `-i H_eff φ` of the scalar pair equation.
pub fn pair_rhs(field: &PairField, p: &PairParams) -> Result<PairField> {
    let e = Engine::scalar(field, p, 1.0)?;
    e.check(field)?;
    let mut h = e.apply_hamiltonian(field);
    h.components_mut().iter_mut().flatten().for_each(|v| *v = C64::new(v.im, -v.re));
    Ok(h)
}
