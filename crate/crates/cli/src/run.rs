//! Experiment dispatch: turns a validated [`RunConfig`] into solver calls and artifacts.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use bec_qubit_core::gpe::{
    chemical_potential, energy_functional, evolve, ground_state, CondensateParams, PotentialSpec,
};
use bec_qubit_core::modes::{localized_modes, tunneling_omega, CouplingSet, LongRangeKernel, ModePair};
use bec_qubit_core::numerics::{stationary_residual, ComplexField, Grid1D, IntegratorConfig, Scheme};
use bec_qubit_core::pairfield::{
    evolve_pair_observed, evolve_pair_spinor, pair_energy, project_to_modes, reconstruct_from_modes, schmidt_defect,
    PairField, PairParams, SpinorPairParams,
};
use bec_qubit_core::qubit_dynamics::{
    conditional_phase_closed_form, entanglement_measure, entangling_phase_rate, one_bit_trajectory,
    predicted_entanglement_time, time_averaged_imbalance, two_bit_trajectory, CondensateMode, DerivedTensors, Mat2,
    OneBitParams, QubitState, SelfTrappingScan, TwoBitParams, TwoQubitState,
};
use bec_qubit_core::spinor::{
    evolve_spinor, mode_overlap_factor, trap_ground_states, DisplacedTrap, SpinorField, SpinorParams,
};
use bec_qubit_core::{Error as CoreError, C64};
use serde_json::{json, Map, Value as Json};

use crate::config::{Experiment, RunConfig, Value};
use crate::output::{Artifacts, Table};
use crate::CliError;

/// Level of `2|det C|` used for the predicted entanglement time.
const ENTANGLEMENT_LEVEL: f64 = 0.1;

/// What a run produced. Serialized as `summary.json`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub experiment: Experiment,
    pub config: RunConfig,
    pub couplings: Option<CouplingSet>,
    pub headline: BTreeMap<String, f64>,
    pub files: Vec<String>,
}

fn finite_or_null(x: f64) -> Json {
    if x.is_finite() {
        json!(x + 0.0)
    } else {
        Json::Null
    }
}

fn config_json(cfg: &RunConfig) -> Json {
    let mut out = Map::new();
    for (section, keys) in cfg.entries() {
        let mut m = Map::new();
        for (k, v) in keys {
            let j = match v {
                Value::Num(x) => finite_or_null(*x),
                Value::Int(n) => json!(n),
                Value::Ident(s) => json!(s),
                Value::Bool(b) => json!(b),
            };
            m.insert(k.to_string(), j);
        }
        out.insert(section.to_string(), Json::Object(m));
    }
    Json::Object(out)
}

fn couplings_json(c: &CouplingSet) -> Json {
    json!({
        "e_onsite": finite_or_null(c.e_onsite),
        "omega": finite_or_null(c.omega),
        "chi": finite_or_null(c.chi),
        "kappa": finite_or_null(c.kappa),
        "mu1": finite_or_null(c.mu1),
        "mu2": finite_or_null(c.mu2),
        "nu1": finite_or_null(c.nu1),
        "nu2": finite_or_null(c.nu2),
        "n_particles": finite_or_null(c.n_particles),
        "g": finite_or_null(c.g),
    })
}

impl RunSummary {
    pub fn to_json(&self) -> Json {
        let headline: Map<String, Json> = self.headline.iter().map(|(k, v)| (k.clone(), finite_or_null(*v))).collect();
        json!({
            "experiment": self.experiment.name(),
            "config": config_json(&self.config),
            "couplings": self.couplings.as_ref().map(couplings_json).unwrap_or(Json::Null),
            "headline": Json::Object(headline),
            "files": self.files,
        })
    }
}

/// Everything an experiment hands back before the summary is assembled.
#[derive(Default)]
struct Outcome {
    artifacts: Artifacts,
    headline: BTreeMap<String, f64>,
    couplings: Option<CouplingSet>,
}

impl Outcome {
    fn put(&mut self, key: &str, value: f64) {
        self.headline.insert(key.to_string(), value);
    }
}

type Res<T> = Result<T, CoreError>;

fn grid(cfg: &RunConfig) -> Res<Grid1D> {
    Grid1D::symmetric(cfg.int_or("grid", "n_points", 0), cfg.num_or("grid", "half_width", 0.0))
}

fn condensate(cfg: &RunConfig) -> Res<CondensateParams> {
    CondensateParams::new(cfg.num_or("condensate", "g", 0.0), cfg.num_or("condensate", "n_particles", 1.0))
}

fn potential(cfg: &RunConfig) -> Res<PotentialSpec> {
    let p = match cfg.ident("potential", "kind") {
        Some("harmonic") => PotentialSpec::Harmonic { omega: cfg.num_or("potential", "omega", 1.0) },
        Some("double_well") => {
            PotentialSpec::DoubleWell { v0: cfg.num_or("potential", "v0", 0.0), d: cfg.num_or("potential", "d", 0.0) }
        }
        _ => {
            let trap = trap(cfg);
            trap.potential(0)
        }
    };
    p.validate()?;
    Ok(p)
}

fn trap(cfg: &RunConfig) -> DisplacedTrap {
    DisplacedTrap {
        omega_z: cfg.num_or("potential", "omega_z", 0.0),
        z0: cfg.num_or("potential", "z0", 0.0),
        z1: cfg.num_or("potential", "z1", 0.0),
    }
}

fn kernel(cfg: &RunConfig) -> Res<Option<LongRangeKernel>> {
    let offset = cfg.num_or("kernel", "offset", 0.0);
    let w0 = cfg.num_or("kernel", "w0", 0.0);
    let k = match cfg.ident("kernel", "kind") {
        Some("regularized_dipole") => LongRangeKernel::regularized_dipole(w0, cfg.num_or("kernel", "a", 0.0), offset),
        Some("gaussian") => LongRangeKernel::gaussian(w0, cfg.num_or("kernel", "s", 0.0), offset),
        _ => return Ok(None),
    };
    k.validate()?;
    Ok(Some(k))
}

fn integrator(cfg: &RunConfig) -> Res<(IntegratorConfig, f64)> {
    let mut ic =
        IntegratorConfig::new(cfg.num_or("integrator", "dt", 0.0), cfg.int_or("integrator", "record_stride", 1));
    if cfg.ident("integrator", "scheme") == Some("rk4") {
        ic.scheme = Scheme::Rk4;
    }
    let t_final = cfg.num_or("integrator", "t_final", 0.0);
    ic.steps_for(t_final)?;
    Ok((ic, t_final))
}

fn ode_steps(cfg: &RunConfig) -> Res<(f64, f64, usize)> {
    let dt = cfg.num_or("integrator", "dt", 0.0);
    let t_final = cfg.num_or("integrator", "t_final", 0.0);
    if !(dt > 0.0 && dt.is_finite()) || !(t_final > 0.0 && t_final.is_finite()) {
        return Err(CoreError::InvalidParameter(format!("dt and t_final must be positive, got {dt} and {t_final}")));
    }
    Ok((dt, t_final, cfg.int_or("integrator", "record_stride", 1).max(1)))
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn qubit_initial(cfg: &RunConfig, default: (f64, f64)) -> Res<QubitState> {
    if !cfg.has_section("initial") {
        return QubitState::from_real(default.0, default.1);
    }
    let g = |k: &str| cfg.num_or("initial", k, 0.0);
    QubitState::normalized(c(g("c0_re"), g("c0_im")), c(g("c1_re"), g("c1_im")))
}

fn pair_initial(cfg: &RunConfig) -> Res<TwoQubitState> {
    if !cfg.has_section("initial") {
        return TwoQubitState::normalized([[c(0.5, 0.0); 2]; 2]);
    }
    let g = |k: &str| cfg.num_or("initial", k, 0.0);
    TwoQubitState::normalized([
        [c(g("c00_re"), g("c00_im")), c(g("c01_re"), g("c01_im"))],
        [c(g("c10_re"), g("c10_im")), c(g("c11_re"), g("c11_im"))],
    ])
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn relative_drift(values: &[f64]) -> f64 {
    let e0 = values[0];
    let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
    max_abs(values.iter().map(|e| (e - e0) / scale))
}

/// Times at which `p` crosses one half, linearly interpolated.
fn half_crossings(times: &[f64], p: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 1..p.len() {
        let (a, b) = (p[i - 1] - 0.5, p[i] - 0.5);
        if a * b < 0.0 {
            out.push(times[i - 1] + (times[i] - times[i - 1]) * a / (a - b));
        }
    }
    out
}

const MAT_COLUMNS: [&str; 8] = ["re_C00", "im_C00", "re_C01", "im_C01", "re_C10", "im_C10", "re_C11", "im_C11"];

fn mat_cells(m: &Mat2) -> [f64; 8] {
    [m[0][0].re, m[0][0].im, m[0][1].re, m[0][1].im, m[1][0].re, m[1][0].im, m[1][1].re, m[1][1].im]
}

fn det2(m: &Mat2) -> f64 {
    2.0 * (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm()
}

fn ground_state_run(cfg: &RunConfig) -> Res<Outcome> {
    let g = grid(cfg)?;
    let pot = potential(cfg)?;
    let params = condensate(cfg)?;
    let (field, mu) = ground_state(&pot, &params, &g)?;
    let v = pot.sample(&g)?;
    let mut table = Table::new(&["x", "re_phi", "im_phi", "density", "potential"]);
    for (j, z) in field.values().iter().enumerate() {
        table.row(&[g.x(j), z.re, z.im, z.norm_sqr(), v[j]]);
    }
    let mut out = Outcome::default();
    out.artifacts.table("profile.csv", &table);
    out.put("mu", mu);
    out.put("energy", energy_functional(&field, &pot, &params)?);
    out.put("norm", field.norm_sqr());
    out.put("mean_x", field.mean_x());
    out.put("stationary_residual", stationary_residual(&field, &v, params.gn(), mu));
    Ok(out)
}

fn gpe_initial(cfg: &RunConfig, pot: &PotentialSpec, params: &CondensateParams, g: &Grid1D) -> Res<ComplexField> {
    match cfg.ident("initial", "kind").unwrap_or("ground_state") {
        "left_mode" => {
            if !matches!(pot, PotentialSpec::DoubleWell { .. }) {
                return Err(CoreError::InvalidParameter("initial kind left_mode needs a double_well potential".into()));
            }
            Ok(localized_modes(pot, g)?.phi0)
        }
        "gaussian" => {
            let x0 = cfg.num_or("initial", "x0", 0.0);
            let sigma = cfg.num_or("initial", "sigma", 1.0);
            let k = cfg.num_or("initial", "k", 0.0);
            if !(sigma > 0.0) {
                return Err(CoreError::InvalidParameter(format!("sigma must be positive, got {sigma}")));
            }
            ComplexField::from_fn(*g, |x| C64::from_polar((-(x - x0).powi(2) / (2.0 * sigma * sigma)).exp(), k * x))
                .normalized()
        }
        _ => Ok(ground_state(pot, params, g)?.0),
    }
}

fn evolve_gpe_run(cfg: &RunConfig) -> Res<Outcome> {
    let g = grid(cfg)?;
    let pot = potential(cfg)?;
    let params = condensate(cfg)?;
    let (ic, t_final) = integrator(cfg)?;
    let initial = gpe_initial(cfg, &pot, &params, &g)?;
    let traj = evolve(&initial, &pot, &params, &ic, t_final)?;
    let mut table = Table::new(&["t", "norm", "energy", "p_left", "p_right", "mean_x"]);
    for (t, o) in traj.times.iter().zip(&traj.observables) {
        table.row(&[*t, o.norm, o.energy, o.p_left, o.p_right, o.mean_x]);
    }
    let energies: Vec<f64> = traj.observables.iter().map(|o| o.energy).collect();
    let p_left: Vec<f64> = traj.observables.iter().map(|o| o.p_left).collect();
    let last = traj.observables.last().expect("trajectory has the initial snapshot");
    let mut out = Outcome::default();
    out.artifacts.table("timeseries.csv", &table);
    out.put("max_norm_drift", max_abs(traj.observables.iter().map(|o| o.norm - 1.0)));
    out.put("max_energy_drift", relative_drift(&energies));
    out.put("final_p_left", last.p_left);
    out.put("final_mean_x", last.mean_x);
    out.put("min_p_left", p_left.iter().cloned().fold(f64::INFINITY, f64::min));
    out.put("max_p_left", p_left.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let final_field = traj.fields.last().expect("trajectory has the initial snapshot");
    out.put("final_mu", chemical_potential(final_field, &pot, &params)?);
    if let Some(&first) = half_crossings(&traj.times, &p_left).first() {
        out.put("first_half_crossing", first);
    }
    Ok(out)
}

fn mode_table(mp: &ModePair, v: &[f64]) -> Table {
    let mut table = Table::new(&["x", "phi0", "phi1", "psi_s", "psi_a", "potential"]);
    let g = mp.grid();
    for j in 0..g.len() {
        table.row(&[
            g.x(j),
            mp.phi0.values()[j].re,
            mp.phi1.values()[j].re,
            mp.psi_s.values()[j].re,
            mp.psi_a.values()[j].re,
            v[j],
        ]);
    }
    table
}

fn modes_run(cfg: &RunConfig) -> Res<Outcome> {
    let g = grid(cfg)?;
    let pot = potential(cfg)?;
    let params = condensate(cfg)?;
    let k = kernel(cfg)?;
    let mp = localized_modes(&pot, &g)?;
    let est = tunneling_omega(&mp, &pot)?;
    let couplings = CouplingSet::derive(&mp, Some(&mp), k.as_ref(), &params)?;
    let mut out = Outcome::default();
    out.artifacts.table("modes.csv", &mode_table(&mp, &pot.sample(&g)?));
    out.artifacts.add("couplings.txt", couplings.to_text());
    out.put("omega", est.omega_spec);
    out.put("omega_overlap", est.omega_overlap);
    out.put("omega_relative_deviation", est.relative_deviation);
    out.put("e_s", mp.e_s);
    out.put("e_a", mp.e_a);
    out.put("epsilon_overlap", mp.epsilon_overlap);
    out.put("leakage", mp.leakage);
    out.put("josephson_period", PI / est.omega_spec.abs());
    if couplings.kappa != 0.0 {
        out.put("lambda", couplings.kappa * couplings.n_particles / (2.0 * est.omega_spec.abs()));
    }
    out.couplings = Some(couplings);
    Ok(out)
}

fn onebit_run(cfg: &RunConfig) -> Res<Outcome> {
    let p = OneBitParams {
        e_onsite: cfg.num_or("modes", "e_onsite", 0.0),
        omega: cfg.num_or("modes", "omega", 0.0),
        kappa_n: cfg.num_or("modes", "kappa_n", 0.0),
        mu1_n: cfg.num_or("modes", "mu1_n", 0.0),
        mu2_n: cfg.num_or("modes", "mu2_n", 0.0),
    };
    let (dt, t_final, stride) = ode_steps(cfg)?;
    let state = qubit_initial(cfg, (1.0, 0.0))?;
    let traj = one_bit_trajectory(&state, &p, t_final, dt, stride)?;
    let mut table = Table::new(&["t", "re_c0", "im_c0", "re_c1", "im_c1", "norm", "imbalance", "relative_phase"]);
    for (t, a) in &traj {
        let s = QubitState::normalized(a[0], a[1])?;
        table.row(&[
            *t,
            a[0].re,
            a[0].im,
            a[1].re,
            a[1].im,
            a[0].norm_sqr() + a[1].norm_sqr(),
            s.imbalance(),
            s.relative_phase(),
        ]);
    }
    let mut out = Outcome::default();
    out.artifacts.table("onebit.csv", &table);
    out.put("max_norm_drift", max_abs(traj.iter().map(|(_, a)| a[0].norm_sqr() + a[1].norm_sqr() - 1.0)));
    out.put("time_averaged_imbalance", time_averaged_imbalance(&state, &p, t_final, dt)?);
    let last = traj.last().expect("trajectory has the initial point").1;
    out.put("final_imbalance", last[0].norm_sqr() - last[1].norm_sqr());
    if p.omega != 0.0 {
        out.put("lambda", p.kappa_n / (2.0 * p.omega.abs()));
    }
    Ok(out)
}

fn twobit_params(cfg: &RunConfig) -> Res<TwoBitParams> {
    let params = condensate(cfg)?;
    let m = |k: &str| cfg.num_or("modes", k, 0.0);
    let mode = CondensateMode { e_onsite: m("e_onsite"), omega: m("omega"), g: params.g, chi: m("chi") };
    let (mu, nu) = ((m("mu1"), m("mu2")), (m("nu1"), m("nu2")));
    Ok(match cfg.ident("modes", "coefficient_mode") {
        Some("derived") => TwoBitParams::derived(
            mode,
            mode,
            params.n_particles,
            DerivedTensors::localized_from_scalars(mode.chi, mode.chi, mu, nu),
        ),
        _ => TwoBitParams::as_printed(mode, mode, params.n_particles, mu, nu),
    })
}

fn twobit_run(cfg: &RunConfig) -> Res<Outcome> {
    let p = twobit_params(cfg)?;
    let (dt, t_final, stride) = ode_steps(cfg)?;
    let state = pair_initial(cfg)?;
    let traj = two_bit_trajectory(&state, &p, t_final, dt, stride)?;
    let mut cols: Vec<&str> = vec!["t"];
    cols.extend(MAT_COLUMNS);
    cols.extend(["det2", "phase00", "phase01", "phase10", "phase11"]);
    let mut table = Table::new(&cols);
    for (t, m) in &traj {
        let mut row = vec![*t];
        row.extend(mat_cells(m));
        row.push(det2(m));
        row.extend([m[0][0].arg(), m[0][1].arg(), m[1][0].arg(), m[1][1].arg()]);
        table.row(&row);
    }
    let mut out = Outcome::default();
    out.artifacts.table("twobit.csv", &table);
    let norm = |m: &Mat2| m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>();
    out.put("max_norm_drift", max_abs(traj.iter().map(|(_, m)| norm(m) - 1.0)));
    out.put("initial_det2", entanglement_measure(&state));
    out.put("max_det2", traj.iter().map(|(_, m)| det2(m)).fold(0.0, f64::max));
    out.put("final_det2", det2(&traj.last().expect("trajectory has the initial point").1));
    if p.a.omega == 0.0 && p.b.omega == 0.0 {
        let rate = entangling_phase_rate(&p, &state)?;
        out.put("entangling_rate", rate);
        if let Some(t) = predicted_entanglement_time(&state, rate, ENTANGLEMENT_LEVEL) {
            out.put("predicted_entanglement_time", t);
        }
        let mut worst: f64 = 0.0;
        for (t, m) in &traj {
            let exact = conditional_phase_closed_form(&p, &state, *t)?;
            for n in 0..2 {
                for k in 0..2 {
                    worst = worst.max((m[n][k] - exact.get(n, k)).norm());
                }
            }
        }
        out.put("closed_form_max_deviation", worst);
    }
    Ok(out)
}

fn density_table(field: &PairField) -> Table {
    let (ga, gb) = (field.grid_a(), field.grid_b());
    let nb = gb.len();
    let mut table = Table::new(&["i", "j", "x_a", "x_b", "density"]);
    for i in 0..ga.len() {
        for j in 0..nb {
            let rho = field.components().iter().map(|c| c[i * nb + j].norm_sqr()).sum::<f64>();
            table.indexed_row(&[i, j], &[ga.x(i), gb.x(j), rho]);
        }
    }
    table
}

fn spectrum_json(spectrum: &[f64]) -> String {
    let values: Vec<Json> = spectrum.iter().map(|s| finite_or_null(*s)).collect();
    let mut s = serde_json::to_string_pretty(&Json::Array(values)).expect("json arrays serialize");
    s.push('\n');
    s
}

fn pairfield_run(cfg: &RunConfig) -> Res<Outcome> {
    let g = grid(cfg)?;
    let pot = potential(cfg)?;
    let params = condensate(cfg)?;
    let (ic, t_final) = integrator(cfg)?;
    let mp = localized_modes(&pot, &g)?;
    let mut pp = PairParams::new(pot.clone(), pot.clone(), params.n_particles);
    (pp.g_a, pp.g_b) = (params.g, params.g);
    pp.kernel = kernel(cfg)?;
    pp.self_interaction = cfg.bool_or("kernel", "self_interaction", true);
    let start = pair_initial(cfg)?;
    let initial = reconstruct_from_modes(&start, &mp, &mp);

    let mut cols: Vec<&str> = vec!["t", "norm", "energy", "schmidt_defect", "projection_residual"];
    cols.extend(MAT_COLUMNS);
    cols.push("det2");
    let mut table = Table::new(&cols);
    let (mut norms, mut energies, mut defects, mut residuals, mut dets) = (vec![], vec![], vec![], vec![], vec![]);
    let mut last: Option<PairField> = None;
    evolve_pair_observed(&initial, &pp, &ic, t_final, |t, f| {
        let proj = project_to_modes(f, &mp, &mp)?;
        let schmidt = schmidt_defect(f)?;
        let (n, e) = (f.norm_sqr(), pair_energy(f, &pp)?);
        let m = *proj.state.matrix();
        let mut row = vec![t, n, e, schmidt.defect, proj.residual];
        row.extend(mat_cells(&m));
        row.push(det2(&m));
        table.row(&row);
        norms.push(n);
        energies.push(e);
        defects.push(schmidt.defect);
        residuals.push(proj.residual);
        dets.push(det2(&m));
        last = Some(f.clone());
        Ok(())
    })?;
    let last = last.expect("observer sees the initial field");
    let mut out = Outcome::default();
    out.artifacts.table("pairfield.csv", &table);
    out.artifacts.table("pair_density.csv", &density_table(&last));
    out.artifacts.add("schmidt.json", spectrum_json(&schmidt_defect(&last)?.spectrum));
    out.put("omega", mp.omega());
    out.put("max_norm_drift", max_abs(norms.iter().map(|n| n - 1.0)));
    out.put("max_energy_drift", relative_drift(&energies));
    out.put("max_schmidt_defect", max_abs(defects.iter().copied()));
    out.put("max_projection_residual", max_abs(residuals.iter().copied()));
    out.put("max_det2", max_abs(dets.iter().copied()));
    out.couplings = Some(CouplingSet::derive(&mp, Some(&mp), pp.kernel.as_ref(), &params)?);
    Ok(out)
}

fn spinor_couplings(cfg: &RunConfig) -> (f64, f64, f64) {
    (cfg.num_or("spinor", "g00", 0.0), cfg.num_or("spinor", "g01", 0.0), cfg.num_or("spinor", "g11", 0.0))
}

fn pairfield_spinor_run(cfg: &RunConfig) -> Res<Outcome> {
    let g = grid(cfg)?;
    let params = condensate(cfg)?;
    let (ic, t_final) = integrator(cfg)?;
    let trap = trap(cfg);
    let (chi0, _) = trap_ground_states(&trap, &g)?;
    let pots = [trap.potential(0), trap.potential(1)];
    let mut sp = SpinorPairParams::new(pots.clone(), pots, params.n_particles);
    let (g00, g01, g11) = spinor_couplings(cfg);
    sp.g_a = [[g00, g01], [g01, g11]];
    sp.g_b = sp.g_a;
    sp.kernel = kernel(cfg)?;
    sp.self_interaction = cfg.bool_or("kernel", "self_interaction", false);
    let start = pair_initial(cfg)?;
    let initial = PairField::spinor_product(&chi0, &chi0, *start.matrix());
    let traj = evolve_pair_spinor(&initial, &sp, &ic, t_final)?;
    let mut table = Table::new(&["t", "norm", "energy", "n00", "n01", "n10", "n11"]);
    for (t, o) in traj.times.iter().zip(&traj.observables) {
        let mut row = vec![*t, o.norm, o.energy];
        row.extend(&o.component_norms);
        table.row(&row);
    }
    let energies: Vec<f64> = traj.observables.iter().map(|o| o.energy).collect();
    let last = traj.observables.last().expect("trajectory has the initial snapshot");
    let mut out = Outcome::default();
    out.artifacts.table("pairfield_spinor.csv", &table);
    out.artifacts
        .table("pair_density.csv", &density_table(traj.fields.last().expect("trajectory has the initial snapshot")));
    out.put("max_norm_drift", max_abs(traj.observables.iter().map(|o| o.norm - 1.0)));
    out.put("max_energy_drift", relative_drift(&energies));
    for (name, v) in ["final_n00", "final_n01", "final_n10", "final_n11"].iter().zip(&last.component_norms) {
        out.put(name, *v);
    }
    Ok(out)
}

fn spinor_run(cfg: &RunConfig) -> Res<Outcome> {
    let g = grid(cfg)?;
    let params = condensate(cfg)?;
    let (ic, t_final) = integrator(cfg)?;
    let (g00, g01, g11) = spinor_couplings(cfg);
    let p = SpinorParams {
        rabi: cfg.num_or("spinor", "rabi", 0.0),
        detuning: cfg.num_or("spinor", "detuning", 0.0),
        g00,
        g01,
        g11,
        trap: trap(cfg),
        n_particles: params.n_particles,
    };
    let (chi0, _) = trap_ground_states(&p.trap, &g)?;
    let internal = qubit_initial(cfg, (1.0, 0.0))?;
    let traj = evolve_spinor(&SpinorField::from_internal(&chi0, &internal), &p, &ic, t_final)?;
    let mut table = Table::new(&["t", "norm", "energy", "pop0", "pop1", "re_overlap", "im_overlap"]);
    for (t, o) in traj.times.iter().zip(&traj.observables) {
        table.row(&[*t, o.norm, o.energy, o.populations[0], o.populations[1], o.overlap.re, o.overlap.im]);
    }
    let energies: Vec<f64> = traj.observables.iter().map(|o| o.energy).collect();
    let pop1: Vec<f64> = traj.observables.iter().map(|o| o.populations[1]).collect();
    let mut out = Outcome::default();
    out.artifacts.table("spinor.csv", &table);
    out.put("max_norm_drift", max_abs(traj.observables.iter().map(|o| o.norm - 1.0)));
    out.put("max_energy_drift", relative_drift(&energies));
    out.put("max_pop1", pop1.iter().cloned().fold(0.0, f64::max));
    out.put("mode_overlap_factor", mode_overlap_factor(&p.trap, &g)?);
    if let (Some(&t_half), true) = (half_crossings(&traj.times, &pop1).first(), p.rabi != 0.0) {
        out.put("first_half_crossing", t_half);
        out.put("effective_rabi_ratio_sq", (0.5 * PI / (p.rabi.abs() * t_half)).powi(2));
    }
    Ok(out)
}

fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        _ => (0..count).map(|i| start + (stop - start) * i as f64 / (count - 1) as f64).collect(),
    }
}

fn sweep_run(cfg: &RunConfig) -> Res<Outcome> {
    let mut scan = SelfTrappingScan::standard(cfg.num_or("integrator", "dt", 0.0));
    scan.omega = cfg.num_or("sweep", "omega", scan.omega);
    scan.t_window = cfg.num_or("sweep", "t_window", scan.t_window);
    scan.threshold = cfg.num_or("sweep", "threshold", scan.threshold);
    if cfg.has_section("initial") {
        scan.initial = qubit_initial(cfg, (1.0, 0.0))?;
    }
    if scan.omega == 0.0 {
        return Err(CoreError::InvalidParameter("sweep omega must be nonzero".into()));
    }
    let steps = cfg.int_or("sweep", "steps", 0);
    if steps < 2 {
        return Err(CoreError::InvalidParameter(format!("sweep needs at least 2 steps, got {steps}")));
    }
    let lambdas = linspace(cfg.num_or("sweep", "start", 0.0), cfg.num_or("sweep", "stop", 0.0), steps);
    let metrics = parallel_map(&lambdas, |l| scan.metric(l))?;

    let mut table = Table::new(&["param", "metric"]);
    for (l, m) in lambdas.iter().zip(&metrics) {
        table.row(&[*l, *m]);
    }
    let mut out = Outcome::default();
    out.artifacts.table("sweep.csv", &table);
    out.put("points", steps as f64);
    out.put("threshold", scan.threshold);
    out.put("max_metric", metrics.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    out.put("min_metric", metrics.iter().cloned().fold(f64::INFINITY, f64::min));
    let bracket = metrics.windows(2).position(|w| w[0] <= scan.threshold && w[1] > scan.threshold);
    if let Some(i) = bracket {
        let tol = cfg.num_or("sweep", "bisect_tol", 1e-4);
        out.put("lambda_c", scan.critical_lambda(lambdas[i], lambdas[i + 1], tol)?);
    }
    Ok(out)
}

/// Evaluates `f` on every input using scoped threads; results keep input order.
fn parallel_map<F>(inputs: &[f64], f: F) -> Res<Vec<f64>>
where
    F: Fn(f64) -> Res<f64> + Sync,
{
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(inputs.len()).max(1);
    let chunk = inputs.len().div_ceil(workers);
    let mut slots: Vec<Res<f64>> = Vec::with_capacity(inputs.len());
    std::thread::scope(|s| {
        let handles: Vec<_> = inputs
            .chunks(chunk.max(1))
            .map(|part| s.spawn(|| part.iter().map(|&x| f(x)).collect::<Vec<_>>()))
            .collect();
        for h in handles {
            slots.extend(h.join().expect("sweep worker panicked"));
        }
    });
    slots.into_iter().collect()
}

fn dispatch(cfg: &RunConfig) -> Res<Outcome> {
    match cfg.experiment {
        Experiment::GroundState => ground_state_run(cfg),
        Experiment::EvolveGpe => evolve_gpe_run(cfg),
        Experiment::Modes => modes_run(cfg),
        Experiment::OneBit => onebit_run(cfg),
        Experiment::TwoBit => twobit_run(cfg),
        Experiment::PairField => pairfield_run(cfg),
        Experiment::PairFieldSpinor => pairfield_spinor_run(cfg),
        Experiment::Spinor => spinor_run(cfg),
        Experiment::Sweep => sweep_run(cfg),
    }
}

/// Runs the configured experiment and writes its artifacts plus `summary.json` to `out_dir`.
/// Nothing is written if the run fails.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary, CliError> {
    let outcome = dispatch(cfg).map_err(|source| CliError::Numerical { experiment: cfg.experiment, source })?;
    let mut files = outcome.artifacts.names();
    files.push("summary.json".into());
    files.sort();
    let summary = RunSummary {
        experiment: cfg.experiment,
        config: cfg.clone(),
        couplings: outcome.couplings,
        headline: outcome.headline,
        files,
    };
    let mut artifacts = outcome.artifacts;
    let mut text = serde_json::to_string_pretty(&summary.to_json()).expect("summary serializes");
    text.push('\n');
    artifacts.add("summary.json", text);
    artifacts.write_all(out_dir)?;
    Ok(summary)
}

/// Checks the parameter values that can be checked without running a solver.
pub fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    let check = || -> Res<()> {
        if cfg.has_section("grid") {
            grid(cfg)?;
        }
        if cfg.has_section("potential") {
            potential(cfg)?;
            if cfg.ident("potential", "kind") == Some("displaced_harmonic") {
                bec_qubit_core::spinor::displaced_potentials(&trap(cfg), &grid(cfg)?)?;
            }
        }
        condensate(cfg)?;
        kernel(cfg)?;
        match cfg.experiment {
            Experiment::GroundState | Experiment::Modes => {}
            Experiment::OneBit | Experiment::TwoBit => {
                ode_steps(cfg)?;
            }
            Experiment::Sweep => {
                let dt = cfg.num_or("integrator", "dt", 0.0);
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(CoreError::InvalidParameter(format!("dt must be positive, got {dt}")));
                }
            }
            _ => {
                integrator(cfg)?;
            }
        }
        match cfg.experiment {
            Experiment::OneBit | Experiment::Spinor | Experiment::Sweep => {
                qubit_initial(cfg, (1.0, 0.0))?;
            }
            Experiment::TwoBit | Experiment::PairField | Experiment::PairFieldSpinor => {
                pair_initial(cfg)?;
            }
            _ => {}
        }
        Ok(())
    };
    check().map_err(|source| CliError::Numerical { experiment: cfg.experiment, source })
}
