mod common;

use std::f64::consts::PI;

use bec_qubit_core::gpe::{
    chemical_potential, energy_functional, evolve, ground_state, ground_state_with, odlro_residual,
    odlro_sample_indices, scattering_to_coupling, well_populations, CondensateParams, PotentialSpec, Trajectory,
};
use bec_qubit_core::modes::{localized_modes, quartic_overlap};
use bec_qubit_core::numerics::{stationary_residual, ComplexField, Grid1D, IntegratorConfig, RelaxOptions, Scheme};
use bec_qubit_core::{Error, C64};
use proptest::prelude::*;

const HARMONIC: PotentialSpec = PotentialSpec::Harmonic { omega: 1.0 };

fn grid() -> Grid1D {
    Grid1D::symmetric(128, 10.0).unwrap()
}

#[test]
fn scattering_conversion() {
    assert_eq!(scattering_to_coupling(0.0, 1.0), 0.0);
    assert!((scattering_to_coupling(1.0, 1.0) - 4.0 * PI).abs() < 1e-15);
    assert!((scattering_to_coupling(1.0, 2.0) - 2.0 * PI).abs() < 1e-15);
}

#[test]
fn params_validation() {
    assert!(CondensateParams::new(1.0, 0.0).is_err());
    assert!(CondensateParams::new(f64::INFINITY, 1.0).is_err());
    assert_eq!(CondensateParams::new(-0.5, 4.0).unwrap().gn(), -2.0);
}

#[test]
fn potentials_sample_and_validate() {
    let g = Grid1D::symmetric(16, 4.0).unwrap();
    let dw = PotentialSpec::DoubleWell { v0: 3.0, d: 2.0 };
    assert_eq!(dw.value(2.0), Some(0.0));
    assert_eq!(dw.value(0.0), Some(3.0));
    assert_eq!(PotentialSpec::DisplacedHarmonic { omega_z: 4.0, z_n: 1.0 }.value(2.0), Some(2.0));
    assert!(PotentialSpec::DoubleWell { v0: -1.0, d: 2.0 }.sample(&g).is_err());
    assert!(PotentialSpec::Tabulated(vec![0.0; 3]).sample(&g).is_err());
    assert_eq!(PotentialSpec::Tabulated(vec![1.0; 16]).sample(&g).unwrap(), vec![1.0; 16]);
}

#[test]
fn harmonic_ground_state() {
    let (phi, mu) = ground_state(&HARMONIC, &CondensateParams::linear(), &grid()).unwrap();
    assert!((mu - 0.5).abs() <= 1e-6);
    let e = energy_functional(&phi, &HARMONIC, &CondensateParams::linear()).unwrap();
    assert!((e - 0.5).abs() <= 1e-6);
    let exact = ComplexField::from_real_fn(grid(), |x| (-x * x / 2.0).exp() / PI.powf(0.25));
    assert!(phi.max_abs_diff(&exact) <= 1e-5);
}

#[test]
fn double_well_ground_state_is_symmetric() {
    let g = Grid1D::symmetric(256, 8.5).unwrap();
    let (phi, _) =
        ground_state(&PotentialSpec::DoubleWell { v0: 10.0, d: 4.0 }, &CondensateParams::linear(), &g).unwrap();
    assert!(phi.max_abs_diff(&phi.mirrored()) <= 1e-8);
    let (l, r) = well_populations(&phi, 0.0);
    assert!((l - 0.5).abs() <= 1e-9 && (r - 0.5).abs() <= 1e-9);
    let rho = phi.density();
    let peak = (0..g.len()).max_by(|&a, &b| rho[a].total_cmp(&rho[b])).unwrap();
    assert!((g.x(peak).abs() - 4.0).abs() < 0.2);
}

#[test]
fn interacting_ground_state_matches_dense_oracle() {
    let g = grid();
    let v = HARMONIC.sample(&g).unwrap();
    for gn in [1.0, 10.0] {
        let p = CondensateParams::new(gn, 1.0).unwrap();
        let (phi, mu) = ground_state(&HARMONIC, &p, &g).unwrap();
        let oracle = common::dense_ground_state(&g, &v, gn);
        assert!((mu - oracle.mu).abs() <= 1e-5, "gN={gn}: {mu} vs {}", oracle.mu);
        let e = energy_functional(&phi, &HARMONIC, &p).unwrap();
        assert!((e - oracle.energy).abs() <= 1e-5);
        assert!(mu > 0.5);
    }
}

#[test]
fn thomas_fermi_underestimates_mu_in_one_dimension() {
    let gn: f64 = 10.0;
    let (_, mu) = ground_state(&HARMONIC, &CondensateParams::new(gn, 1.0).unwrap(), &grid()).unwrap();
    let mu_tf = (3.0 * gn / (4.0 * 2f64.sqrt())).powf(2.0 / 3.0);
    assert!(mu > mu_tf && mu < 1.05 * mu_tf, "{mu} {mu_tf}");
}

#[test]
fn stationary_identities() {
    let g = grid();
    let p = CondensateParams::new(2.5, 2.0).unwrap();
    let (phi, mu) = ground_state(&HARMONIC, &p, &g).unwrap();
    let e = energy_functional(&phi, &HARMONIC, &p).unwrap();
    let chi = quartic_overlap(&phi);
    assert!((mu - e - 0.5 * p.gn() * chi).abs() <= 1e-6);
    assert!((chemical_potential(&phi, &HARMONIC, &p).unwrap() - mu).abs() <= 1e-10);
    let v = HARMONIC.sample(&g).unwrap();
    assert!(stationary_residual(&phi, &v, p.gn(), mu) <= 1e-6);
}

#[test]
fn linear_energy_matches_dense_diagonalization() {
    let g = Grid1D::symmetric(128, 7.0).unwrap();
    let dw = PotentialSpec::DoubleWell { v0: 4.0, d: 2.0 };
    let (phi, _) = ground_state(&dw, &CondensateParams::linear(), &g).unwrap();
    let e = energy_functional(&phi, &dw, &CondensateParams::linear()).unwrap();
    let oracle = common::dense_ground_state(&g, &dw.sample(&g).unwrap(), 0.0);
    assert!((e - oracle.energy).abs() <= 1e-6, "{e} {}", oracle.energy);
}

#[test]
fn ground_state_residual_check_fires() {
    let opts = RelaxOptions { tol: 1e-3, consecutive: 1, ..RelaxOptions::default() };
    let trial_far = PotentialSpec::Harmonic { omega: 0.2 };
    let r = ground_state_with(&trial_far, &CondensateParams::new(5.0, 1.0).unwrap(), &grid(), &opts);
    assert!(matches!(r, Err(Error::ResidualTooLarge { .. })), "{r:?}");
}

#[test]
fn well_population_examples() {
    let g = grid();
    let sym = ComplexField::from_real_fn(g, |x| (-x * x).exp()).normalized().unwrap();
    let (l, r) = well_populations(&sym, 0.0);
    assert!((l - 0.5).abs() < 1e-14 && (r - 0.5).abs() < 1e-14);
    let left = ComplexField::from_real_fn(g, |x| (-(x + 5.0).powi(2) * 2.0).exp()).normalized().unwrap();
    let (l, r) = well_populations(&left, 0.0);
    assert!((l - 1.0).abs() <= 1e-12 && r.abs() <= 1e-12);

    let dg = Grid1D::symmetric(128, 7.0).unwrap();
    let mp = localized_modes(&PotentialSpec::DoubleWell { v0: 4.0, d: 2.0 }, &dg).unwrap();
    let (l, _) = well_populations(&mp.phi0, 0.0);
    assert!(l >= 1.0 - mp.leakage - 1e-12);
}

#[test]
fn eigenstate_observables_are_static() {
    let g = grid();
    let (phi, _) = ground_state(&HARMONIC, &CondensateParams::linear(), &g).unwrap();
    let traj = evolve(&phi, &HARMONIC, &CondensateParams::linear(), &IntegratorConfig::new(1e-3, 500), 10.0).unwrap();
    assert_eq!(traj.len(), 21);
    let o0 = traj.observables[0];
    for o in &traj.observables {
        assert!((o.norm - o0.norm).abs() <= 1e-8);
        assert!((o.energy - o0.energy).abs() <= 1e-8);
        assert!((o.mean_x - o0.mean_x).abs() <= 1e-8);
        assert!((o.p_left - o0.p_left).abs() <= 1e-8);
    }
}

#[test]
fn interacting_evolution_conserves_norm_and_energy() {
    let g = grid();
    let p = CondensateParams::new(3.0, 1.0).unwrap();
    let init = ComplexField::from_real_fn(g, |x| (-(x - 1.0).powi(2) / 1.5).exp()).normalized().unwrap();
    let traj = evolve(&init, &HARMONIC, &p, &IntegratorConfig::new(1e-3, 1000), 10.0).unwrap();
    let e0 = traj.observables[0].energy;
    for o in &traj.observables {
        assert!((o.norm - 1.0).abs() <= 1e-10);
        assert!(((o.energy - e0) / e0).abs() <= 1e-6);
        assert!((o.p_left + o.p_right - o.norm).abs() < 1e-14);
    }
}

#[test]
fn even_data_stays_even() {
    let g = Grid1D::symmetric(128, 7.0).unwrap();
    let dw = PotentialSpec::DoubleWell { v0: 4.0, d: 2.0 };
    let init = ComplexField::from_real_fn(g, |x| (-(x * x - 4.0).powi(2) / 4.0).exp() * (1.0 + 0.3 * x.cos()))
        .normalized()
        .unwrap();
    let traj =
        evolve(&init, &dw, &CondensateParams::new(2.0, 1.0).unwrap(), &IntegratorConfig::new(1e-3, 1000), 5.0).unwrap();
    for f in &traj.fields {
        assert!(f.max_abs_diff(&f.mirrored()) <= 1e-8);
    }
}

#[test]
fn rk4_scheme_agrees_with_split_step() {
    let g = Grid1D::symmetric(64, 8.0).unwrap();
    let p = CondensateParams::new(1.0, 1.0).unwrap();
    let init = ComplexField::from_real_fn(g, |x| (-(x - 0.5).powi(2)).exp()).normalized().unwrap();
    let split = evolve(&init, &HARMONIC, &p, &IntegratorConfig::new(1e-4, 1000), 0.5).unwrap();
    let mut cfg = IntegratorConfig::new(1e-4, 1000);
    cfg.scheme = Scheme::Rk4;
    let rk = evolve(&init, &HARMONIC, &p, &cfg, 0.5).unwrap();
    assert!(split.fields.last().unwrap().max_abs_diff(rk.fields.last().unwrap()) < 1e-6);
}

/// Times where `p_left - 0.5` changes sign, by linear interpolation.
fn half_crossings(times: &[f64], p: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 1..p.len() {
        let (a, b) = (p[k - 1] - 0.5, p[k] - 0.5);
        if a == 0.0 || a * b < 0.0 {
            out.push(times[k - 1] + (times[k] - times[k - 1]) * a / (a - b));
        }
    }
    out
}

#[test]
fn josephson_period_matches_two_mode_prediction() {
    let g = Grid1D::symmetric(128, 7.0).unwrap();
    let dw = PotentialSpec::DoubleWell { v0: 4.0, d: 2.0 };
    let mp = localized_modes(&dw, &g).unwrap();
    assert!(mp.epsilon_overlap < 1e-3);
    let omega = mp.omega().abs();
    let chi = quartic_overlap(&mp.phi0);
    let p = CondensateParams::new(0.05 * omega / chi, 1.0).unwrap();
    let period = PI / omega;
    let traj = evolve(&mp.raw0, &dw, &p, &IntegratorConfig::new(0.01, 20), 1.1 * period).unwrap();
    let pl: Vec<f64> = traj.observables.iter().map(|o| o.p_left).collect();
    let c = half_crossings(&traj.times, &pl);
    assert!(c.len() >= 2);
    let measured = 2.0 * (c[1] - c[0]);
    assert!(((measured - period) / period).abs() <= 0.05, "{measured} vs {period}");
}

#[test]
fn odlro_sample_is_central() {
    let idx = odlro_sample_indices(128);
    assert_eq!(idx, [36, 44, 52, 60, 68, 76, 84, 92]);
}

#[test]
fn odlro_residual_vanishes_on_stationary_states() {
    let g = grid();
    let times: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
    let lin = CondensateParams::linear();
    let (phi, mu) = ground_state(&HARMONIC, &lin, &g).unwrap();
    let traj = Trajectory::stationary(&phi, mu, &times, &HARMONIC, &lin).unwrap();
    assert!(odlro_residual(&traj, &HARMONIC, &lin).unwrap() <= 1e-8);

    let p = CondensateParams::new(1.0, 1.0).unwrap();
    let (phi, mu) = ground_state(&HARMONIC, &p, &g).unwrap();
    let traj = Trajectory::stationary(&phi, mu, &times, &HARMONIC, &p).unwrap();
    assert!(odlro_residual(&traj, &HARMONIC, &p).unwrap() <= 1e-6);
}

#[test]
fn odlro_residual_needs_three_snapshots() {
    let g = grid();
    let lin = CondensateParams::linear();
    let (phi, mu) = ground_state(&HARMONIC, &lin, &g).unwrap();
    let traj = Trajectory::stationary(&phi, mu, &[0.0, 0.1], &HARMONIC, &lin).unwrap();
    assert_eq!(odlro_residual(&traj, &HARMONIC, &lin), Err(Error::TooFewSnapshots(2)));
}

fn oscillation_residual(dt: f64) -> f64 {
    let g = Grid1D::symmetric(128, 7.0).unwrap();
    let dw = PotentialSpec::DoubleWell { v0: 4.0, d: 2.0 };
    let mp = localized_modes(&dw, &g).unwrap();
    let p = CondensateParams::new(1.0, 1.0).unwrap();
    let init = mp.phi0.combine(C64::new(0.8, 0.0), &mp.phi1, C64::new(0.6, 0.0));
    let traj = evolve(&init, &dw, &p, &IntegratorConfig::new(dt, 10), 0.5).unwrap();
    odlro_residual(&traj, &dw, &p).unwrap()
}

#[test]
fn odlro_residual_converges_at_second_order() {
    let r1 = oscillation_residual(1e-3);
    let r2 = oscillation_residual(5e-4);
    assert!(r1 <= 1e-3, "{r1}");
    assert!(r1 / r2 >= 3.5, "{r1} {r2}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn evolution_preserves_norm(a in -1.0f64..1.0, b in -1.0f64..1.0, x0 in -2.0f64..2.0, gn in 0.0f64..10.0) {
        let g = Grid1D::symmetric(64, 8.0).unwrap();
        let init = ComplexField::from_fn(g, |x| C64::new(1.0 + a * x, b * x) * (-(x - x0).powi(2)).exp()).normalized().unwrap();
        let traj = evolve(&init, &HARMONIC, &CondensateParams::new(gn, 1.0).unwrap(), &IntegratorConfig::new(1e-3, 250), 1.0).unwrap();
        for o in &traj.observables {
            prop_assert!((o.norm - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn global_phase_commutes_with_evolution(alpha in 0.0f64..std::f64::consts::TAU, gn in 0.0f64..5.0) {
        let g = Grid1D::symmetric(64, 8.0).unwrap();
        let init = ComplexField::from_real_fn(g, |x| (-(x - 0.7).powi(2)).exp()).normalized().unwrap();
        let p = CondensateParams::new(gn, 1.0).unwrap();
        let cfg = IntegratorConfig::new(1e-3, 500);
        let ph = C64::from_polar(1.0, alpha);
        let a = evolve(&init.scaled(ph), &HARMONIC, &p, &cfg, 0.5).unwrap();
        let b = evolve(&init, &HARMONIC, &p, &cfg, 0.5).unwrap();
        prop_assert!(a.fields.last().unwrap().max_abs_diff(&b.fields.last().unwrap().scaled(ph)) <= 1e-12);
    }
}
